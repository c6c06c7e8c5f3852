// Copyright 2026 The infohier Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Abstention detection. A local phrase lexicon works offline; a remote
// classifier speaks a single-turn JSON protocol over HTTP POST:
//
//   request:  {"text": "<candidate>", "prompt": "<filled template>"}
//   response: {"label": "abstain" | "answer"}
//
// Bare "yes"/"no" replies (JSON label or plain body) are accepted as well.

#ifndef INFOHIER_ABSTAIN_HPP_
#define INFOHIER_ABSTAIN_HPP_

#include <chrono>
#include <cstddef>
#include <fstream>
#include <memory>
#include <optional>
#include <semaphore>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "httplib.h"
#include "json.hpp"

#include "infohier/core.hpp"
#include "infohier/error.hpp"
#include "infohier/parallel.hpp"

namespace infohier {

enum class AbstainMethod { kLexicon, kClient };
enum class AbstainMode { kLexicon, kClient, kClientWithLexiconFallback };

inline std::string_view to_string(AbstainMethod m) {
  return m == AbstainMethod::kLexicon ? "lexicon" : "client";
}

inline std::string_view to_string(AbstainMode m) {
  switch (m) {
    case AbstainMode::kLexicon:
      return "lexicon";
    case AbstainMode::kClient:
      return "client";
    case AbstainMode::kClientWithLexiconFallback:
      return "client_with_lexicon_fallback";
  }
  return "lexicon";
}

inline AbstainMode parse_abstain_mode(std::string_view s) {
  if (s == "lexicon") return AbstainMode::kLexicon;
  if (s == "client") return AbstainMode::kClient;
  if (s == "client_with_lexicon_fallback") {
    return AbstainMode::kClientWithLexiconFallback;
  }
  throw ConfigError("unknown abstain mode: " + std::string(s));
}

struct AbstainVerdict {
  bool is_abstain = false;
  AbstainMethod method = AbstainMethod::kLexicon;
  std::optional<std::string> matched_phrase;  // lexicon hits only
};

// The endpoint could not be reached (after retries) or answered non-200.
class TransportError : public Error {
 public:
  using Error::Error;
};

// The endpoint replied, but not with a recognizable label.
class ClassificationError : public Error {
 public:
  ClassificationError(const std::string& message, std::string raw)
      : Error(message), raw_(std::move(raw)) {}
  const std::string& raw_response() const { return raw_; }

 private:
  std::string raw_;
};

// ---------------------------------------------------------------------------
// Lexicon

inline const std::vector<std::string>& default_abstain_phrases() {
  static const std::vector<std::string> phrases = {
      "i don't know",      "i do not know",      "i'm not sure",
      "i am not sure",     "cannot answer",      "can't answer",
      "unable to answer",  "no information",     "i have no idea",
      "not enough information", "i don't have enough information",
  };
  return phrases;
}

namespace detail {

// Lexicon matching ignores case, punctuation and typographic apostrophes
// regardless of the caller's MatchPolicy.
inline std::string lexicon_normalize(std::string_view text) {
  std::string s(text);
  for (std::size_t pos; (pos = s.find("\xE2\x80\x99")) != std::string::npos;) {
    s.replace(pos, 3, "'");
  }
  for (std::size_t pos; (pos = s.find("\xE2\x80\x98")) != std::string::npos;) {
    s.replace(pos, 3, "'");
  }
  MatchPolicy policy;
  policy.strip_articles = false;
  return normalize(s, policy);
}

}  // namespace detail

class Lexicon {
 public:
  Lexicon() : Lexicon(default_abstain_phrases()) {}

  explicit Lexicon(const std::vector<std::string>& phrases) {
    for (const auto& p : phrases) {
      std::string n = detail::lexicon_normalize(p);
      if (!n.empty()) phrases_.push_back({p, std::move(n)});
    }
  }

  // One phrase per line; blank lines and lines starting with '#' are skipped.
  static Lexicon load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open lexicon file: " + path);
    std::vector<std::string> phrases;
    std::string line;
    while (std::getline(in, line)) {
      std::string t = detail::trim(line);
      if (t.empty() || t.front() == '#') continue;
      phrases.push_back(std::move(t));
    }
    return Lexicon(phrases);
  }

  // Empty or whitespace-only text counts as an abstention.
  AbstainVerdict detect(std::string_view text) const {
    AbstainVerdict v;
    v.method = AbstainMethod::kLexicon;
    const std::string padded = " " + detail::lexicon_normalize(text) + " ";
    if (padded == "  ") {
      v.is_abstain = true;
      return v;
    }
    for (const auto& [surface, normalized] : phrases_) {
      if (padded.find(" " + normalized + " ") != std::string::npos) {
        v.is_abstain = true;
        v.matched_phrase = surface;
        return v;
      }
    }
    return v;
  }

  std::size_t size() const { return phrases_.size(); }

 private:
  std::vector<std::pair<std::string, std::string>> phrases_;
};

inline AbstainVerdict detect_lexicon(std::string_view text,
                                     const Lexicon& lexicon = Lexicon()) {
  return lexicon.detect(text);
}

// ---------------------------------------------------------------------------
// Remote classifier

struct FewShotExample {
  std::string text;
  bool abstains = false;
};

inline constexpr std::string_view kDefaultClassifierPrompt =
    "Decide whether the response below declines to answer (abstains), for "
    "example by saying it does not know. Reply with \"yes\" if it abstains "
    "and \"no\" otherwise.\n\n{examples}Response: {text}\nAbstains:";

inline std::vector<FewShotExample> default_few_shot_examples() {
  return {
      {"I don't know the answer.", true},
      {"Canberra", false},
      {"I'm afraid I have no information about that person.", true},
      {"She was born in Blackwood, Wales.", false},
  };
}

struct ClassifierClientConfig {
  std::string endpoint;  // http://host[:port]/path
  std::string prompt_template = std::string(kDefaultClassifierPrompt);
  std::vector<FewShotExample> few_shot_examples = default_few_shot_examples();
  std::chrono::milliseconds timeout{10000};
  int max_retries = 2;
  int max_in_flight = 4;
};

struct Endpoint {
  std::string host;
  int port = 80;
  std::string path = "/";

  std::string origin() const { return "http://" + host + ":" + std::to_string(port); }
};

inline Endpoint parse_endpoint(std::string_view url) {
  constexpr std::string_view kScheme = "http://";
  if (url.substr(0, kScheme.size()) != kScheme) {
    throw ConfigError("endpoint must start with http://: " + std::string(url));
  }
  std::string_view rest = url.substr(kScheme.size());
  const std::size_t slash = rest.find('/');
  std::string_view authority = rest.substr(0, slash);
  Endpoint ep;
  if (slash != std::string_view::npos) ep.path = std::string(rest.substr(slash));
  const std::size_t colon = authority.rfind(':');
  if (colon != std::string_view::npos) {
    const std::string port(authority.substr(colon + 1));
    authority = authority.substr(0, colon);
    if (port.empty() || port.find_first_not_of("0123456789") != std::string::npos ||
        port.size() > 5 || std::stoi(port) == 0 || std::stoi(port) > 65535) {
      throw ConfigError("endpoint has an invalid port: " + std::string(url));
    }
    ep.port = std::stoi(port);
  }
  if (authority.empty()) throw ConfigError("endpoint has no host: " + std::string(url));
  ep.host = std::string(authority);
  return ep;
}

inline void validate(const ClassifierClientConfig& config) {
  parse_endpoint(config.endpoint);
  if (config.timeout.count() <= 0) throw ConfigError("client timeout must be positive");
  if (config.max_retries < 0) throw ConfigError("client max_retries must be >= 0");
  if (config.max_in_flight < 1) throw ConfigError("client max_in_flight must be >= 1");
}

// Fills "{examples}" with the rendered few-shot block and "{text}" with the
// candidate. Templates lacking "{examples}" get the block prepended.
inline std::string build_classifier_prompt(const ClassifierClientConfig& config,
                                           std::string_view text) {
  std::string examples;
  for (const auto& ex : config.few_shot_examples) {
    examples += "Response: " + ex.text + "\nAbstains: " + (ex.abstains ? "yes" : "no") +
                "\n\n";
  }
  std::string prompt = config.prompt_template;
  auto replace_all = [&prompt](std::string_view slot, std::string_view value) {
    bool found = false;
    for (std::size_t pos = 0; (pos = prompt.find(slot, pos)) != std::string::npos;) {
      prompt.replace(pos, slot.size(), value);
      pos += value.size();
      found = true;
    }
    return found;
  };
  if (!replace_all("{examples}", examples)) prompt = examples + prompt;
  if (!replace_all("{text}", text)) prompt += std::string(text);
  return prompt;
}

// Extracts the reply token: the "label" field of a JSON object, a JSON string
// or boolean, otherwise the whole body. Lowercased, trimmed, trailing
// punctuation dropped.
inline std::string parse_reply_token(const std::string& body) {
  std::string token = body;
  const auto parsed = nlohmann::json::parse(body, nullptr, false);
  if (!parsed.is_discarded()) {
    if (parsed.is_object() && parsed.contains("label") && parsed["label"].is_string()) {
      token = parsed["label"].get<std::string>();
    } else if (parsed.is_string()) {
      token = parsed.get<std::string>();
    } else if (parsed.is_boolean()) {
      token = parsed.get<bool>() ? "true" : "false";
    } else {
      return {};
    }
  }
  MatchPolicy policy;
  policy.strip_articles = false;
  return normalize(token, policy);
}

// Thread-safe HTTP client for the classifier protocol. Copies share one
// in-flight limit.
class ClassifierClient {
 public:
  explicit ClassifierClient(ClassifierClientConfig config)
      : config_(std::move(config)),
        endpoint_(parse_endpoint(config_.endpoint)),
        in_flight_(std::make_shared<std::counting_semaphore<>>(
            std::max(1, config_.max_in_flight))) {
    validate(config_);
  }

  const ClassifierClientConfig& config() const { return config_; }

  // Posts {"text", "prompt"} and returns the raw response body. Transport
  // failures and non-200 replies are retried up to max_retries times.
  std::string exchange(std::string_view text, std::string_view prompt) const {
    const nlohmann::json body = {{"text", text}, {"prompt", prompt}};
    const std::string payload = body.dump();
    std::string last_error;
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
      in_flight_->acquire();
      httplib::Result res = [&] {
        httplib::Client http(endpoint_.host, endpoint_.port);
        const auto ms = config_.timeout.count();
        http.set_connection_timeout(ms / 1000, (ms % 1000) * 1000);
        http.set_read_timeout(ms / 1000, (ms % 1000) * 1000);
        http.set_write_timeout(ms / 1000, (ms % 1000) * 1000);
        return http.Post(endpoint_.path, payload, "application/json");
      }();
      in_flight_->release();
      if (res && res->status == 200) return res->body;
      last_error = res ? "HTTP status " + std::to_string(res->status)
                       : httplib::to_string(res.error());
    }
    throw TransportError("classifier endpoint " + config_.endpoint + " failed after " +
                         std::to_string(config_.max_retries + 1) +
                         " attempt(s): " + last_error);
  }

  AbstainVerdict classify(std::string_view text) const {
    const std::string raw = exchange(text, build_classifier_prompt(config_, text));
    const std::string token = parse_reply_token(raw);
    AbstainVerdict v;
    v.method = AbstainMethod::kClient;
    if (token == "abstain" || token == "yes") {
      v.is_abstain = true;
    } else if (token == "answer" || token == "no") {
      v.is_abstain = false;
    } else {
      throw ClassificationError("unparseable classifier response", raw);
    }
    return v;
  }

 private:
  ClassifierClientConfig config_;
  Endpoint endpoint_;
  std::shared_ptr<std::counting_semaphore<>> in_flight_;
};

inline AbstainVerdict detect_client(std::string_view text, const ClassifierClient& client) {
  return client.classify(text);
}

// Mode dispatch. Fallback mode uses the lexicon whenever the client throws.
class AbstainDetector {
 public:
  explicit AbstainDetector(Lexicon lexicon = Lexicon())
      : mode_(AbstainMode::kLexicon), lexicon_(std::move(lexicon)) {}

  AbstainDetector(AbstainMode mode, Lexicon lexicon, std::optional<ClassifierClient> client)
      : mode_(mode), lexicon_(std::move(lexicon)), client_(std::move(client)) {
    if (mode_ != AbstainMode::kLexicon && !client_) {
      throw ConfigError("abstain mode " + std::string(to_string(mode_)) +
                        " requires a classifier client");
    }
  }

  AbstainMode mode() const { return mode_; }
  const Lexicon& lexicon() const { return lexicon_; }
  std::size_t max_in_flight() const {
    return client_ ? static_cast<std::size_t>(client_->config().max_in_flight) : 1;
  }

  AbstainVerdict detect(std::string_view text) const {
    switch (mode_) {
      case AbstainMode::kLexicon:
        return lexicon_.detect(text);
      case AbstainMode::kClient:
        return client_->classify(text);
      case AbstainMode::kClientWithLexiconFallback:
        try {
          return client_->classify(text);
        } catch (const Error&) {
          return lexicon_.detect(text);
        }
    }
    return lexicon_.detect(text);
  }

 private:
  AbstainMode mode_;
  Lexicon lexicon_;
  std::optional<ClassifierClient> client_;
};

inline AbstainVerdict detect(std::string_view text, const AbstainDetector& detector) {
  return detector.detect(text);
}

struct DetectOutcome {
  std::optional<AbstainVerdict> verdict;
  std::string error;
};

// Classifies a batch with up to max_in_flight concurrent requests; results
// are in input order.
inline std::vector<DetectOutcome> detect_batch(const std::vector<std::string>& texts,
                                               const AbstainDetector& detector) {
  return parallel_map(texts, detector.max_in_flight(), [&](const std::string& t) {
    DetectOutcome o;
    try {
      o.verdict = detector.detect(t);
    } catch (const Error& e) {
      o.error = e.what();
    }
    return o;
  });
}

}  // namespace infohier

#endif  // INFOHIER_ABSTAIN_HPP_
