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

// Run configuration: a plain-text file of `key = value` lines ('#' starts a
// comment) overridden by command-line values. String values may be written
// as JSON strings to keep surrounding spaces; list_delimiters takes a JSON
// array.
//
//   seed = 7
//   abstain_mode = client_with_lexicon_fallback
//   endpoint = http://127.0.0.1:8080/classify
//   list_delimiters = [",", ";", " and "]

#ifndef INFOHIER_CONFIG_HPP_
#define INFOHIER_CONFIG_HPP_

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "infohier/abstain.hpp"
#include "infohier/core.hpp"
#include "infohier/error.hpp"
#include "infohier/eval.hpp"
#include "infohier/formats.hpp"
#include "infohier/hierbuild.hpp"
#include "infohier/label.hpp"

namespace infohier {

struct RunConfig {
  std::uint64_t seed = 0;
  MatchPolicy match_policy;
  JoinTemplate join;
  AbstainMode abstain_mode = AbstainMode::kLexicon;
  ClassifierClientConfig client;  // used when abstain_mode involves the client
  std::string few_shot_file;
  std::string lexicon_file;
  std::string idk_text = std::string(IdkText::kDefault);
  std::size_t cap = kDefaultLevelCap;
  ReportFormat format = ReportFormat::kMarkdown;
  std::size_t workers = 1;
  bool strict = false;
};

using ConfigOverrides = std::map<std::string, std::string>;

namespace detail {

inline std::string config_string(const std::string& value) {
  if (!value.empty() && value.front() == '"') {
    const auto j = nlohmann::json::parse(value, nullptr, false);
    if (j.is_discarded() || !j.is_string()) throw ConfigError("malformed quoted string");
    return j.get<std::string>();
  }
  return value;
}

inline bool config_bool(const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("expected a boolean, got \"" + value + "\"");
}

inline std::uint64_t config_uint(const std::string& value) {
  if (value.empty() || value.find_first_not_of("0123456789") != std::string::npos) {
    throw ConfigError("expected a non-negative integer, got \"" + value + "\"");
  }
  try {
    return std::stoull(value);
  } catch (const std::exception&) {
    throw ConfigError("integer out of range: \"" + value + "\"");
  }
}

// Returns false for an unknown key.
inline bool set_config_key(RunConfig& c, const std::string& key, const std::string& raw) {
  const std::string v = config_string(raw);
  if (key == "seed") {
    c.seed = config_uint(v);
  } else if (key == "cap") {
    c.cap = config_uint(v);
    if (c.cap == 0) throw ConfigError("cap must be positive");
  } else if (key == "format") {
    c.format = parse_report_format(v);
  } else if (key == "workers") {
    c.workers = config_uint(v);
    if (c.workers == 0) throw ConfigError("workers must be positive");
  } else if (key == "strict") {
    c.strict = config_bool(v);
  } else if (key == "abstain_mode") {
    c.abstain_mode = parse_abstain_mode(v);
  } else if (key == "endpoint") {
    c.client.endpoint = v;
  } else if (key == "prompt_template") {
    c.client.prompt_template = v;
  } else if (key == "few_shot_file") {
    c.few_shot_file = v;
  } else if (key == "timeout_ms") {
    c.client.timeout = std::chrono::milliseconds(config_uint(v));
  } else if (key == "max_retries") {
    c.client.max_retries = static_cast<int>(config_uint(v));
  } else if (key == "max_in_flight") {
    c.client.max_in_flight = static_cast<int>(config_uint(v));
  } else if (key == "lexicon") {
    c.lexicon_file = v;
  } else if (key == "idk_text") {
    c.idk_text = v;
  } else if (key == "lowercase") {
    c.match_policy.lowercase = config_bool(v);
  } else if (key == "strip_articles") {
    c.match_policy.strip_articles = config_bool(v);
  } else if (key == "strip_punctuation") {
    c.match_policy.strip_punctuation = config_bool(v);
  } else if (key == "collapse_whitespace") {
    c.match_policy.collapse_whitespace = config_bool(v);
  } else if (key == "list_delimiters") {
    const auto j = nlohmann::json::parse(raw, nullptr, false);
    if (j.is_discarded() || !j.is_array()) {
      throw ConfigError("list_delimiters must be a JSON array of strings");
    }
    std::vector<std::string> delims;
    for (const auto& d : j) {
      if (!d.is_string() || d.get<std::string>().empty()) {
        throw ConfigError("list_delimiters must hold nonempty strings");
      }
      delims.push_back(d.get<std::string>());
    }
    c.match_policy.list_delimiters = std::move(delims);
  } else if (key == "join_separator") {
    c.join.separator = v;
  } else if (key == "join_last_separator") {
    c.join.last_separator = v;
  } else {
    return false;
  }
  return true;
}

}  // namespace detail

inline void validate(const RunConfig& c) {
  if (c.abstain_mode != AbstainMode::kLexicon) {
    if (c.client.endpoint.empty()) {
      throw ConfigError("abstain_mode " + std::string(to_string(c.abstain_mode)) +
                        " requires an endpoint");
    }
    validate(c.client);
  }
  if (c.match_policy.list_delimiters.empty()) {
    throw ConfigError("list_delimiters must not be empty");
  }
}

// Reads `path` (empty path: defaults only), applies `overrides` on top, and
// validates the result. Unknown keys are errors when strict, otherwise
// appended to `warnings`.
inline RunConfig load_config(const std::string& path, const ConfigOverrides& overrides = {},
                             bool strict = false,
                             std::vector<std::string>* warnings = nullptr) {
  RunConfig c;
  auto unknown = [&](const std::string& where, const std::string& key) {
    const std::string msg = where + ": unknown config key \"" + key + "\"";
    if (strict) throw ConfigError(msg);
    if (warnings != nullptr) warnings->push_back(msg);
  };
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::string line;
    for (std::size_t n = 1; std::getline(in, line); ++n) {
      const std::string where = path + ":" + std::to_string(n);
      std::string t = detail::trim(line);
      if (t.empty() || t.front() == '#') continue;
      const auto eq = t.find('=');
      if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
      const std::string key = detail::trim(t.substr(0, eq));
      const std::string value = detail::trim(t.substr(eq + 1));
      if (key.empty()) throw ConfigError(where + ": empty key");
      try {
        if (!detail::set_config_key(c, key, value)) unknown(where, key);
      } catch (const ConfigError& e) {
        if (std::string(e.what()).rfind(where, 0) == 0) throw;
        throw ConfigError(where + ": " + key + ": " + e.what());
      } catch (const Error& e) {
        throw ConfigError(where + ": " + key + ": " + e.what());
      }
    }
  }
  for (const auto& [key, value] : overrides) {
    try {
      if (!detail::set_config_key(c, key, value)) unknown("command line", key);
    } catch (const ConfigError& e) {
      if (std::string(e.what()).rfind("command line", 0) == 0) throw;
      throw ConfigError("command line: " + key + ": " + e.what());
    }
  }
  if (strict) c.strict = true;
  validate(c);
  return c;
}

// Lexicon, optional classifier client, and few-shot examples per config.
inline AbstainDetector make_detector(const RunConfig& c) {
  Lexicon lexicon = c.lexicon_file.empty() ? Lexicon() : Lexicon::load(c.lexicon_file);
  if (c.abstain_mode == AbstainMode::kLexicon) return AbstainDetector(std::move(lexicon));
  ClassifierClientConfig client = c.client;
  if (!c.few_shot_file.empty()) {
    std::ifstream in(c.few_shot_file);
    if (!in) throw ConfigError("cannot open few-shot file: " + c.few_shot_file);
    client.few_shot_examples.clear();
    JsonlReader reader(in);
    nlohmann::json j;
    try {
      while (reader.next(j)) client.few_shot_examples.push_back(few_shot_from_json(j));
    } catch (const InputError& e) {
      throw ConfigError(c.few_shot_file + ":" + std::to_string(reader.line()) + ": " + e.what());
    }
  }
  return AbstainDetector(c.abstain_mode, std::move(lexicon), ClassifierClient(std::move(client)));
}

}  // namespace infohier

#endif  // INFOHIER_CONFIG_HPP_
