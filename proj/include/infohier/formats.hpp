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

// Line-delimited JSON file formats. Every reader takes one parsed line and
// throws InputError on schema violations; line numbers are added by the
// caller (see JsonlReader).

#ifndef INFOHIER_FORMATS_HPP_
#define INFOHIER_FORMATS_HPP_

#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "infohier/abstain.hpp"
#include "infohier/core.hpp"
#include "infohier/error.hpp"
#include "infohier/hierbuild.hpp"
#include "infohier/label.hpp"
#include "infohier/reward.hpp"
#include "infohier/select.hpp"
#include "infohier/simtrain.hpp"

namespace infohier {

using nlohmann::json;

namespace detail {

inline const json& require(const json& j, const char* key) {
  if (!j.is_object()) throw InputError("record is not a JSON object");
  const auto it = j.find(key);
  if (it == j.end()) throw InputError(std::string("missing field \"") + key + "\"");
  return *it;
}

inline std::string require_string(const json& j, const char* key) {
  const json& v = require(j, key);
  if (!v.is_string()) throw InputError(std::string("field \"") + key + "\" must be a string");
  return v.get<std::string>();
}

inline std::vector<std::string> require_strings(const json& j, const char* key) {
  const json& v = require(j, key);
  if (!v.is_array()) throw InputError(std::string("field \"") + key + "\" must be an array");
  std::vector<std::string> out;
  for (const auto& e : v) {
    if (!e.is_string()) {
      throw InputError(std::string("field \"") + key + "\" must hold strings");
    }
    out.push_back(e.get<std::string>());
  }
  return out;
}

inline std::vector<std::vector<AnswerText>> parse_levels(const json& j) {
  const json& levels = require(j, "levels");
  if (!levels.is_array()) throw InputError("field \"levels\" must be an array");
  std::vector<std::vector<AnswerText>> groups;
  for (const auto& level : levels) {
    if (!level.is_array()) throw InputError("each level must be an array of strings");
    std::vector<AnswerText> answers;
    for (const auto& a : level) {
      if (!a.is_string()) throw InputError("each answer must be a string");
      answers.push_back(AnswerText::decode(a.get<std::string>()));
    }
    groups.push_back(std::move(answers));
  }
  return groups;
}

inline json levels_to_json(const AnswerHierarchy& h) {
  json levels = json::array();
  for (const auto& level : h.levels) {
    json answers = json::array();
    for (const auto& a : level.answers) answers.push_back(a.encode());
    levels.push_back(std::move(answers));
  }
  return levels;
}

}  // namespace detail

// {"id", "question", "levels": [[answer, ...], ...]}, levels[0] = A_1, composite
// atoms joined by '|'.
inline QaItem qa_item_from_json(const json& j) {
  QaItem item;
  item.question.id = detail::require_string(j, "id");
  item.question.text = detail::require_string(j, "question");
  if (item.question.id.empty()) throw InputError("empty question id");
  if (item.question.text.empty()) throw InputError("empty question text");
  item.hierarchy = AnswerHierarchy::from_groups(item.question.id, detail::parse_levels(j));
  return item;
}

inline json to_json(const QaItem& item) {
  return {{"id", item.question.id},
          {"question", item.question.text},
          {"levels", detail::levels_to_json(item.hierarchy)}};
}

inline FlatQA flat_qa_from_json(const json& j) {
  return {detail::require_string(j, "id"), detail::require_string(j, "question"),
          detail::require_strings(j, "answers")};
}

inline CompletenessRule rule_from_json(const json& j) {
  return CompletenessRule(detail::require_string(j, "id"), detail::require_strings(j, "relations"),
                          detail::require_strings(j, "concepts"));
}

struct ChainRecord {
  std::string question_id;
  std::optional<std::string> question;
  std::string relation;
  EntityChain chain;
};

inline ChainRecord chain_record_from_json(const json& j) {
  ChainRecord r;
  r.question_id = detail::require_string(j, "question_id");
  r.relation = detail::require_string(j, "relation");
  if (j.contains("question")) r.question = detail::require_string(j, "question");
  const json& nodes = detail::require(j, "nodes");
  if (!nodes.is_array()) throw InputError("field \"nodes\" must be an array");
  for (const auto& n : nodes) {
    r.chain.nodes.push_back({detail::require_string(n, "entity"),
                             detail::require_string(n, "specific_type"),
                             detail::require_string(n, "general_type")});
  }
  return r;
}

// Generation records carry the question id as "qid" (or "question_id"),
// the model "output", and optionally "first_token_prob", "samples" and
// "sample_embeddings".
inline GenerationRecord generation_from_json(const json& j) {
  GenerationRecord r;
  if (!j.is_object()) throw InputError("record is not a JSON object");
  r.question_id = j.contains("qid") ? detail::require_string(j, "qid")
                                    : detail::require_string(j, "question_id");
  r.output = detail::require_string(j, "output");
  if (j.contains("first_token_prob") && !j["first_token_prob"].is_null()) {
    if (!j["first_token_prob"].is_number()) {
      throw InputError("field \"first_token_prob\" must be a number");
    }
    r.first_token_prob = j["first_token_prob"].get<double>();
  }
  if (j.contains("samples") && !j["samples"].is_null()) {
    r.samples = detail::require_strings(j, "samples");
  }
  if (j.contains("sample_embeddings") && !j["sample_embeddings"].is_null()) {
    const json& e = j["sample_embeddings"];
    if (!e.is_array()) throw InputError("field \"sample_embeddings\" must be an array");
    std::vector<std::vector<double>> embeddings;
    for (const auto& row : e) {
      if (!row.is_array()) throw InputError("each embedding must be an array of numbers");
      std::vector<double> v;
      for (const auto& x : row) {
        if (!x.is_number()) throw InputError("each embedding must be an array of numbers");
        v.push_back(x.get<double>());
      }
      embeddings.push_back(std::move(v));
    }
    r.sample_embeddings = std::move(embeddings);
  }
  validate(r);
  return r;
}

inline json to_json(const SftRecord& r) {
  return {{"qid", r.question_id},
          {"question", r.question},
          {"action", to_string(r.action)},
          {"target", r.target ? json(*r.target) : json(nullptr)},
          {"source_level", r.source_level ? json(*r.source_level) : json(nullptr)}};
}

inline json to_json(const PreferencePair& p) {
  return {{"qid", p.question_id},           {"question", p.question},
          {"chosen", p.chosen},             {"rejected", p.rejected},
          {"chosen_reward", p.chosen_reward}, {"rejected_reward", p.rejected_reward}};
}

inline PreferencePair preference_pair_from_json(const json& j) {
  PreferencePair p;
  p.question_id = detail::require_string(j, "qid");
  p.question = detail::require_string(j, "question");
  p.chosen = detail::require_string(j, "chosen");
  p.rejected = detail::require_string(j, "rejected");
  const json& c = detail::require(j, "chosen_reward");
  const json& r = detail::require(j, "rejected_reward");
  if (!c.is_number() || !r.is_number()) throw InputError("rewards must be numbers");
  p.chosen_reward = c.get<double>();
  p.rejected_reward = r.get<double>();
  if (!(p.chosen_reward > p.rejected_reward)) {
    throw InputError("chosen_reward must exceed rejected_reward");
  }
  return p;
}

// The generation record with reward fields appended.
inline json annotate(json record, const RewardScore& s) {
  record["reward"] = s.value;
  record["level"] = s.level ? json(*s.level) : json(nullptr);
  record["abstained"] = s.abstained;
  return record;
}

inline json annotate(json record, const Selection& s) {
  record["decision"] = s.answered ? "answer" : "abstain";
  record["method"] = to_string(s.method);
  record["detail"] = s.detail;
  return record;
}

inline json annotate(json record, const AbstainVerdict& v) {
  record["is_abstain"] = v.is_abstain;
  record["method"] = to_string(v.method);
  record["matched_phrase"] = v.matched_phrase ? json(*v.matched_phrase) : json(nullptr);
  return record;
}

// {"text": string, "label": "abstain" | "answer"}
inline FewShotExample few_shot_from_json(const json& j) {
  FewShotExample ex;
  ex.text = detail::require_string(j, "text");
  const std::string label = detail::require_string(j, "label");
  if (label == "abstain") {
    ex.abstains = true;
  } else if (label != "answer") {
    throw InputError("few-shot label must be \"abstain\" or \"answer\"");
  }
  return ex;
}

// {"question", "levels", "distractors"}; "id" is optional. Empty levels make
// an unanswerable task.
inline SyntheticTask task_from_json(const json& j, const std::string& fallback_id,
                                    const JoinTemplate& join = {},
                                    const MatchPolicy& policy = {}) {
  Question q;
  q.id = j.contains("id") ? detail::require_string(j, "id") : fallback_id;
  q.text = detail::require_string(j, "question");
  auto groups = detail::parse_levels(j);
  std::optional<AnswerHierarchy> hierarchy;
  if (!groups.empty()) hierarchy = AnswerHierarchy::from_groups(q.id, std::move(groups));
  std::vector<std::string> distractors;
  if (j.contains("distractors")) distractors = detail::require_strings(j, "distractors");
  return SyntheticTask(std::move(q), std::move(hierarchy), std::move(distractors),
                       std::string(IdkText::kDefault), join, policy);
}

// Iterates the non-blank lines of a JSONL stream. Parse errors carry the
// 1-based line number.
class JsonlReader {
 public:
  explicit JsonlReader(std::istream& in) : in_(in) {}

  // False at end of input. Throws InputError for malformed JSON.
  bool next(json& out) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (detail::trim(line).empty()) continue;
      out = json::parse(line, nullptr, false);
      if (out.is_discarded()) throw InputError("malformed JSON");
      return true;
    }
    return false;
  }

  std::size_t line() const { return line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 0;
};

}  // namespace infohier

#endif  // INFOHIER_FORMATS_HPP_
