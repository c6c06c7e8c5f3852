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

// Structure-tuning labels. A model answer found at level j >= 2 is trained
// toward a random answer one level up; an A_1 answer needs nothing; anything
// else, abstentions included, is trained toward a canonical IDK response.

#ifndef INFOHIER_LABEL_HPP_
#define INFOHIER_LABEL_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "infohier/abstain.hpp"
#include "infohier/core.hpp"
#include "infohier/error.hpp"
#include "infohier/random.hpp"

namespace infohier {

struct GenerationRecord {
  std::string question_id;
  std::string output;
  std::optional<double> first_token_prob;
  std::optional<std::vector<std::string>> samples;
  std::optional<std::vector<std::vector<double>>> sample_embeddings;
};

inline void validate(const GenerationRecord& r) {
  if (r.first_token_prob && !(*r.first_token_prob >= 0.0 && *r.first_token_prob <= 1.0)) {
    throw InputError("record " + r.question_id + ": first_token_prob outside [0, 1]");
  }
  if (r.samples && r.sample_embeddings &&
      r.samples->size() != r.sample_embeddings->size()) {
    throw InputError("record " + r.question_id +
                     ": sample and embedding counts differ");
  }
}

enum class SftAction { kTrain, kSkip, kTrainIdk };

inline std::string_view to_string(SftAction a) {
  switch (a) {
    case SftAction::kTrain:
      return "train";
    case SftAction::kSkip:
      return "skip";
    case SftAction::kTrainIdk:
      return "train_idk";
  }
  return "train_idk";
}

struct SftRecord {
  std::string question_id;
  std::string question;
  SftAction action = SftAction::kTrainIdk;
  std::optional<std::string> target;  // absent only for kSkip
  std::optional<int> source_level;
};

class IdkText {
 public:
  static constexpr std::string_view kDefault = "I don't know the answer.";

  explicit IdkText(std::string text = std::string(kDefault),
                   const Lexicon& lexicon = Lexicon())
      : text_(std::move(text)) {
    if (!lexicon.detect(text_).is_abstain) {
      throw ConfigError("IDK text is not recognized as an abstention: " + text_);
    }
  }

  const std::string& text() const { return text_; }

 private:
  std::string text_;
};

struct LabelOptions {
  MatchPolicy policy;
  JoinTemplate join;
};

// `seed` is the per-record seed; see label_seed().
inline SftRecord assign_gold_label(const GenerationRecord& record, const QaItem& item,
                                   const IdkText& idk, std::uint64_t seed,
                                   const LabelOptions& options = {}) {
  if (record.question_id != item.hierarchy.question_id) {
    throw InputError("record id " + record.question_id + " does not match hierarchy " +
                     item.hierarchy.question_id);
  }
  SftRecord out;
  out.question_id = record.question_id;
  out.question = item.question.text;
  const auto j = locate_level(record.output, item.hierarchy, options.policy);
  out.source_level = j;
  if (!j) {
    out.action = SftAction::kTrainIdk;
    out.target = idk.text();
  } else if (*j == 1) {
    out.action = SftAction::kSkip;
  } else {
    const auto& above = item.hierarchy.level(*j - 1).answers;
    Rng rng(seed);
    const auto pick = uniform_below(rng, above.size());
    out.action = SftAction::kTrain;
    out.target = render(above[pick], options.join);
  }
  return out;
}

inline std::uint64_t label_seed(std::uint64_t global_seed, std::string_view question_id) {
  return derive_seed(global_seed, question_id);
}

using LabelResult = std::variant<SftRecord, UnknownQuestionError>;

// One result per input record, in order. Unknown ids yield an error entry.
inline std::vector<LabelResult> label_batch(const std::vector<GenerationRecord>& records,
                                            const Dataset& dataset, const IdkText& idk,
                                            std::uint64_t seed,
                                            const LabelOptions& options = {}) {
  std::vector<LabelResult> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    const QaItem* item = dataset.find(r.question_id);
    if (item == nullptr) {
      out.emplace_back(UnknownQuestionError(r.question_id));
      continue;
    }
    out.emplace_back(
        assign_gold_label(r, *item, idk, label_seed(seed, r.question_id), options));
  }
  return out;
}

}  // namespace infohier

#endif  // INFOHIER_LABEL_HPP_
