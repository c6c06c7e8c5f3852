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

// The informativeness reward and the preference data derived from it.
//
//   R(y) = 1/sqrt(j)  if y matches an answer at level j
//        = 0          if y abstains
//        = -1         otherwise
//
// Membership is tested first, so a correct answer is never zeroed by hedging.

#ifndef INFOHIER_REWARD_HPP_
#define INFOHIER_REWARD_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "infohier/abstain.hpp"
#include "infohier/core.hpp"
#include "infohier/label.hpp"
#include "infohier/random.hpp"

namespace infohier {

inline double inverse_sqrt_level(int j) { return 1.0 / std::sqrt(static_cast<double>(j)); }

// The reward's three branches. The defaults are the informativeness reward;
// other shapes serve ablations and ordering checks.
struct RewardShape {
  std::function<double(int)> level_score = inverse_sqrt_level;
  double abstain_reward = 0.0;
  double wrong_reward = -1.0;
};

struct RewardScore {
  double value = -1.0;
  std::optional<int> level;
  bool abstained = false;
};

inline RewardScore reward(std::string_view prediction, const AnswerHierarchy& hierarchy,
                          const AbstainDetector& detector, const MatchPolicy& policy = {},
                          const RewardShape& shape = {}) {
  RewardScore s;
  s.level = locate_level(prediction, hierarchy, policy);
  if (s.level) {
    s.value = shape.level_score(*s.level);
  } else if (detector.detect(prediction).is_abstain) {
    s.abstained = true;
    s.value = shape.abstain_reward;
  } else {
    s.value = shape.wrong_reward;
  }
  return s;
}

struct PreferencePair {
  std::string question_id;
  std::string question;
  std::string chosen;
  std::string rejected;
  double chosen_reward = 0.0;
  double rejected_reward = 0.0;
};

struct PairOptions {
  std::size_t max_pairs = 8;  // 0 keeps every pair
  double min_gap = 0.0;
  bool inject_top = false;
  std::uint64_t seed = 0;
  MatchPolicy policy;
  JoinTemplate join;
  RewardShape shape;
};

// Scores every distinct candidate and emits (chosen, rejected) pairs with
// chosen_reward > rejected_reward and a gap of at least min_gap. Pairs are
// listed in candidate order; when there are more than max_pairs, a seeded
// sample is kept.
inline std::vector<PreferencePair> gen_preference_pairs(
    const Question& question, const std::vector<std::string>& candidates,
    const AnswerHierarchy& hierarchy, const AbstainDetector& detector,
    const PairOptions& options = {}) {
  if (candidates.empty() && !options.inject_top) {
    throw InputError("question " + question.id + ": no candidates to pair");
  }
  Rng rng(derive_seed(options.seed, question.id));

  std::vector<std::string> distinct;
  for (const auto& c : candidates) {
    if (std::find(distinct.begin(), distinct.end(), c) == distinct.end()) {
      distinct.push_back(c);
    }
  }
  std::vector<RewardScore> scores;
  scores.reserve(distinct.size() + 1);
  bool has_top = false;
  for (const auto& c : distinct) {
    scores.push_back(reward(c, hierarchy, detector, options.policy, options.shape));
    has_top = has_top || scores.back().level == 1;
  }
  if (options.inject_top && !has_top && !hierarchy.levels.empty()) {
    const auto& top = hierarchy.level(1).answers;
    std::string injected = render(top[uniform_below(rng, top.size())], options.join);
    if (std::find(distinct.begin(), distinct.end(), injected) == distinct.end()) {
      distinct.push_back(std::move(injected));
      scores.push_back(
          reward(distinct.back(), hierarchy, detector, options.policy, options.shape));
    }
  }

  std::vector<PreferencePair> all;
  for (std::size_t a = 0; a < distinct.size(); ++a) {
    for (std::size_t b = 0; b < distinct.size(); ++b) {
      const double hi = scores[a].value;
      const double lo = scores[b].value;
      if (!(hi > lo) || hi - lo < options.min_gap) continue;
      all.push_back({question.id, question.text, distinct[a], distinct[b], hi, lo});
    }
  }
  if (options.max_pairs == 0 || all.size() <= options.max_pairs) return all;
  std::vector<PreferencePair> kept;
  kept.reserve(options.max_pairs);
  for (auto idx : sample_distinct(rng, all.size(), options.max_pairs)) {
    kept.push_back(std::move(all[idx]));
  }
  return kept;
}

using ScoreResult = std::variant<RewardScore, UnknownQuestionError>;

// Reward for each generation record, in input order.
inline std::vector<ScoreResult> export_ppo_scores(const std::vector<GenerationRecord>& records,
                                                  const Dataset& dataset,
                                                  const AbstainDetector& detector,
                                                  const MatchPolicy& policy = {}) {
  std::vector<ScoreResult> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    const QaItem* item = dataset.find(r.question_id);
    if (item == nullptr) {
      out.emplace_back(UnknownQuestionError(r.question_id));
    } else {
      out.emplace_back(reward(r.output, item->hierarchy, detector, policy));
    }
  }
  return out;
}

}  // namespace infohier

#endif  // INFOHIER_REWARD_HPP_
