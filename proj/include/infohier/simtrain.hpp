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

// Desk-scale check of the reward's optimum: a single-state softmax policy
// over a question's candidate answers, trained with a score-function
// (REINFORCE) estimator and an exponential-moving-average baseline.

#ifndef INFOHIER_SIMTRAIN_HPP_
#define INFOHIER_SIMTRAIN_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "infohier/abstain.hpp"
#include "infohier/core.hpp"
#include "infohier/error.hpp"
#include "infohier/label.hpp"
#include "infohier/parallel.hpp"
#include "infohier/random.hpp"
#include "infohier/reward.hpp"

namespace infohier {

enum class ActionRole { kAnswer, kDistractor, kAbstain };

class TrainingError : public Error {
 public:
  using Error::Error;
};

// Actions are every rendered hierarchy answer (level order), then the
// distractors, then one abstention action.
class SyntheticTask {
 public:
  SyntheticTask(Question question, std::optional<AnswerHierarchy> hierarchy,
                std::vector<std::string> distractors,
                std::string abstain_text = std::string(IdkText::kDefault),
                const JoinTemplate& join = {}, const MatchPolicy& policy = {})
      : question_(std::move(question)), hierarchy_(std::move(hierarchy)) {
    if (hierarchy_) {
      const auto violations = validate_hierarchy(*hierarchy_, policy);
      if (!violations.empty()) {
        throw InputError("task " + question_.id + ": " + violations.front());
      }
      for (const auto& level : hierarchy_->levels) {
        for (const auto& a : level.answers) {
          add(render(a, join), ActionRole::kAnswer, level.index);
        }
      }
    }
    for (auto& d : distractors) add(std::move(d), ActionRole::kDistractor, std::nullopt);
    abstain_index_ = actions_.size();
    add(std::move(abstain_text), ActionRole::kAbstain, std::nullopt);

    // Every action must score under its intended branch of the reward.
    const AbstainDetector detector;
    const AnswerHierarchy empty{question_.id, {}};
    for (std::size_t i = 0; i < actions_.size(); ++i) {
      const auto s = reward(actions_[i], hierarchy_ ? *hierarchy_ : empty, detector, policy);
      const bool ok = (roles_[i] == ActionRole::kAnswer && s.level == levels_[i]) ||
                      (roles_[i] == ActionRole::kDistractor && !s.level && !s.abstained) ||
                      (roles_[i] == ActionRole::kAbstain && !s.level && s.abstained);
      if (!ok) {
        throw InputError("task " + question_.id + ": action \"" + actions_[i] +
                         "\" does not score as its role");
      }
    }
  }

  const Question& question() const { return question_; }
  const std::optional<AnswerHierarchy>& hierarchy() const { return hierarchy_; }
  bool answerable() const { return hierarchy_.has_value(); }
  const std::vector<std::string>& actions() const { return actions_; }
  ActionRole role(std::size_t i) const { return roles_[i]; }
  std::optional<int> level(std::size_t i) const { return levels_[i]; }
  std::size_t abstain_index() const { return abstain_index_; }

  std::vector<double> rewards(const RewardShape& shape) const {
    std::vector<double> r(actions_.size());
    for (std::size_t i = 0; i < actions_.size(); ++i) {
      switch (roles_[i]) {
        case ActionRole::kAnswer:
          r[i] = shape.level_score(*levels_[i]);
          break;
        case ActionRole::kDistractor:
          r[i] = shape.wrong_reward;
          break;
        case ActionRole::kAbstain:
          r[i] = shape.abstain_reward;
          break;
      }
    }
    return r;
  }

 private:
  void add(std::string action, ActionRole role, std::optional<int> level) {
    if (!seen_.insert(action).second) {
      throw InputError("task " + question_.id + ": duplicate action \"" + action + "\"");
    }
    actions_.push_back(std::move(action));
    roles_.push_back(role);
    levels_.push_back(level);
  }

  Question question_;
  std::optional<AnswerHierarchy> hierarchy_;
  std::vector<std::string> actions_;
  std::vector<ActionRole> roles_;
  std::vector<std::optional<int>> levels_;
  std::set<std::string> seen_;
  std::size_t abstain_index_ = 0;
};

class PolicyTable {
 public:
  explicit PolicyTable(std::size_t n_actions) : logits_(n_actions, 0.0) {}

  std::vector<double> probabilities() const {
    std::vector<double> p(logits_.size());
    const double m = *std::max_element(logits_.begin(), logits_.end());
    double z = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) z += (p[i] = std::exp(logits_[i] - m));
    for (auto& v : p) v /= z;
    return p;
  }

  std::vector<double>& logits() { return logits_; }
  const std::vector<double>& logits() const { return logits_; }

 private:
  std::vector<double> logits_;
};

struct TrainConfig {
  double alpha = 0.1;
  std::size_t steps = 2000;
  std::uint64_t seed = 0;
  double baseline_decay = 0.9;
  RewardShape shape;
};

inline void validate(const TrainConfig& c) {
  if (!(c.alpha > 0.0)) throw ConfigError("alpha must be positive");
  if (!(c.baseline_decay >= 0.0 && c.baseline_decay < 1.0)) {
    throw ConfigError("baseline_decay must be in [0, 1)");
  }
}

struct PolicyTrace {
  std::vector<double> final_probs;
  std::size_t argmax_index = 0;
  std::string argmax_action;
  std::vector<double> reward_curve;  // EMA reward after each step
  double expected_reward = 0.0;      // under final_probs
};

inline double expected_reward(const std::vector<double>& probs,
                              const std::vector<double>& rewards) {
  double e = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) e += probs[i] * rewards[i];
  return e;
}

inline PolicyTrace run_reinforce(const SyntheticTask& task, const TrainConfig& config) {
  validate(config);
  const auto rewards = task.rewards(config.shape);
  PolicyTable policy(task.actions().size());
  Rng rng(config.seed);
  double baseline = 0.0;
  PolicyTrace trace;
  trace.reward_curve.reserve(config.steps);
  for (std::size_t step = 0; step < config.steps; ++step) {
    const auto probs = policy.probabilities();
    const double u = uniform_unit(rng);
    std::size_t action = probs.size() - 1;
    double cumulative = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      cumulative += probs[i];
      if (u < cumulative) {
        action = i;
        break;
      }
    }
    const double advantage = rewards[action] - baseline;
    auto& logits = policy.logits();
    for (std::size_t i = 0; i < logits.size(); ++i) {
      logits[i] += config.alpha * advantage * ((i == action ? 1.0 : 0.0) - probs[i]);
      if (!std::isfinite(logits[i])) {
        throw TrainingError("non-finite logit at step " + std::to_string(step) +
                            "; the learning rate is too high");
      }
    }
    baseline = config.baseline_decay * baseline + (1.0 - config.baseline_decay) * rewards[action];
    trace.reward_curve.push_back(baseline);
  }
  trace.final_probs = policy.probabilities();
  trace.argmax_index = static_cast<std::size_t>(
      std::max_element(trace.final_probs.begin(), trace.final_probs.end()) -
      trace.final_probs.begin());
  trace.argmax_action = task.actions()[trace.argmax_index];
  trace.expected_reward = expected_reward(trace.final_probs, rewards);
  return trace;
}

struct SuiteRun {
  std::size_t task_index = 0;
  std::uint64_t seed = 0;
  std::optional<PolicyTrace> trace;
  std::string error;
};

struct SuiteSummary {
  std::size_t n_answerable_runs = 0;
  std::size_t n_unanswerable_runs = 0;
  std::size_t n_failed_runs = 0;
  double frac_argmax_top = 0.0;              // answerable runs ending on an A_1 answer
  double frac_abstain_on_unanswerable = 0.0;  // unanswerable runs ending on abstention
  double mean_final_reward = 0.0;             // expected reward of final policies
  std::vector<SuiteRun> runs;
};

// Runs every (task, seed) pair; run order is task-major and independent of
// `workers`.
inline SuiteSummary run_suite(const std::vector<SyntheticTask>& tasks,
                              const std::vector<std::uint64_t>& seeds, const TrainConfig& config,
                              std::size_t workers = 1) {
  if (tasks.empty()) throw InputError("run_suite: no tasks");
  if (seeds.empty()) throw InputError("run_suite: no seeds");
  std::vector<SuiteRun> jobs;
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    for (auto s : seeds) jobs.push_back({t, s, std::nullopt, {}});
  }
  auto runs = parallel_map(jobs, workers, [&](const SuiteRun& job) {
    SuiteRun out = job;
    TrainConfig c = config;
    c.seed = job.seed;
    try {
      out.trace = run_reinforce(tasks[job.task_index], c);
    } catch (const Error& e) {
      out.error = e.what();
    }
    return out;
  });

  SuiteSummary summary;
  std::size_t top = 0, abstained = 0, finished = 0;
  double reward_sum = 0.0;
  for (const auto& run : runs) {
    if (!run.trace) {
      ++summary.n_failed_runs;
      continue;
    }
    const auto& task = tasks[run.task_index];
    ++finished;
    reward_sum += run.trace->expected_reward;
    if (task.answerable()) {
      ++summary.n_answerable_runs;
      if (task.level(run.trace->argmax_index) == 1) ++top;
    } else {
      ++summary.n_unanswerable_runs;
      if (run.trace->argmax_index == task.abstain_index()) ++abstained;
    }
  }
  summary.frac_argmax_top =
      summary.n_answerable_runs == 0 ? 0.0 : static_cast<double>(top) / summary.n_answerable_runs;
  summary.frac_abstain_on_unanswerable =
      summary.n_unanswerable_runs == 0
          ? 0.0
          : static_cast<double>(abstained) / summary.n_unanswerable_runs;
  summary.mean_final_reward = finished == 0 ? 0.0 : reward_sum / finished;
  summary.runs = std::move(runs);
  return summary;
}

}  // namespace infohier

#endif  // INFOHIER_SIMTRAIN_HPP_
