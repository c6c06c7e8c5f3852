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

// Factual precision/recall with abstention, hierarchy informativeness, list
// precision/recall, and csv/markdown report rendering.

#ifndef INFOHIER_EVAL_HPP_
#define INFOHIER_EVAL_HPP_

#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "infohier/abstain.hpp"
#include "infohier/core.hpp"
#include "infohier/error.hpp"
#include "infohier/hierbuild.hpp"
#include "infohier/label.hpp"
#include "infohier/reward.hpp"

namespace infohier {

enum class ReportFormat { kCsv, kMarkdown };

inline ReportFormat parse_report_format(std::string_view s) {
  if (s == "csv") return ReportFormat::kCsv;
  if (s == "markdown" || s == "md") return ReportFormat::kMarkdown;
  throw ConfigError("unknown report format: " + std::string(s));
}

inline std::string_view to_string(ReportFormat f) {
  return f == ReportFormat::kCsv ? "csv" : "markdown";
}

inline double safe_ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

// Exact when p == r, so zero-abstention reports have P == R == F1 bitwise.
inline double harmonic_mean(double p, double r) {
  if (p == r) return p;
  return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

struct EvalReport {
  std::size_t n_total = 0;
  std::size_t n_answered = 0;
  std::size_t n_correct = 0;
  std::size_t n_unresolved = 0;  // records whose id is not in the dataset
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double accuracy = 0.0;
  double informativeness = 0.0;
  std::map<int, std::size_t> level_histogram;
};

// Per-record verdict: answered unless abstaining (a located answer always
// counts as answered), correct iff located.
struct RecordOutcome {
  bool answered = false;
  std::optional<int> level;
};

inline RecordOutcome judge_record(std::string_view output, const AnswerHierarchy& hierarchy,
                                  const AbstainDetector& detector,
                                  const MatchPolicy& policy = {}) {
  RecordOutcome o;
  o.level = locate_level(output, hierarchy, policy);
  o.answered = o.level.has_value() || !detector.detect(output).is_abstain;
  return o;
}

// Mergeable single-pass aggregate; shards combine with merge().
class EvalTally {
 public:
  void add(const RecordOutcome& o) {
    ++n_total_;
    if (o.answered) ++n_answered_;
    if (o.level) {
      ++n_correct_;
      informativeness_sum_ += inverse_sqrt_level(*o.level);
      ++histogram_[*o.level];
    }
  }

  void add_unresolved() { ++n_unresolved_; }

  void merge(const EvalTally& other) {
    n_total_ += other.n_total_;
    n_answered_ += other.n_answered_;
    n_correct_ += other.n_correct_;
    n_unresolved_ += other.n_unresolved_;
    informativeness_sum_ += other.informativeness_sum_;
    for (const auto& [level, count] : other.histogram_) histogram_[level] += count;
  }

  EvalReport report() const {
    EvalReport r;
    r.n_total = n_total_;
    r.n_answered = n_answered_;
    r.n_correct = n_correct_;
    r.n_unresolved = n_unresolved_;
    const auto total = static_cast<double>(n_total_);
    r.precision = safe_ratio(static_cast<double>(n_correct_), static_cast<double>(n_answered_));
    r.recall = safe_ratio(static_cast<double>(n_correct_), total);
    r.f1 = harmonic_mean(r.precision, r.recall);
    r.accuracy = r.recall;
    r.informativeness = safe_ratio(informativeness_sum_, total);
    r.level_histogram = histogram_;
    return r;
  }

 private:
  std::size_t n_total_ = 0;
  std::size_t n_answered_ = 0;
  std::size_t n_correct_ = 0;
  std::size_t n_unresolved_ = 0;
  double informativeness_sum_ = 0.0;
  std::map<int, std::size_t> histogram_;
};

inline EvalReport eval_granularity(const std::vector<GenerationRecord>& records,
                                   const Dataset& dataset, const AbstainDetector& detector,
                                   const MatchPolicy& policy = {}) {
  EvalTally tally;
  for (const auto& r : records) {
    const QaItem* item = dataset.find(r.question_id);
    if (item == nullptr) {
      tally.add_unresolved();
      continue;
    }
    tally.add(judge_record(r.output, item->hierarchy, detector, policy));
  }
  return tally.report();
}

struct ListEvalReport {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

inline ListEvalReport eval_list(const std::vector<std::string>& predicted_atoms,
                                const std::vector<std::string>& gold_atoms,
                                const MatchPolicy& policy = {}) {
  std::set<std::string> gold;
  for (const auto& g : gold_atoms) {
    std::string n = normalize(g, policy);
    if (!n.empty()) gold.insert(std::move(n));
  }
  if (gold.empty()) throw InputError("eval_list: empty gold list");
  std::set<std::string> predicted;
  for (const auto& p : predicted_atoms) {
    std::string n = normalize(p, policy);
    if (!n.empty()) predicted.insert(std::move(n));
  }
  std::size_t hits = 0;
  for (const auto& p : predicted) hits += gold.count(p);
  ListEvalReport r;
  r.precision = safe_ratio(static_cast<double>(hits), static_cast<double>(predicted.size()));
  r.recall = static_cast<double>(hits) / static_cast<double>(gold.size());
  r.f1 = harmonic_mean(r.precision, r.recall);
  return r;
}

// Macro average of per-question list scores.
class ListTally {
 public:
  void add(const ListEvalReport& r) {
    ++n_;
    p_ += r.precision;
    r_ += r.recall;
    f_ += r.f1;
  }
  void merge(const ListTally& o) {
    n_ += o.n_;
    p_ += o.p_;
    r_ += o.r_;
    f_ += o.f_;
  }
  std::size_t count() const { return n_; }
  ListEvalReport report() const {
    const auto n = static_cast<double>(n_);
    return {safe_ratio(p_, n), safe_ratio(r_, n), safe_ratio(f_, n)};
  }

 private:
  std::size_t n_ = 0;
  double p_ = 0.0, r_ = 0.0, f_ = 0.0;
};

// ---------------------------------------------------------------------------
// Rendering

namespace detail {

// Shortest representation that round-trips.
inline std::string full_precision(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string fixed1(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.1f", v);
  return buf;
}

inline std::string percent1(double v) { return fixed1(100.0 * v); }

}  // namespace detail

inline std::string emit_report(const EvalReport& r, ReportFormat format) {
  std::string out;
  if (format == ReportFormat::kCsv) {
    using detail::full_precision;
    out += "precision,recall,f1,accuracy,informativeness,n_total,n_answered,n_correct\n";
    out += full_precision(r.precision) + "," + full_precision(r.recall) + "," +
           full_precision(r.f1) + "," + full_precision(r.accuracy) + "," +
           full_precision(r.informativeness) + "," + std::to_string(r.n_total) + "," +
           std::to_string(r.n_answered) + "," + std::to_string(r.n_correct) + "\n";
    out += "level,count\n";
    for (const auto& [level, count] : r.level_histogram) {
      out += std::to_string(level) + "," + std::to_string(count) + "\n";
    }
    return out;
  }
  using detail::percent1;
  out += "| P | R | F1 | Accuracy | Informativeness | N | Answered | Correct |\n";
  out += "|---|---|---|---|---|---|---|---|\n";
  out += "| " + percent1(r.precision) + " | " + percent1(r.recall) + " | " +
         percent1(r.f1) + " | " + percent1(r.accuracy) + " | " +
         percent1(r.informativeness) + " | " + std::to_string(r.n_total) + " | " +
         std::to_string(r.n_answered) + " | " + std::to_string(r.n_correct) + " |\n";
  out +=
      "\nInformativeness is the mean of 1/sqrt(level) over all questions "
      "(0 for wrong or abstaining answers).\n";
  out += "\n| Level | Count |\n|---|---|\n";
  for (const auto& [level, count] : r.level_histogram) {
    out += "| " + std::to_string(level) + " | " + std::to_string(count) + " |\n";
  }
  return out;
}

inline std::string emit_report(const ListEvalReport& r, ReportFormat format) {
  if (format == ReportFormat::kCsv) {
    using detail::full_precision;
    return "precision,recall,f1\n" + full_precision(r.precision) + "," +
           full_precision(r.recall) + "," + full_precision(r.f1) + "\n";
  }
  using detail::percent1;
  return "| P | R | F1 |\n|---|---|---|\n| " + percent1(r.precision) + " | " +
         percent1(r.recall) + " | " + percent1(r.f1) + " |\n";
}

inline std::string emit_stats(const DatasetStats& s, ReportFormat format) {
  if (format == ReportFormat::kCsv) {
    using detail::full_precision;
    return "count,avg_levels,avg_answers_per_level\n" + std::to_string(s.count) + "," +
           full_precision(s.avg_levels) + "," + full_precision(s.avg_answers_per_level) +
           "\n";
  }
  using detail::fixed1;
  return "| Statistic | Value |\n|---|---|\n| Number of examples | " +
         std::to_string(s.count) + " |\n| Average number of levels per example | " +
         fixed1(s.avg_levels) + " |\n| Average number of answers per level | " +
         fixed1(s.avg_answers_per_level) + " |\n";
}

}  // namespace infohier

#endif  // INFOHIER_EVAL_HPP_
