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

// Answer-or-abstain baselines over generation records: first-token
// confidence threshold, semantic-entropy majority cluster, and P(True)
// through the remote classifier.

#ifndef INFOHIER_SELECT_HPP_
#define INFOHIER_SELECT_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "infohier/abstain.hpp"
#include "infohier/core.hpp"
#include "infohier/error.hpp"
#include "infohier/eval.hpp"
#include "infohier/label.hpp"
#include "infohier/random.hpp"

namespace infohier {

enum class SelectMethod { kThreshold, kSemanticEntropy, kPTrue };

inline std::string_view to_string(SelectMethod m) {
  switch (m) {
    case SelectMethod::kThreshold:
      return "threshold";
    case SelectMethod::kSemanticEntropy:
      return "semantic_entropy";
    case SelectMethod::kPTrue:
      return "p_true";
  }
  return "threshold";
}

inline SelectMethod parse_select_method(std::string_view s) {
  if (s == "threshold") return SelectMethod::kThreshold;
  if (s == "semantic_entropy") return SelectMethod::kSemanticEntropy;
  if (s == "p_true") return SelectMethod::kPTrue;
  throw ConfigError("unknown selection method: " + std::string(s));
}

struct Selection {
  bool answered = false;
  std::string text;  // nonempty when answered
  SelectMethod method = SelectMethod::kThreshold;
  nlohmann::json detail = nlohmann::json::object();
};

// Answer iff the first-token probability is strictly greater than tau.
inline Selection select_confidence(const GenerationRecord& record, double tau) {
  if (!record.first_token_prob) {
    throw InputError("record " + record.question_id + ": missing first_token_prob");
  }
  Selection s;
  s.method = SelectMethod::kThreshold;
  s.detail = {{"probability", *record.first_token_prob}, {"tau", tau}};
  if (*record.first_token_prob > tau && !detail::trim(record.output).empty()) {
    s.answered = true;
    s.text = record.output;
  }
  return s;
}

struct DevPoint {
  double probability = 0.0;
  bool correct = false;
};

struct TauChoice {
  double tau = 0.0;
  double f1 = 0.0;
};

// Grid search for the threshold maximizing factual F1 on a development split.
// An empty grid tries 0 and every observed probability. Ties keep the
// smallest tau.
inline TauChoice tune_tau(const std::vector<DevPoint>& dev, std::vector<double> grid = {}) {
  if (dev.empty()) throw InputError("tune_tau: empty development set");
  if (grid.empty()) {
    grid.push_back(0.0);
    for (const auto& p : dev) grid.push_back(p.probability);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  TauChoice best{grid.front(), -1.0};
  for (double tau : grid) {
    std::size_t answered = 0, correct = 0;
    for (const auto& p : dev) {
      if (p.probability > tau) {
        ++answered;
        if (p.correct) ++correct;
      }
    }
    const double precision = safe_ratio(static_cast<double>(correct), static_cast<double>(answered));
    const double recall = static_cast<double>(correct) / static_cast<double>(dev.size());
    const double f1 = harmonic_mean(precision, recall);
    if (f1 > best.f1) best = {tau, f1};
  }
  return best;
}

// ---------------------------------------------------------------------------
// Semantic entropy

struct SemanticEntropyConfig {
  std::size_t k = 5;
  double similarity_threshold = 0.85;
  bool fallback_exact_match = false;  // cluster by normalized text when no embeddings
  MatchPolicy policy;
};

inline double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw InputError("embedding dimensions differ");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

namespace detail {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace detail

// Single-link clusters; returns, per sample, the smallest index in its
// cluster. Pairs join when cosine similarity >= threshold, or, without
// embeddings, when their normalized texts are equal.
inline std::vector<std::size_t> cluster_samples(
    const std::vector<std::string>& samples,
    const std::vector<std::vector<double>>* embeddings, double threshold,
    const MatchPolicy& policy = {}) {
  const std::size_t n = samples.size();
  detail::DisjointSets sets(n);
  std::vector<std::string> normalized;
  if (embeddings == nullptr) {
    normalized.reserve(n);
    for (const auto& s : samples) normalized.push_back(normalize(s, policy));
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool linked = embeddings != nullptr
                              ? cosine_similarity((*embeddings)[i], (*embeddings)[j]) >= threshold
                              : normalized[i] == normalized[j];
      if (linked) sets.unite(i, j);
    }
  }
  std::vector<std::size_t> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = sets.find(i);
  return labels;
}

// Answers with a seeded member of the largest cluster when it holds a strict
// majority (size > K/2). Members are sorted by text before the draw.
inline Selection select_semantic_entropy(const GenerationRecord& record,
                                         const SemanticEntropyConfig& config,
                                         std::uint64_t seed) {
  if (config.k < 2) throw ConfigError("semantic entropy needs k >= 2");
  if (!record.samples) throw InputError("record " + record.question_id + ": missing samples");
  const auto& samples = *record.samples;
  if (samples.size() != config.k) {
    throw InputError("record " + record.question_id + ": expected " + std::to_string(config.k) +
                     " samples, got " + std::to_string(samples.size()));
  }
  const std::vector<std::vector<double>>* embeddings = nullptr;
  if (record.sample_embeddings) {
    if (record.sample_embeddings->size() != samples.size()) {
      throw InputError("record " + record.question_id + ": sample and embedding counts differ");
    }
    embeddings = &*record.sample_embeddings;
  } else if (!config.fallback_exact_match) {
    throw InputError("record " + record.question_id + ": missing sample embeddings");
  }

  const auto labels =
      cluster_samples(samples, embeddings, config.similarity_threshold, config.policy);
  std::vector<std::size_t> sizes(samples.size(), 0);
  for (auto l : labels) ++sizes[l];
  std::size_t largest_label = 0;
  for (std::size_t l = 0; l < sizes.size(); ++l) {
    if (sizes[l] > sizes[largest_label]) largest_label = l;
  }
  std::vector<std::size_t> cluster_sizes;
  for (auto s : sizes) {
    if (s > 0) cluster_sizes.push_back(s);
  }
  std::sort(cluster_sizes.rbegin(), cluster_sizes.rend());

  Selection sel;
  sel.method = SelectMethod::kSemanticEntropy;
  sel.detail = {{"cluster_sizes", cluster_sizes}, {"k", config.k}};
  if (2 * sizes[largest_label] <= samples.size()) return sel;

  std::vector<std::pair<std::string, std::size_t>> members;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (labels[i] == largest_label) members.emplace_back(samples[i], i);
  }
  std::sort(members.begin(), members.end());
  Rng rng(derive_seed(seed, record.question_id));
  const auto& pick = members[uniform_below(rng, members.size())];
  if (detail::trim(pick.first).empty()) return sel;
  sel.answered = true;
  sel.text = pick.first;
  sel.detail["sample_index"] = pick.second;
  return sel;
}

// ---------------------------------------------------------------------------
// P(True) and prompt baselines

inline constexpr std::string_view kPTruePrompt =
    "Please answer either with 'true' or 'false' only. Is it true that: ";

inline std::string build_ptrue_prompt(std::string_view question, std::string_view output) {
  return std::string(kPTruePrompt) + std::string(question) + " " + std::string(output);
}

// Answer iff the classifier replies "true"; "false" abstains; anything else
// is a ClassificationError.
inline Selection select_ptrue(const GenerationRecord& record, const Question& question,
                              const ClassifierClient& client) {
  const std::string statement = question.text + " " + record.output;
  const std::string raw =
      client.exchange(statement, build_ptrue_prompt(question.text, record.output));
  const std::string token = parse_reply_token(raw);
  Selection sel;
  sel.method = SelectMethod::kPTrue;
  sel.detail = {{"reply", token}};
  if (token == "true") {
    if (!detail::trim(record.output).empty()) {
      sel.answered = true;
      sel.text = record.output;
    }
  } else if (token != "false") {
    throw ClassificationError("P(True) reply is neither true nor false", raw);
  }
  return sel;
}

// Zero-shot prompting baseline instruction, prefixed to the question.
inline constexpr std::string_view kPromptingBaselinePrompt =
    "Please answer the following question. Please answer with the most "
    "informative answer you can. Please refrain form answering if you don't "
    "know the correct answer. The question is: ";

inline constexpr std::size_t kIclDemonstrations = 8;

// Few-shot prompt whose demonstrations answer with a most-informative (A_1)
// answer. Demonstrations are drawn by seed from `pool`.
inline std::string build_icl_prompt(const std::vector<QaItem>& pool, std::string_view question,
                                    std::uint64_t seed,
                                    std::size_t demonstrations = kIclDemonstrations,
                                    const JoinTemplate& join = {}) {
  Rng rng(seed);
  std::string prompt;
  for (auto idx : sample_distinct(rng, pool.size(), demonstrations)) {
    const auto& item = pool[idx];
    if (item.hierarchy.levels.empty()) continue;
    prompt += "Question: " + item.question.text +
              "\nAnswer: " + render(item.hierarchy.level(1).answers.front(), join) + "\n\n";
  }
  prompt += "Question: " + std::string(question) + "\nAnswer:";
  return prompt;
}

}  // namespace infohier

#endif  // INFOHIER_SELECT_HPP_
