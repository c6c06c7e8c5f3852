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

// Hierarchy construction: from flat multi-answer lists (one level per subset
// cardinality) and from entity chains under completeness rules.

#ifndef INFOHIER_HIERBUILD_HPP_
#define INFOHIER_HIERBUILD_HPP_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "infohier/core.hpp"
#include "infohier/error.hpp"
#include "infohier/random.hpp"

namespace infohier {

struct FlatQA {
  std::string id;
  std::string question;
  std::vector<std::string> answers;
};

struct FactTriple {
  std::string subject;
  std::string relation;
  std::string object;
};

struct EntityNode {
  std::string entity;
  std::string specific_type;
  std::string general_type;
};

// Most specific node first, e.g. Blackwood -> ... -> United Kingdom.
struct EntityChain {
  std::vector<EntityNode> nodes;
};

// A rule w: relations R_w whose most complete answer must cover the concepts
// C_w (specific entity types, most specific first).
class CompletenessRule {
 public:
  CompletenessRule(std::string id, std::vector<std::string> relations,
                   std::vector<std::string> concepts)
      : id_(std::move(id)),
        relations_(std::move(relations)),
        concepts_(std::move(concepts)) {
    if (relations_.empty()) {
      throw InputError("rule " + id_ + ": relation set is empty");
    }
    if (concepts_.empty()) {
      throw InputError("rule " + id_ + ": concept list is empty");
    }
    std::set<std::string> seen;
    for (const auto& c : concepts_) {
      if (c.empty() || !seen.insert(c).second) {
        throw InputError("rule " + id_ + ": concepts must be nonempty and distinct");
      }
    }
  }

  const std::string& id() const { return id_; }
  const std::vector<std::string>& relations() const { return relations_; }
  const std::vector<std::string>& concepts() const { return concepts_; }

  bool covers_relation(std::string_view relation) const {
    return std::find(relations_.begin(), relations_.end(), relation) !=
           relations_.end();
  }

 private:
  std::string id_;
  std::vector<std::string> relations_;
  std::vector<std::string> concepts_;
};

class CoverageError : public InputError {
 public:
  CoverageError(const std::string& message, std::vector<std::string> missing)
      : InputError(message), missing_(std::move(missing)) {}
  const std::vector<std::string>& missing() const { return missing_; }

 private:
  std::vector<std::string> missing_;
};

inline constexpr std::size_t kDefaultLevelCap = 1000;
inline constexpr std::size_t kUncapped = std::numeric_limits<std::size_t>::max();

// C(n, k), saturating at uint64 max.
inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t result = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    const std::uint64_t num = n - k + i;
    // result * num / i is exact at every step; divide first by the gcd.
    std::uint64_t a = result, b = num, d = i;
    const std::uint64_t g1 = std::gcd(a, d);
    a /= g1;
    d /= g1;
    b /= d;  // d now divides num
    if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    result = a * b;
  }
  return result;
}

namespace detail {

// The rank-th k-subset of {0..n-1} in lexicographic order.
inline std::vector<std::size_t> unrank_combination(std::size_t n, std::size_t k,
                                                   std::uint64_t rank) {
  std::vector<std::size_t> out;
  out.reserve(k);
  std::size_t next = 0;
  for (std::size_t slot = 0; slot < k; ++slot) {
    for (std::size_t v = next;; ++v) {
      const std::uint64_t with_v = binomial(n - v - 1, k - slot - 1);
      if (rank < with_v) {
        out.push_back(v);
        next = v + 1;
        break;
      }
      rank -= with_v;
    }
  }
  return out;
}

inline std::vector<std::vector<std::size_t>> all_combinations(std::size_t n,
                                                              std::size_t k) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> cur(k);
  for (std::size_t i = 0; i < k; ++i) cur[i] = i;
  for (;;) {
    out.push_back(cur);
    std::size_t i = k;
    while (i > 0 && cur[i - 1] == n - k + i - 1) --i;
    if (i == 0) break;
    ++cur[i - 1];
    for (std::size_t t = i; t < k; ++t) cur[t] = cur[t - 1] + 1;
  }
  return out;
}

// `count` distinct random k-subsets, sorted lexicographically.
inline std::vector<std::vector<std::size_t>> sample_combinations(
    std::size_t n, std::size_t k, std::size_t count, Rng& rng) {
  const std::uint64_t total = binomial(n, k);
  std::vector<std::vector<std::size_t>> out;
  if (total != std::numeric_limits<std::uint64_t>::max()) {
    for (std::uint64_t rank : sample_distinct(rng, total, count)) {
      out.push_back(unrank_combination(n, k, rank));
    }
    return out;
  }
  // Too many subsets to rank; collisions are astronomically unlikely.
  std::set<std::vector<std::size_t>> picked;
  std::vector<std::size_t> pool(n);
  while (picked.size() < count) {
    for (std::size_t i = 0; i < n; ++i) pool[i] = i;
    for (std::size_t i = 0; i < k; ++i) {
      const auto j = i + uniform_below(rng, n - i);
      std::swap(pool[i], pool[j]);
    }
    std::vector<std::size_t> subset(pool.begin(), pool.begin() + k);
    std::sort(subset.begin(), subset.end());
    picked.insert(std::move(subset));
  }
  out.assign(picked.begin(), picked.end());
  return out;
}

}  // namespace detail

// Level j holds the (n-j+1)-subsets of the answer list, so A_1 is the full
// list and A_n the singletons. Levels with more than `cap` subsets keep a
// seeded uniform sample of `cap`; A_1 and A_n are never sampled.
inline AnswerHierarchy build_from_flat(const FlatQA& flat, std::size_t cap,
                                       std::uint64_t seed,
                                       const MatchPolicy& policy = {}) {
  if (flat.answers.empty()) {
    throw InputError("question " + flat.id + ": empty answer list");
  }
  if (cap == 0) throw InputError("level cap must be positive");

  // Canonical atom order makes the output independent of input order.
  std::vector<std::pair<std::string, std::string>> keyed;
  std::set<std::string> seen;
  for (const auto& a : flat.answers) {
    std::string atom = detail::trim(a);
    std::string key = normalize(atom, policy);
    if (key.empty()) {
      throw InputError("question " + flat.id + ": empty answer atom");
    }
    if (!seen.insert(key).second) {
      throw InputError("question " + flat.id + ": duplicate answer \"" + atom +
                       "\"");
    }
    keyed.emplace_back(std::move(key), std::move(atom));
  }
  std::sort(keyed.begin(), keyed.end());
  const std::size_t n = keyed.size();

  AnswerHierarchy h;
  h.question_id = flat.id;
  for (std::size_t j = 1; j <= n; ++j) {
    const std::size_t k = n - j + 1;
    std::vector<std::vector<std::size_t>> subsets;
    const bool always_full = (j == 1 || j == n);
    if (always_full || binomial(n, k) <= cap) {
      subsets = detail::all_combinations(n, k);
    } else {
      Rng rng(derive_seed(derive_seed(seed, flat.id), j));
      subsets = detail::sample_combinations(n, k, cap, rng);
    }
    AnswerLevel level{static_cast<int>(j), {}};
    level.answers.reserve(subsets.size());
    for (const auto& subset : subsets) {
      std::vector<std::string> atoms;
      atoms.reserve(subset.size());
      for (std::size_t idx : subset) atoms.push_back(keyed[idx].second);
      level.answers.push_back(atoms.size() == 1
                                  ? AnswerText::atomic(atoms.front())
                                  : AnswerText::composite(std::move(atoms)));
    }
    h.levels.push_back(std::move(level));
  }
  return h;
}

// Concepts of the rule that no chain node carries as its specific type.
inline std::vector<std::string> check_rule_coverage(
    const CompletenessRule& rule, const EntityChain& chain) {
  std::vector<std::string> missing;
  for (const auto& concept_name : rule.concepts()) {
    const bool present = std::any_of(
        chain.nodes.begin(), chain.nodes.end(),
        [&](const EntityNode& n) { return n.specific_type == concept_name; });
    if (!present) missing.push_back(concept_name);
  }
  return missing;
}

enum class ChainMode { kAtomic, kCumulative };

// Atomic: A_j = {entity j}. Cumulative: A_j = {"entity j, ..., entity L"}.
inline AnswerHierarchy build_from_chain(std::string question_id,
                                        const EntityChain& chain,
                                        const CompletenessRule& rule,
                                        ChainMode mode) {
  if (chain.nodes.empty()) {
    throw InputError("question " + question_id + ": empty entity chain");
  }
  for (const auto& node : chain.nodes) {
    if (node.entity.empty() || node.specific_type.empty() ||
        node.general_type.empty()) {
      throw InputError("question " + question_id +
                       ": chain node with empty entity or type");
    }
  }
  auto missing = check_rule_coverage(rule, chain);
  if (!missing.empty()) {
    std::string names;
    for (const auto& m : missing) names += (names.empty() ? "" : ", ") + m;
    throw CoverageError("question " + question_id + ": chain misses concepts of rule " +
                            rule.id() + ": " + names,
                        std::move(missing));
  }
  // Covered concepts must appear in the rule's specificity order.
  std::size_t last_pos = 0;
  for (const auto& node : chain.nodes) {
    const auto& concepts = rule.concepts();
    const auto it =
        std::find(concepts.begin(), concepts.end(), node.specific_type);
    if (it == concepts.end()) continue;
    const auto pos = static_cast<std::size_t>(it - concepts.begin());
    if (pos < last_pos) {
      throw CoverageError("question " + question_id + ": chain order disagrees with rule " +
                              rule.id() + " at \"" + node.entity + "\"",
                          {});
    }
    last_pos = pos;
  }

  std::vector<std::vector<AnswerText>> groups;
  const std::size_t len = chain.nodes.size();
  for (std::size_t j = 0; j < len; ++j) {
    if (mode == ChainMode::kAtomic) {
      groups.push_back({AnswerText::atomic(chain.nodes[j].entity)});
    } else {
      std::string joined;
      for (std::size_t t = j; t < len; ++t) {
        if (t > j) joined += ", ";
        joined += chain.nodes[t].entity;
      }
      groups.push_back({AnswerText::atomic(std::move(joined))});
    }
  }
  return AnswerHierarchy::from_groups(std::move(question_id), std::move(groups));
}

struct DatasetStats {
  std::size_t count = 0;
  double avg_levels = 0.0;
  double avg_answers_per_level = 0.0;
};

inline DatasetStats dataset_stats(const std::vector<AnswerHierarchy>& dataset) {
  if (dataset.empty()) throw InputError("dataset_stats: empty dataset");
  std::size_t levels = 0;
  std::size_t answers = 0;
  for (const auto& h : dataset) {
    levels += h.levels.size();
    for (const auto& level : h.levels) answers += level.answers.size();
  }
  DatasetStats s;
  s.count = dataset.size();
  s.avg_levels = static_cast<double>(levels) / static_cast<double>(s.count);
  s.avg_answers_per_level =
      levels == 0 ? 0.0 : static_cast<double>(answers) / static_cast<double>(levels);
  return s;
}

}  // namespace infohier

#endif  // INFOHIER_HIERBUILD_HPP_
