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

// Domain types for informativeness hierarchies, SQuAD-style answer
// normalization, and exact answer matching.
//
// A hierarchy lists the correct answers of one question in levels
// A_1..A_L, A_1 being the most informative. An answer is either a single
// atom ("Wales") or a composite set of atoms ({Houston, Dallas}); composite
// answers match order-insensitively.

#ifndef INFOHIER_CORE_HPP_
#define INFOHIER_CORE_HPP_

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "infohier/error.hpp"

namespace infohier {

struct Question {
  std::string id;
  std::string text;
};

struct MatchPolicy {
  bool lowercase = true;
  bool strip_articles = true;
  bool strip_punctuation = true;
  bool collapse_whitespace = true;
  // Split a prediction into atoms when matching a composite answer.
  // Matched ASCII case-insensitively.
  std::vector<std::string> list_delimiters = {",", ";", " and "};
};

// How composite answers are rendered as flat text: "X, Y and Z".
struct JoinTemplate {
  std::string separator = ", ";
  std::string last_separator = " and ";
};

namespace detail {

inline bool is_space(unsigned char c) { return std::isspace(c) != 0; }

inline char ascii_lower(char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

inline bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (ascii_lower(a[i]) != ascii_lower(b[i])) return false;
  }
  return true;
}

inline std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_space(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && is_space(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

// Removes every leading "a", "an" or "the" word together with the
// whitespace run that follows it. Leading whitespace is left in place.
inline void strip_leading_articles(std::string& s) {
  std::size_t start = 0;
  while (start < s.size() && is_space(static_cast<unsigned char>(s[start]))) {
    ++start;
  }
  for (;;) {
    std::size_t end = start;
    while (end < s.size() && !is_space(static_cast<unsigned char>(s[end]))) {
      ++end;
    }
    const std::string_view word(s.data() + start, end - start);
    if (!(iequals(word, "a") || iequals(word, "an") || iequals(word, "the"))) {
      return;
    }
    while (end < s.size() && is_space(static_cast<unsigned char>(s[end]))) {
      ++end;
    }
    s.erase(start, end - start);
  }
}

}  // namespace detail

// Applies the policy steps in order: lowercase, strip punctuation, strip
// leading articles, collapse whitespace. Only ASCII is case-folded or treated
// as punctuation; other bytes pass through unchanged. Idempotent.
inline std::string normalize(std::string_view text,
                             const MatchPolicy& policy = {}) {
  std::string s(text);
  if (policy.lowercase) {
    for (char& c : s) c = detail::ascii_lower(c);
  }
  if (policy.strip_punctuation) {
    std::erase_if(s, [](char c) {
      const auto u = static_cast<unsigned char>(c);
      return u < 128 && std::ispunct(u);
    });
  }
  if (policy.strip_articles) detail::strip_leading_articles(s);
  if (policy.collapse_whitespace) {
    std::string out;
    out.reserve(s.size());
    bool pending_space = false;
    for (char c : s) {
      if (detail::is_space(static_cast<unsigned char>(c))) {
        pending_space = !out.empty();
      } else {
        if (pending_space) out.push_back(' ');
        pending_space = false;
        out.push_back(c);
      }
    }
    s = std::move(out);
  }
  return s;
}

// Splits `text` on any of the policy's delimiters (ASCII case-insensitive).
// Pieces are returned untrimmed and may be empty.
inline std::vector<std::string> split_atoms(std::string_view text,
                                            const MatchPolicy& policy) {
  std::vector<std::string> pieces;
  std::size_t piece_start = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    std::size_t matched = 0;
    for (const auto& d : policy.list_delimiters) {
      if (d.empty() || d.size() > text.size() - i) continue;
      if (detail::iequals(text.substr(i, d.size()), d)) {
        matched = std::max(matched, d.size());
      }
    }
    if (matched > 0) {
      pieces.emplace_back(text.substr(piece_start, i - piece_start));
      i += matched;
      piece_start = i;
    } else {
      ++i;
    }
  }
  pieces.emplace_back(text.substr(piece_start));
  return pieces;
}

// One correct answer: a single atom, or a composite set of atoms.
// `atoms` keep their surface form; normalization happens at match time so
// one dataset serves any MatchPolicy.
struct AnswerText {
  std::string raw;
  std::vector<std::string> atoms;

  static AnswerText atomic(std::string text) {
    AnswerText a;
    a.atoms = {detail::trim(text)};
    a.raw = std::move(text);
    return a;
  }

  static AnswerText composite(std::vector<std::string> parts) {
    AnswerText a;
    for (auto& p : parts) {
      if (!a.raw.empty()) a.raw += '|';
      a.raw += p;
      a.atoms.push_back(detail::trim(p));
    }
    return a;
  }

  // Parses the dataset encoding, where composite atoms are joined by '|'.
  static AnswerText decode(std::string_view encoded) {
    AnswerText a;
    a.raw = std::string(encoded);
    std::size_t start = 0;
    for (;;) {
      const std::size_t bar = encoded.find('|', start);
      a.atoms.push_back(detail::trim(encoded.substr(start, bar - start)));
      if (bar == std::string_view::npos) break;
      start = bar + 1;
    }
    return a;
  }

  bool is_composite() const { return atoms.size() > 1; }

  std::string encode() const {
    std::string out;
    for (const auto& a : atoms) {
      if (!out.empty()) out += '|';
      out += a;
    }
    return out;
  }
};

// Canonical key of an answer's normalized atom set.
inline std::string atom_set_key(const AnswerText& answer,
                                const MatchPolicy& policy = {}) {
  std::set<std::string> atoms;
  for (const auto& a : answer.atoms) atoms.insert(normalize(a, policy));
  std::string key;
  for (const auto& a : atoms) {
    key += a;
    key += '\x1f';
  }
  return key;
}

inline std::string render(const AnswerText& answer,
                          const JoinTemplate& join = {}) {
  if (answer.atoms.size() == 1) return answer.atoms.front();
  std::string out;
  for (std::size_t i = 0; i < answer.atoms.size(); ++i) {
    if (i > 0) {
      out += (i + 1 == answer.atoms.size()) ? join.last_separator
                                            : join.separator;
    }
    out += answer.atoms[i];
  }
  return out;
}

struct AnswerLevel {
  int index = 0;  // 1 = most informative
  std::vector<AnswerText> answers;
};

struct AnswerHierarchy {
  std::string question_id;
  std::vector<AnswerLevel> levels;

  std::size_t depth() const { return levels.size(); }

  // Level by 1-based index; requires a valid hierarchy.
  const AnswerLevel& level(int j) const {
    return levels.at(static_cast<std::size_t>(j - 1));
  }

  // Builds contiguous levels 1..L from answer groups, most informative first.
  static AnswerHierarchy from_groups(
      std::string question_id, std::vector<std::vector<AnswerText>> groups) {
    AnswerHierarchy h;
    h.question_id = std::move(question_id);
    int index = 1;
    for (auto& g : groups) {
      h.levels.push_back({index++, std::move(g)});
    }
    return h;
  }
};

// A question with its hierarchy, i.e. one line of the dataset file.
struct QaItem {
  Question question;
  AnswerHierarchy hierarchy;
};

inline bool match_answer(std::string_view prediction, const AnswerText& answer,
                         const MatchPolicy& policy = {}) {
  if (answer.atoms.size() <= 1) {
    if (answer.atoms.empty()) return false;
    return normalize(prediction, policy) ==
           normalize(answer.atoms.front(), policy);
  }
  std::set<std::string> predicted;
  for (const auto& piece : split_atoms(prediction, policy)) {
    std::string n = normalize(piece, policy);
    if (!n.empty()) predicted.insert(std::move(n));
  }
  std::set<std::string> gold;
  for (const auto& a : answer.atoms) gold.insert(normalize(a, policy));
  return predicted == gold;
}

// Smallest level j whose answers contain a match for `prediction`.
inline std::optional<int> locate_level(std::string_view prediction,
                                       const AnswerHierarchy& hierarchy,
                                       const MatchPolicy& policy = {}) {
  for (const auto& level : hierarchy.levels) {
    for (const auto& answer : level.answers) {
      if (match_answer(prediction, answer, policy)) return level.index;
    }
  }
  return std::nullopt;
}

// Returns one description per violated hierarchy invariant; empty when valid.
inline std::vector<std::string> validate_hierarchy(
    const AnswerHierarchy& hierarchy, const MatchPolicy& policy = {}) {
  std::vector<std::string> violations;
  if (hierarchy.question_id.empty()) {
    violations.push_back("question id is empty");
  }
  if (hierarchy.levels.empty()) {
    violations.push_back("hierarchy has no levels");
    return violations;
  }
  std::map<std::string, int> first_level_of;
  for (std::size_t pos = 0; pos < hierarchy.levels.size(); ++pos) {
    const auto& level = hierarchy.levels[pos];
    const int expected = static_cast<int>(pos) + 1;
    const std::string where = "level " + std::to_string(level.index);
    if (level.index != expected) {
      violations.push_back(where + ": non-contiguous index (expected " +
                           std::to_string(expected) + ")");
    }
    if (level.answers.empty()) {
      violations.push_back(where + ": no answers");
    }
    std::set<std::string> seen_here;
    for (const auto& answer : level.answers) {
      bool bad_atom = answer.atoms.empty();
      for (const auto& atom : answer.atoms) {
        if (normalize(atom, policy).empty()) bad_atom = true;
      }
      if (bad_atom) {
        violations.push_back(where + ": empty atom in answer \"" + answer.raw +
                             "\"");
        continue;
      }
      const std::string key = atom_set_key(answer, policy);
      if (!seen_here.insert(key).second) {
        violations.push_back(where + ": duplicate answer \"" + answer.raw +
                             "\" within level");
        continue;
      }
      const auto [it, inserted] = first_level_of.emplace(key, level.index);
      if (!inserted) {
        violations.push_back(where + ": answer \"" + answer.raw +
                             "\" duplicates level " +
                             std::to_string(it->second));
      }
    }
  }
  return violations;
}

// Questions with hierarchies, looked up by id; insertion order is kept.
class Dataset {
 public:
  void add(QaItem item) {
    const std::string id = item.question.id;
    if (index_.count(id) != 0) {
      throw InputError("duplicate question id: " + id);
    }
    index_.emplace(id, items_.size());
    items_.push_back(std::move(item));
  }

  const QaItem* find(std::string_view id) const {
    const auto it = index_.find(std::string(id));
    return it == index_.end() ? nullptr : &items_[it->second];
  }

  const QaItem& at(std::string_view id) const {
    const QaItem* item = find(id);
    if (item == nullptr) throw UnknownQuestionError(std::string(id));
    return *item;
  }

  const std::vector<QaItem>& items() const { return items_; }
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }

 private:
  std::vector<QaItem> items_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace infohier

#endif  // INFOHIER_CORE_HPP_
