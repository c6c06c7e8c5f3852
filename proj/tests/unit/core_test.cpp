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

#include "infohier/core.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "test_util.hpp"

namespace infohier {
namespace {

using testing::example_a;

std::string random_text(std::mt19937& rng, std::size_t max_len) {
  static const std::vector<std::string> pieces = {
      "the ", "The ", "a ", "An ", "  ", "\t", ",", ";", ".", "!", "'", "-", "x", "Wales",
      "UNITED", "kingdom", " and ", "é", "the", "A", "\n", "q"};
  std::string s;
  const std::size_t n = rng() % (max_len + 1);
  for (std::size_t i = 0; i < n; ++i) s += pieces[rng() % pieces.size()];
  return s;
}

MatchPolicy random_policy(std::mt19937& rng) {
  MatchPolicy p;
  p.lowercase = rng() % 2;
  p.strip_articles = rng() % 2;
  p.strip_punctuation = rng() % 2;
  p.collapse_whitespace = rng() % 2;
  return p;
}

TEST(Normalize, DefaultPolicyExamples) {
  EXPECT_EQ(normalize("The United States"), "united states");
  EXPECT_EQ(normalize("Honolulu,  Hawaii"), "honolulu hawaii");
  EXPECT_EQ(normalize(""), "");
}

TEST(Normalize, StripsOnlyLeadingArticles) {
  EXPECT_EQ(normalize("the the Hague"), "hague");
  EXPECT_EQ(normalize("Isle of the Dead"), "isle of the dead");
  EXPECT_EQ(normalize("Theodore"), "theodore");
  EXPECT_EQ(normalize("an"), "");
}

TEST(Normalize, RespectsDisabledFlags) {
  MatchPolicy keep_case;
  keep_case.lowercase = false;
  EXPECT_EQ(normalize("The United States", keep_case), "United States");
  MatchPolicy keep_punct;
  keep_punct.strip_punctuation = false;
  EXPECT_EQ(normalize("Honolulu,  Hawaii", keep_punct), "honolulu, hawaii");
}

TEST(Normalize, IdempotentUnderAllPolicies) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 5000; ++trial) {
    const std::string text = random_text(rng, 12);
    const MatchPolicy policy = random_policy(rng);
    const std::string once = normalize(text, policy);
    ASSERT_EQ(normalize(once, policy), once) << "input: [" << text << "]";
  }
}

TEST(MatchAnswer, Examples) {
  EXPECT_TRUE(match_answer("united states", AnswerText::atomic("United States")));
  EXPECT_TRUE(match_answer("Houston, Dallas", AnswerText::composite({"Dallas", "Houston"})));
  EXPECT_FALSE(match_answer("Houston", AnswerText::composite({"Houston", "Dallas"})));
}

TEST(MatchAnswer, AtomicAnswersAreNotSplit) {
  const auto borough = AnswerText::atomic("Caerphilly County Borough");
  EXPECT_TRUE(match_answer("caerphilly county borough", borough));
  const auto pair = AnswerText::atomic("Trinidad and Tobago");
  EXPECT_TRUE(match_answer("Trinidad and Tobago", pair));
  EXPECT_FALSE(match_answer("Trinidad", pair));
}

TEST(MatchAnswer, CompositeAcceptsRenderedListStyles) {
  const auto cities = AnswerText::composite({"Houston", "Dallas", "Palm Beach"});
  EXPECT_TRUE(match_answer("Houston, Dallas and Palm Beach", cities));
  EXPECT_TRUE(match_answer("Palm Beach; Houston, and Dallas", cities));
  EXPECT_TRUE(match_answer("houston AND dallas AND palm beach", cities));
  EXPECT_FALSE(match_answer("Houston, Dallas, Palm Beach, Denver", cities));
}

TEST(MatchAnswer, PermutationOfAtomsKeepsVerdict) {
  std::mt19937 rng(5);
  const std::vector<std::string> pool = {"Houston", "Dallas", "Palm Beach", "Phoenix",
                                         "Denver", "Miami"};
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<std::string> gold(pool.begin(), pool.begin() + 2 + rng() % 4);
    std::vector<std::string> predicted = gold;
    if (rng() % 3 == 0) predicted.pop_back();
    if (rng() % 3 == 0) predicted.push_back(pool[rng() % pool.size()]);
    const auto answer = AnswerText::composite(gold);
    auto joined = [](const std::vector<std::string>& atoms) {
      std::string s;
      for (std::size_t i = 0; i < atoms.size(); ++i) s += (i ? ", " : "") + atoms[i];
      return s;
    };
    const bool verdict = match_answer(joined(predicted), answer);
    std::shuffle(predicted.begin(), predicted.end(), rng);
    ASSERT_EQ(match_answer(joined(predicted), answer), verdict);
  }
}

TEST(MatchAnswer, RenderedCompositeMatchesItself) {
  const auto answer = AnswerText::composite({"Houston", "Dallas", "Phoenix"});
  EXPECT_EQ(render(answer), "Houston, Dallas and Phoenix");
  EXPECT_TRUE(match_answer(render(answer), answer));
  EXPECT_EQ(render(AnswerText::atomic("Wales")), "Wales");
}

TEST(AnswerText, DecodesPipeEncoding) {
  const auto a = AnswerText::decode("Houston| Dallas");
  EXPECT_EQ(a.atoms, (std::vector<std::string>{"Houston", "Dallas"}));
  EXPECT_EQ(a.encode(), "Houston|Dallas");
  EXPECT_FALSE(AnswerText::decode("Wales").is_composite());
}

TEST(LocateLevel, ExampleA) {
  const auto h = example_a().hierarchy;
  EXPECT_EQ(locate_level("Blackwood", h), 1);
  EXPECT_EQ(locate_level("United Kingdom", h), 4);
  EXPECT_EQ(locate_level("the united kingdom.", h), 4);
  EXPECT_FALSE(locate_level("Atlantis", h).has_value());
}

TEST(LocateLevel, ReturnsSmallestMatchingLevel) {
  std::mt19937 rng(3);
  const std::vector<std::string> pool = {"a1", "b2", "c3", "d4", "e5", "f6", "g7"};
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<std::vector<AnswerText>> groups(1 + rng() % 4);
    for (auto& g : groups) {
      const std::size_t n = 1 + rng() % 3;
      for (std::size_t i = 0; i < n; ++i) g.push_back(AnswerText::atomic(pool[rng() % pool.size()]));
    }
    const auto h = AnswerHierarchy::from_groups("q", groups);
    for (const auto& p : pool) {
      const auto j = locate_level(p, h);
      if (!j) {
        for (const auto& level : h.levels) {
          for (const auto& a : level.answers) ASSERT_FALSE(match_answer(p, a));
        }
        continue;
      }
      const auto& level = h.level(*j).answers;
      ASSERT_TRUE(std::any_of(level.begin(), level.end(),
                              [&](const AnswerText& a) { return match_answer(p, a); }));
      for (int k = 1; k < *j; ++k) {
        for (const auto& a : h.level(k).answers) ASSERT_FALSE(match_answer(p, a));
      }
    }
  }
}

TEST(ValidateHierarchy, ExampleAIsValid) {
  EXPECT_TRUE(validate_hierarchy(example_a().hierarchy).empty());
}

TEST(ValidateHierarchy, NonContiguousLevels) {
  AnswerHierarchy h{"q", {{1, {AnswerText::atomic("x")}}, {3, {AnswerText::atomic("y")}}}};
  const auto v = validate_hierarchy(h);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NE(v[0].find("level 3"), std::string::npos);
  EXPECT_NE(v[0].find("non-contiguous"), std::string::npos);
}

TEST(ValidateHierarchy, CrossLevelDuplicate) {
  const auto h = AnswerHierarchy::from_groups(
      "q", {{AnswerText::atomic("Blackwood")},
            {AnswerText::atomic("Wales")},
            {AnswerText::atomic("wales.")}});
  const auto v = validate_hierarchy(h);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NE(v[0].find("level 3"), std::string::npos);
  EXPECT_NE(v[0].find("duplicates level 2"), std::string::npos);
}

TEST(ValidateHierarchy, OtherViolations) {
  EXPECT_EQ(validate_hierarchy(AnswerHierarchy{"q", {}}).size(), 1u);
  EXPECT_EQ(validate_hierarchy(AnswerHierarchy::from_groups("q", {{}})).size(), 1u);
  EXPECT_EQ(validate_hierarchy(AnswerHierarchy::from_groups("q", {{AnswerText::atomic("the")}}))
                .size(),
            1u);
  EXPECT_EQ(validate_hierarchy(AnswerHierarchy::from_groups(
                                   "q", {{AnswerText::composite({"x", "y"}),
                                          AnswerText::composite({"Y", "x"})}}))
                .size(),
            1u);
  EXPECT_EQ(validate_hierarchy(AnswerHierarchy::from_groups("", {{AnswerText::atomic("x")}})).size(),
            1u);
}

// Independent restatement of the hierarchy invariants.
bool satisfies_invariants(const AnswerHierarchy& h) {
  if (h.question_id.empty() || h.levels.empty()) return false;
  std::set<std::set<std::string>> all;
  for (std::size_t i = 0; i < h.levels.size(); ++i) {
    if (h.levels[i].index != static_cast<int>(i) + 1) return false;
    if (h.levels[i].answers.empty()) return false;
    for (const auto& a : h.levels[i].answers) {
      if (a.atoms.empty()) return false;
      std::set<std::string> atoms;
      for (const auto& t : a.atoms) {
        if (normalize(t).empty()) return false;
        atoms.insert(normalize(t));
      }
      if (!all.insert(atoms).second) return false;
    }
  }
  return true;
}

TEST(ValidateHierarchy, SoundUnderRandomMutations) {
  std::mt19937 rng(17);
  const std::vector<std::string> pool = {"x", "y", "z", "The", "w", "X.", "v"};
  std::size_t accepted = 0;
  for (int trial = 0; trial < 3000; ++trial) {
    AnswerHierarchy h;
    h.question_id = rng() % 20 == 0 ? "" : "q";
    const int levels = static_cast<int>(rng() % 4);
    for (int j = 0; j < levels; ++j) {
      AnswerLevel level{j + 1 + (rng() % 10 == 0 ? 1 : 0), {}};
      const std::size_t n = rng() % 3;
      for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::string> atoms;
        const std::size_t k = 1 + rng() % 2;
        for (std::size_t t = 0; t < k; ++t) atoms.push_back(pool[rng() % pool.size()]);
        level.answers.push_back(k == 1 ? AnswerText::atomic(atoms[0]) : AnswerText::composite(atoms));
      }
      h.levels.push_back(level);
    }
    const bool ok = validate_hierarchy(h).empty();
    ASSERT_EQ(ok, satisfies_invariants(h)) << "trial " << trial;
    accepted += ok;
  }
  EXPECT_GT(accepted, 50u);
}

TEST(Dataset, LookupAndDuplicates) {
  Dataset d;
  d.add(example_a());
  EXPECT_NE(d.find("luke-prokopec-birthplace"), nullptr);
  EXPECT_EQ(d.find("missing"), nullptr);
  EXPECT_THROW(d.at("missing"), UnknownQuestionError);
  EXPECT_THROW(d.add(example_a()), InputError);
}

}  // namespace
}  // namespace infohier
