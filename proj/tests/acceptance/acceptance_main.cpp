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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "cli.hpp"
#include "infohier/infohier.hpp"
#include "json.hpp"
#include "test_util.hpp"

namespace infohier {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Collects failure notes for one criterion.
class Check {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok && notes_.size() < 5) notes_.push_back(what);
    ok_ = ok_ && ok;
  }
  bool ok() const { return ok_; }
  std::string notes() const {
    std::string s;
    for (const auto& n : notes_) s += (s.empty() ? "" : "; ") + n;
    return s;
  }

 private:
  bool ok_ = true;
  std::vector<std::string> notes_;
};

int g_failures = 0;

void criterion(const std::string& name, const std::function<void(Check&)>& body) {
  Check check;
  const auto start = Clock::now();
  try {
    body(check);
  } catch (const std::exception& e) {
    check.expect(false, std::string("exception: ") + e.what());
  }
  const double elapsed = seconds_since(start);
  std::printf("%s %s (%.2fs)", check.ok() ? "PASS" : "FAIL", name.c_str(), elapsed);
  if (!check.ok()) {
    std::printf(": %s", check.notes().c_str());
    ++g_failures;
  }
  std::printf("\n");
  std::fflush(stdout);
}

std::string num(double v) { return detail::full_precision(v); }

const AbstainDetector& lexicon() {
  static const AbstainDetector d;
  return d;
}

void reward_exactness(Check& c) {
  const auto start = Clock::now();
  const auto h = testing::example_a().hierarchy;
  const std::vector<std::pair<std::string, double>> cases = {
      {"Blackwood", 1.0},
      {"Caerphilly County Borough", 1.0 / std::sqrt(2.0)},
      {"Wales", 1.0 / std::sqrt(3.0)},
      {"United Kingdom", 0.5},
      {"I don't know the answer.", 0.0},
      {"London", -1.0}};
  for (const auto& [text, want] : cases) {
    const double got = reward(text, h, lexicon()).value;
    c.expect(std::abs(got - want) <= 1e-12, text + " -> " + num(got) + ", want " + num(want));
  }
  c.expect(seconds_since(start) < 1.0, "runtime >= 1s");
}

void gold_labels(Check& c) {
  const auto item = testing::example_a();
  const IdkText idk;
  struct Case {
    std::string output;
    SftAction action;
    std::optional<std::string> target;
  };
  const std::vector<Case> cases = {
      {"Blackwood", SftAction::kSkip, std::nullopt},
      {"Wales", SftAction::kTrain, "Caerphilly County Borough"},
      {"London", SftAction::kTrainIdk, "I don't know the answer."},
      {"I don't know the answer", SftAction::kTrainIdk, "I don't know the answer."}};
  for (const auto& k : cases) {
    const GenerationRecord r{item.question.id, k.output, std::nullopt, std::nullopt, std::nullopt};
    const auto sft = assign_gold_label(r, item, idk, label_seed(0, r.question_id));
    c.expect(sft.action == k.action,
             k.output + " -> " + std::string(to_string(sft.action)));
    c.expect(sft.target == k.target, k.output + ": wrong target");
  }
}

void flat_combinatorics(Check& c) {
  const auto start = Clock::now();
  const FlatQA flat{"vmg", "Where are newspapers owned by Voice Media Group published?",
                    {"Houston", "Dallas", "Palm Beach", "Phoenix", "Denver"}};
  const auto h = build_from_flat(flat, kUncapped, 0);
  std::vector<std::size_t> sizes;
  std::size_t total = 0;
  for (const auto& level : h.levels) {
    sizes.push_back(level.answers.size());
    total += level.answers.size();
  }
  c.expect(sizes == std::vector<std::size_t>{1, 5, 10, 10, 5}, "level sizes differ");
  c.expect(total == 31, "total " + std::to_string(total));
  const auto violations = validate_hierarchy(h);
  c.expect(violations.empty(), violations.empty() ? "" : violations.front());
  c.expect(seconds_since(start) < 1.0, "runtime >= 1s");
}

void stats(Check& c) {
  const auto s = dataset_stats({testing::example_a().hierarchy});
  c.expect(s.count == 1 && s.avg_levels == 4.0 && s.avg_answers_per_level == 1.0,
           "example stats (" + std::to_string(s.count) + ", " + num(s.avg_levels) + ", " +
               num(s.avg_answers_per_level) + ")");
  const auto md = emit_stats(DatasetStats{3000, 8.9, 4.6}, ReportFormat::kMarkdown);
  c.expect(md.find("| Number of examples | 3000 |") != std::string::npos, "count row");
  c.expect(md.find("| Average number of levels per example | 8.9 |") != std::string::npos,
           "levels row");
  c.expect(md.find("| Average number of answers per level | 4.6 |") != std::string::npos,
           "answers row");
  c.expect(emit_stats(DatasetStats{3000, 8.9, 4.6}, ReportFormat::kCsv) ==
               "count,avg_levels,avg_answers_per_level\n3000,8.9,4.6\n",
           "csv rendering");
}

void metric_identities(Check& c) {
  const auto start = Clock::now();
  std::mt19937 rng(2026);
  const auto item = testing::example_a();
  Dataset ds;
  ds.add(item);
  std::vector<std::string> correct_pool, wrong_pool = {"London", "Cardiff", "Swansea"};
  for (const auto& level : item.hierarchy.levels) correct_pool.push_back(level.answers[0].raw);
  const std::vector<std::string> abstain_pool = {"I don't know", "I have no idea", ""};
  auto gen = [&](const std::string& out) {
    return GenerationRecord{item.question.id, out, std::nullopt, std::nullopt, std::nullopt};
  };

  // Zero-abstention corpora.
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<GenerationRecord> corpus;
    const std::size_t n = 1 + rng() % 50;
    for (std::size_t i = 0; i < n; ++i) {
      corpus.push_back(gen(rng() % 2 ? correct_pool[rng() % correct_pool.size()]
                                     : wrong_pool[rng() % wrong_pool.size()]));
    }
    const auto r = eval_granularity(corpus, ds, lexicon());
    c.expect(r.precision == r.recall && r.recall == r.f1 && r.f1 == r.accuracy,
             "zero-abstention identity broken on trial " + std::to_string(trial));
  }

  // Hand corpus: 10 total, 6 answered, 5 correct.
  std::vector<GenerationRecord> hand;
  for (int i = 0; i < 5; ++i) hand.push_back(gen(correct_pool[i % 4]));
  hand.push_back(gen("London"));
  for (int i = 0; i < 4; ++i) hand.push_back(gen("I don't know"));
  const auto r = eval_granularity(hand, ds, lexicon());
  c.expect(r.n_total == 10 && r.n_answered == 6 && r.n_correct == 5, "hand corpus counts");
  c.expect(std::abs(r.precision - 0.833333) <= 1e-6 && std::abs(r.precision - 5.0 / 6.0) <= 1e-9,
           "P = " + num(r.precision));
  c.expect(std::abs(r.recall - 0.5) <= 1e-9, "R = " + num(r.recall));
  c.expect(std::abs(r.f1 - 0.625) <= 1e-9, "F1 = " + num(r.f1));

  // Brute-force tally over randomized corpora.
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<GenerationRecord> corpus;
    std::size_t answered = 0, correct = 0;
    const std::size_t n = rng() % 51;
    for (std::size_t i = 0; i < n; ++i) {
      switch (rng() % 3) {
        case 0:
          corpus.push_back(gen(correct_pool[rng() % correct_pool.size()]));
          ++answered;
          ++correct;
          break;
        case 1:
          corpus.push_back(gen(wrong_pool[rng() % wrong_pool.size()]));
          ++answered;
          break;
        default:
          corpus.push_back(gen(abstain_pool[rng() % abstain_pool.size()]));
      }
    }
    const auto e = eval_granularity(corpus, ds, lexicon());
    const double p = answered ? double(correct) / answered : 0.0;
    const double rc = n ? double(correct) / n : 0.0;
    const double f = p + rc > 0 ? 2 * p * rc / (p + rc) : 0.0;
    c.expect(e.n_total == n && e.n_answered == answered && e.n_correct == correct &&
                 std::abs(e.precision - p) <= 1e-12 && std::abs(e.recall - rc) <= 1e-12 &&
                 std::abs(e.f1 - f) <= 1e-12,
             "tally mismatch on trial " + std::to_string(trial));
  }
  c.expect(seconds_since(start) < 10.0, "runtime >= 10s");
}

std::string pairs_file(const std::vector<std::vector<std::string>>& candidate_sets,
                       const QaItem& item, const PairOptions& options) {
  std::string out;
  for (const auto& cands : candidate_sets) {
    for (const auto& p :
         gen_preference_pairs(item.question, cands, item.hierarchy, lexicon(), options)) {
      out += to_json(p).dump() + "\n";
    }
  }
  return out;
}

void preference_pairs(Check& c) {
  std::mt19937 rng(77);
  const auto item = testing::example_a();
  std::vector<std::string> pool = {"London", "Cardiff", "I don't know", "I have no idea"};
  for (const auto& level : item.hierarchy.levels) pool.push_back(level.answers[0].raw);
  std::vector<std::vector<std::string>> sets;
  for (int i = 0; i < 1000; ++i) {
    std::vector<std::string> cands;
    const std::size_t n = 1 + rng() % 8;
    for (std::size_t k = 0; k < n; ++k) cands.push_back(pool[rng() % pool.size()]);
    sets.push_back(std::move(cands));
  }
  PairOptions options;
  options.seed = 1234;
  options.max_pairs = 4;
  for (const auto& cands : sets) {
    for (const auto& p :
         gen_preference_pairs(item.question, cands, item.hierarchy, lexicon(), options)) {
      c.expect(p.chosen_reward > p.rejected_reward, p.chosen + " vs " + p.rejected);
    }
  }

  testing::TempDir dir;
  const auto a = dir.write("pairs_a.jsonl", pairs_file(sets, item, options));
  const auto b = dir.write("pairs_b.jsonl", pairs_file(sets, item, options));
  const auto text_a = testing::read_file(a);
  c.expect(!text_a.empty() && text_a == testing::read_file(b), "pair files differ across runs");

  PairOptions all = options;
  all.max_pairs = 0;
  PairOptions inv = all;
  inv.shape.level_score = [](int j) { return 1.0 / j; };
  for (const auto& cands : sets) {
    const auto pa = gen_preference_pairs(item.question, cands, item.hierarchy, lexicon(), all);
    const auto pb = gen_preference_pairs(item.question, cands, item.hierarchy, lexicon(), inv);
    bool same = pa.size() == pb.size();
    for (std::size_t i = 0; same && i < pa.size(); ++i) {
      same = pa[i].chosen == pb[i].chosen && pa[i].rejected == pb[i].rejected;
    }
    c.expect(same, "pair set changed under 1/j level score");
  }
}

void semantic_entropy(Check& c) {
  SemanticEntropyConfig cfg;
  cfg.fallback_exact_match = true;
  cfg.k = 5;
  GenerationRecord r{"q", "Wales", std::nullopt,
                     std::vector<std::string>{"Wales", "Blackwood", "wales", "Blackwood", "Wales."},
                     std::nullopt};
  const auto five = select_semantic_entropy(r, cfg, 0);
  c.expect(five.answered && normalize(five.text) == "wales", "K=5 {3,2} should answer");
  c.expect(five.detail["cluster_sizes"] == nlohmann::json({3, 2}), "K=5 cluster sizes");
  cfg.k = 4;
  r.samples = std::vector<std::string>{"Wales", "Blackwood", "Wales", "Blackwood"};
  const auto four = select_semantic_entropy(r, cfg, 0);
  c.expect(!four.answered, "K=4 {2,2} should abstain");

  std::mt19937 rng(99);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t k = 1 + rng() % 12;
    std::vector<std::vector<double>> emb(k, std::vector<double>(3));
    for (auto& e : emb) {
      for (auto& x : e) x = noise(rng);
    }
    const double theta = 0.3 + 0.1 * (rng() % 7);
    const auto labels = cluster_samples(std::vector<std::string>(k, "s"), &emb, theta);
    // Components by repeated relaxation to a fixed point.
    std::vector<std::size_t> comp(k);
    for (std::size_t i = 0; i < k; ++i) comp[i] = i;
    for (bool changed = true; changed;) {
      changed = false;
      for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
          if (i != j && cosine_similarity(emb[i], emb[j]) >= theta && comp[j] < comp[i]) {
            comp[i] = comp[j];
            changed = true;
          }
        }
      }
    }
    c.expect(labels == comp, "clustering differs on trial " + std::to_string(trial));
  }
}

void alignment_dynamics(Check& c) {
  const auto start = Clock::now();
  const Question q{"prokopec", "Where was Luke Prokopec born?"};
  const auto hierarchy = AnswerHierarchy::from_groups(
      q.id, {{AnswerText::atomic("Blackwood")},
             {AnswerText::atomic("Wales")},
             {AnswerText::atomic("United Kingdom")}});
  const SyntheticTask answerable(q, hierarchy, {"London", "Paris"});
  const SyntheticTask unanswerable({"ghost", "Where was the fictional Zed Quorn born?"},
                                   std::nullopt, {"London", "Paris"});
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = 0; s < 100; ++s) seeds.push_back(s);
  const std::size_t workers = std::max(1u, std::thread::hardware_concurrency());

  const TrainConfig defaults;
  const auto a = run_suite({answerable}, seeds, defaults, workers);
  const auto top = static_cast<int>(std::lround(a.frac_argmax_top * 100));
  c.expect(a.n_failed_runs == 0 && top >= 95, "answerable: " + std::to_string(top) + "/100 in A_1");

  const auto u = run_suite({unanswerable}, seeds, defaults, workers);
  const auto abst = static_cast<int>(std::lround(u.frac_abstain_on_unanswerable * 100));
  c.expect(u.n_failed_runs == 0 && abst >= 95,
           "unanswerable: " + std::to_string(abst) + "/100 abstain");

  TrainConfig ablated;
  ablated.shape.abstain_reward = -1.0;
  const auto x = run_suite({unanswerable}, seeds, ablated, workers);
  const auto abl = static_cast<int>(std::lround(x.frac_abstain_on_unanswerable * 100));
  c.expect(abl < 50, "ablation: " + std::to_string(abl) + "/100 abstain");
  std::printf("  answerable %d/100 A_1, unanswerable %d/100 abstain, ablated %d/100 abstain\n",
              top, abst, abl);
  c.expect(seconds_since(start) < 60.0, "runtime >= 60s");
}

int cli_run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  return cli::run(args, out, err);
}

void cli_determinism(Check& c) {
  testing::TempDir dir;
  auto twice = [&](const std::string& name, std::vector<std::string> args) {
    std::string first;
    for (int i = 0; i < 2; ++i) {
      const auto path = dir.file(name + std::to_string(i));
      auto a = args;
      a.push_back("--out");
      a.push_back(path);
      const int code = cli_run(a);
      c.expect(code == cli::kExitOk, name + " exited " + std::to_string(code));
      const auto text = testing::read_file(path);
      if (i == 0) {
        first = text;
        c.expect(!text.empty(), name + " wrote nothing");
      } else {
        c.expect(text == first, name + " output differs between runs");
      }
    }
  };
  twice("label", {"label", "--in", "data/generations.jsonl", "--data", "data/example_a.jsonl",
                  "--seed", "11"});
  twice("pairs", {"pairs", "--in", "data/generations.jsonl", "--data", "data/example_a.jsonl",
                  "--seed", "11", "--max-pairs", "3"});
  twice("simulate", {"simulate", "--in", "data/tasks.jsonl", "--seed", "11", "--seeds", "20",
                     "--steps", "500", "--workers", "2"});
}

}  // namespace
}  // namespace infohier

int main() {
  using namespace infohier;
  criterion("reward exactness on the four-level birthplace example", reward_exactness);
  criterion("gold-label truth table", gold_labels);
  criterion("flat hierarchy combinatorics for five answers", flat_combinatorics);
  criterion("dataset statistics and table rendering", stats);
  criterion("factual precision/recall/F1 identities", metric_identities);
  criterion("preference pair ordering and determinism", preference_pairs);
  criterion("semantic entropy majority rule and clustering", semantic_entropy);
  criterion("alignment dynamics of the reward", alignment_dynamics);
  criterion("CLI reruns are byte-identical", cli_determinism);
  std::printf("%d criterion(s) failed\n", infohier::g_failures);
  return infohier::g_failures == 0 ? 0 : 1;
}
