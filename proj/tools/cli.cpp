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

#include "cli.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "infohier/infohier.hpp"

namespace infohier::cli {
namespace {

using nlohmann::json;

constexpr std::size_t kChunkPerWorker = 256;

struct Context {
  std::ostream& out;
  std::ostream& err;
  RunConfig config;
  std::size_t warnings = 0;

  void warn(const std::string& message) {
    ++warnings;
    err << "infohier: warning: " << message << "\n";
  }
};

// Flags shared by all subcommands. Only flags actually given override the
// config file.
struct CommonFlags {
  std::string config_path;
  bool strict = false;
  std::map<std::string, std::string> values;

  void attach(CLI::App* sub) {
    sub->add_option("--config", config_path, "plain-text config file (key = value)");
    sub->add_flag("--strict", strict, "treat warnings as failures");
    add(sub, "--seed", "seed", "random seed");
    add(sub, "--workers", "workers", "per-record worker threads");
    add(sub, "--abstain-mode", "abstain_mode",
        "lexicon | client | client_with_lexicon_fallback");
    add(sub, "--endpoint", "endpoint", "abstention classifier endpoint (http://host:port/path)");
    add(sub, "--lexicon", "lexicon", "abstention phrase file, one phrase per line");
    add(sub, "--few-shot", "few_shot_file", "classifier few-shot examples (JSONL)");
    add(sub, "--timeout-ms", "timeout_ms", "classifier request timeout");
    add(sub, "--max-retries", "max_retries", "classifier retries on transport failure");
    add(sub, "--max-in-flight", "max_in_flight", "concurrent classifier requests");
    add(sub, "--format", "format", "report format: csv | markdown");
    add(sub, "--cap", "cap", "per-level subset sampling cap");
    add(sub, "--idk-text", "idk_text", "canonical abstention response");
  }

  RunConfig load(Context& ctx) const {
    std::vector<std::string> warnings;
    RunConfig c = load_config(config_path, values, strict, &warnings);
    for (const auto& w : warnings) ctx.warn(w);
    return c;
  }

 private:
  void add(CLI::App* sub, const std::string& flag, const std::string& key,
           const std::string& help) {
    sub->add_option_function<std::string>(
        flag, [this, key](const std::string& v) { values[key] = v; }, help);
  }
};

std::unique_ptr<std::ifstream> open_input(const std::string& path) {
  auto in = std::make_unique<std::ifstream>(path);
  if (!*in) {
    throw ConfigError("cannot open input file: " + path);
  }
  return in;
}

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) {
    if (path.empty() || path == "-") {
      stream_ = &fallback;
    } else {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw ConfigError("cannot open output file: " + path);
      stream_ = file_.get();
    }
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_ = nullptr;
};

// Streams a JSONL file in chunks; `fn` maps each parsed line to a result on
// up to ctx.config.workers threads, `sink` consumes results in input order.
// Lines whose `fn` throws an InputError become warnings.
template <class R, class Fn, class Sink>
void for_each_record(Context& ctx, const std::string& path, Fn fn, Sink sink) {
  auto in = open_input(path);
  JsonlReader reader(*in);
  struct Item {
    std::size_t line;
    json record;
  };
  struct Result {
    std::optional<R> value;
    std::string error;
  };
  const std::size_t workers = ctx.config.workers;
  const std::size_t chunk = kChunkPerWorker * workers;
  bool done = false;
  while (!done) {
    std::vector<Item> items;
    while (items.size() < chunk) {
      json j;
      try {
        if (!reader.next(j)) {
          done = true;
          break;
        }
      } catch (const InputError& e) {
        ctx.warn(path + ":" + std::to_string(reader.line()) + ": " + e.what());
        continue;
      }
      items.push_back({reader.line(), std::move(j)});
    }
    auto results = parallel_map(items, workers, [&](const Item& item) {
      Result r;
      try {
        r.value = fn(item.record);
      } catch (const InputError& e) {
        r.error = e.what();
      } catch (const TransportError& e) {
        r.error = e.what();
      } catch (const ClassificationError& e) {
        r.error = std::string(e.what()) + " (raw: " + e.raw_response() + ")";
      }
      return r;
    });
    for (std::size_t i = 0; i < results.size(); ++i) {
      if (results[i].value) {
        sink(std::move(*results[i].value));
      } else {
        ctx.warn(path + ":" + std::to_string(items[i].line) + ": " + results[i].error);
      }
    }
  }
}

Dataset load_dataset(Context& ctx, const std::string& path) {
  Dataset dataset;
  auto in = open_input(path);
  JsonlReader reader(*in);
  for (;;) {
    json j;
    try {
      if (!reader.next(j)) break;
      QaItem item = qa_item_from_json(j);
      const auto violations = validate_hierarchy(item.hierarchy, ctx.config.match_policy);
      if (!violations.empty()) {
        throw InputError("invalid hierarchy for " + item.question.id + ": " + violations.front());
      }
      dataset.add(std::move(item));
    } catch (const InputError& e) {
      ctx.warn(path + ":" + std::to_string(reader.line()) + ": " + e.what());
    }
  }
  return dataset;
}

std::string dump_line(const json& j) { return j.dump() + "\n"; }

int finish(Context& ctx) {
  if (ctx.warnings > 0) {
    ctx.err << "infohier: " << ctx.warnings << " warning(s)\n";
    if (ctx.config.strict) return kExitValidation;
  }
  return kExitOk;
}

void require_flag(const std::string& value, const std::string& name) {
  if (value.empty()) throw ConfigError(name + " is required");
}

// ---------------------------------------------------------------------------
// Subcommands

struct BuildArgs {
  std::string in, out, rules, mode = "flat", chain_mode = "atomic";
};

int cmd_build(Context& ctx, const BuildArgs& a) {
  require_flag(a.in, "--in");
  Output out(a.out, ctx.out);
  if (a.mode == "flat") {
    for_each_record<std::string>(
        ctx, a.in,
        [&](const json& j) {
          const FlatQA flat = flat_qa_from_json(j);
          QaItem item{{flat.id, flat.question},
                      build_from_flat(flat, ctx.config.cap, ctx.config.seed,
                                      ctx.config.match_policy)};
          return dump_line(to_json(item));
        },
        [&](std::string line) { *out << line; });
    return finish(ctx);
  }
  if (a.mode != "chain") throw ConfigError("--mode must be flat or chain");
  require_flag(a.rules, "--rules");
  ChainMode mode;
  if (a.chain_mode == "atomic") {
    mode = ChainMode::kAtomic;
  } else if (a.chain_mode == "cumulative") {
    mode = ChainMode::kCumulative;
  } else {
    throw ConfigError("--chain-mode must be atomic or cumulative");
  }
  std::vector<CompletenessRule> rules;
  {
    auto in = open_input(a.rules);
    JsonlReader reader(*in);
    json j;
    for (;;) {
      try {
        if (!reader.next(j)) break;
        rules.push_back(rule_from_json(j));
      } catch (const InputError& e) {
        ctx.warn(a.rules + ":" + std::to_string(reader.line()) + ": " + e.what());
      }
    }
  }
  for_each_record<std::string>(
      ctx, a.in,
      [&](const json& j) {
        const ChainRecord rec = chain_record_from_json(j);
        const CompletenessRule* rule = nullptr;
        for (const auto& r : rules) {
          if (r.covers_relation(rec.relation)) {
            rule = &r;
            break;
          }
        }
        if (rule == nullptr) throw InputError("no rule covers relation " + rec.relation);
        QaItem item{{rec.question_id, rec.question.value_or(rec.question_id)},
                    build_from_chain(rec.question_id, rec.chain, *rule, mode)};
        return dump_line(to_json(item));
      },
      [&](std::string line) { *out << line; });
  return finish(ctx);
}

int cmd_validate(Context& ctx, const std::string& path) {
  require_flag(path, "--in");
  auto in = open_input(path);
  JsonlReader reader(*in);
  std::size_t records = 0, invalid = 0;
  std::set<std::string> ids;
  for (;;) {
    json j;
    std::vector<std::string> problems;
    std::string id = "?";
    try {
      if (!reader.next(j)) break;
      ++records;
      const QaItem item = qa_item_from_json(j);
      id = item.question.id;
      problems = validate_hierarchy(item.hierarchy, ctx.config.match_policy);
      if (!ids.insert(id).second) problems.push_back("duplicate question id");
    } catch (const InputError& e) {
      problems.push_back(e.what());
    }
    if (!problems.empty()) {
      ++invalid;
      for (const auto& p : problems) {
        ctx.out << path << ":" << reader.line() << " (" << id << "): " << p << "\n";
      }
    }
  }
  ctx.out << records << " record(s), " << invalid << " invalid\n";
  return invalid > 0 ? kExitValidation : finish(ctx);
}

int cmd_stats(Context& ctx, const std::string& path) {
  require_flag(path, "--in");
  const Dataset dataset = load_dataset(ctx, path);
  if (dataset.empty()) throw ConfigError("dataset is empty: " + path);
  std::vector<AnswerHierarchy> hierarchies;
  for (const auto& item : dataset.items()) hierarchies.push_back(item.hierarchy);
  ctx.out << emit_stats(dataset_stats(hierarchies), ctx.config.format);
  return finish(ctx);
}

struct RecordArgs {
  std::string in, data, out;
};

int cmd_label(Context& ctx, const RecordArgs& a) {
  require_flag(a.in, "--in");
  require_flag(a.data, "--data");
  const Dataset dataset = load_dataset(ctx, a.data);
  const IdkText idk(ctx.config.idk_text);
  const LabelOptions options{ctx.config.match_policy, ctx.config.join};
  Output out(a.out, ctx.out);
  for_each_record<std::string>(
      ctx, a.in,
      [&](const json& j) {
        const GenerationRecord r = generation_from_json(j);
        const QaItem& item = dataset.at(r.question_id);
        return dump_line(to_json(assign_gold_label(
            r, item, idk, label_seed(ctx.config.seed, r.question_id), options)));
      },
      [&](std::string line) { *out << line; });
  return finish(ctx);
}

int cmd_reward(Context& ctx, const RecordArgs& a) {
  require_flag(a.in, "--in");
  require_flag(a.data, "--data");
  const Dataset dataset = load_dataset(ctx, a.data);
  const AbstainDetector detector = make_detector(ctx.config);
  Output out(a.out, ctx.out);
  for_each_record<std::string>(
      ctx, a.in,
      [&](const json& j) {
        const GenerationRecord r = generation_from_json(j);
        const QaItem& item = dataset.at(r.question_id);
        return dump_line(annotate(
            j, reward(r.output, item.hierarchy, detector, ctx.config.match_policy)));
      },
      [&](std::string line) { *out << line; });
  return finish(ctx);
}

struct PairArgs {
  RecordArgs io;
  std::size_t max_pairs = 8;
  double min_gap = 0.0;
  bool inject_top = false;
};

int cmd_pairs(Context& ctx, const PairArgs& a) {
  require_flag(a.io.in, "--in");
  require_flag(a.io.data, "--data");
  if (!(a.min_gap >= 0.0)) throw ConfigError("--min-gap must be >= 0");
  const Dataset dataset = load_dataset(ctx, a.io.data);
  const AbstainDetector detector = make_detector(ctx.config);
  PairOptions options;
  options.max_pairs = a.max_pairs;
  options.min_gap = a.min_gap;
  options.inject_top = a.inject_top;
  options.seed = ctx.config.seed;
  options.policy = ctx.config.match_policy;
  options.join = ctx.config.join;
  Output out(a.io.out, ctx.out);
  for_each_record<std::string>(
      ctx, a.io.in,
      [&](const json& j) {
        const GenerationRecord r = generation_from_json(j);
        const QaItem& item = dataset.at(r.question_id);
        std::vector<std::string> candidates{r.output};
        if (r.samples) candidates.insert(candidates.end(), r.samples->begin(), r.samples->end());
        std::string lines;
        for (const auto& p :
             gen_preference_pairs(item.question, candidates, item.hierarchy, detector, options)) {
          lines += dump_line(to_json(p));
        }
        return lines;
      },
      [&](std::string lines) { *out << lines; });
  return finish(ctx);
}

struct EvalArgs {
  RecordArgs io;
  bool list = false;
};

int cmd_eval(Context& ctx, const EvalArgs& a) {
  require_flag(a.io.in, "--in");
  require_flag(a.io.data, "--data");
  const Dataset dataset = load_dataset(ctx, a.io.data);
  const AbstainDetector detector = make_detector(ctx.config);
  const MatchPolicy& policy = ctx.config.match_policy;
  Output out(a.io.out, ctx.out);
  if (a.list) {
    // Gold list: the atoms of the most informative answer.
    ListTally tally;
    for_each_record<ListEvalReport>(
        ctx, a.io.in,
        [&](const json& j) {
          const GenerationRecord r = generation_from_json(j);
          const QaItem& item = dataset.at(r.question_id);
          const auto& gold = item.hierarchy.level(1).answers.front().atoms;
          std::vector<std::string> predicted;
          if (!detector.detect(r.output).is_abstain) predicted = split_atoms(r.output, policy);
          return eval_list(predicted, gold, policy);
        },
        [&](ListEvalReport r) { tally.add(r); });
    *out << emit_report(tally.report(), ctx.config.format);
    return finish(ctx);
  }
  EvalTally tally;
  for_each_record<RecordOutcome>(
      ctx, a.io.in,
      [&](const json& j) {
        const GenerationRecord r = generation_from_json(j);
        const QaItem* item = dataset.find(r.question_id);
        if (item == nullptr) throw UnknownQuestionError(r.question_id);
        return judge_record(r.output, item->hierarchy, detector, policy);
      },
      [&](RecordOutcome o) { tally.add(o); });
  *out << emit_report(tally.report(), ctx.config.format);
  return finish(ctx);
}

struct SelectArgs {
  RecordArgs io;
  std::string method = "threshold";
  double tau = 0.5;
  std::string dev;
  std::size_t k = 5;
  double theta = 0.85;
  bool fallback_exact_match = false;
};

int cmd_select(Context& ctx, const SelectArgs& a) {
  require_flag(a.io.in, "--in");
  const SelectMethod method = parse_select_method(a.method);
  std::optional<Dataset> dataset;
  if (!a.io.data.empty()) dataset = load_dataset(ctx, a.io.data);
  double tau = a.tau;
  if (!a.dev.empty()) {
    if (!dataset) throw ConfigError("--dev needs --data to judge correctness");
    std::vector<DevPoint> dev;
    for_each_record<DevPoint>(
        ctx, a.dev,
        [&](const json& j) {
          const GenerationRecord r = generation_from_json(j);
          if (!r.first_token_prob) throw InputError("missing first_token_prob");
          const QaItem& item = dataset->at(r.question_id);
          return DevPoint{*r.first_token_prob,
                          locate_level(r.output, item.hierarchy, ctx.config.match_policy)
                              .has_value()};
        },
        [&](DevPoint p) { dev.push_back(p); });
    const TauChoice choice = tune_tau(dev);
    tau = choice.tau;
    ctx.err << "infohier: tuned tau = " << tau << " (dev F1 = " << choice.f1 << ")\n";
  }
  if (!(tau >= 0.0 && tau <= 1.0)) throw ConfigError("--tau must be in [0, 1]");
  std::optional<ClassifierClient> client;
  if (method == SelectMethod::kPTrue) {
    if (!dataset) throw ConfigError("p_true needs --data for question text");
    if (ctx.config.client.endpoint.empty()) throw ConfigError("p_true needs --endpoint");
    client.emplace(ctx.config.client);
  }
  SemanticEntropyConfig se;
  se.k = a.k;
  se.similarity_threshold = a.theta;
  se.fallback_exact_match = a.fallback_exact_match;
  se.policy = ctx.config.match_policy;
  if (method == SelectMethod::kSemanticEntropy &&
      !(se.similarity_threshold > 0.0 && se.similarity_threshold <= 1.0)) {
    throw ConfigError("--theta must be in (0, 1]");
  }
  Output out(a.io.out, ctx.out);
  for_each_record<std::string>(
      ctx, a.io.in,
      [&](const json& j) {
        const GenerationRecord r = generation_from_json(j);
        switch (method) {
          case SelectMethod::kThreshold:
            return dump_line(annotate(j, select_confidence(r, tau)));
          case SelectMethod::kSemanticEntropy:
            return dump_line(annotate(j, select_semantic_entropy(r, se, ctx.config.seed)));
          case SelectMethod::kPTrue:
            return dump_line(
                annotate(j, select_ptrue(r, dataset->at(r.question_id).question, *client)));
        }
        return std::string();
      },
      [&](std::string line) { *out << line; });
  return finish(ctx);
}

struct SimulateArgs {
  std::string in, out, traces, curves;
  std::size_t n_seeds = 100;
  double alpha = 0.1;
  std::size_t steps = 2000;
  double baseline_decay = 0.9;
  double abstain_reward = 0.0;
  double wrong_reward = -1.0;
  std::string level_score = "inv_sqrt";
};

int cmd_simulate(Context& ctx, const SimulateArgs& a) {
  require_flag(a.in, "--in");
  if (a.n_seeds == 0) throw ConfigError("--seeds must be positive");
  std::vector<SyntheticTask> tasks;
  {
    auto in = open_input(a.in);
    JsonlReader reader(*in);
    for (;;) {
      json j;
      try {
        if (!reader.next(j)) break;
        tasks.push_back(task_from_json(j, "task-" + std::to_string(reader.line()), ctx.config.join,
                                       ctx.config.match_policy));
      } catch (const InputError& e) {
        ctx.warn(a.in + ":" + std::to_string(reader.line()) + ": " + e.what());
      }
    }
  }
  if (tasks.empty()) throw ConfigError("no valid tasks in " + a.in);
  TrainConfig config;
  config.alpha = a.alpha;
  config.steps = a.steps;
  config.baseline_decay = a.baseline_decay;
  config.shape.abstain_reward = a.abstain_reward;
  config.shape.wrong_reward = a.wrong_reward;
  if (a.level_score == "inv_sqrt") {
    config.shape.level_score = inverse_sqrt_level;
  } else if (a.level_score == "inv") {
    config.shape.level_score = [](int j) { return 1.0 / j; };
  } else {
    throw ConfigError("--level-score must be inv_sqrt or inv");
  }
  validate(config);
  std::vector<std::uint64_t> seeds;
  for (std::size_t i = 0; i < a.n_seeds; ++i) seeds.push_back(ctx.config.seed + i);
  const SuiteSummary summary = run_suite(tasks, seeds, config, ctx.config.workers);

  for (const auto& run : summary.runs) {
    if (!run.trace) {
      ctx.warn("task " + tasks[run.task_index].question().id + " seed " +
               std::to_string(run.seed) + ": " + run.error);
    }
  }
  if (!a.traces.empty()) {
    Output traces(a.traces, ctx.out);
    for (const auto& run : summary.runs) {
      if (!run.trace) continue;
      const auto& task = tasks[run.task_index];
      json probs = json::object();
      for (std::size_t i = 0; i < task.actions().size(); ++i) {
        probs[task.actions()[i]] = run.trace->final_probs[i];
      }
      *traces << dump_line({{"task", task.question().id},
                            {"seed", run.seed},
                            {"argmax_action", run.trace->argmax_action},
                            {"expected_reward", run.trace->expected_reward},
                            {"final_probs", probs}});
    }
  }
  if (!a.curves.empty()) {
    Output curves(a.curves, ctx.out);
    *curves << "task,seed,step,reward\n";
    for (const auto& run : summary.runs) {
      if (!run.trace) continue;
      const auto& id = tasks[run.task_index].question().id;
      for (std::size_t s = 0; s < run.trace->reward_curve.size(); ++s) {
        *curves << id << "," << run.seed << "," << s + 1 << ","
                << json(run.trace->reward_curve[s]).dump() << "\n";
      }
    }
  }
  Output out(a.out, ctx.out);
  *out << dump_line({{"runs", summary.runs.size()},
                     {"failed_runs", summary.n_failed_runs},
                     {"answerable_runs", summary.n_answerable_runs},
                     {"unanswerable_runs", summary.n_unanswerable_runs},
                     {"frac_argmax_top", summary.frac_argmax_top},
                     {"frac_abstain_on_unanswerable", summary.frac_abstain_on_unanswerable},
                     {"mean_final_reward", summary.mean_final_reward}});
  return summary.n_failed_runs > 0 ? kExitValidation : finish(ctx);
}

struct DetectArgs {
  std::string in, out, text;
};

int cmd_detect(Context& ctx, const DetectArgs& a) {
  const AbstainDetector detector = make_detector(ctx.config);
  Output out(a.out, ctx.out);
  if (!a.text.empty() || a.in.empty()) {
    if (a.in.empty() && a.text.empty()) throw ConfigError("--in or --text is required");
    *out << dump_line(annotate(json{{"text", a.text}}, detector.detect(a.text)));
    return finish(ctx);
  }
  // Parallelism for client modes follows max_in_flight.
  if (ctx.config.abstain_mode != AbstainMode::kLexicon) {
    ctx.config.workers = std::max(ctx.config.workers, detector.max_in_flight());
  }
  for_each_record<std::string>(
      ctx, a.in,
      [&](const json& j) {
        if (!j.is_object()) throw InputError("record is not a JSON object");
        std::string text;
        if (j.contains("output") && j["output"].is_string()) {
          text = j["output"].get<std::string>();
        } else if (j.contains("text") && j["text"].is_string()) {
          text = j["text"].get<std::string>();
        } else {
          throw InputError("record has no \"output\" or \"text\" string");
        }
        return dump_line(annotate(j, detector.detect(text)));
      },
      [&](std::string line) { *out << line; });
  return finish(ctx);
}

}  // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Informativeness-hierarchy QA toolkit"};
  app.name("infohier");
  app.require_subcommand(1, 1);

  CommonFlags common;
  BuildArgs build;
  std::string validate_in, stats_in;
  RecordArgs label_io, reward_io;
  PairArgs pairs;
  EvalArgs eval;
  SelectArgs select;
  SimulateArgs sim;
  DetectArgs det;

  auto* c_build = app.add_subcommand("build", "build hierarchies from flat lists or entity chains");
  c_build->add_option("--mode", build.mode, "flat | chain")->capture_default_str();
  c_build->add_option("--in", build.in, "FlatQA or chain JSONL");
  c_build->add_option("--rules", build.rules, "completeness rules JSONL (chain mode)");
  c_build->add_option("--chain-mode", build.chain_mode, "atomic | cumulative")
      ->capture_default_str();
  c_build->add_option("--out", build.out, "output dataset JSONL");

  auto* c_validate = app.add_subcommand("validate", "check dataset hierarchy invariants");
  c_validate->add_option("--in", validate_in, "dataset JSONL");

  auto* c_stats = app.add_subcommand("stats", "dataset statistics");
  c_stats->add_option("--in", stats_in, "dataset JSONL");

  auto add_io = [](CLI::App* sub, RecordArgs& io) {
    sub->add_option("--in", io.in, "generation records JSONL");
    sub->add_option("--data", io.data, "dataset JSONL");
    sub->add_option("--out", io.out, "output path (default: stdout)");
  };
  auto* c_label = app.add_subcommand("label", "structure-tuning labels");
  add_io(c_label, label_io);
  auto* c_reward = app.add_subcommand("reward", "score generations with the reward");
  add_io(c_reward, reward_io);

  auto* c_pairs = app.add_subcommand("pairs", "preference pairs from scored candidates");
  add_io(c_pairs, pairs.io);
  c_pairs->add_option("--max-pairs", pairs.max_pairs, "pairs kept per question (0 = all)")
      ->capture_default_str();
  c_pairs->add_option("--min-gap", pairs.min_gap, "minimum reward gap")->capture_default_str();
  c_pairs->add_flag("--inject-top", pairs.inject_top,
                    "add an A_1 answer when no candidate reaches it");

  auto* c_eval = app.add_subcommand("eval", "precision/recall/F1 and informativeness");
  add_io(c_eval, eval.io);
  c_eval->add_flag("--list", eval.list, "list precision/recall against the A_1 answer set");

  auto* c_select = app.add_subcommand("select", "answer-or-abstain baselines");
  add_io(c_select, select.io);
  c_select->add_option("--method", select.method, "threshold | semantic_entropy | p_true")
      ->capture_default_str();
  c_select->add_option("--tau", select.tau, "confidence threshold")->capture_default_str();
  c_select->add_option("--dev", select.dev, "tune tau on this development JSONL (needs --data)");
  c_select->add_option("--k", select.k, "samples per record")->capture_default_str();
  c_select->add_option("--theta", select.theta, "cosine similarity threshold")
      ->capture_default_str();
  c_select->add_flag("--fallback-exact-match", select.fallback_exact_match,
                     "cluster by normalized text when embeddings are absent");

  auto* c_sim = app.add_subcommand("simulate", "policy-gradient simulation of the reward");
  c_sim->add_option("--in", sim.in, "task JSONL");
  c_sim->add_option("--out", sim.out, "summary output (default: stdout)");
  c_sim->add_option("--traces", sim.traces, "per-run trace JSONL");
  c_sim->add_option("--curves", sim.curves, "per-step reward curves CSV");
  c_sim->add_option("--seeds", sim.n_seeds, "runs per task; seeds are seed..seed+N-1")
      ->capture_default_str();
  c_sim->add_option("--alpha", sim.alpha, "learning rate")->capture_default_str();
  c_sim->add_option("--steps", sim.steps, "updates per run")->capture_default_str();
  c_sim->add_option("--baseline-decay", sim.baseline_decay, "EMA baseline decay")
      ->capture_default_str();
  c_sim->add_option("--abstain-reward", sim.abstain_reward, "reward of the abstain action")
      ->capture_default_str();
  c_sim->add_option("--wrong-reward", sim.wrong_reward, "reward of distractors")
      ->capture_default_str();
  c_sim->add_option("--level-score", sim.level_score, "inv_sqrt | inv")->capture_default_str();

  auto* c_detect = app.add_subcommand("detect", "abstention detection");
  c_detect->add_option("--in", det.in, "JSONL with \"output\" or \"text\" fields");
  c_detect->add_option("--text", det.text, "classify one string");
  c_detect->add_option("--out", det.out, "output path (default: stdout)");

  for (auto* sub : app.get_subcommands({})) common.attach(sub);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "infohier: " << e.what() << "\n";
    return kExitUsage;
  }

  Context ctx{out, err, {}, 0};
  try {
    ctx.config = common.load(ctx);
    if (app.got_subcommand(c_build)) return cmd_build(ctx, build);
    if (app.got_subcommand(c_validate)) return cmd_validate(ctx, validate_in);
    if (app.got_subcommand(c_stats)) return cmd_stats(ctx, stats_in);
    if (app.got_subcommand(c_label)) return cmd_label(ctx, label_io);
    if (app.got_subcommand(c_reward)) return cmd_reward(ctx, reward_io);
    if (app.got_subcommand(c_pairs)) return cmd_pairs(ctx, pairs);
    if (app.got_subcommand(c_eval)) return cmd_eval(ctx, eval);
    if (app.got_subcommand(c_select)) return cmd_select(ctx, select);
    if (app.got_subcommand(c_sim)) return cmd_simulate(ctx, sim);
    if (app.got_subcommand(c_detect)) return cmd_detect(ctx, det);
  } catch (const ConfigError& e) {
    err << "infohier: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "infohier: error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitUsage;
}

}  // namespace infohier::cli
