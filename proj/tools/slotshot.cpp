// slotshot: command-line driver for building, splitting, predicting and
// scoring slot-filling-as-reading-comprehension datasets.

#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "slotshot/annotation.hpp"
#include "slotshot/annotation_server.hpp"
#include "slotshot/dataset_builder.hpp"
#include "slotshot/error.hpp"
#include "slotshot/experiments.hpp"
#include "slotshot/negatives.hpp"
#include "slotshot/pipeline.hpp"
#include "slotshot/querification.hpp"
#include "slotshot/serialization.hpp"
#include "slotshot/synthetic.hpp"

namespace fs = std::filesystem;
using namespace slotshot;

namespace {

enum class LogLevel { kError, kWarn, kInfo, kDebug };
LogLevel g_log_level = LogLevel::kWarn;

void log(LogLevel level, const std::string& msg) {
  if (level > g_log_level) return;
  static const char* names[] = {"error", "warn", "info", "debug"};
  std::cerr << "[" << names[static_cast<int>(level)] << "] " << msg << '\n';
}

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::optional<std::uint64_t> seed;
  std::size_t jobs = 1;
  std::string log_level = "warn";
};

std::uint64_t require_seed(const Globals& g, const char* command) {
  if (!g.seed) throw UsageError(std::string(command) + " needs --seed");
  return *g.seed;
}

void ensure_parent(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
}

// ---- synth -----------------------------------------------------------------

struct SynthArgs {
  fs::path out;
  std::size_t relations = 30;
  std::size_t entities = 500;
};

void run_synth(const Globals& g, const SynthArgs& a) {
  SyntheticOptions opt;
  opt.seed = require_seed(g, "synth");
  opt.relations = a.relations;
  opt.entities = a.entities;
  const auto corpus = generate_corpus(opt);
  fs::create_directories(a.out);
  std::vector<Json> docs;
  for (std::size_t i = 0; i < corpus.documents.size(); ++i) {
    docs.push_back(document_json(corpus.documents[i], &corpus.entities[i]));
  }
  write_jsonl(a.out / "documents.jsonl", docs);
  write_jsonl(a.out / "entities.jsonl", corpus.entities);
  write_jsonl(a.out / "relations.jsonl", corpus.relations);
  write_jsonl(a.out / "facts.jsonl", corpus.facts);
  write_jsonl(a.out / "templates.jsonl", corpus.templates);
  log(LogLevel::kInfo, "wrote " + std::to_string(corpus.documents.size()) + " documents, " +
                           std::to_string(corpus.facts.size()) + " facts");
}

// ---- build -----------------------------------------------------------------

struct BuildArgs {
  fs::path docs, facts, out, report;
  std::optional<fs::path> entities;
};

void run_build(const Globals& g, const BuildArgs& a) {
  const auto records = read_jsonl<DocumentRecord>(a.docs);
  const auto facts = read_jsonl<Fact>(a.facts);
  std::map<std::string, Entity> entities;
  if (a.entities) {
    for (auto& e : read_jsonl<Entity>(*a.entities)) {
      const std::string id = e.id;
      if (!entities.emplace(id, std::move(e)).second) throw DataError("duplicate entity " + id);
    }
  }
  std::map<std::string, std::pair<Document, Entity>> documents;
  for (const auto& r : records) {
    const auto& id = r.document.id();
    auto it = entities.find(id);
    std::optional<Entity> entity = it != entities.end() ? std::optional(it->second) : r.entity;
    if (!entity) throw DataError("no entity name for document " + id);
    if (!documents.emplace(id, std::pair(r.document, *entity)).second) {
      throw DataError("duplicate document " + id);
    }
  }
  const auto result = build_instances(documents, facts, g.jobs);
  ensure_parent(a.out);
  write_jsonl(a.out, result.instances);
  const auto& rep = result.report;
  Json report = {{"facts_total", rep.facts_total},
                 {"facts_aligned", rep.facts_aligned},
                 {"dropped_no_document", rep.dropped_no_document},
                 {"dropped_no_match", rep.dropped_no_match},
                 {"instances", rep.instances},
                 {"dropped_by_relation", rep.dropped_by_relation}};
  ensure_parent(a.report);
  write_json(a.report, report);
  log(LogLevel::kInfo, "aligned " + std::to_string(rep.facts_aligned) + "/" +
                           std::to_string(rep.facts_total) + " facts");
}

// ---- querify ---------------------------------------------------------------

struct QuerifyArgs {
  fs::path templates, instances, out;
};

void run_querify(const Globals&, const QuerifyArgs& a) {
  const auto all = read_jsonl<QuestionTemplate>(a.templates);
  for (const auto& t : all) validate(t);
  const auto templates = verified_only(all);
  if (templates.size() < all.size()) {
    log(LogLevel::kInfo, "skipped " + std::to_string(all.size() - templates.size()) +
                             " unverified templates");
  }
  const auto instances = read_jsonl<SlotFillingInstance>(a.instances);
  ensure_parent(a.out);
  write_jsonl(a.out, join_schema(templates, instances));
}

// ---- negatives -------------------------------------------------------------

struct NegativesArgs {
  fs::path instances, templates, out;
  double ratio = 1.0;
};

void run_negatives(const Globals& g, const NegativesArgs& a) {
  const auto seed = require_seed(g, "negatives");
  const auto instances = read_jsonl<SlotFillingInstance>(a.instances);
  const auto templates = verified_only(read_jsonl<QuestionTemplate>(a.templates));
  const auto sample = generate_negatives(instances, templates, a.ratio, seed, g.jobs);
  if (sample.short_of_target()) {
    log(LogLevel::kWarn, "only " + std::to_string(sample.examples.size()) + " of " +
                             std::to_string(sample.requested) + " negatives available");
  }
  ensure_parent(a.out);
  write_jsonl(a.out, sample.examples);
}

// ---- split -----------------------------------------------------------------

struct SplitArgs {
  std::string kind;
  std::vector<fs::path> inputs;
  std::optional<fs::path> templates;
  fs::path out;
  std::size_t folds = 1;
  std::string scale = "desk";
  std::optional<std::size_t> train, dev, test;
  double ratio = 1.0;
};

void run_split(const Globals& g, const SplitArgs& a) {
  const auto kind = parse_split_kind(a.kind);
  SplitSpec spec;
  if (a.scale == "desk") {
    spec = SplitSpec::desk_defaults(kind);
  } else if (a.scale == "full") {
    spec = SplitSpec::full_defaults(kind);
  } else {
    throw UsageError("--scale must be desk or full");
  }
  spec.seed = require_seed(g, "split");
  spec.fold_count = a.folds;
  spec.negative_ratio = a.ratio;
  if (a.train) spec.targets.train = *a.train;
  if (a.dev) spec.targets.dev = *a.dev;
  if (a.test) spec.targets.test = *a.test;

  std::vector<RCExample> examples;
  for (const auto& path : a.inputs) {
    auto part = read_jsonl<RCExample>(path);
    examples.insert(examples.end(), std::make_move_iterator(part.begin()),
                    std::make_move_iterator(part.end()));
  }
  std::vector<Split> splits;
  switch (kind) {
    case SplitKind::kUnseenEntities:
      splits = split_unseen_entities(examples, spec);
      break;
    case SplitKind::kUnseenTemplates:
      if (!a.templates) throw UsageError("--kind templates needs --templates");
      splits = split_unseen_templates(examples, read_jsonl<QuestionTemplate>(*a.templates), spec);
      break;
    case SplitKind::kUnseenRelations:
      splits = split_unseen_relations(examples, spec);
      break;
  }

  Json manifest = {{"kind", to_string(kind)}, {"seed", spec.seed}, {"folds", Json::array()}};
  for (std::size_t f = 0; f < splits.size(); ++f) {
    char name[32];
    std::snprintf(name, sizeof(name), "fold_%02zu", f);
    const fs::path dir = a.out / name;
    fs::create_directories(dir);
    const auto& s = splits[f];
    write_jsonl(dir / "train.jsonl", s.train);
    write_jsonl(dir / "dev.jsonl", s.dev);
    write_jsonl(dir / "test.jsonl", s.test);
    if (kind == SplitKind::kUnseenTemplates) write_jsonl(dir / "seen_test.jsonl", s.seen_test);
    for (const auto& note : s.notes) log(LogLevel::kWarn, std::string(name) + ": " + note);
    manifest["folds"].push_back({{"fold", f},
                                 {"dir", name},
                                 {"train", s.train.size()},
                                 {"dev", s.dev.size()},
                                 {"test", s.test.size()},
                                 {"seen_test", s.seen_test.size()},
                                 {"train_keys", s.train_keys},
                                 {"dev_keys", s.dev_keys},
                                 {"test_keys", s.test_keys},
                                 {"notes", s.notes}});
  }
  write_json(a.out / "manifest.json", manifest);
}

// ---- predict ---------------------------------------------------------------

struct PredictArgs {
  std::string scorer;
  fs::path in, out;
  double bias = 0.0;
  std::optional<double> p_min;
  std::size_t max_span_len = 10;
  std::size_t ensemble = 0;
};

constexpr std::size_t kPredictChunk = 256;

void run_predict(const Globals& g, const PredictArgs& a) {
  const bool needs_seed = a.scorer == "random-ne" || a.ensemble > 0;
  const std::uint64_t seed = needs_seed ? require_seed(g, "predict") : g.seed.value_or(0);
  if (a.max_span_len == 0) throw UsageError("--max-span-len must be positive");
  if (a.p_min && (*a.p_min < 0.0 || *a.p_min > 1.0)) throw UsageError("--p-min must be in [0, 1]");

  const auto examples = read_jsonl<RCExample>(a.in);
  auto scorer = make_scorer(a.scorer, seed);
  DecodeParams params{a.bias, a.p_min, a.max_span_len};

  std::vector<std::size_t> order(examples.size());
  std::vector<QuestionGroup> groups;
  if (a.ensemble > 0) {
    groups = sample_question_groups(examples, a.ensemble, seed);
    order.clear();
    for (const auto& gr : groups) order.insert(order.end(), gr.members.begin(), gr.members.end());
    std::sort(order.begin(), order.end());
  } else {
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  }

  // Completed records stream into <out>.partial; the rename marks success.
  ensure_parent(a.out);
  const fs::path partial = a.out.string() + ".partial";
  std::ofstream sink(partial, std::ios::binary | std::ios::trunc);
  if (!sink) throw DataError("cannot write " + partial.string());

  std::vector<Prediction> predictions(examples.size());
  for (std::size_t begin = 0; begin < order.size(); begin += kPredictChunk) {
    const std::size_t end = std::min(order.size(), begin + kPredictChunk);
    std::vector<RCExample> chunk;
    for (std::size_t k = begin; k < end; ++k) chunk.push_back(examples[order[k]]);
    const auto got = predict_examples(*scorer, chunk, params, g.jobs);
    for (std::size_t k = begin; k < end; ++k) {
      predictions[order[k]] = got[k - begin];
      if (a.ensemble == 0) {
        sink << Json(PredictionRecord{examples[order[k]].id, got[k - begin], {}}).dump() << '\n';
      }
    }
    sink.flush();
  }
  if (a.ensemble > 0) {
    for (const auto& r : ensemble_records(examples, predictions, groups)) {
      sink << Json(r).dump() << '\n';
    }
  }
  sink.close();
  if (!sink) throw DataError("write failed: " + partial.string());
  fs::rename(partial, a.out);
}

// ---- eval / curve ----------------------------------------------------------

struct EvalArgs {
  fs::path pred, gold;
  std::optional<fs::path> out;
};

void run_eval(const Globals&, const EvalArgs& a) {
  const auto records = read_jsonl<PredictionRecord>(a.pred);
  const auto gold = gold_index(read_jsonl<RCExample>(a.gold));
  const auto m = score_records(records, gold);
  Json report = {{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1},
                 {"tp", m.counts.tp},        {"fp", m.counts.fp},   {"fn", m.counts.fn},
                 {"tn", m.counts.tn},        {"predictions", records.size()}};
  if (a.out) {
    ensure_parent(*a.out);
    write_json(*a.out, report);
  }
  std::cout << report.dump(2) << '\n';
}

struct CurveArgs {
  fs::path pred, gold, out;
  std::vector<double> thresholds;
};

void run_curve(const Globals&, const CurveArgs& a) {
  const auto records = read_jsonl<PredictionRecord>(a.pred);
  const auto gold = gold_index(read_jsonl<RCExample>(a.gold));
  const auto items = attach_gold(records, gold);
  std::optional<std::vector<double>> thresholds;
  if (!a.thresholds.empty()) thresholds = a.thresholds;
  const auto curve = pr_curve(items, thresholds);
  ensure_parent(a.out);
  std::ofstream out(a.out, std::ios::binary);
  if (!out) throw DataError("cannot write " + a.out.string());
  out << "threshold,precision,recall\n";
  char line[96];
  for (const auto& p : curve) {
    std::snprintf(line, sizeof(line), "%.17g,%.17g,%.17g\n", p.threshold, p.precision, p.recall);
    out << line;
  }
  if (!out) throw DataError("write failed: " + a.out.string());
}

// ---- serve -----------------------------------------------------------------

struct ServeArgs {
  fs::path data;
  std::string host = "127.0.0.1";
  int port = 8080;
  int trials = kDefaultVerificationTrials;
};

AnnotationServer* g_server = nullptr;

void run_serve(const Globals& g, const ServeArgs& a) {
  AnnotationService::Options opt;
  opt.seed = require_seed(g, "serve");
  opt.n_trials = a.trials;
  AnnotationService service(a.data, opt);
  AnnotationServer server(service);
  const int port = server.bind(a.host, a.port);
  std::cerr << "listening on " << a.host << ":" << port << std::endl;
  g_server = &server;
  std::signal(SIGINT, [](int) {
    if (g_server) g_server->stop();
  });
  std::signal(SIGTERM, [](int) {
    if (g_server) g_server->stop();
  });
  server.run();
  g_server = nullptr;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"slotshot: slot filling as reading comprehension"};
  app.require_subcommand(1);
  Globals g;
  std::uint64_t seed = 0;
  auto* seed_opt = app.add_option("--seed", seed, "random seed");
  app.add_option("--jobs", g.jobs, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--log-level", g.log_level, "error, warn, info or debug")
      ->check(CLI::IsMember({"error", "warn", "info", "debug"}));
  app.fallthrough();

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic corpus");
  synth_cmd->add_option("--out", synth.out, "output directory")->required();
  synth_cmd->add_option("--relations", synth.relations)->check(CLI::Range(1, 30));
  synth_cmd->add_option("--entities", synth.entities)->check(CLI::PositiveNumber);

  BuildArgs build;
  auto* build_cmd = app.add_subcommand("build", "align facts to sentences");
  build_cmd->add_option("--docs", build.docs)->required()->check(CLI::ExistingFile);
  build_cmd->add_option("--facts", build.facts)->required()->check(CLI::ExistingFile);
  build_cmd->add_option("--entities", build.entities)->check(CLI::ExistingFile);
  build_cmd->add_option("--out", build.out)->required();
  build_cmd->add_option("--report", build.report)->required();

  QuerifyArgs querify;
  auto* querify_cmd = app.add_subcommand("querify", "instantiate verified templates");
  querify_cmd->add_option("--templates", querify.templates)->required()->check(CLI::ExistingFile);
  querify_cmd->add_option("--instances", querify.instances)->required()->check(CLI::ExistingFile);
  querify_cmd->add_option("--out", querify.out)->required();

  NegativesArgs negatives;
  auto* negatives_cmd = app.add_subcommand("negatives", "sample unanswerable examples");
  negatives_cmd->add_option("--instances", negatives.instances)->required()->check(CLI::ExistingFile);
  negatives_cmd->add_option("--templates", negatives.templates)->required()->check(CLI::ExistingFile);
  negatives_cmd->add_option("--ratio", negatives.ratio, "positives per negative")
      ->check(CLI::PositiveNumber);
  negatives_cmd->add_option("--out", negatives.out)->required();

  SplitArgs split;
  auto* split_cmd = app.add_subcommand("split", "build train/dev/test folds");
  split_cmd->add_option("--kind", split.kind)->required()->check(
      CLI::IsMember({"entities", "templates", "relations"}));
  split_cmd->add_option("--in", split.inputs, "example files")->required()->check(CLI::ExistingFile);
  split_cmd->add_option("--templates", split.templates)->check(CLI::ExistingFile);
  split_cmd->add_option("--out", split.out)->required();
  split_cmd->add_option("--folds", split.folds)->check(CLI::PositiveNumber);
  split_cmd->add_option("--scale", split.scale, "desk or full size defaults");
  split_cmd->add_option("--train", split.train);
  split_cmd->add_option("--dev", split.dev);
  split_cmd->add_option("--test", split.test);
  split_cmd->add_option("--ratio", split.ratio, "positives per negative")->check(CLI::PositiveNumber);

  PredictArgs predict;
  auto* predict_cmd = app.add_subcommand("predict", "score and decode examples");
  predict_cmd->add_option("--scorer", predict.scorer, "random-ne, lexical or external:<addr>")
      ->required();
  predict_cmd->add_option("--in", predict.in)->required()->check(CLI::ExistingFile);
  predict_cmd->add_option("--out", predict.out)->required();
  predict_cmd->add_option("--bias", predict.bias);
  predict_cmd->add_option("--p-min", predict.p_min);
  predict_cmd->add_option("--max-span-len", predict.max_span_len);
  predict_cmd->add_option("--ensemble", predict.ensemble, "questions per instance");

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "precision, recall and F1");
  eval_cmd->add_option("--pred", eval.pred)->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--gold", eval.gold)->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--out", eval.out);

  CurveArgs curve;
  auto* curve_cmd = app.add_subcommand("curve", "precision/recall over thresholds");
  curve_cmd->add_option("--pred", curve.pred)->required()->check(CLI::ExistingFile);
  curve_cmd->add_option("--gold", curve.gold)->required()->check(CLI::ExistingFile);
  curve_cmd->add_option("--out", curve.out)->required();
  curve_cmd->add_option("--thresholds", curve.thresholds)->delimiter(',');

  ServeArgs serve;
  auto* serve_cmd = app.add_subcommand("serve", "run the annotation HTTP service");
  serve_cmd->add_option("--data", serve.data)->required();
  serve_cmd->add_option("--host", serve.host);
  serve_cmd->add_option("--port", serve.port)->check(CLI::Range(0, 65535));
  serve_cmd->add_option("--trials", serve.trials)->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }
  if (seed_opt->count() > 0) g.seed = seed;
  g_log_level = g.log_level == "error"  ? LogLevel::kError
                : g.log_level == "info" ? LogLevel::kInfo
                : g.log_level == "debug" ? LogLevel::kDebug
                                         : LogLevel::kWarn;

  try {
    if (*synth_cmd) run_synth(g, synth);
    if (*build_cmd) run_build(g, build);
    if (*querify_cmd) run_querify(g, querify);
    if (*negatives_cmd) run_negatives(g, negatives);
    if (*split_cmd) run_split(g, split);
    if (*predict_cmd) run_predict(g, predict);
    if (*eval_cmd) run_eval(g, eval);
    if (*curve_cmd) run_curve(g, curve);
    if (*serve_cmd) run_serve(g, serve);
  } catch (const UsageError& e) {
    log(LogLevel::kError, e.what());
    return 1;
  } catch (const DataError& e) {
    log(LogLevel::kError, e.what());
    return 2;
  } catch (const fs::filesystem_error& e) {
    log(LogLevel::kError, e.what());
    return 2;
  } catch (const ScorerError& e) {
    log(LogLevel::kError, e.what());
    return 3;
  } catch (const std::exception& e) {
    log(LogLevel::kError, e.what());
    return 3;
  }
  return 0;
}
