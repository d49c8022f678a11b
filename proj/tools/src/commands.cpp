// Copyright 2026 The progcheck Authors
// Licensed under the Apache License, Version 2.0

#include "progcheck/cli/commands.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "progcheck/atomic_functions.hpp"
#include "progcheck/bootstrap.hpp"
#include "progcheck/cli/run_config.hpp"
#include "progcheck/corpus_index.hpp"
#include "progcheck/errors.hpp"
#include "progcheck/eval_harness.hpp"
#include "progcheck/http_backend.hpp"
#include "progcheck/parallel.hpp"
#include "progcheck/program_executor.hpp"

namespace progcheck::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

int exit_code_for(const std::exception& e) {
  if (const auto* pe = dynamic_cast<const Error*>(&e)) {
    switch (pe->category()) {
      case Error::Category::config: return kConfig;
      case Error::Category::data: return kData;
      case Error::Category::transport: return kTransport;
      case Error::Category::logic: return kConfig;
    }
  }
  if (dynamic_cast<const json::exception*>(&e)) return kData;
  if (dynamic_cast<const fs::filesystem_error*>(&e)) return kData;
  return kConfig;
}

namespace {

// Flag values that override the config file when given.
struct Overrides {
  std::string config;
  std::string corpus, index, dataset, format, train;
  std::string backend, script;
  std::string mode, demos, strategy;
  std::string output;
  std::optional<std::size_t> top_k, workers, iterations;
  std::optional<std::uint64_t> seed;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--config", config, "JSON run config");
    cmd->add_option("--corpus", corpus, "Corpus JSON-lines (builds the index in memory)");
    cmd->add_option("--index", index, "Index artifact");
    cmd->add_option("--dataset", dataset, "Dataset JSON-lines");
    cmd->add_option("--format", format, "Dataset format: hover, feverous_s, generic");
    cmd->add_option("--backend", backend, "Model backend: http or scripted");
    cmd->add_option("--script", script, "Scripted backend rules file");
    cmd->add_option("--mode", mode, "Prompt mode: zs, cot, fs");
    cmd->add_option("--demos", demos, "Demonstrations JSON-lines (fs mode)");
    cmd->add_option("--strategy", strategy, "Strategy store directory");
    cmd->add_option("--top-k", top_k, "Documents per retrieve call");
    cmd->add_option("--workers", workers, "Concurrent claims");
  }

  RunConfig resolve() const {
    RunConfig c = config.empty() ? RunConfig{} : load_run_config(config);
    auto set_path = [](fs::path& dst, const std::string& v) {
      if (!v.empty()) dst = v;
    };
    set_path(c.corpus, corpus);
    set_path(c.index, index);
    set_path(c.dataset, dataset);
    set_path(c.train, train);
    set_path(c.script, script);
    set_path(c.demos, demos);
    set_path(c.strategy, strategy);
    set_path(c.output, output);
    if (!format.empty()) c.format = parse_dataset_format(format);
    if (backend == "scripted") c.backend = BackendKind::scripted;
    else if (backend == "http") c.backend = BackendKind::http;
    else if (!backend.empty()) throw ConfigError("--backend must be http or scripted");
    if (!mode.empty()) c.mode = parse_prompt_mode(mode);
    if (top_k) c.top_k = *top_k;
    if (workers) c.workers = *workers;
    if (iterations) c.optimizer.iterations = *iterations;
    if (seed) c.seed = *seed;
    c.check();
    return c;
  }
};

Bm25Index open_index(const RunConfig& c) {
  if (!c.index.empty() && fs::exists(c.index)) return Bm25Index::load(c.index);
  if (!c.corpus.empty()) return Bm25Index::build(load_corpus_jsonl(c.corpus), c.retrieval);
  if (!c.index.empty()) throw ConfigError("index not found: " + c.index.string());
  throw ConfigError("no index or corpus configured");
}

std::shared_ptr<const Backend> make_backend(const RunConfig& c) {
  if (c.backend == BackendKind::scripted) {
    return std::make_shared<ScriptedBackend>(ScriptedBackend::from_file(c.script));
  }
  return std::make_shared<HttpChatBackend>(HttpChatBackend::from_config(c.gateway));
}

// Index, gateway, functions and executor for one command. Members refer to
// each other, so it lives at a fixed address.
class Pipeline {
 public:
  explicit Pipeline(const RunConfig& c)
      : index(open_index(c)),
        gateway(c.gateway, make_backend(c)),
        functions(index, gateway, c.effective_top_k()),
        executor(functions, gateway),
        strategy(c.strategy.empty() ? initial_strategy() : load_strategy(c.strategy)) {
    if (c.mode == PromptMode::fs) demos = load_demonstrations(c.demos);
  }
  Pipeline(const Pipeline&) = delete;
  Pipeline& operator=(const Pipeline&) = delete;

  std::string prompt_for(PromptMode mode, std::string_view claim) const {
    return render_prompt(strategy, {mode, demos ? &*demos : nullptr}, claim);
  }

  Bm25Index index;
  LlmGateway gateway;
  AtomicFunctions functions;
  ProgramExecutor executor;
  Strategy strategy;
  std::optional<DemonstrationSet> demos;
};

ordered_json run_to_json(const ClaimRun& run) {
  ordered_json j;
  j["prediction"] = run.prediction;
  j["used_fallback"] = run.used_fallback;
  j["program"] = run.program.code;
  j["trace"] = to_json(run.trace);
  j["fallback_trace"] = run.fallback_trace ? to_json(*run.fallback_trace) : ordered_json();
  return j;
}

std::vector<std::string> retrieved_ids(const ClaimRun& run) {
  std::vector<std::string> ids = run.trace.retrieved_doc_ids();
  if (run.fallback_trace) {
    for (auto& id : run.fallback_trace->retrieved_doc_ids())
      if (std::find(ids.begin(), ids.end(), id) == ids.end()) ids.push_back(id);
  }
  return ids;
}

// ---- index ----------------------------------------------------------------

int cmd_index(const std::string& corpus, const std::string& out_path, bool text_only, double k1, double b,
              std::size_t top_k, std::ostream& out) {
  RetrievalConfig rc;
  rc.k1 = k1;
  rc.b = b;
  rc.top_k = top_k;
  rc.fields = text_only ? IndexedFields::text_only : IndexedFields::title_and_text;
  rc.check();
  auto index = Bm25Index::build(load_corpus_jsonl(corpus), rc);
  if (auto parent = fs::path(out_path).parent_path(); !parent.empty()) fs::create_directories(parent);
  index.save(out_path);
  out << "indexed " << index.size() << " documents -> " << out_path << '\n';
  return kOk;
}

// ---- verify ---------------------------------------------------------------

int cmd_verify(const Overrides& ov, const std::string& claim, bool show_trace, std::ostream& out) {
  RunConfig c = ov.resolve();
  Pipeline p(c);
  ClaimRun run = p.executor.run_claim(claim, p.prompt_for(c.mode, claim));
  out << (run.prediction ? "True" : "False") << '\n';
  if (show_trace) {
    ordered_json j;
    j["claim"] = claim;
    const ordered_json body = run_to_json(run);
    for (const auto& [k, v] : body.items()) j[k] = v;
    out << j.dump(2) << '\n';
  }
  return kOk;
}

// ---- bench ----------------------------------------------------------------

struct JournalEntry {
  bool prediction = false;
  std::vector<std::string> retrieved;
};

// Completed claims keyed by dataset position. A torn final line from an
// interrupted run is ignored.
std::map<std::size_t, JournalEntry> read_journal(const fs::path& path, const std::vector<BenchmarkRecord>& records) {
  std::map<std::size_t, JournalEntry> done;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("index")) continue;
    std::size_t i = j.at("index").get<std::size_t>();
    if (i >= records.size() || j.value("id", std::string()) != records[i].id) {
      throw DataError("journal " + path.string() + " does not match the dataset");
    }
    JournalEntry e;
    e.prediction = j.at("prediction").get<bool>();
    e.retrieved = j.at("retrieved_doc_ids").get<std::vector<std::string>>();
    done[i] = std::move(e);
  }
  return done;
}

int cmd_bench(const Overrides& ov, std::optional<std::size_t> max_claims, std::ostream& out, std::ostream& err) {
  RunConfig c = ov.resolve();
  if (c.dataset.empty()) throw ConfigError("bench requires a dataset");
  auto records = load_dataset(c.dataset, c.format);
  if (records.empty()) throw DataError("dataset " + c.dataset.string() + " has no records");
  Pipeline p(c);

  fs::create_directories(c.output);
  std::ofstream(c.output / "config.json", std::ios::binary) << to_json(c).dump(2) << '\n';
  const fs::path journal_path = c.output / "journal.jsonl";
  auto done = read_journal(journal_path, records);

  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < records.size(); ++i)
    if (!done.count(i)) pending.push_back(i);
  if (max_claims && pending.size() > *max_claims) pending.resize(*max_claims);

  std::mutex journal_mutex;
  std::ofstream journal(journal_path, std::ios::app | std::ios::binary);
  parallel_for(pending.size(), c.workers, [&](std::size_t k) {
    const std::size_t i = pending[k];
    ClaimRun run = p.executor.run_claim(records[i].claim, p.prompt_for(c.mode, records[i].claim));
    ordered_json j;
    j["index"] = i;
    j["id"] = records[i].id;
    j["claim"] = records[i].claim;
    j["retrieved_doc_ids"] = retrieved_ids(run);
    const ordered_json body = run_to_json(run);
    for (const auto& [key, v] : body.items()) j[key] = v;
    const std::string line = j.dump() + "\n";
    std::lock_guard lock(journal_mutex);
    journal.write(line.data(), static_cast<std::streamsize>(line.size()));
    journal.flush();
    done[i] = JournalEntry{run.prediction, retrieved_ids(run)};
  });
  journal.close();
  p.gateway.write_call_log(c.output / "logs" / "calls.jsonl");

  if (done.size() < records.size()) {
    out << done.size() << "/" << records.size() << " claims complete; rerun to resume\n";
    return kOk;
  }

  std::vector<bool> preds;
  std::vector<std::vector<std::string>> retrieved;
  for (const auto& [i, e] : done) {
    preds.push_back(e.prediction);
    retrieved.push_back(e.retrieved);
  }
  bool any_gold = std::any_of(records.begin(), records.end(), [](const auto& r) { return !r.gold_doc_ids.empty(); });
  auto report = evaluate_run(records, preds, any_gold ? &retrieved : nullptr);
  std::ofstream(c.output / "report.json", std::ios::binary) << to_json(report).dump(2) << '\n';
  const std::string table = format_table(report);
  std::ofstream(c.output / "report.txt", std::ios::binary) << table;
  write_per_claim_csv(c.output / "per_claim.csv", records, preds, any_gold ? &retrieved : nullptr);
  out << table;
  (void)err;
  return kOk;
}

// ---- bootstrap run ----------------------------------------------------------

std::vector<AnnotatedClaim> annotated_claims(const std::vector<BenchmarkRecord>& records, const Bm25Index& index) {
  std::vector<AnnotatedClaim> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    AnnotatedClaim a{r.id, r.claim, r.label, {}};
    for (const auto& id : r.gold_doc_ids) {
      const Document* d = index.find(id);
      if (!d) {
        a.gold_evidence.push_back(id);
      } else {
        a.gold_evidence.push_back(d->title.empty() ? d->text : d->title + ": " + d->text);
      }
    }
    out.push_back(std::move(a));
  }
  return out;
}

int cmd_bootstrap(const Overrides& ov, std::ostream& out, std::ostream& err) {
  RunConfig c = ov.resolve();
  const fs::path source = c.train.empty() ? c.dataset : c.train;
  if (source.empty()) throw ConfigError("bootstrap requires a training dataset");
  Pipeline p(c);
  auto train = annotated_claims(load_dataset(source, c.format), p.index);

  OptimizerConfig oc = c.optimizer;
  oc.workers = c.workers;
  SeededRng rng(c.seed);
  auto pool = sample_pool(train, oc.pool_size, rng);

  Strategy start = p.strategy;
  start.run_id = oc.run_id;
  fs::create_directories(c.output);
  std::ofstream(c.output / "config.json", std::ios::binary) << to_json(c).dump(2) << '\n';
  PipelineSteps steps(p.executor, p.gateway, pool, oc);
  steps.set_transcript_dir(c.output / "transcripts");
  OptimizerResult result = run_optimizer(steps, pool, start, oc, rng);

  write_optimizer_artifacts(c.output, result, c.seed);
  {
    std::ofstream pool_out(c.output / "pool.jsonl", std::ios::binary);
    for (const auto& a : pool) pool_out << ordered_json{{"id", a.id}, {"claim", a.claim}, {"label", a.label}}.dump() << '\n';
  }
  p.gateway.write_call_log(c.output / "logs" / "calls.jsonl");
  {
    std::ofstream w(c.output / "logs" / "warnings.txt", std::ios::binary);
    for (const auto& msg : steps.warnings()) {
      w << msg << '\n';
      err << "warning: " << msg << '\n';
    }
  }
  out << "best score " << result.best_score << " (strategy v" << result.best_strategy.version << ", "
      << result.best_demos.demos.size() << " demonstrations) -> " << c.output.string() << '\n';
  return kOk;
}

// ---- trace show -------------------------------------------------------------

int cmd_trace_show(const std::string& run_dir, const std::string& claim_id, bool as_json, std::ostream& out) {
  const fs::path journal = fs::path(run_dir) / "journal.jsonl";
  std::ifstream in(journal);
  if (!in) throw ConfigError("no journal in " + run_dir);
  std::string line;
  while (std::getline(in, line)) {
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || j.value("id", std::string()) != claim_id) continue;
    if (as_json) {
      out << j.dump(2) << '\n';
      return kOk;
    }
    out << "claim: " << j.value("claim", std::string()) << '\n';
    out << "prediction: " << (j.value("prediction", false) ? "True" : "False") << '\n';
    out << "program:\n" << j.value("program", std::string()) << '\n';
    out << "trace:\n" << render_trace(trace_from_json(j.at("trace"))) << '\n';
    if (j.contains("fallback_trace") && !j.at("fallback_trace").is_null()) {
      out << "fallback trace:\n" << render_trace(trace_from_json(j.at("fallback_trace"))) << '\n';
    }
    return kOk;
  }
  throw DataError("claim " + claim_id + " not found in " + journal.string());
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Program-guided claim verification", "progcheck"};
  app.require_subcommand(1);

  std::string corpus, index_out;
  bool text_only = false;
  double k1 = 0.9, b = 0.4;
  std::size_t top_k = 10;
  auto* index = app.add_subcommand("index", "Build a BM25 index artifact from a corpus");
  index->add_option("--corpus", corpus, "Corpus JSON-lines with id/title/text")->required();
  index->add_option("--out", index_out, "Index artifact path")->required();
  index->add_flag("--text-only", text_only, "Index document text without titles");
  index->add_option("--k1", k1, "BM25 term-frequency saturation");
  index->add_option("--b", b, "BM25 length normalisation");
  index->add_option("--top-k", top_k, "Default documents per query");

  Overrides verify_ov;
  std::string claim;
  bool show_trace = false;
  auto* verify = app.add_subcommand("verify", "Verify one claim");
  verify->add_option("claim", claim, "Claim text")->required();
  verify->add_flag("--trace", show_trace, "Print the execution trace as JSON");
  verify_ov.add_to(verify);

  Overrides bench_ov;
  std::optional<std::size_t> max_claims;
  auto* bench = app.add_subcommand("bench", "Run a dataset and write metric reports");
  bench_ov.add_to(bench);
  bench->add_option("--out", bench_ov.output, "Run directory");
  bench->add_option("--max-claims", max_claims, "Stop after this many new claims (resume later)");

  Overrides boot_ov;
  auto* bootstrap = app.add_subcommand("bootstrap", "Strategy refinement and demonstration bootstrapping");
  bootstrap->require_subcommand(1);
  auto* boot_run = bootstrap->add_subcommand("run", "Run the optimizer");
  boot_ov.add_to(boot_run);
  boot_run->add_option("--train", boot_ov.train, "Training JSON-lines (defaults to the dataset)");
  boot_run->add_option("--seed", boot_ov.seed, "Random seed");
  boot_run->add_option("--iterations", boot_ov.iterations, "Optimizer iterations");
  boot_run->add_option("--out", boot_ov.output, "Run directory");

  std::string run_dir, claim_id;
  bool as_json = false;
  auto* trace = app.add_subcommand("trace", "Inspect recorded traces");
  trace->require_subcommand(1);
  auto* show = trace->add_subcommand("show", "Print the trace of one benchmark claim");
  show->add_option("run", run_dir, "Benchmark run directory")->required();
  show->add_option("claim-id", claim_id, "Claim id")->required();
  show->add_flag("--json", as_json, "Print the raw journal record");

  std::vector<const char*> argv{"progcheck"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*index) return cmd_index(corpus, index_out, text_only, k1, b, top_k, out);
    if (*verify) return cmd_verify(verify_ov, claim, show_trace, out);
    if (*bench) return cmd_bench(bench_ov, max_claims, out, err);
    if (*boot_run) return cmd_bootstrap(boot_ov, out, err);
    if (*show) return cmd_trace_show(run_dir, claim_id, as_json, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
  return kConfig;
}

}  // namespace progcheck::cli
