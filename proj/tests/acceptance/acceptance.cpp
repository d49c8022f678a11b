// Copyright 2026 The progcheck Authors
// Licensed under the Apache License, Version 2.0

// Offline acceptance run. One PASS/FAIL line per criterion; nonzero exit if
// any criterion fails. Tolerances and time limits are pinned below.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "executor_rig.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "progcheck/bootstrap.hpp"
#include "progcheck/cli/commands.hpp"
#include "progcheck/cli/run_config.hpp"
#include "progcheck/errors.hpp"
#include "progcheck/eval_harness.hpp"
#include "progcheck/program_dsl.hpp"
#include "progcheck/strategy.hpp"
#include "scripted_steps.hpp"

namespace fs = std::filesystem;
using namespace progcheck;
using namespace progcheck::testing;

namespace {

constexpr double kBm25ScoreTol = 1e-9;
constexpr double kMetricTol = 1e-15;  // vs exact rationals
constexpr double kBm25Seconds = 5.0;
constexpr double kOptimizerSeconds = 10.0;
constexpr double kToySeconds = 30.0;

struct Outcome {
  bool pass = true;
  std::string detail;
  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

// ---------------------------------------------------------------------------

Outcome bm25_oracle() {
  Outcome o;
  auto t0 = Clock::now();
  auto fx = bm25_fixture(100, 20, 7);
  RetrievalConfig rc;
  auto index = Bm25Index::build(fx.docs, rc);
  std::vector<OracleDoc> odocs;
  for (std::size_t i = 0; i < index.size(); ++i) odocs.push_back({index.documents()[i].doc_id, index.indexed_text(i)});
  std::size_t compared = 0;
  for (const auto& q : fx.queries) {
    for (std::size_t k : {1u, 5u, 10u, 100u}) {
      auto got = index.retrieve(q, k);
      auto want = brute_force_bm25(odocs, q, rc.k1, rc.b, k);
      if (got.size() != want.size()) {
        o.fail("size mismatch for '" + q + "'");
        continue;
      }
      for (std::size_t i = 0; i < got.size(); ++i, ++compared) {
        if (got[i].doc_id != want[i].id) o.fail("rank mismatch for '" + q + "'");
        if (std::abs(got[i].score - want[i].score) > kBm25ScoreTol) o.fail("score mismatch for '" + q + "'");
      }
    }
  }
  double secs = seconds_since(t0);
  if (secs >= kBm25Seconds) o.fail("took " + std::to_string(secs) + " s");
  if (o.pass) o.detail = std::to_string(compared) + " ranked hits, " + std::to_string(secs) + " s";
  return o;
}

Outcome metric_oracles() {
  Outcome o;
  auto check = [&](const std::vector<bool>& p, const std::vector<bool>& g) {
    bool both = std::count(g.begin(), g.end(), true) && std::count(g.begin(), g.end(), false);
    if (!both) return;
    if (std::abs(macro_f1(p, g) - oracle_macro_f1(p, g).value()) > kMetricTol) o.fail("macro_f1 disagrees");
    if (std::abs(balanced_accuracy(p, g) - oracle_balanced_accuracy(p, g).value()) > kMetricTol)
      o.fail("balanced_accuracy disagrees");
  };
  // hand-derived fixtures
  const std::vector<bool> golds10 = {true, true, false, false, false, false, true, true, true, false};
  const std::vector<bool> all_true(10, true);
  if (std::abs(macro_f1(all_true, golds10) - 1.0 / 3.0) > kMetricTol) o.fail("1/3 fixture");
  check(all_true, golds10);
  const std::vector<bool> g4 = {true, true, true, false}, p4 = {true, false, true, false};
  if (std::abs(balanced_accuracy(p4, g4) - 5.0 / 6.0) > kMetricTol) o.fail("5/6 fixture");
  check(p4, g4);
  std::mt19937 rng(2024);
  std::size_t cases = 0;
  while (cases < 1000) {
    std::size_t n = std::uniform_int_distribution<std::size_t>(2, 20)(rng);
    std::vector<bool> p(n), g(n);
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = rng() & 1;
      g[i] = rng() & 1;
    }
    if (std::count(g.begin(), g.end(), true) == 0 || std::count(g.begin(), g.end(), false) == 0) continue;
    check(p, g);
    ++cases;
  }
  if (o.pass) o.detail = "1000 random cases + fixtures";
  return o;
}

Outcome dsl_round_trip() {
  Outcome o;
  for (const auto& src : program_corpus()) {
    try {
      auto p1 = dsl::parse(src);
      if (!dsl::validate(p1).ok()) o.fail("corpus program fails validation");
      auto printed = dsl::print(p1);
      auto p2 = dsl::parse(printed);
      if (!(p1 == p2) || dsl::print(p2) != printed) o.fail("not a fixed point:\n" + src);
    } catch (const std::exception& e) {
      o.fail(std::string("corpus program rejected: ") + e.what());
    }
  }
  std::size_t rejected = 0;
  auto bad = out_of_grammar_programs();
  for (const auto& b : bad) {
    try {
      if (!dsl::validate(dsl::parse(b.source)).ok()) ++rejected;
      else o.fail("accepted: " + b.name);
    } catch (const ParseError&) {
      ++rejected;
    }
  }
  if (o.pass) o.detail = "30 fixed points, " + std::to_string(rejected) + "/" + std::to_string(bad.size()) + " rejected";
  return o;
}

Outcome executor_fidelity() {
  Outcome o;
  {
    Rig rig(oracle_backend({{"Who directed Titanic?", "James Cameron"}}, [](const std::string&) { return verdict_text(true); }));
    auto t = rig.exec.execute(dsl::parse(kFiveCallProgram));
    const AtomicFn order[] = {AtomicFn::retrieve, AtomicFn::question, AtomicFn::retrieve, AtomicFn::verify,
                              AtomicFn::verify};
    if (t.entries.size() != 5) {
      o.fail("five-call program produced " + std::to_string(t.entries.size()) + " entries");
    } else {
      for (std::size_t i = 0; i < 5; ++i)
        if (t.entries[i].fn != order[i] || t.entries[i].step != i + 1) o.fail("entry out of order");
    }
  }
  std::mt19937 rng(17);
  std::size_t assignments = 0;
  for (int n = 1; n <= 4; ++n) {
    for (int shape = 0; shape < 12; ++shape) {
      Formula f = random_formula(0, n, rng);
      auto program = dsl::parse("e = retrieve(\"Titanic\")\nfinal_prediction = " + f.source() + "\n");
      for (int mask = 0; mask < (1 << n); ++mask, ++assignments) {
        std::vector<bool> a;
        for (int i = 0; i < n; ++i) a.push_back((mask >> i) & 1);
        Rig rig(oracle_backend({}, [&](const std::string& claim) {
          return verdict_text(a[std::stoi(claim.substr(std::string("sub-claim ").size()))]);
        }));
        auto t = rig.exec.execute(program);
        if (t.final_prediction != f.eval(a)) o.fail("truth table mismatch: " + f.source());
      }
    }
  }
  if (o.pass) o.detail = "5-entry trace, " + std::to_string(assignments) + " assignments";
  return o;
}

Outcome fallback_totality() {
  Outcome o;
  auto corpus = malformed_corpus();
  std::map<std::string, std::string> replies;
  for (const auto& c : corpus) replies[c.claim] = c.response;
  Rig rig(oracle_backend({}, [](const std::string&) { return verdict_text(true); },
                         [&replies](const std::string& claim) { return replies.at(claim); }));
  std::size_t invalid = 0, fallbacks = 0, booleans = 0;
  for (const auto& c : corpus) {
    try {
      auto run = rig.exec.run_claim(c.claim, "# Input Claim:\n```\n" + c.claim + "\n```\n");
      ++booleans;
      if (run.used_fallback != c.invalid) o.fail("fallback mismatch on: " + c.response);
      fallbacks += run.used_fallback;
    } catch (const std::exception& e) {
      o.fail(std::string("run_claim threw: ") + e.what());
    }
    invalid += c.invalid;
  }
  if (corpus.size() != 200 || invalid != 20) o.fail("corpus shape changed");
  if (o.pass)
    o.detail = std::to_string(booleans) + "/200 booleans, fallback on " + std::to_string(fallbacks) + "/" +
               std::to_string(invalid) + " invalid";
  return o;
}

Outcome optimizer_oracle() {
  Outcome o;
  auto t0 = Clock::now();
  // predetermined candidate scores: iteration 1 has one candidate, then N = 3
  const std::vector<std::vector<double>> table = {
      {0.55}, {0.50, 0.61, 0.61}, {0.60, 0.58, 0.40}, {0.72, 0.70, 0.72}, {0.72, 0.10, 0.71}, {0.20, 0.30, 0.69}};
  std::vector<double> flat;
  for (const auto& row : table) flat.insert(flat.end(), row.begin(), row.end());
  auto ref = simulate_bootstrap(table);

  auto run_once = [&](const fs::path& dir) {
    ScriptedSteps steps(flat);
    OptimizerConfig config;
    config.iterations = table.size();
    SeededRng rng(77);
    auto result = run_optimizer(steps, synthetic_claims(40), initial_strategy(), config, rng);
    write_optimizer_artifacts(dir, result, 77);
    return result;
  };
  auto dir_a = fresh_dir("accept-opt-a"), dir_b = fresh_dir("accept-opt-b");
  auto r = run_once(dir_a);
  run_once(dir_b);

  double prev = -1;
  for (std::size_t t = 0; t < table.size(); ++t) {
    if (r.history[t].score_star != ref[t].score_star) o.fail("best score differs at iteration " + std::to_string(t + 1));
    if (r.history[t].score_star < prev) o.fail("best score decreased");
    prev = r.history[t].score_star;
  }
  const auto& last = ref.back();
  if (r.best_score != last.score_star) o.fail("final score differs");
  if (r.best_iteration != last.best_iteration) o.fail("best iteration differs");
  if (r.best_strategy.version != last.best_iteration) o.fail("best strategy is not the refinement of the best iteration");
  if (!(r.best_demos == r.history[last.best_iteration - 1].candidate_sets[last.best_candidate]))
    o.fail("best demonstrations are not the reference candidate");
  if (snapshot_tree(dir_a) != snapshot_tree(dir_b)) o.fail("artifacts differ between seeded runs");
  double secs = seconds_since(t0);
  if (secs >= kOptimizerSeconds) o.fail("took " + std::to_string(secs) + " s");
  if (o.pass) {
    std::ostringstream d;
    d << "best score " << r.best_score << " at iteration " << *r.best_iteration << ", " << secs << " s";
    o.detail = d.str();
  }
  return o;
}

Outcome prompt_goldens() {
  Outcome o;
  auto golden = [](const std::string& n) { return slurp(fs::path(PROGCHECK_TEST_DIR) / "golden" / n); };
  Strategy s;
  s.decomposition_text = "Split the claim into facts that can each be checked alone.";
  s.info_gathering_text = "Search for each named entity before asking questions about it.";
  const std::string claim = "Titanic was directed by James Cameron.";
  const std::string evidence = "Titanic is a 1997 film directed by James Cameron.";

  if (render_question_prompt("Who directed Titanic?", evidence) != golden("question.txt")) o.fail("question");
  if (render_verify_prompt(claim, evidence) != golden("verify.txt")) o.fail("verify");
  if (render_prompt(s, {PromptMode::zs, nullptr}, claim) != golden("backbone_zs.txt")) o.fail("backbone");

  ClaimResult r;
  r.claim = {"t1", claim, true, {"Titanic (1997 film): " + evidence}};
  r.program_code = "final_prediction = verify(\"" + claim + "\", retrieve(\"Titanic\"))\n";
  r.prediction = true;
  TraceEntry a;
  a.step = 1;
  a.fn = AtomicFn::retrieve;
  a.inputs = {"Titanic"};
  a.output = evidence;
  TraceEntry b;
  b.step = 2;
  b.fn = AtomicFn::verify;
  b.inputs = {claim, evidence};
  b.output = true;
  b.rationale = "The evidence names the director.";
  r.trace.entries = {a, b};
  r.trace.final_prediction = true;
  if (render_critique_prompt(s, r) != golden("critique.txt")) o.fail("critique");
  if (render_refine_prompt(s, "- Check the year separately.", "no suggestions") != golden("refine.txt"))
    o.fail("refine");
  if (o.pass) o.detail = "question, verify, backbone, critique, refine";
  return o;
}

Outcome toy_benchmark() {
  Outcome o;
  auto t0 = Clock::now();
  auto dir = fresh_dir("accept-toy");
  auto world = toy_world(20, 50);
  world.write(dir);
  std::ostringstream out, err;
  int code = cli::run({"bench", "--corpus", (dir / "corpus.jsonl").string(), "--dataset",
                       (dir / "dataset.jsonl").string(), "--format", "hover", "--backend", "scripted", "--script",
                       (dir / "rules.json").string(), "--out", (dir / "run").string()},
                      out, err);
  if (code != 0) {
    o.fail("bench exited " + std::to_string(code) + ": " + err.str());
    return o;
  }
  auto report = nlohmann::json::parse(slurp(dir / "run" / "report.json"));
  if (report.value("n", 0) != 20) o.fail("expected 20 claims");
  if (report.value("macro_f1", 0.0) != 1.0) o.fail("macro F1 " + report["macro_f1"].dump());
  if (report.value("bacc", 0.0) != 1.0) o.fail("BAcc " + report["bacc"].dump());
  if (report.value("recall_at_10", 0.0) != 1.0) o.fail("recall@10 " + report["recall_at_10"].dump());
  double secs = seconds_since(t0);
  if (secs >= kToySeconds) o.fail("took " + std::to_string(secs) + " s");
  if (o.pass) o.detail = "F1 = BAcc = recall@10 = 1.0, " + std::to_string(secs) + " s";
  return o;
}

Outcome config_fidelity() {
  Outcome o;
  cli::RunConfig c;
  auto snap = cli::to_json(c);
  auto expected = nlohmann::json::parse(slurp(fs::path(PROGCHECK_TEST_DIR) / "data" / "default_config.json"));
  if (nlohmann::json(snap) != expected) o.fail("snapshot differs from tests/data/default_config.json");
  if (c.retrieval.k1 != 0.9 || c.retrieval.b != 0.4) o.fail("BM25 parameters");
  cli::RunConfig hover = c, fev = c;
  hover.format = DatasetFormat::hover;
  fev.format = DatasetFormat::feverous_s;
  if (hover.effective_top_k() != 10 || fev.effective_top_k() != 5) o.fail("top_k by dataset");
  if (c.optimizer.pool_size != 40 || c.optimizer.batch_size != 5 || c.optimizer.candidates != 3)
    o.fail("optimizer sizes");
  if (c.gateway.roles.at(ModelRole::generator).temperature != 0.0 ||
      c.gateway.roles.at(ModelRole::function_llm).temperature != 0.0 ||
      c.gateway.roles.at(ModelRole::optimizer).temperature != 0.7)
    o.fail("temperatures");
  if (o.pass) o.detail = "k1 0.9, b 0.4, top_k 10/5, pool 40, batch 5, N 3, temperatures 0.0/0.7";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"bm25-oracle", bm25_oracle},
      {"metric-oracles", metric_oracles},
      {"dsl-round-trip", dsl_round_trip},
      {"executor-trace-fidelity", executor_fidelity},
      {"fallback-totality", fallback_totality},
      {"optimizer-oracle", optimizer_oracle},
      {"prompt-goldens", prompt_goldens},
      {"toy-benchmark", toy_benchmark},
      {"config-fidelity", config_fidelity},
  };
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.fail(std::string("threw: ") + e.what());
    }
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << "  " << o.detail << '\n';
    failures += !o.pass;
  }
  std::cout << (failures ? "FAILED " : "ALL PASSED ") << criteria.size() - failures << "/" << criteria.size() << '\n';
  return failures ? 1 : 0;
}
