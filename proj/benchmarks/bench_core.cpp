// Copyright 2026 The progcheck Authors
// Licensed under the Apache License, Version 2.0

#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "progcheck/corpus_index.hpp"
#include "progcheck/eval_harness.hpp"
#include "progcheck/program_dsl.hpp"

namespace {

using namespace progcheck;

std::vector<Document> synthetic_corpus(std::size_t n) {
  static const char* words[] = {"river", "castle", "harbor", "forest", "bridge", "valley", "tower", "island",
                                "market", "temple", "north", "south", "king",   "queen",  "sailor", "poet",
                                "built",  "ruled",  "named", "1492",  "stone", "iron",   "salt",   "amber"};
  std::mt19937 rng(1);
  std::uniform_int_distribution<std::size_t> pick(0, std::size(words) - 1);
  std::vector<Document> docs;
  for (std::size_t i = 0; i < n; ++i) {
    std::string text;
    for (int w = 0; w < 40; ++w) text += std::string(words[pick(rng)]) + " ";
    docs.push_back({"d" + std::to_string(i), words[pick(rng)], text});
  }
  return docs;
}

void BM_IndexBuild(benchmark::State& state) {
  auto docs = synthetic_corpus(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(Bm25Index::build(docs, {}));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_IndexBuild)->Arg(1000)->Arg(10000);

void BM_Retrieve(benchmark::State& state) {
  auto index = Bm25Index::build(synthetic_corpus(static_cast<std::size_t>(state.range(0))), {});
  for (auto _ : state) benchmark::DoNotOptimize(index.retrieve("king built the stone bridge near the river", 10));
}
BENCHMARK(BM_Retrieve)->Arg(1000)->Arg(10000)->Arg(50000);

const char* kProgram =
    "# two hops\n"
    "evidence_1 = retrieve(\"Titanic film director\")\n"
    "director = question(\"Who directed Titanic?\", evidence_1)\n"
    "evidence_2 = retrieve(f\"{director} born\")\n"
    "born = verify(f\"{director} was born in Canada.\", evidence_2)\n"
    "directed = verify(f\"{director} directed Titanic.\", evidence_1)\n"
    "final_prediction = born and (directed or not born)\n";

void BM_ParseValidate(benchmark::State& state) {
  for (auto _ : state) {
    auto p = dsl::parse(kProgram);
    benchmark::DoNotOptimize(dsl::validate(p).ok());
  }
}
BENCHMARK(BM_ParseValidate);

void BM_PrintRoundTrip(benchmark::State& state) {
  auto p = dsl::parse(kProgram);
  for (auto _ : state) benchmark::DoNotOptimize(dsl::parse(dsl::print(p)));
}
BENCHMARK(BM_PrintRoundTrip);

void BM_Metrics(benchmark::State& state) {
  std::mt19937 rng(3);
  std::vector<bool> p(static_cast<std::size_t>(state.range(0))), g(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = rng() & 1;
    g[i] = i % 2;
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(macro_f1(p, g));
    benchmark::DoNotOptimize(balanced_accuracy(p, g));
  }
}
BENCHMARK(BM_Metrics)->Arg(1000)->Arg(100000);

}  // namespace

BENCHMARK_MAIN();
