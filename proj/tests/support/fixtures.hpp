// Copyright 2026 The progcheck Authors
// Licensed under the Apache License, Version 2.0

// Deterministic fixtures shared by unit tests, the acceptance binary and
// benchmarks.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "progcheck/atomic_functions.hpp"
#include "progcheck/bootstrap.hpp"
#include "progcheck/corpus_index.hpp"
#include "progcheck/llm_gateway.hpp"
#include "progcheck/program_executor.hpp"

namespace progcheck::testing {

struct Bm25Fixture {
  std::vector<Document> docs;
  std::vector<std::string> queries;
};
/// Empty scratch directory under the system temp dir, unique per process.
std::filesystem::path fresh_dir(const std::string& name);

/// Every regular file under `dir` (relative path -> bytes), skipping any
/// path whose first component is in `skip`.
std::map<std::string, std::string> snapshot_tree(const std::filesystem::path& dir,
                                                 const std::vector<std::string>& skip = {});

Bm25Fixture bm25_fixture(std::size_t n_docs = 100, std::size_t n_queries = 20, std::uint32_t seed = 7);

/// Two-hop toy world: each claim needs a person's birthplace, then the
/// region of that town. Rules make the scripted backend answer every
/// question and verdict consistently with the gold label.
struct ToyClaim {
  std::string id;
  std::string claim;
  bool label = false;
  int hops = 2;
  std::vector<std::string> gold_doc_ids;
  std::string question;
  std::string answer;
  std::string program;  // what the generator returns (fenced)
};

struct ToyWorld {
  std::vector<Document> docs;
  std::vector<ToyClaim> claims;

  /// ScriptedBackend rules file content.
  nlohmann::json rules() const;
  /// corpus.jsonl, dataset.jsonl (hover-style), rules.json
  void write(const std::filesystem::path& dir) const;
};
ToyWorld toy_world(std::size_t n_claims = 20, std::size_t n_docs = 50);

/// Fixed critique/refine responses used by toy bootstrap runs.
// Index, scripted gateway and executor wired over a toy world. Pinned in
// place because the pieces hold references to each other.
struct ToyStack {
  explicit ToyStack(const ToyWorld& world, std::shared_ptr<const Backend> backend = nullptr, std::size_t top_k = 10);
  ToyStack(const ToyStack&) = delete;
  ToyStack& operator=(const ToyStack&) = delete;

  Bm25Index index;
  LlmGateway gateway;
  AtomicFunctions functions;
  ProgramExecutor executor;
};

// Annotated claims with gold evidence rendered as "title: text".
std::vector<AnnotatedClaim> annotated(const ToyWorld& world);

std::string toy_critique_response();
std::string toy_refine_response();

/// 30 in-grammar reasoning programs.
std::vector<std::string> program_corpus();

struct BadProgram {
  std::string name;
  std::string source;
};
/// Programs outside the grammar or failing static checks.
std::vector<BadProgram> out_of_grammar_programs();

struct MalformedCase {
  std::string claim;
  std::string response;  // generator output
  bool invalid = false;
};
/// 200 generator outputs; exactly 20 are unusable.
std::vector<MalformedCase> malformed_corpus();

}  // namespace progcheck::testing
