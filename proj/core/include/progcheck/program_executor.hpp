// Copyright 2026 The progcheck Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "progcheck/atomic_functions.hpp"
#include "progcheck/llm_gateway.hpp"
#include "progcheck/program_dsl.hpp"

namespace progcheck {

enum class AtomicFn { retrieve, question, verify };
std::string_view to_string(AtomicFn fn);

using Value = std::variant<std::string, bool>;

struct TraceEntry {
  std::size_t step = 0;
  AtomicFn fn = AtomicFn::retrieve;
  std::vector<std::string> inputs;
  Value output;
  std::optional<std::string> rationale;   // verify with a parsed verdict
  std::optional<std::string> anomaly;     // e.g. unparseable verdict coerced to False
  std::vector<std::string> doc_ids;       // retrieve only
};

enum class FailureStage { extract, parse, validate, run };
std::string_view to_string(FailureStage stage);

struct ExecutionFailure {
  FailureStage stage = FailureStage::run;
  std::string reason;
};

/// Exactly one of final_prediction and failure is set.
struct ExecutionTrace {
  std::vector<TraceEntry> entries;
  std::optional<bool> final_prediction;
  std::optional<ExecutionFailure> failure;

  /// Every doc id returned by a retrieve call, in first-seen order.
  std::vector<std::string> retrieved_doc_ids() const;
};

/// Stable key order: step, fn, inputs, output, rationale (+ anomaly, doc_ids
/// when present).
nlohmann::ordered_json to_json(const TraceEntry& entry);
nlohmann::ordered_json to_json(const ExecutionTrace& trace);
ExecutionTrace trace_from_json(const nlohmann::json& j);

/// Human-readable rendering used inside critique prompts, one call per line:
///   [1] retrieve("query") -> "evidence"
std::string render_trace(const ExecutionTrace& trace);

/// Name bindings. A name keeps the type of its first assignment.
class Environment {
 public:
  void bind(const std::string& name, Value value);
  const Value& lookup(const std::string& name) const;
  bool contains(const std::string& name) const { return bindings_.count(name) != 0; }

 private:
  std::map<std::string, Value> bindings_;
};

struct ClaimRun {
  bool prediction = false;
  ExecutionTrace trace;                           // of the generated program
  dsl::ProgramSource program;
  bool used_fallback = false;
  std::optional<ExecutionTrace> fallback_trace;   // retrieve + verify, when used
};

/// Interprets reasoning programs against the atomic functions. Holds no
/// mutable state, so one executor may run many claims concurrently.
class ProgramExecutor {
 public:
  ProgramExecutor(const AtomicFunctions& functions, LlmGateway& gateway);

  /// Runs statements in order. Every call is evaluated (no short-circuit),
  /// so the trace holds one entry per call node. Runtime errors end the run
  /// with failure(stage=run).
  ExecutionTrace execute(const dsl::Program& program) const;

  /// Generates a program for `prompt`, then extract -> parse -> validate ->
  /// execute. Any failure falls back to a direct retrieve+verify on the claim.
  ClaimRun run_claim(std::string_view claim, std::string_view prompt) const;

  /// retrieve(claim) then verify(claim, evidence). Never fails on model
  /// output; only transport errors escape.
  ExecutionTrace fallback_verify(std::string_view claim) const;

 private:
  const AtomicFunctions& functions_;
  LlmGateway& gateway_;
};

}  // namespace progcheck
