// Copyright 2026 The progcheck Authors
// Licensed under the Apache License, Version 2.0

// Strategy refinement and demonstration bootstrapping. run_optimizer drives
// the loop over an OptimizerSteps implementation: PipelineSteps wires the
// real generator/optimizer models, tests substitute scripted steps.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "progcheck/program_executor.hpp"
#include "progcheck/rng.hpp"
#include "progcheck/strategy.hpp"

namespace progcheck {

struct AnnotatedClaim {
  std::string id;
  std::string claim;
  bool label = false;
  std::vector<std::string> gold_evidence;  // document texts (or ids when unresolved)
};

struct OptimizerConfig {
  std::size_t pool_size = 40;
  std::size_t batch_size = 5;
  std::size_t candidates = 3;
  std::size_t demo_set_size = 5;
  std::size_t iterations = 8;
  std::size_t workers = 1;
  std::string run_id = "run";
};

/// Uniform sample without replacement, in sampled order.
std::vector<AnnotatedClaim> sample_pool(const std::vector<AnnotatedClaim>& train, std::size_t n, SeededRng& rng);

/// Batch for a 1-based iteration: consecutive slices of `size`, cycling after
/// floor(|pool| / size) batches.
std::vector<AnnotatedClaim> next_minibatch(const std::vector<AnnotatedClaim>& pool, std::size_t iteration,
                                           std::size_t size = 5);

/// N independent without-replacement samples of set_size claims. Different
/// sets may overlap.
std::vector<std::vector<AnnotatedClaim>> bootstrap_candidates(const std::vector<AnnotatedClaim>& pool, std::size_t n,
                                                              std::size_t set_size, SeededRng& rng);

struct Critique {
  std::string reconstructed_path;
  std::vector<std::string> decomposition_errors;
  std::vector<std::string> retrieval_errors;
  std::string decomposition_suggestions;
  std::string info_gathering_suggestions;
};

/// Result of running one claim with the current strategy, as fed to critique.
struct ClaimResult {
  AnnotatedClaim claim;
  std::string program_code;
  bool prediction = false;
  ExecutionTrace trace;
  std::optional<ExecutionTrace> fallback_trace;  // when the program failed
};

std::string render_critique_prompt(const Strategy& strategy, const ClaimResult& result);
/// Throws CritiqueParseError when there is no <suggestions> block.
Critique parse_critique(std::string_view response);

/// True when a suggestions field carries nothing actionable.
bool is_no_suggestions(std::string_view field);

std::string render_refine_prompt(const Strategy& strategy, std::string_view decomposition_suggestions,
                                 std::string_view info_gathering_suggestions);
/// Parses <refined_prompt>. A field saying "remain unchanged" keeps the
/// parent text. Throws RefineParseError.
Strategy parse_refinement(std::string_view response, const Strategy& parent);

class OptimizerSteps {
 public:
  virtual ~OptimizerSteps() = default;
  /// Critique-refine on one mini-batch; returns the refined strategy.
  virtual Strategy refine(const Strategy& strategy, const std::vector<AnnotatedClaim>& batch,
                          std::size_t iteration) = 0;
  /// Zero-shot program generation for each claim. May throw EmptySetAfterFiltering.
  virtual DemonstrationSet generate(const Strategy& strategy, const std::vector<AnnotatedClaim>& claims) = 0;
  /// Macro F1 over the pool with few-shot prompting.
  virtual double evaluate(const Strategy& strategy, const DemonstrationSet& demos) = 0;
};

struct IterationRecord {
  std::size_t iteration = 0;
  std::vector<std::string> batch_ids;
  Strategy strategy;                                  // refinement used for this iteration's candidates
  std::vector<std::vector<std::string>> candidate_ids;
  std::vector<DemonstrationSet> candidate_sets;       // empty set when generation failed
  std::vector<std::optional<double>> candidate_scores;
  std::optional<std::size_t> selected;                // argmax candidate
  bool improved = false;
  double score_star = 0.0;                            // after this iteration
};

struct OptimizerResult {
  Strategy best_strategy;
  DemonstrationSet best_demos;
  double best_score = 0.0;
  std::optional<std::size_t> best_iteration;
  Strategy final_strategy;
  std::vector<Strategy> strategies;  // every version produced, initial first
  std::vector<IterationRecord> history;
};

/// The bootstrapping loop. Iteration 1 refines on the first batch and turns
/// that batch into the first demonstration set, which seeds the best score.
/// Later iterations refine, sample `candidates` sets, and replace the best
/// (strategy, demonstrations, score) only on strict improvement. The running
/// strategy advances to each refinement.
OptimizerResult run_optimizer(OptimizerSteps& steps, const std::vector<AnnotatedClaim>& pool, const Strategy& initial,
                              const OptimizerConfig& config, SeededRng& rng);

/// Wires OptimizerSteps to the model-backed pipeline.
class PipelineSteps final : public OptimizerSteps {
 public:
  PipelineSteps(const ProgramExecutor& executor, LlmGateway& gateway, std::vector<AnnotatedClaim> pool,
                OptimizerConfig config);

  /// When set, every critique/refine prompt+response pair is written there.
  void set_transcript_dir(std::filesystem::path dir) { transcript_dir_ = std::move(dir); }

  std::vector<ClaimResult> run_batch(const Strategy& strategy, const std::vector<AnnotatedClaim>& batch);
  std::vector<Critique> critique_batch(const Strategy& strategy, const std::vector<ClaimResult>& results);
  /// Parent strategy is returned unchanged when the response cannot be parsed.
  Strategy refine_strategy(const Strategy& strategy, const std::vector<Critique>& critiques);
  DemonstrationSet generate_demonstrations(const Strategy& strategy, const std::vector<AnnotatedClaim>& claims);
  double evaluate_config(const Strategy& strategy, const DemonstrationSet& demos);

  Strategy refine(const Strategy& strategy, const std::vector<AnnotatedClaim>& batch, std::size_t iteration) override;
  DemonstrationSet generate(const Strategy& strategy, const std::vector<AnnotatedClaim>& claims) override {
    return generate_demonstrations(strategy, claims);
  }
  double evaluate(const Strategy& strategy, const DemonstrationSet& demos) override {
    return evaluate_config(strategy, demos);
  }

  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

 private:
  void transcript(const std::string& name, const std::string& prompt, const std::string& response);

  const ProgramExecutor& executor_;
  LlmGateway& gateway_;
  std::vector<AnnotatedClaim> pool_;
  OptimizerConfig config_;
  std::optional<std::filesystem::path> transcript_dir_;
  std::size_t current_iteration_ = 0;
  std::vector<std::string> warnings_;
};

/// Writes strategies/, demonstrations/, best/, scores.csv and summary.json
/// under `dir`. Output depends only on `result` and `seed`.
void write_optimizer_artifacts(const std::filesystem::path& dir, const OptimizerResult& result, std::uint64_t seed);

}  // namespace progcheck
