// Copyright 2026 The progcheck Authors
// Licensed under the Apache License, Version 2.0

#include "progcheck/bootstrap.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "progcheck/errors.hpp"
#include "progcheck/eval_harness.hpp"
#include "progcheck/parallel.hpp"
#include "progcheck/prompts.hpp"
#include "progcheck/text.hpp"

namespace progcheck {

using namespace text;
using namespace prompts;

namespace {

constexpr std::string_view kDecompositionLabels[] = {
    "bridging fact missing", "ambiguous decomposition", "unnecessary decomposition"};
constexpr std::string_view kRetrievalLabels[] = {
    "misguided retrieval", "irrelevant query", "suboptimal query format", "insufficient evidence synthesis"};

std::string bool_text(bool b) { return b ? "True" : "False"; }

std::string clean_block(std::string_view s) {
  std::string out{trim(dedent(s))};
  return out;
}

std::string padded(std::size_t n, int width) {
  std::string s = std::to_string(n);
  if (static_cast<int>(s.size()) < width) s.insert(0, width - s.size(), '0');
  return s;
}

std::vector<std::string> ids_of(const std::vector<AnnotatedClaim>& claims) {
  std::vector<std::string> ids;
  ids.reserve(claims.size());
  for (const auto& c : claims) ids.push_back(c.id);
  return ids;
}

}  // namespace

std::vector<AnnotatedClaim> sample_pool(const std::vector<AnnotatedClaim>& train, std::size_t n, SeededRng& rng) {
  if (train.size() < n) throw InsufficientData(train.size(), n);
  std::vector<AnnotatedClaim> out;
  out.reserve(n);
  for (std::size_t i : rng.sample_indices(train.size(), n)) out.push_back(train[i]);
  return out;
}

std::vector<AnnotatedClaim> next_minibatch(const std::vector<AnnotatedClaim>& pool, std::size_t iteration,
                                           std::size_t size) {
  if (size == 0) throw ConfigError("mini-batch size must be positive");
  if (iteration == 0) throw ConfigError("iterations are numbered from 1");
  const std::size_t batches = pool.size() / size;
  if (batches == 0) throw InsufficientData(pool.size(), size);
  const std::size_t b = (iteration - 1) % batches;
  return {pool.begin() + static_cast<std::ptrdiff_t>(b * size),
          pool.begin() + static_cast<std::ptrdiff_t>((b + 1) * size)};
}

std::vector<std::vector<AnnotatedClaim>> bootstrap_candidates(const std::vector<AnnotatedClaim>& pool, std::size_t n,
                                                              std::size_t set_size, SeededRng& rng) {
  if (pool.size() < set_size) throw InsufficientData(pool.size(), set_size);
  std::vector<std::vector<AnnotatedClaim>> out;
  out.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<AnnotatedClaim> set;
    for (std::size_t i : rng.sample_indices(pool.size(), set_size)) set.push_back(pool[i]);
    out.push_back(std::move(set));
  }
  return out;
}

std::string render_critique_prompt(const Strategy& strategy, const ClaimResult& result) {
  std::string trace = render_trace(result.trace);
  if (result.fallback_trace) {
    trace += "\nFallback (direct verification of the claim):\n" + render_trace(*result.fallback_trace);
  }
  std::string evidence = result.claim.gold_evidence.empty() ? std::string("(not available)")
                                                            : join(result.claim.gold_evidence, "\n");
  const bool correct = result.prediction == result.claim.label;
  std::string evaluation = std::string(correct ? "correct" : "incorrect") + " (predicted: " +
                           bool_text(result.prediction) + ", ground truth: " + bool_text(result.claim.label) + ")";
  return render_template(critique_template(),
                         {{"claim", result.claim.claim},
                          {"current_prompt", std::string(backbone_template())},
                          {"claim_decomposition_strategy", strategy.decomposition_text},
                          {"information_gathering_strategy", strategy.info_gathering_text},
                          {"reasoning_program", result.program_code},
                          {"Trace", trace},
                          {"final_prediction", bool_text(result.prediction)},
                          {"ground_truth_evidence", evidence},
                          {"evaluation", evaluation}});
}

Critique parse_critique(std::string_view response) {
  std::string block;
  if (!extract_last_tag(response, "suggestions", block)) throw CritiqueParseError();
  Critique c;
  std::string inner;
  if (extract_last_tag(block, "decomposition", inner)) c.decomposition_suggestions = clean_block(inner);
  if (extract_last_tag(block, "information_gathering", inner)) c.info_gathering_suggestions = clean_block(inner);

  // Error labels anywhere in the response, sorted into their closed sets.
  static constexpr std::string_view open = "<error_label>";
  static constexpr std::string_view close = "</error_label>";
  for (std::size_t pos = response.find(open); pos != std::string_view::npos; pos = response.find(open, pos + 1)) {
    std::size_t start = pos + open.size();
    std::size_t end = response.find(close, start);
    if (end == std::string_view::npos) break;
    std::string label = to_lower(trim(response.substr(start, end - start)));
    auto add = [&](std::vector<std::string>& v) {
      if (std::find(v.begin(), v.end(), label) == v.end()) v.push_back(label);
    };
    for (auto l : kDecompositionLabels)
      if (label == l) add(c.decomposition_errors);
    for (auto l : kRetrievalLabels)
      if (label == l) add(c.retrieval_errors);
  }

  // Section 1 body, up to the next "## " heading.
  auto lines = split_lines(response);
  bool in_path = false;
  std::vector<std::string> path;
  for (const auto& line : lines) {
    std::string_view t = trim(line);
    if (icontains(t, "Reconstruct the Ground-Truth Reasoning Path") || icontains(t, "Reconstruct the Ground Truth")) {
      in_path = true;
      continue;
    }
    if (in_path) {
      if (t.rfind("## ", 0) == 0 || t.rfind("### ", 0) == 0 || icontains(t, "Identify Errors in Decomposition")) break;
      path.push_back(line);
    }
  }
  std::string p = clean_block(join(path, "\n"));
  while (p.size() >= 3 && p.compare(p.size() - 3, 3, "---") == 0) p = std::string(trim(p.substr(0, p.size() - 3)));
  c.reconstructed_path = p;
  return c;
}

bool is_no_suggestions(std::string_view field) {
  std::string_view t = trim(field);
  while (!t.empty() && (t.front() == '-' || t.front() == '*' || t.front() == '"' || t.front() == '\''))
    t = trim(t.substr(1));
  while (!t.empty() && (t.back() == '.' || t.back() == '"' || t.back() == '\'')) t = trim(t.substr(0, t.size() - 1));
  return t.empty() || iequals(t, "no suggestions") || iequals(t, "no suggestion") || iequals(t, "none");
}

std::string render_refine_prompt(const Strategy& strategy, std::string_view decomposition_suggestions,
                                 std::string_view info_gathering_suggestions) {
  return render_template(refine_template(),
                         {{"current_prompt", std::string(backbone_template())},
                          {"claim_decomposition_strategy", strategy.decomposition_text},
                          {"information_gathering_strategy", strategy.info_gathering_text},
                          {"decomposition_suggestions", std::string(decomposition_suggestions)},
                          {"information_gathering_suggestions", std::string(info_gathering_suggestions)}});
}

Strategy parse_refinement(std::string_view response, const Strategy& parent) {
  std::string block;
  if (!extract_last_tag(response, "refined_prompt", block)) throw RefineParseError("no <refined_prompt> block");
  std::string dec, info;
  if (!extract_last_tag(block, "decomposition", dec)) throw RefineParseError("no <decomposition> section");
  if (!extract_last_tag(block, "information_gathering", info))
    throw RefineParseError("no <information_gathering> section");
  auto resolve = [](std::string text, const std::string& previous, const char* what) {
    text = clean_block(text);
    if (icontains(text, "remain unchanged")) return previous;
    if (text.empty()) throw RefineParseError(std::string("empty ") + what + " section");
    return text;
  };
  Strategy out;
  out.decomposition_text = resolve(dec, parent.decomposition_text, "decomposition");
  out.info_gathering_text = resolve(info, parent.info_gathering_text, "information_gathering");
  out.version = parent.version + 1;
  out.provenance = Provenance::refined;
  out.parent_version = parent.version;
  out.run_id = parent.run_id;
  return out;
}

OptimizerResult run_optimizer(OptimizerSteps& steps, const std::vector<AnnotatedClaim>& pool, const Strategy& initial,
                              const OptimizerConfig& config, SeededRng& rng) {
  if (config.iterations == 0) throw ConfigError("iterations must be positive");
  if (config.candidates == 0) throw ConfigError("candidate count must be positive");
  if (pool.size() < config.batch_size) throw InsufficientData(pool.size(), config.batch_size);
  if (pool.size() < config.demo_set_size) throw InsufficientData(pool.size(), config.demo_set_size);

  OptimizerResult result;
  Strategy current = initial;
  result.strategies.push_back(initial);
  result.best_strategy = initial;
  bool have_best = false;

  for (std::size_t t = 1; t <= config.iterations; ++t) {
    IterationRecord rec;
    rec.iteration = t;
    const auto batch = next_minibatch(pool, t, config.batch_size);
    rec.batch_ids = ids_of(batch);

    Strategy refined = steps.refine(current, batch, t);
    if (refined != current) result.strategies.push_back(refined);
    current = refined;
    rec.strategy = current;

    std::vector<std::vector<AnnotatedClaim>> sets;
    if (t == 1) {
      sets.push_back(batch);
    } else {
      sets = bootstrap_candidates(pool, config.candidates, config.demo_set_size, rng);
    }

    std::optional<double> iter_best;
    for (std::size_t j = 0; j < sets.size(); ++j) {
      rec.candidate_ids.push_back(ids_of(sets[j]));
      DemonstrationSet s;
      std::optional<double> score;
      try {
        s = steps.generate(current, sets[j]);
        score = steps.evaluate(current, s);
        s.score = score;
      } catch (const EmptySetAfterFiltering&) {
        s = DemonstrationSet{};
      }
      rec.candidate_sets.push_back(s);
      rec.candidate_scores.push_back(score);
      if (score && (!iter_best || *score > *iter_best)) {
        iter_best = score;
        rec.selected = j;
      }
    }

    if (rec.selected && (!have_best || *iter_best > result.best_score)) {
      have_best = true;
      rec.improved = true;
      result.best_score = *iter_best;
      result.best_strategy = current;
      result.best_demos = rec.candidate_sets[*rec.selected];
      result.best_iteration = t;
    }
    rec.score_star = result.best_score;
    result.history.push_back(std::move(rec));
  }
  result.final_strategy = current;
  return result;
}

PipelineSteps::PipelineSteps(const ProgramExecutor& executor, LlmGateway& gateway, std::vector<AnnotatedClaim> pool,
                             OptimizerConfig config)
    : executor_(executor), gateway_(gateway), pool_(std::move(pool)), config_(std::move(config)) {}

void PipelineSteps::transcript(const std::string& name, const std::string& prompt, const std::string& response) {
  if (!transcript_dir_) return;
  std::filesystem::create_directories(*transcript_dir_);
  std::ofstream out(*transcript_dir_ / name, std::ios::binary);
  out << "=== prompt ===\n" << prompt << "\n=== response ===\n" << response << "\n";
}

std::vector<ClaimResult> PipelineSteps::run_batch(const Strategy& strategy, const std::vector<AnnotatedClaim>& batch) {
  std::vector<ClaimResult> results(batch.size());
  parallel_for(batch.size(), config_.workers, [&](std::size_t i) {
    const auto& c = batch[i];
    ClaimRun run = executor_.run_claim(c.claim, render_prompt(strategy, {PromptMode::zs, nullptr}, c.claim));
    results[i] = ClaimResult{c, run.program.code, run.prediction, std::move(run.trace), std::move(run.fallback_trace)};
  });
  return results;
}

std::vector<Critique> PipelineSteps::critique_batch(const Strategy& strategy, const std::vector<ClaimResult>& results) {
  std::vector<std::optional<Critique>> slots(results.size());
  std::vector<std::string> notes(results.size());
  parallel_for(results.size(), config_.workers, [&](std::size_t i) {
    std::string prompt = render_critique_prompt(strategy, results[i]);
    std::string response = gateway_.complete(ModelRole::optimizer, prompt);
    transcript("iter" + padded(current_iteration_, 2) + "_critique_" + padded(i + 1, 2) + ".txt", prompt, response);
    try {
      slots[i] = parse_critique(response);
    } catch (const CritiqueParseError& e) {
      notes[i] = "iteration " + std::to_string(current_iteration_) + ", claim " + results[i].claim.id +
                 ": critique dropped (" + e.what() + ")";
    }
  });
  std::vector<Critique> out;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (slots[i]) out.push_back(std::move(*slots[i]));
    if (!notes[i].empty()) warnings_.push_back(notes[i]);
  }
  return out;
}

Strategy PipelineSteps::refine_strategy(const Strategy& strategy, const std::vector<Critique>& critiques) {
  std::vector<std::string> dec, info;
  for (const auto& c : critiques) {
    if (!is_no_suggestions(c.decomposition_suggestions)) dec.push_back(c.decomposition_suggestions);
    if (!is_no_suggestions(c.info_gathering_suggestions)) info.push_back(c.info_gathering_suggestions);
  }
  const std::string dec_text = dec.empty() ? "no suggestions" : join(dec, "\n");
  const std::string info_text = info.empty() ? "no suggestions" : join(info, "\n");
  std::string prompt = render_refine_prompt(strategy, dec_text, info_text);
  std::string response = gateway_.complete(ModelRole::optimizer, prompt);
  transcript("iter" + padded(current_iteration_, 2) + "_refine.txt", prompt, response);
  try {
    return parse_refinement(response, strategy);
  } catch (const RefineParseError& e) {
    warnings_.push_back("iteration " + std::to_string(current_iteration_) + ": strategy kept (" + e.what() + ")");
    return strategy;
  }
}

Strategy PipelineSteps::refine(const Strategy& strategy, const std::vector<AnnotatedClaim>& batch,
                               std::size_t iteration) {
  current_iteration_ = iteration;
  auto results = run_batch(strategy, batch);
  auto critiques = critique_batch(strategy, results);
  return refine_strategy(strategy, critiques);
}

DemonstrationSet PipelineSteps::generate_demonstrations(const Strategy& strategy,
                                                        const std::vector<AnnotatedClaim>& claims) {
  std::vector<std::optional<Demonstration>> slots(claims.size());
  parallel_for(claims.size(), config_.workers, [&](std::size_t i) {
    const std::string prompt = render_prompt(strategy, {PromptMode::zs, nullptr}, claims[i].claim);
    for (int attempt = 0; attempt < 2 && !slots[i]; ++attempt) {
      auto source = dsl::extract_program(gateway_.complete(ModelRole::generator, prompt));
      if (trim(source.code).empty()) continue;
      try {
        auto program = dsl::parse(source);
        if (!dsl::validate(program).ok()) continue;
        slots[i] = Demonstration{claims[i].claim, dsl::print(program)};
      } catch (const ParseError&) {
      }
    }
  });
  DemonstrationSet set;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (slots[i]) {
      set.demos.push_back(std::move(*slots[i]));
    } else {
      warnings_.push_back("claim " + claims[i].id + ": no valid demonstration program after regeneration");
    }
  }
  if (set.demos.empty()) throw EmptySetAfterFiltering();
  return set;
}

double PipelineSteps::evaluate_config(const Strategy& strategy, const DemonstrationSet& demos) {
  std::vector<bool> preds(pool_.size());
  std::vector<bool> golds(pool_.size());
  const PromptVariant variant{PromptMode::fs, &demos};
  parallel_for(pool_.size(), config_.workers, [&](std::size_t i) {
    preds[i] = executor_.run_claim(pool_[i].claim, render_prompt(strategy, variant, pool_[i].claim)).prediction;
  });
  for (std::size_t i = 0; i < pool_.size(); ++i) golds[i] = pool_[i].label;
  return macro_f1(preds, golds);
}

void write_optimizer_artifacts(const std::filesystem::path& dir, const OptimizerResult& result, std::uint64_t seed) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  for (const auto& s : result.strategies) save_strategy(dir / "strategies", s);

  auto score_text = [](std::optional<double> s) {
    if (!s) return std::string("NA");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", *s);
    return std::string(buf);
  };

  fs::create_directories(dir / "demonstrations");
  std::ofstream csv(dir / "scores.csv", std::ios::binary);
  csv << "iteration,strategy_version,candidate_scores,selected,iteration_best,score_star,improved\n";
  for (const auto& rec : result.history) {
    std::vector<std::string> scores;
    for (std::size_t j = 0; j < rec.candidate_sets.size(); ++j) {
      scores.push_back(score_text(rec.candidate_scores[j]));
      nlohmann::ordered_json ctx;
      ctx["iteration"] = rec.iteration;
      ctx["candidate"] = j + 1;
      ctx["strategy_version"] = rec.strategy.version;
      ctx["score"] = rec.candidate_scores[j] ? nlohmann::ordered_json(*rec.candidate_scores[j]) : nlohmann::ordered_json();
      save_demonstrations(dir / "demonstrations" /
                              ("iter" + padded(rec.iteration, 2) + "_cand" + padded(j + 1, 2) + ".jsonl"),
                          rec.candidate_sets[j], ctx.dump());
    }
    std::optional<double> best;
    if (rec.selected) best = rec.candidate_scores[*rec.selected];
    csv << rec.iteration << ',' << rec.strategy.version << ',' << csv_escape(join(scores, ";")) << ','
        << (rec.selected ? std::to_string(*rec.selected + 1) : std::string("NA")) << ',' << score_text(best) << ','
        << score_text(rec.score_star) << ',' << (rec.improved ? "true" : "false") << '\n';
  }

  save_strategy(dir / "best" / "strategy", result.best_strategy);
  nlohmann::ordered_json best_ctx;
  best_ctx["iteration"] = result.best_iteration ? nlohmann::ordered_json(*result.best_iteration) : nlohmann::ordered_json();
  best_ctx["strategy_version"] = result.best_strategy.version;
  best_ctx["score"] = result.best_score;
  save_demonstrations(dir / "best" / "demonstrations.jsonl", result.best_demos, best_ctx.dump());

  nlohmann::ordered_json summary;
  summary["seed"] = seed;
  summary["iterations"] = result.history.size();
  summary["best_score"] = result.best_score;
  summary["best_iteration"] = best_ctx["iteration"];
  summary["best_strategy_version"] = result.best_strategy.version;
  summary["final_strategy_version"] = result.final_strategy.version;
  summary["strategy_versions"] = result.strategies.size();
  std::ofstream(dir / "summary.json", std::ios::binary) << summary.dump(2) << '\n';
}

}  // namespace progcheck
