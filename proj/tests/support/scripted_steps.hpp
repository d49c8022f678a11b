// Copyright 2026 The progcheck Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "progcheck/bootstrap.hpp"

namespace progcheck::testing {

/// Optimizer steps with no model behind them: refinement bumps the version
/// and rewrites both texts, generation turns each claim into a fixed
/// program, and evaluation returns the next predetermined score.
class ScriptedSteps final : public OptimizerSteps {
 public:
  explicit ScriptedSteps(std::vector<double> scores) : scores_(std::move(scores)) {}

  Strategy refine(const Strategy& s, const std::vector<AnnotatedClaim>& batch, std::size_t iteration) override {
    Strategy out = s;
    out.version = s.version + 1;
    out.parent_version = s.version;
    out.provenance = Provenance::refined;
    out.decomposition_text = "decomposition after iteration " + std::to_string(iteration) + " (" + batch.front().id + ")";
    out.info_gathering_text = "information gathering after iteration " + std::to_string(iteration);
    return out;
  }

  DemonstrationSet generate(const Strategy& s, const std::vector<AnnotatedClaim>& claims) override {
    DemonstrationSet set;
    for (const auto& c : claims) {
      set.demos.push_back({c.claim, "# v" + std::to_string(s.version) + "\nfinal_prediction = verify(\"" + c.id +
                                        "\", retrieve(\"" + c.id + "\"))\n"});
    }
    return set;
  }

  double evaluate(const Strategy& s, const DemonstrationSet& demos) override {
    if (next_ >= scores_.size()) throw std::logic_error("scripted scores exhausted");
    evaluated.push_back({s, demos});
    return scores_[next_++];
  }

  struct Evaluation {
    Strategy strategy;
    DemonstrationSet demos;
  };
  std::vector<Evaluation> evaluated;

 private:
  std::vector<double> scores_;
  std::size_t next_ = 0;
};

/// n synthetic annotated claims with ids "c000".. and alternating labels.
inline std::vector<AnnotatedClaim> synthetic_claims(std::size_t n) {
  std::vector<AnnotatedClaim> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::string id = std::to_string(i);
    id = "c" + std::string(3 - std::min<std::size_t>(3, id.size()), '0') + id;
    out.push_back({id, "Synthetic claim " + id + ".", i % 2 == 0, {"evidence for " + id}});
  }
  return out;
}

}  // namespace progcheck::testing
