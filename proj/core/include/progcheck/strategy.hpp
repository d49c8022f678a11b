// Copyright 2026 The progcheck Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace progcheck {

enum class Provenance { initial, refined };
std::string_view to_string(Provenance p);

struct Strategy {
  std::string decomposition_text;
  std::string info_gathering_text;
  std::size_t version = 0;
  Provenance provenance = Provenance::initial;
  std::optional<std::size_t> parent_version;
  std::string run_id;

  friend bool operator==(const Strategy&, const Strategy&) = default;
};

/// Version-0 strategies: decomposition (precise and independent, verifiable
/// and contextualized, minimal yet comprehensive) and information gathering
/// (targeted retrieval, iterative retrieval, evidence aggregation).
Strategy initial_strategy();

struct Demonstration {
  std::string claim;
  std::string program_code;  // canonical printed form
  friend bool operator==(const Demonstration&, const Demonstration&) = default;
};

struct DemonstrationSet {
  std::vector<Demonstration> demos;
  std::optional<double> score;  // macro F1 on the annotated pool
  friend bool operator==(const DemonstrationSet&, const DemonstrationSet&) = default;
};

enum class PromptMode { zs, cot, fs };
std::string_view to_string(PromptMode m);
/// Throws ConfigError for anything but zs/cot/fs.
PromptMode parse_prompt_mode(std::string_view s);

struct PromptVariant {
  PromptMode mode = PromptMode::zs;
  const DemonstrationSet* demonstrations = nullptr;  // required iff mode == fs
};

/// Fills the generation backbone. fs inserts the demonstrations just before
/// the input-claim section; cot appends an instruction to reason in comments
/// first. Throws MissingDemonstrations for fs without demonstrations.
std::string render_prompt(const Strategy& strategy, const PromptVariant& variant, std::string_view claim);

/// Strategy store layout:
///   <dir>/manifest.json                  [{version, provenance, parent_version, run_id}, ...]
///   <dir>/v<N>/decomposition.txt
///   <dir>/v<N>/information_gathering.txt
/// save_strategy adds or replaces version N and rewrites the manifest.
void save_strategy(const std::filesystem::path& dir, const Strategy& strategy);
Strategy load_strategy(const std::filesystem::path& dir, std::optional<std::size_t> version = std::nullopt);

/// JSON-lines, one {claim, program_code, score_context} object per demo.
void save_demonstrations(const std::filesystem::path& path, const DemonstrationSet& set,
                         const std::string& score_context_json = "null");
DemonstrationSet load_demonstrations(const std::filesystem::path& path);

}  // namespace progcheck
