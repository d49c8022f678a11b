// Copyright 2026 The progcheck Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "progcheck/bootstrap.hpp"
#include "progcheck/corpus_index.hpp"
#include "progcheck/eval_harness.hpp"
#include "progcheck/llm_gateway.hpp"
#include "progcheck/strategy.hpp"

namespace progcheck::cli {

enum class BackendKind { http, scripted };

/// Everything a command needs. Paths read from a config file are resolved
/// against the file's directory.
struct RunConfig {
  std::filesystem::path corpus;
  std::filesystem::path index;
  std::filesystem::path dataset;
  DatasetFormat format = DatasetFormat::generic;
  std::filesystem::path train;  // bootstrap source; falls back to `dataset`

  RetrievalConfig retrieval;
  std::optional<std::size_t> top_k;  // unset: by dataset format

  GatewayConfig gateway;
  BackendKind backend = BackendKind::http;
  std::filesystem::path script;  // scripted backend rules

  PromptMode mode = PromptMode::zs;
  std::filesystem::path demos;     // required for fs
  std::filesystem::path strategy;  // strategy store; empty = initial strategy

  std::uint64_t seed = 0;
  OptimizerConfig optimizer;
  std::size_t workers = 8;
  std::filesystem::path output = "runs/latest";

  std::size_t effective_top_k() const { return top_k ? *top_k : default_top_k(format); }

  /// Throws ConfigError: fs without demos, top_k == 0, bad retrieval or
  /// optimizer sizes.
  void check() const;
};

/// Replaces ${NAME} with the environment value. An unset variable is a
/// ConfigError; "$$" is a literal dollar.
std::string interpolate_env(std::string_view text);

RunConfig run_config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
/// JSON config file with ${VAR} interpolation in every string value.
RunConfig load_run_config(const std::filesystem::path& path);

/// Effective values as JSON (no secrets: the key is referenced by env name).
nlohmann::ordered_json to_json(const RunConfig& config);

}  // namespace progcheck::cli
