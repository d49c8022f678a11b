// Copyright 2026 The progcheck Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <condition_variable>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace progcheck {

enum class ModelRole { generator, optimizer, function_llm };

std::string_view to_string(ModelRole role);
/// Throws ConfigError on an unknown name.
ModelRole parse_role(std::string_view name);

struct RoleSettings {
  std::string model;
  double temperature = 0.0;
  std::optional<int> max_output;
};

struct GatewayConfig {
  std::string endpoint = "https://api.openai.com/v1/chat/completions";
  std::string api_key_env = "OPENAI_API_KEY";
  std::map<ModelRole, RoleSettings> roles = {
      {ModelRole::generator, {"gpt-4o-mini", 0.0, std::nullopt}},
      {ModelRole::function_llm, {"gpt-4o-mini", 0.0, std::nullopt}},
      {ModelRole::optimizer, {"gpt-4o", 0.7, std::nullopt}},
  };
  int retry_budget = 3;
  std::size_t concurrency_cap = 8;
  double timeout_seconds = 120.0;
  double backoff_seconds = 0.5;
};

struct CompletionRequest {
  ModelRole role = ModelRole::generator;
  std::string prompt;
  std::optional<int> max_output;
};

class Backend {
 public:
  virtual ~Backend() = default;
  /// Returns the model text. Throws TransientTransportError for retryable
  /// failures and TransportError for everything else.
  virtual std::string complete(const CompletionRequest& request, const RoleSettings& settings) const = 0;
};

/// Deterministic test double: an ordered rule list, first match wins,
/// otherwise the fallback. Rules are fixed once the backend is handed to a
/// gateway, so complete() is a pure function of (role, prompt).
class ScriptedBackend final : public Backend {
 public:
  using Matcher = std::function<bool(const CompletionRequest&)>;
  using Responder = std::function<std::string(const CompletionRequest&)>;

  ScriptedBackend& on(Matcher matcher, Responder responder);
  ScriptedBackend& on_contains(std::string needle, std::string response,
                               std::optional<ModelRole> role = std::nullopt);
  ScriptedBackend& otherwise(std::string response);
  ScriptedBackend& otherwise(Responder responder);

  std::string complete(const CompletionRequest& request, const RoleSettings& settings) const override;

  std::size_t rule_count() const noexcept { return rules_.size(); }

  /// Rules file: {"rules": [{"role"?: "...", "contains": "...", "response": "..."}],
  /// "fallback": "..."}. Every `contains` entry may also be a list, in which
  /// case all needles must be present.
  static ScriptedBackend from_json(const nlohmann::json& spec);
  static ScriptedBackend from_file(const std::filesystem::path& path);

 private:
  struct Rule {
    Matcher matcher;
    Responder responder;
  };
  std::vector<Rule> rules_;
  Responder fallback_ = [](const CompletionRequest&) { return std::string{}; };
};

struct CallRecord {
  ModelRole role = ModelRole::generator;
  std::string prompt_hash;
  std::string response_hash;
  double latency_ms = 0.0;
  int attempts = 0;
};

/// Single boundary for model calls. Applies per-role settings, retries
/// transient failures, bounds in-flight requests and keeps an audit log.
class LlmGateway {
 public:
  explicit LlmGateway(GatewayConfig config, std::shared_ptr<const Backend> backend = nullptr);

  LlmGateway(const LlmGateway&) = delete;
  LlmGateway& operator=(const LlmGateway&) = delete;

  /// Backend used for roles without a dedicated one.
  void set_backend(std::shared_ptr<const Backend> backend);
  void set_backend(ModelRole role, std::shared_ptr<const Backend> backend);

  std::string complete(const CompletionRequest& request);
  std::string complete(ModelRole role, std::string prompt);

  const GatewayConfig& config() const noexcept { return config_; }
  std::vector<CallRecord> call_log() const;
  std::size_t call_count() const;
  /// One JSON object per line: role, prompt_hash, response_hash, latency_ms, attempts.
  void write_call_log(const std::filesystem::path& path) const;

 private:
  const Backend& backend_for(ModelRole role) const;

  GatewayConfig config_;
  std::shared_ptr<const Backend> default_backend_;
  std::map<ModelRole, std::shared_ptr<const Backend>> role_backends_;

  mutable std::mutex log_mutex_;
  std::vector<CallRecord> log_;

  std::mutex slot_mutex_;
  std::condition_variable slot_cv_;
  std::size_t in_flight_ = 0;
};

}  // namespace progcheck
