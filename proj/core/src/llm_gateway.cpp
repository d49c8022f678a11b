// Copyright 2026 The progcheck Authors
// Licensed under the Apache License, Version 2.0

#include "progcheck/llm_gateway.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "progcheck/errors.hpp"
#include "progcheck/text.hpp"

namespace progcheck {

std::string_view to_string(ModelRole role) {
  switch (role) {
    case ModelRole::generator: return "generator";
    case ModelRole::optimizer: return "optimizer";
    case ModelRole::function_llm: return "function_llm";
  }
  return "unknown";
}

ModelRole parse_role(std::string_view name) {
  if (name == "generator") return ModelRole::generator;
  if (name == "optimizer") return ModelRole::optimizer;
  if (name == "function_llm") return ModelRole::function_llm;
  throw ConfigError("unknown model role: " + std::string(name));
}

// --- ScriptedBackend ---------------------------------------------------------

ScriptedBackend& ScriptedBackend::on(Matcher matcher, Responder responder) {
  rules_.push_back({std::move(matcher), std::move(responder)});
  return *this;
}

ScriptedBackend& ScriptedBackend::on_contains(std::string needle, std::string response,
                                              std::optional<ModelRole> role) {
  return on(
      [needle = std::move(needle), role](const CompletionRequest& r) {
        return (!role || *role == r.role) && r.prompt.find(needle) != std::string::npos;
      },
      [response = std::move(response)](const CompletionRequest&) { return response; });
}

ScriptedBackend& ScriptedBackend::otherwise(std::string response) {
  fallback_ = [response = std::move(response)](const CompletionRequest&) { return response; };
  return *this;
}

ScriptedBackend& ScriptedBackend::otherwise(Responder responder) {
  fallback_ = std::move(responder);
  return *this;
}

std::string ScriptedBackend::complete(const CompletionRequest& request, const RoleSettings&) const {
  for (const auto& rule : rules_) {
    if (rule.matcher(request)) return rule.responder(request);
  }
  return fallback_(request);
}

ScriptedBackend ScriptedBackend::from_json(const nlohmann::json& spec) {
  ScriptedBackend backend;
  if (!spec.is_object()) throw ConfigError("scripted backend spec must be an object");
  for (const auto& rule : spec.value("rules", nlohmann::json::array())) {
    std::optional<ModelRole> role;
    if (rule.contains("role")) role = parse_role(rule.at("role").get<std::string>());
    std::vector<std::string> needles;
    const auto& c = rule.at("contains");
    if (c.is_array()) {
      needles = c.get<std::vector<std::string>>();
    } else {
      needles.push_back(c.get<std::string>());
    }
    auto response = rule.at("response").get<std::string>();
    backend.on(
        [needles, role](const CompletionRequest& r) {
          if (role && *role != r.role) return false;
          for (const auto& n : needles) {
            if (r.prompt.find(n) == std::string::npos) return false;
          }
          return true;
        },
        [response](const CompletionRequest&) { return response; });
  }
  if (spec.contains("fallback")) backend.otherwise(spec.at("fallback").get<std::string>());
  return backend;
}

ScriptedBackend ScriptedBackend::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scripted backend rules " + path.string());
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("scripted backend rules " + path.string() + ": " + e.what());
  }
}

// --- LlmGateway --------------------------------------------------------------

LlmGateway::LlmGateway(GatewayConfig config, std::shared_ptr<const Backend> backend)
    : config_(std::move(config)), default_backend_(std::move(backend)) {
  if (config_.concurrency_cap == 0) throw ConfigError("llm.concurrency_cap must be >= 1");
  if (config_.retry_budget < 0) throw ConfigError("llm.retry_budget must be >= 0");
}

void LlmGateway::set_backend(std::shared_ptr<const Backend> backend) { default_backend_ = std::move(backend); }

void LlmGateway::set_backend(ModelRole role, std::shared_ptr<const Backend> backend) {
  role_backends_[role] = std::move(backend);
}

const Backend& LlmGateway::backend_for(ModelRole role) const {
  if (auto it = role_backends_.find(role); it != role_backends_.end() && it->second) return *it->second;
  if (default_backend_) return *default_backend_;
  throw BackendUnconfigured(std::string(to_string(role)));
}

std::string LlmGateway::complete(ModelRole role, std::string prompt) {
  return complete(CompletionRequest{role, std::move(prompt), std::nullopt});
}

std::string LlmGateway::complete(const CompletionRequest& request) {
  if (request.prompt.empty()) throw DataError("completion prompt must be non-empty");
  const Backend& backend = backend_for(request.role);
  auto settings_it = config_.roles.find(request.role);
  if (settings_it == config_.roles.end()) throw BackendUnconfigured(std::string(to_string(request.role)));
  RoleSettings settings = settings_it->second;
  if (request.max_output) settings.max_output = request.max_output;

  {
    std::unique_lock lock(slot_mutex_);
    slot_cv_.wait(lock, [&] { return in_flight_ < config_.concurrency_cap; });
    ++in_flight_;
  }
  struct SlotRelease {
    LlmGateway& g;
    ~SlotRelease() {
      {
        std::lock_guard lock(g.slot_mutex_);
        --g.in_flight_;
      }
      g.slot_cv_.notify_one();
    }
  } release{*this};

  const auto start = std::chrono::steady_clock::now();
  int attempt = 0;
  std::string response;
  for (;;) {
    ++attempt;
    try {
      response = backend.complete(request, settings);
      break;
    } catch (const TransientTransportError& e) {
      if (attempt > config_.retry_budget) {
        throw TransportError(std::string(e.what()) + " (after " + std::to_string(attempt) + " attempts)");
      }
      if (config_.backoff_seconds > 0) {
        std::this_thread::sleep_for(std::chrono::duration<double>(config_.backoff_seconds * std::pow(2.0, attempt - 1)));
      }
    }
  }
  const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

  std::lock_guard lock(log_mutex_);
  log_.push_back({request.role, text::fnv1a_hex(request.prompt), text::fnv1a_hex(response), ms, attempt});
  return response;
}

std::vector<CallRecord> LlmGateway::call_log() const {
  std::lock_guard lock(log_mutex_);
  return log_;
}

std::size_t LlmGateway::call_count() const {
  std::lock_guard lock(log_mutex_);
  return log_.size();
}

void LlmGateway::write_call_log(const std::filesystem::path& path) const {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write call log " + path.string());
  for (const auto& r : call_log()) {
    nlohmann::ordered_json j;
    j["role"] = std::string(to_string(r.role));
    j["prompt_hash"] = r.prompt_hash;
    j["response_hash"] = r.response_hash;
    j["latency_ms"] = r.latency_ms;
    j["attempts"] = r.attempts;
    out << j.dump() << '\n';
  }
}

}  // namespace progcheck
