// Copyright 2026 The progcheck Authors
// Licensed under the Apache License, Version 2.0

#include "progcheck/cli/run_config.hpp"

#include <cstdlib>
#include <fstream>

#include "progcheck/errors.hpp"

namespace progcheck::cli {

namespace fs = std::filesystem;
using nlohmann::json;

void RunConfig::check() const {
  retrieval.check();
  if (top_k && *top_k == 0) throw ConfigError("top_k must be at least 1");
  if (mode == PromptMode::fs && demos.empty()) throw ConfigError("mode fs requires a demonstrations file");
  if (backend == BackendKind::scripted && script.empty()) throw ConfigError("scripted backend requires a rules file");
  if (workers == 0) throw ConfigError("workers must be at least 1");
  if (optimizer.batch_size == 0 || optimizer.demo_set_size == 0 || optimizer.candidates == 0 ||
      optimizer.iterations == 0 || optimizer.pool_size == 0)
    throw ConfigError("bootstrap sizes must be positive");
}

std::string interpolate_env(std::string_view text) {
  std::string out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '$' && i + 1 < text.size() && text[i + 1] == '$') {
      out += '$';
      ++i;
    } else if (text[i] == '$' && i + 1 < text.size() && text[i + 1] == '{') {
      std::size_t end = text.find('}', i + 2);
      if (end == std::string_view::npos) throw ConfigError("unterminated ${ in config value");
      std::string name(text.substr(i + 2, end - i - 2));
      const char* value = std::getenv(name.c_str());
      if (!value) throw ConfigError("environment variable " + name + " is not set");
      out += value;
      i = end;
    } else {
      out += text[i];
    }
  }
  return out;
}

namespace {

void interpolate_tree(json& j) {
  if (j.is_string()) {
    j = interpolate_env(j.get<std::string>());
  } else if (j.is_structured()) {
    for (auto& v : j) interpolate_tree(v);
  }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key) || j.at(key).is_null()) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key ") + key + ": " + e.what());
  }
}

void read_path(const json& j, const char* key, fs::path& out, const fs::path& base) {
  std::string s;
  read(j, key, s);
  if (s.empty()) return;
  fs::path p(s);
  out = p.is_absolute() || base.empty() ? p : base / p;
}

RoleSettings read_role(const json& j, RoleSettings r) {
  read(j, "model", r.model);
  read(j, "temperature", r.temperature);
  if (j.contains("max_output") && !j.at("max_output").is_null()) {
    int m = 0;
    read(j, "max_output", m);
    r.max_output = m;
  }
  return r;
}

}  // namespace

RunConfig run_config_from_json(const json& j, const fs::path& base) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  RunConfig c;
  read_path(j, "corpus", c.corpus, base);
  read_path(j, "index", c.index, base);
  read_path(j, "train", c.train, base);
  if (j.contains("dataset")) {
    const auto& d = j.at("dataset");
    if (d.is_string()) {
      read_path(j, "dataset", c.dataset, base);
    } else {
      read_path(d, "path", c.dataset, base);
      std::string format;
      read(d, "format", format);
      if (!format.empty()) c.format = parse_dataset_format(format);
    }
  }
  if (j.contains("retrieval")) {
    const auto& r = j.at("retrieval");
    read(r, "k1", c.retrieval.k1);
    read(r, "b", c.retrieval.b);
    if (r.contains("top_k") && !r.at("top_k").is_null()) {
      std::size_t k = 0;
      read(r, "top_k", k);
      c.top_k = k;
    }
    std::string fields;
    read(r, "fields", fields);
    if (fields == "text") c.retrieval.fields = IndexedFields::text_only;
    else if (fields == "title_and_text" || fields.empty()) c.retrieval.fields = IndexedFields::title_and_text;
    else throw ConfigError("retrieval.fields must be title_and_text or text");
  }
  if (j.contains("gateway")) {
    const auto& g = j.at("gateway");
    std::string backend;
    read(g, "backend", backend);
    if (backend == "scripted") c.backend = BackendKind::scripted;
    else if (backend == "http" || backend.empty()) c.backend = BackendKind::http;
    else throw ConfigError("gateway.backend must be http or scripted");
    read_path(g, "script", c.script, base);
    read(g, "endpoint", c.gateway.endpoint);
    read(g, "api_key_env", c.gateway.api_key_env);
    read(g, "retry_budget", c.gateway.retry_budget);
    read(g, "concurrency", c.gateway.concurrency_cap);
    read(g, "timeout_seconds", c.gateway.timeout_seconds);
    read(g, "backoff_seconds", c.gateway.backoff_seconds);
    if (g.contains("roles")) {
      for (const auto& [name, settings] : g.at("roles").items()) {
        ModelRole role = parse_role(name);
        c.gateway.roles[role] = read_role(settings, c.gateway.roles[role]);
      }
    }
  }
  std::string mode;
  read(j, "mode", mode);
  if (!mode.empty()) c.mode = parse_prompt_mode(mode);
  read_path(j, "demos", c.demos, base);
  read_path(j, "strategy", c.strategy, base);
  read(j, "seed", c.seed);
  read(j, "workers", c.workers);
  read_path(j, "output", c.output, base);
  if (j.contains("bootstrap")) {
    const auto& b = j.at("bootstrap");
    read(b, "pool", c.optimizer.pool_size);
    read(b, "batch", c.optimizer.batch_size);
    read(b, "candidates", c.optimizer.candidates);
    read(b, "demo_set_size", c.optimizer.demo_set_size);
    read(b, "iterations", c.optimizer.iterations);
    read(b, "run_id", c.optimizer.run_id);
  }
  return c;
}

RunConfig load_run_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ConfigError("config " + path.string() + " is not valid JSON");
  interpolate_tree(j);
  return run_config_from_json(j, path.parent_path());
}

nlohmann::ordered_json to_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["corpus"] = c.corpus.string();
  j["index"] = c.index.string();
  j["dataset"] = {{"path", c.dataset.string()}, {"format", std::string(to_string(c.format))}};
  j["train"] = c.train.string();
  j["retrieval"] = {{"k1", c.retrieval.k1},
                    {"b", c.retrieval.b},
                    {"top_k", c.effective_top_k()},
                    {"fields", c.retrieval.fields == IndexedFields::text_only ? "text" : "title_and_text"}};
  nlohmann::ordered_json roles;
  for (auto role : {ModelRole::generator, ModelRole::function_llm, ModelRole::optimizer}) {
    const auto& r = c.gateway.roles.at(role);
    nlohmann::ordered_json rj = {{"model", r.model}, {"temperature", r.temperature}};
    rj["max_output"] = r.max_output ? nlohmann::ordered_json(*r.max_output) : nlohmann::ordered_json();
    roles[std::string(to_string(role))] = rj;
  }
  j["gateway"] = {{"backend", c.backend == BackendKind::scripted ? "scripted" : "http"},
                  {"script", c.script.string()},
                  {"endpoint", c.gateway.endpoint},
                  {"api_key_env", c.gateway.api_key_env},
                  {"retry_budget", c.gateway.retry_budget},
                  {"concurrency", c.gateway.concurrency_cap},
                  {"timeout_seconds", c.gateway.timeout_seconds},
                  {"backoff_seconds", c.gateway.backoff_seconds},
                  {"roles", roles}};
  j["mode"] = std::string(to_string(c.mode));
  j["demos"] = c.demos.string();
  j["strategy"] = c.strategy.string();
  j["seed"] = c.seed;
  j["workers"] = c.workers;
  j["output"] = c.output.string();
  j["bootstrap"] = {{"pool", c.optimizer.pool_size},
                    {"batch", c.optimizer.batch_size},
                    {"candidates", c.optimizer.candidates},
                    {"demo_set_size", c.optimizer.demo_set_size},
                    {"iterations", c.optimizer.iterations},
                    {"run_id", c.optimizer.run_id}};
  return j;
}

}  // namespace progcheck::cli
