// Copyright 2026 The progcheck Authors
// Licensed under the Apache License, Version 2.0

#include "progcheck/http_backend.hpp"

#include <cstdlib>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "progcheck/errors.hpp"

namespace progcheck {

namespace {

// Splits "scheme://host[:port]/path" into ("scheme://host[:port]", "/path").
std::pair<std::string, std::string> split_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("endpoint must be an absolute URL: " + url);
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

HttpChatBackend::HttpChatBackend(std::string endpoint, std::string api_key, double timeout_seconds)
    : api_key_(std::move(api_key)), timeout_seconds_(timeout_seconds) {
  std::tie(base_, path_) = split_url(endpoint);
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (base_.rfind("https://", 0) == 0) throw ConfigError("built without TLS support: " + endpoint);
#endif
}

HttpChatBackend HttpChatBackend::from_config(const GatewayConfig& config) {
  std::string key;
  if (!config.api_key_env.empty()) {
    if (const char* v = std::getenv(config.api_key_env.c_str())) key = v;
  }
  return HttpChatBackend(config.endpoint, std::move(key), config.timeout_seconds);
}

std::string HttpChatBackend::request_body(const CompletionRequest& request, const RoleSettings& settings) {
  nlohmann::ordered_json body;
  body["model"] = settings.model;
  body["messages"] = nlohmann::json::array({{{"role", "user"}, {"content", request.prompt}}});
  body["temperature"] = settings.temperature;
  if (auto cap = request.max_output ? request.max_output : settings.max_output) body["max_tokens"] = *cap;
  return body.dump();
}

std::string HttpChatBackend::complete(const CompletionRequest& request, const RoleSettings& settings) const {
  httplib::Client client(base_);
  const auto secs = static_cast<time_t>(timeout_seconds_);
  const auto usecs = static_cast<time_t>((timeout_seconds_ - static_cast<double>(secs)) * 1e6);
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);

  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

  auto result = client.Post(path_, headers, request_body(request, settings), "application/json");
  if (!result) {
    throw TransientTransportError("HTTP request to " + base_ + path_ + " failed: " + httplib::to_string(result.error()));
  }
  const int status = result->status;
  if (status == 429 || status >= 500) {
    throw TransientTransportError("HTTP " + std::to_string(status) + " from " + base_ + path_);
  }
  if (status != 200) {
    throw TransportError("HTTP " + std::to_string(status) + " from " + base_ + path_ + ": " + result->body);
  }
  try {
    auto j = nlohmann::json::parse(result->body);
    return j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    // Delivered but unusable: not retried.
    throw TransportError(std::string("malformed chat-completion response: ") + e.what());
  }
}

}  // namespace progcheck
