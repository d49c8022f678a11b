// Copyright 2026 The progcheck Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <string>

#include "progcheck/llm_gateway.hpp"

namespace progcheck {

/// OpenAI-style chat-completion client. Each call sends one user message
/// carrying the whole prompt and returns choices[0].message.content.
class HttpChatBackend final : public Backend {
 public:
  /// `endpoint` is the full URL, e.g. https://api.openai.com/v1/chat/completions.
  HttpChatBackend(std::string endpoint, std::string api_key, double timeout_seconds);

  std::string complete(const CompletionRequest& request, const RoleSettings& settings) const override;

  /// Reads the key from the named environment variable (empty if unset).
  static HttpChatBackend from_config(const GatewayConfig& config);

  /// Request body sent for a call; exposed for wire-format tests.
  static std::string request_body(const CompletionRequest& request, const RoleSettings& settings);

 private:
  std::string base_;
  std::string path_;
  std::string api_key_;
  double timeout_seconds_;
};

}  // namespace progcheck
