// Copyright 2026 The progcheck Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <string_view>

namespace progcheck::prompts {

/// Bumped whenever any template text under core/assets/templates changes.
inline constexpr std::string_view kTemplateVersion = "1";

// Raw template texts, embedded at build time. Placeholders are `{name}`.
std::string_view question_template();   // {question} {evidence}
std::string_view verify_template();     // {evidence} {claim}
std::string_view backbone_template();   // {claim_decomposition_strategy} {information_gathering_strategy} {input}
std::string_view critique_template();   // {claim} {current_prompt} ... {Trace} ... {evaluation}
std::string_view refine_template();     // {current_prompt} ... {information_gathering_suggestions}

}  // namespace progcheck::prompts
