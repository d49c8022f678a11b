// Copyright 2026 The progcheck Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace progcheck::text {

std::string_view trim(std::string_view s);
std::string to_lower(std::string_view s);
bool iequals(std::string_view a, std::string_view b);
bool icontains(std::string_view haystack, std::string_view needle);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
std::vector<std::string> split_lines(std::string_view s);

/// Removes the longest common leading whitespace from every non-blank line.
std::string dedent(std::string_view s);

/// Single-pass `{name}` substitution. Placeholders whose name is not in
/// `values` are left verbatim, and substituted text is never rescanned.
std::string render_template(std::string_view tmpl, const std::map<std::string, std::string>& values);

/// 64-bit FNV-1a, hex encoded. Used for call-log fingerprints.
std::string fnv1a_hex(std::string_view s);

/// Content between the last `<tag>` and its matching `</tag>` after it.
/// Returns false when either marker is missing.
bool extract_last_tag(std::string_view s, std::string_view tag, std::string& out);

}  // namespace progcheck::text
