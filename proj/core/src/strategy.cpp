// Copyright 2026 The progcheck Authors
// Licensed under the Apache License, Version 2.0

#include "progcheck/strategy.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "progcheck/errors.hpp"
#include "progcheck/prompts.hpp"
#include "progcheck/text.hpp"

namespace progcheck {

std::string_view to_string(Provenance p) { return p == Provenance::initial ? "initial" : "refined"; }

std::string_view to_string(PromptMode m) {
  switch (m) {
    case PromptMode::zs: return "zs";
    case PromptMode::cot: return "cot";
    case PromptMode::fs: return "fs";
  }
  return "zs";
}

PromptMode parse_prompt_mode(std::string_view s) {
  if (s == "zs") return PromptMode::zs;
  if (s == "cot") return PromptMode::cot;
  if (s == "fs") return PromptMode::fs;
  throw ConfigError("unknown prompt mode: " + std::string(s));
}

Strategy initial_strategy() {
  Strategy s;
  s.decomposition_text =
      "Split a claim into sub-claims only when it bundles several independent facts, or when one fact "
      "depends on another and so needs its own reasoning step or retrieval. Leave simple claims whole.\n"
      "Every sub-claim you write must be:\n"
      "- Precise and Independent: self-contained and unambiguous, keeping the meaning of the original "
      "claim without relying on pronouns or context from other sub-claims.\n"
      "- Verifiable and Contextualized: carrying enough names, dates and context to be checked on its own.\n"
      "- Minimal yet Comprehensive: no redundant or overly fragmented sub-claims, but no detail needed "
      "for verification dropped either.";
  s.info_gathering_text =
      "Gather evidence deliberately:\n"
      "- Targeted Retrieval: write declarative queries built from the key entities, names, dates or "
      "concepts of the claim instead of generic questions.\n"
      "- Iterative Retrieval: when an intermediate fact is needed first (for example, the title of a "
      "work before checking something about it), retrieve it in an earlier step, extract it with "
      "`question`, and use it to form the next query.\n"
      "- Evidence Aggregation: combine the evidence from related retrievals into one unified context "
      "before verifying, so each verification sees everything relevant.";
  s.version = 0;
  s.provenance = Provenance::initial;
  return s;
}

std::string render_prompt(const Strategy& strategy, const PromptVariant& variant, std::string_view claim) {
  if (text::trim(claim).empty()) throw DataError("claim must be non-empty");
  if (variant.mode == PromptMode::fs && (!variant.demonstrations || variant.demonstrations->demos.empty())) {
    throw MissingDemonstrations();
  }

  // Rendered in two halves so placeholder-like text inside demonstrations is
  // never substituted.
  const std::string_view backbone = prompts::backbone_template();
  static constexpr std::string_view kInputSection =
      "Now, follow the above guidelines to generate a Python-like reasoning program for the following input claim:\n";
  const auto split = backbone.find(kInputSection);
  const std::map<std::string, std::string> values = {
      {"claim_decomposition_strategy", strategy.decomposition_text},
      {"information_gathering_strategy", strategy.info_gathering_text},
      {"input", std::string(claim)}};

  std::string prompt = text::render_template(backbone.substr(0, split), values);
  if (variant.mode == PromptMode::fs) {
    prompt += "# Examples:\n";
    const auto& demos = variant.demonstrations->demos;
    for (std::size_t i = 0; i < demos.size(); ++i) {
      prompt += "## Example " + std::to_string(i + 1) + "\n";
      prompt += "Claim:\n```\n" + demos[i].claim + "\n```\n";
      prompt += "Reasoning program:\n```python\n" + std::string(text::trim(demos[i].program_code)) + "\n```\n";
    }
    prompt += "---\n";
  }
  prompt += text::render_template(backbone.substr(split), values);
  if (variant.mode == PromptMode::cot) {
    prompt +=
        "Before writing any code, reason step by step about how to verify this claim. Write that reasoning "
        "as comments at the top of the program, then give the program itself, all inside a single ```python "
        "block.\n";
  }
  return prompt;
}

// --- persistence -------------------------------------------------------------

namespace {

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw DataError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& p, std::string_view content) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + p.string());
  out << content;
}

std::filesystem::path version_dir(const std::filesystem::path& dir, std::size_t v) {
  return dir / ("v" + std::to_string(v));
}

}  // namespace

void save_strategy(const std::filesystem::path& dir, const Strategy& strategy) {
  std::filesystem::create_directories(version_dir(dir, strategy.version));
  write_file(version_dir(dir, strategy.version) / "decomposition.txt", strategy.decomposition_text);
  write_file(version_dir(dir, strategy.version) / "information_gathering.txt", strategy.info_gathering_text);

  nlohmann::ordered_json manifest = nlohmann::ordered_json::array();
  if (std::filesystem::exists(dir / "manifest.json")) {
    auto old = nlohmann::ordered_json::parse(read_file(dir / "manifest.json"));
    for (auto& e : old) {
      if (e.at("version").get<std::size_t>() != strategy.version) manifest.push_back(e);
    }
  }
  nlohmann::ordered_json entry;
  entry["version"] = strategy.version;
  entry["provenance"] = std::string(to_string(strategy.provenance));
  entry["parent_version"] =
      strategy.parent_version ? nlohmann::ordered_json(*strategy.parent_version) : nlohmann::ordered_json(nullptr);
  entry["run_id"] = strategy.run_id;
  manifest.push_back(entry);
  std::sort(manifest.begin(), manifest.end(), [](const auto& a, const auto& b) {
    return a.at("version").template get<std::size_t>() < b.at("version").template get<std::size_t>();
  });
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

Strategy load_strategy(const std::filesystem::path& dir, std::optional<std::size_t> version) {
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(read_file(dir / "manifest.json"));
  } catch (const nlohmann::json::exception& e) {
    throw DataError("strategy manifest " + (dir / "manifest.json").string() + ": " + e.what());
  }
  if (!manifest.is_array() || manifest.empty()) throw DataError("empty strategy manifest in " + dir.string());
  const nlohmann::json* chosen = nullptr;
  for (const auto& e : manifest) {
    auto v = e.at("version").get<std::size_t>();
    if (version ? v == *version : (!chosen || v > chosen->at("version").get<std::size_t>())) chosen = &e;
  }
  if (!chosen) throw DataError("strategy version " + std::to_string(*version) + " not in " + dir.string());

  Strategy s;
  s.version = chosen->at("version").get<std::size_t>();
  s.provenance = chosen->at("provenance").get<std::string>() == "refined" ? Provenance::refined : Provenance::initial;
  if (!chosen->at("parent_version").is_null()) s.parent_version = chosen->at("parent_version").get<std::size_t>();
  s.run_id = chosen->value("run_id", std::string{});
  s.decomposition_text = read_file(version_dir(dir, s.version) / "decomposition.txt");
  s.info_gathering_text = read_file(version_dir(dir, s.version) / "information_gathering.txt");
  if (s.decomposition_text.empty() || s.info_gathering_text.empty()) {
    throw DataError("strategy v" + std::to_string(s.version) + " has an empty text");
  }
  return s;
}

void save_demonstrations(const std::filesystem::path& path, const DemonstrationSet& set,
                         const std::string& score_context_json) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  auto context = nlohmann::ordered_json::parse(score_context_json);
  for (const auto& d : set.demos) {
    nlohmann::ordered_json j;
    j["claim"] = d.claim;
    j["program_code"] = d.program_code;
    j["score_context"] = context;
    out << j.dump() << '\n';
  }
}

DemonstrationSet load_demonstrations(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open demonstrations " + path.string());
  DemonstrationSet set;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    try {
      auto j = nlohmann::json::parse(line);
      set.demos.push_back({j.at("claim").get<std::string>(), j.at("program_code").get<std::string>()});
      const auto& ctx = j.value("score_context", nlohmann::json());
      if (ctx.is_object() && ctx.contains("score") && ctx["score"].is_number()) set.score = ctx["score"].get<double>();
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError(lineno, std::string("demonstration record: ") + e.what());
    }
  }
  return set;
}

}  // namespace progcheck
