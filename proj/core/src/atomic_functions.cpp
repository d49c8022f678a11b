// Copyright 2026 The progcheck Authors
// Licensed under the Apache License, Version 2.0

#include "progcheck/atomic_functions.hpp"

#include "progcheck/errors.hpp"
#include "progcheck/prompts.hpp"
#include "progcheck/text.hpp"

namespace progcheck {

namespace {

constexpr std::string_view kAnswerMarker = "Answer:";
constexpr std::string_view kReasoningMarker = "Reasoning:";
constexpr std::string_view kResultMarker = "Verification Result:";

// Strips decoration models tend to put around a label: quotes, backticks,
// brackets, asterisks and trailing punctuation.
std::string_view strip_label(std::string_view s) {
  constexpr std::string_view junk = " \t\r\n`'\"*[]().:;,!";
  auto first = s.find_first_not_of(junk);
  if (first == std::string_view::npos) return {};
  auto last = s.find_last_not_of(junk);
  return s.substr(first, last - first + 1);
}

}  // namespace

std::string render_question_prompt(std::string_view question, std::string_view evidence) {
  return text::render_template(prompts::question_template(),
                               {{"question", std::string(question)}, {"evidence", std::string(evidence)}});
}

std::string render_verify_prompt(std::string_view claim, std::string_view evidence) {
  return text::render_template(prompts::verify_template(),
                               {{"claim", std::string(claim)}, {"evidence", std::string(evidence)}});
}

std::string parse_answer(std::string_view response) {
  auto pos = response.rfind(kAnswerMarker);
  if (pos == std::string_view::npos) return std::string(text::trim(response));
  return std::string(text::trim(response.substr(pos + kAnswerMarker.size())));
}

Verdict parse_verdict(std::string_view response) {
  auto pos = response.rfind(kResultMarker);
  if (pos == std::string_view::npos) throw UnparseableVerdict(std::string(response));

  // First line after the marker, then the first word of it.
  auto rest = text::trim(response.substr(pos + kResultMarker.size()));
  rest = rest.substr(0, rest.find('\n'));
  auto label = strip_label(rest);
  label = strip_label(label.substr(0, label.find_first_of(" \t")));

  Verdict v;
  if (text::iequals(label, "true")) {
    v.label = true;
  } else if (text::iequals(label, "false")) {
    v.label = false;
  } else {
    throw UnparseableVerdict(std::string(response));
  }

  auto head = response.substr(0, pos);
  auto rpos = head.rfind(kReasoningMarker);
  if (rpos != std::string_view::npos) head = head.substr(rpos + kReasoningMarker.size());
  auto rationale = text::trim(head);
  // Strip the separator line some models echo from the output format.
  while (rationale.size() >= 3 && rationale.substr(rationale.size() - 3) == "---") {
    rationale = text::trim(rationale.substr(0, rationale.size() - 3));
  }
  while (rationale.size() >= 3 && rationale.substr(0, 3) == "---") {
    rationale = text::trim(rationale.substr(3));
  }
  v.rationale = std::string(rationale);
  return v;
}

AtomicFunctions::AtomicFunctions(const Bm25Index& index, LlmGateway& gateway, std::size_t top_k)
    : index_(index), gateway_(gateway), top_k_(top_k) {
  if (top_k_ == 0) throw ConfigError("top_k must be >= 1");
}

EvidenceBlob AtomicFunctions::retrieve(std::string_view query) const {
  EvidenceBlob blob;
  std::vector<std::string> bodies;
  for (const auto& hit : index_.retrieve(query, top_k_)) {
    bodies.push_back(index_.find(hit.doc_id)->text);
    blob.doc_ids.push_back(hit.doc_id);
  }
  blob.text = text::join(bodies, "\n");
  return blob;
}

std::string AtomicFunctions::question(std::string_view question, std::string_view evidence) const {
  if (text::trim(question).empty()) throw DataError("question must be non-empty");
  return parse_answer(gateway_.complete(ModelRole::function_llm, render_question_prompt(question, evidence)));
}

Verdict AtomicFunctions::verify(std::string_view claim, std::string_view evidence) const {
  if (text::trim(claim).empty()) throw DataError("claim must be non-empty");
  return parse_verdict(gateway_.complete(ModelRole::function_llm, render_verify_prompt(claim, evidence)));
}

}  // namespace progcheck
