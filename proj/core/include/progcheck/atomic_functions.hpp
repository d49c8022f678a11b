// Copyright 2026 The progcheck Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "progcheck/corpus_index.hpp"
#include "progcheck/llm_gateway.hpp"

namespace progcheck {

struct Verdict {
  bool label = false;
  std::string rationale;
};

/// Retrieved bodies joined by a single '\n', in rank order.
struct EvidenceBlob {
  std::string text;
  std::vector<std::string> doc_ids;
};

std::string render_question_prompt(std::string_view question, std::string_view evidence);
std::string render_verify_prompt(std::string_view claim, std::string_view evidence);

/// Text after the last "Answer:" marker, trimmed; the whole response trimmed
/// when there is no marker.
std::string parse_answer(std::string_view response);

/// Label from the text after the last "Verification Result:" marker,
/// matched case-insensitively against True/False. Rationale is the text
/// after "Reasoning:" up to that marker. Throws UnparseableVerdict.
Verdict parse_verdict(std::string_view response);

/// The three primitives a reasoning program may call. Stateless apart from
/// the borrowed index and gateway, so one instance serves many claims.
class AtomicFunctions {
 public:
  AtomicFunctions(const Bm25Index& index, LlmGateway& gateway, std::size_t top_k);

  EvidenceBlob retrieve(std::string_view query) const;
  std::string question(std::string_view question, std::string_view evidence) const;
  Verdict verify(std::string_view claim, std::string_view evidence) const;

  std::size_t top_k() const noexcept { return top_k_; }

 private:
  const Bm25Index& index_;
  LlmGateway& gateway_;
  std::size_t top_k_;
};

}  // namespace progcheck
