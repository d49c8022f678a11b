// Copyright 2026 The progcheck Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace progcheck {

struct Document {
  std::string doc_id;
  std::string title;
  std::string text;
};

/// Which document fields feed the index. Retrieval always returns the body.
enum class IndexedFields { title_and_text, text_only };

struct RetrievalConfig {
  double k1 = 0.9;
  double b = 0.4;
  std::size_t top_k = 10;
  IndexedFields fields = IndexedFields::title_and_text;

  /// Throws ConfigError on k1 < 0, b outside [0,1] or top_k == 0.
  void check() const;
};

struct RankedHit {
  std::string doc_id;
  double score = 0.0;

  friend bool operator==(const RankedHit&, const RankedHit&) = default;
};

/// Lowercases ASCII and splits on every non-alphanumeric ASCII byte. Bytes
/// >= 0x80 are kept inside tokens so UTF-8 words survive intact.
std::vector<std::string> tokenize(std::string_view text);

/// Reads a JSON-lines corpus with `id`, `title`, `text` per line.
std::vector<Document> load_corpus_jsonl(const std::filesystem::path& path);

/// Okapi BM25 over an in-memory inverted index. Immutable after build, so a
/// built index can be shared across threads without locking.
class Bm25Index {
 public:
  struct Posting {
    std::uint32_t doc = 0;
    std::uint32_t tf = 0;
  };

  static Bm25Index build(std::vector<Document> docs, RetrievalConfig config);

  /// Top-k hits by descending score, ties by ascending doc_id. Documents that
  /// share no term with the query are never returned.
  std::vector<RankedHit> retrieve(std::string_view query, std::size_t k) const;
  std::vector<RankedHit> retrieve(std::string_view query) const { return retrieve(query, config_.top_k); }

  std::size_t size() const noexcept { return docs_.size(); }
  double average_length() const noexcept { return avgdl_; }
  std::size_t document_frequency(const std::string& term) const;
  std::size_t document_length(std::size_t i) const { return lengths_.at(i); }
  const RetrievalConfig& config() const noexcept { return config_; }
  const std::vector<Document>& documents() const noexcept { return docs_; }
  const Document* find(const std::string& doc_id) const;

  /// Text that was tokenized for document i (per IndexedFields).
  std::string indexed_text(std::size_t i) const;

  /// Binary artifact: "PCBM25IX" magic, format version, config, documents
  /// and postings in sorted term order. Identical input gives identical bytes.
  void save(const std::filesystem::path& path) const;
  static Bm25Index load(const std::filesystem::path& path);

  static constexpr std::uint32_t kFormatVersion = 1;

 private:
  Bm25Index() = default;
  void finalize();

  RetrievalConfig config_;
  std::vector<Document> docs_;
  std::vector<std::uint32_t> lengths_;
  std::unordered_map<std::string, std::vector<Posting>> postings_;
  std::unordered_map<std::string, std::size_t> by_id_;
  double avgdl_ = 0.0;
};

/// |retrieved ∩ gold| / |gold|. Throws EmptyGold when gold is empty.
double recall_at_k(const std::set<std::string>& retrieved, const std::set<std::string>& gold);

}  // namespace progcheck
