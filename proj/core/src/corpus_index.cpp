// Copyright 2026 The progcheck Authors
// Licensed under the Apache License, Version 2.0

#include "progcheck/corpus_index.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>

#include <nlohmann/json.hpp>

#include "progcheck/errors.hpp"

namespace progcheck {

void RetrievalConfig::check() const {
  if (!(k1 >= 0.0)) throw ConfigError("retrieval.k1 must be >= 0");
  if (!(b >= 0.0 && b <= 1.0)) throw ConfigError("retrieval.b must be in [0, 1]");
  if (top_k == 0) throw ConfigError("retrieval.top_k must be >= 1");
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char ch : text) {
    auto c = static_cast<unsigned char>(ch);
    if (c >= 0x80 || (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z')) {
      current += static_cast<char>(c);
    } else if (c >= 'A' && c <= 'Z') {
      current += static_cast<char>(c - 'A' + 'a');
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::vector<Document> load_corpus_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus " + path.string());
  std::vector<Document> docs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw SchemaError(lineno, std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("id") || !j.contains("text") || !j["text"].is_string() ||
        (j.contains("title") && !j["title"].is_string())) {
      throw SchemaError(lineno, "corpus record needs `id` and `text`");
    }
    Document d;
    d.doc_id = j["id"].is_string() ? j["id"].get<std::string>() : j["id"].dump();
    d.title = j.value("title", std::string{});
    d.text = j["text"].get<std::string>();
    if (d.doc_id.empty()) throw SchemaError(lineno, "empty document id");
    if (d.text.empty()) throw SchemaError(lineno, "empty document text");
    docs.push_back(std::move(d));
  }
  return docs;
}

std::string Bm25Index::indexed_text(std::size_t i) const {
  const auto& d = docs_.at(i);
  if (config_.fields == IndexedFields::text_only) return d.text;
  return d.title + " " + d.text;
}

Bm25Index Bm25Index::build(std::vector<Document> docs, RetrievalConfig config) {
  config.check();
  if (docs.empty()) throw DataError("cannot index an empty corpus");
  Bm25Index index;
  index.config_ = config;
  index.docs_ = std::move(docs);
  for (std::size_t i = 0; i < index.docs_.size(); ++i) {
    if (!index.by_id_.emplace(index.docs_[i].doc_id, i).second) {
      throw DuplicateDocId(index.docs_[i].doc_id);
    }
  }
  index.lengths_.resize(index.docs_.size());
  for (std::size_t i = 0; i < index.docs_.size(); ++i) {
    std::map<std::string, std::uint32_t> tf;
    auto tokens = tokenize(index.indexed_text(i));
    for (auto& t : tokens) ++tf[t];
    index.lengths_[i] = static_cast<std::uint32_t>(tokens.size());
    for (auto& [term, n] : tf) {
      index.postings_[term].push_back({static_cast<std::uint32_t>(i), n});
    }
  }
  index.finalize();
  return index;
}

void Bm25Index::finalize() {
  double total = 0.0;
  for (auto len : lengths_) total += len;
  avgdl_ = total / static_cast<double>(lengths_.size());
}

std::size_t Bm25Index::document_frequency(const std::string& term) const {
  auto it = postings_.find(term);
  return it == postings_.end() ? 0 : it->second.size();
}

const Document* Bm25Index::find(const std::string& doc_id) const {
  auto it = by_id_.find(doc_id);
  return it == by_id_.end() ? nullptr : &docs_[it->second];
}

std::vector<RankedHit> Bm25Index::retrieve(std::string_view query, std::size_t k) const {
  if (k == 0) throw ConfigError("k must be >= 1");
  auto tokens = tokenize(query);
  if (tokens.empty()) throw EmptyQuery();
  std::set<std::string> terms(tokens.begin(), tokens.end());

  const double n = static_cast<double>(docs_.size());
  const double k1 = config_.k1;
  const double b = config_.b;
  std::unordered_map<std::uint32_t, double> acc;
  for (const auto& term : terms) {
    auto it = postings_.find(term);
    if (it == postings_.end()) continue;
    const double df = static_cast<double>(it->second.size());
    const double idf = std::log((n - df + 0.5) / (df + 0.5) + 1.0);
    for (const auto& p : it->second) {
      const double tf = p.tf;
      const double norm = k1 * (1.0 - b + b * static_cast<double>(lengths_[p.doc]) / avgdl_);
      acc[p.doc] += idf * (tf * (k1 + 1.0)) / (tf + norm);
    }
  }

  std::vector<RankedHit> hits;
  hits.reserve(acc.size());
  for (auto& [doc, score] : acc) {
    if (score > 0.0) hits.push_back({docs_[doc].doc_id, score});
  }
  auto better = [](const RankedHit& a, const RankedHit& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.doc_id < b.doc_id;
  };
  if (hits.size() > k) {
    std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(k), hits.end(), better);
    hits.resize(k);
  } else {
    std::sort(hits.begin(), hits.end(), better);
  }
  return hits;
}

// --- persistence -----------------------------------------------------------

namespace {

constexpr char kMagic[8] = {'P', 'C', 'B', 'M', '2', '5', 'I', 'X'};

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.put(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.put(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void f64(double v) {
    std::uint64_t bits;
    static_assert(sizeof bits == sizeof v);
    std::memcpy(&bits, &v, sizeof v);
    u64(bits);
  }
  void str(const std::string& s) {
    u64(s.size());
    out_.write(s.data(), static_cast<std::streamsize>(s.size()));
  }

 private:
  std::ostream& out_;
};

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}
  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(byte()) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(byte()) << (8 * i);
    return v;
  }
  double f64() {
    auto bits = u64();
    double v;
    std::memcpy(&v, &bits, sizeof v);
    return v;
  }
  std::string str() {
    auto n = u64();
    if (n > (1ULL << 32)) throw IndexFormatError("string length out of range");
    std::string s(n, '\0');
    in_.read(s.data(), static_cast<std::streamsize>(n));
    if (!in_) throw IndexFormatError("truncated");
    return s;
  }

 private:
  unsigned char byte() {
    int c = in_.get();
    if (c == EOF) throw IndexFormatError("truncated");
    return static_cast<unsigned char>(c);
  }
  std::istream& in_;
};

}  // namespace

void Bm25Index::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write index to " + path.string());
  Writer w(out);
  out.write(kMagic, sizeof kMagic);
  w.u32(kFormatVersion);
  w.f64(config_.k1);
  w.f64(config_.b);
  w.u64(config_.top_k);
  w.u32(config_.fields == IndexedFields::title_and_text ? 0 : 1);
  w.u64(docs_.size());
  for (std::size_t i = 0; i < docs_.size(); ++i) {
    w.str(docs_[i].doc_id);
    w.str(docs_[i].title);
    w.str(docs_[i].text);
    w.u32(lengths_[i]);
  }
  std::vector<const std::string*> terms;
  terms.reserve(postings_.size());
  for (const auto& [term, _] : postings_) terms.push_back(&term);
  std::sort(terms.begin(), terms.end(), [](auto* a, auto* b) { return *a < *b; });
  w.u64(terms.size());
  for (const auto* term : terms) {
    const auto& list = postings_.at(*term);
    w.str(*term);
    w.u64(list.size());
    for (const auto& p : list) {
      w.u32(p.doc);
      w.u32(p.tf);
    }
  }
  if (!out) throw DataError("failed writing index to " + path.string());
}

Bm25Index Bm25Index::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open index " + path.string());
  char magic[sizeof kMagic];
  in.read(magic, sizeof magic);
  if (!in || !std::equal(std::begin(magic), std::end(magic), std::begin(kMagic))) {
    throw IndexFormatError("bad magic header");
  }
  Reader r(in);
  auto version = r.u32();
  if (version != kFormatVersion) {
    throw IndexFormatError("unsupported format version " + std::to_string(version));
  }
  Bm25Index index;
  index.config_.k1 = r.f64();
  index.config_.b = r.f64();
  index.config_.top_k = r.u64();
  index.config_.fields = r.u32() == 0 ? IndexedFields::title_and_text : IndexedFields::text_only;
  index.config_.check();
  auto ndocs = r.u64();
  if (ndocs == 0 || ndocs > (1ULL << 32)) throw IndexFormatError("document count out of range");
  index.docs_.resize(ndocs);
  index.lengths_.resize(ndocs);
  for (std::size_t i = 0; i < ndocs; ++i) {
    index.docs_[i].doc_id = r.str();
    index.docs_[i].title = r.str();
    index.docs_[i].text = r.str();
    index.lengths_[i] = r.u32();
    if (!index.by_id_.emplace(index.docs_[i].doc_id, i).second) {
      throw DuplicateDocId(index.docs_[i].doc_id);
    }
  }
  auto nterms = r.u64();
  for (std::uint64_t t = 0; t < nterms; ++t) {
    auto term = r.str();
    auto n = r.u64();
    if (n > ndocs) throw IndexFormatError("posting list longer than corpus");
    std::vector<Posting> list(n);
    for (auto& p : list) {
      p.doc = r.u32();
      p.tf = r.u32();
      if (p.doc >= ndocs) throw IndexFormatError("posting references unknown document");
    }
    index.postings_.emplace(std::move(term), std::move(list));
  }
  index.finalize();
  return index;
}

double recall_at_k(const std::set<std::string>& retrieved, const std::set<std::string>& gold) {
  if (gold.empty()) throw EmptyGold();
  std::size_t found = 0;
  for (const auto& g : gold) found += retrieved.count(g);
  return static_cast<double>(found) / static_cast<double>(gold.size());
}

}  // namespace progcheck
