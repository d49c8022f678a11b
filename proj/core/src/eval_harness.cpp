// Copyright 2026 The progcheck Authors
// Licensed under the Apache License, Version 2.0

#include "progcheck/eval_harness.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "progcheck/corpus_index.hpp"
#include "progcheck/errors.hpp"
#include "progcheck/text.hpp"

namespace progcheck {

std::string_view to_string(DatasetFormat f) {
  switch (f) {
    case DatasetFormat::hover: return "hover";
    case DatasetFormat::feverous_s: return "feverous_s";
    case DatasetFormat::generic: return "generic";
  }
  return "generic";
}

DatasetFormat parse_dataset_format(std::string_view s) {
  if (s == "hover") return DatasetFormat::hover;
  if (s == "feverous_s" || s == "feverous") return DatasetFormat::feverous_s;
  if (s == "generic") return DatasetFormat::generic;
  throw ConfigError("unknown dataset format: " + std::string(s));
}

std::size_t default_top_k(DatasetFormat f) { return f == DatasetFormat::feverous_s ? 5 : 10; }

namespace {

bool parse_label(const nlohmann::json& v, std::size_t line) {
  if (v.is_boolean()) return v.get<bool>();
  if (v.is_string()) {
    auto s = text::to_lower(text::trim(v.get<std::string>()));
    if (s == "true" || s == "supported" || s == "supports" || s == "support") return true;
    if (s == "false" || s == "not_supported" || s == "not supported" || s == "refutes" || s == "refuted" ||
        s == "not_enough_info") {
      return false;
    }
  }
  throw SchemaError(line, "unrecognized label " + v.dump());
}

std::vector<std::string> string_ids(const nlohmann::json& v, std::size_t line) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  if (!v.is_array()) throw SchemaError(line, "evidence ids must be a list");
  for (const auto& e : v) {
    std::string id;
    if (e.is_string()) {
      id = e.get<std::string>();
    } else if (e.is_array() && !e.empty() && e[0].is_string()) {
      id = e[0].get<std::string>();  // [title, sentence_id] pairs
    } else {
      throw SchemaError(line, "unsupported evidence id " + e.dump());
    }
    if (seen.insert(id).second) out.push_back(id);
  }
  return out;
}

}  // namespace

std::vector<BenchmarkRecord> load_dataset(const std::filesystem::path& path, DatasetFormat format) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset " + path.string());
  std::vector<BenchmarkRecord> records;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw SchemaError(lineno, std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw SchemaError(lineno, "record must be an object");
    if (!j.contains("claim") || !j["claim"].is_string() || text::trim(j["claim"].get<std::string>()).empty()) {
      throw SchemaError(lineno, "missing claim");
    }
    if (!j.contains("label")) throw SchemaError(lineno, "missing label");

    BenchmarkRecord r;
    r.claim = j["claim"].get<std::string>();
    r.label = parse_label(j["label"], lineno);
    for (const char* key : {"id", "uid"}) {
      if (j.contains(key)) {
        r.id = j[key].is_string() ? j[key].get<std::string>() : j[key].dump();
        break;
      }
    }
    if (r.id.empty()) r.id = std::to_string(lineno);

    for (const char* key : {"num_hops", "hops"}) {
      if (j.contains(key) && !j[key].is_null()) {
        if (!j[key].is_number_integer()) throw SchemaError(lineno, std::string(key) + " must be an integer");
        r.hops = j[key].get<int>();
        break;
      }
    }
    if (format == DatasetFormat::hover && !r.hops) throw SchemaError(lineno, "hover record needs num_hops");

    if (j.contains("gold_doc_ids")) {
      r.gold_doc_ids = string_ids(j["gold_doc_ids"], lineno);
    } else if (format == DatasetFormat::hover && j.contains("supporting_facts")) {
      r.gold_doc_ids = string_ids(j["supporting_facts"], lineno);
    } else if (format == DatasetFormat::feverous_s && j.contains("evidence") && j["evidence"].is_array()) {
      r.gold_doc_ids = string_ids(j["evidence"], lineno);
    }
    records.push_back(std::move(r));
  }
  return records;
}

namespace {

struct Confusion {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;  // True is the positive class
};

Confusion confusion(const std::vector<bool>& preds, const std::vector<bool>& golds) {
  if (preds.size() != golds.size()) throw LengthMismatch(preds.size(), golds.size());
  if (preds.empty()) throw DataError("metrics need at least one prediction");
  Confusion c;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (preds[i] && golds[i]) ++c.tp;
    else if (preds[i] && !golds[i]) ++c.fp;
    else if (!preds[i] && golds[i]) ++c.fn;
    else ++c.tn;
  }
  return c;
}

double f1(std::size_t tp, std::size_t fp, std::size_t fn) {
  // 2TP / (2TP + FP + FN), which is 0 exactly when precision + recall = 0.
  const std::size_t denom = 2 * tp + fp + fn;
  return denom == 0 ? 0.0 : static_cast<double>(2 * tp) / static_cast<double>(denom);
}

}  // namespace

double macro_f1(const std::vector<bool>& preds, const std::vector<bool>& golds) {
  auto c = confusion(preds, golds);
  return (f1(c.tp, c.fp, c.fn) + f1(c.tn, c.fn, c.fp)) / 2.0;
}

double balanced_accuracy(const std::vector<bool>& preds, const std::vector<bool>& golds) {
  auto c = confusion(preds, golds);
  if (c.tp + c.fn == 0 || c.tn + c.fp == 0) throw SingleClassGold();
  const double recall_true = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  const double recall_false = static_cast<double>(c.tn) / static_cast<double>(c.tn + c.fp);
  return (recall_true + recall_false) / 2.0;
}

namespace {

SliceMetrics slice(const std::vector<bool>& preds, const std::vector<bool>& golds) {
  SliceMetrics m;
  m.n = preds.size();
  m.macro_f1 = macro_f1(preds, golds);
  try {
    m.bacc = balanced_accuracy(preds, golds);
  } catch (const SingleClassGold&) {
    auto c = confusion(preds, golds);
    m.bacc = c.tp + c.fn > 0 ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn)
                             : static_cast<double>(c.tn) / static_cast<double>(c.tn + c.fp);
  }
  return m;
}

}  // namespace

MetricReport evaluate_run(const std::vector<BenchmarkRecord>& records, const std::vector<bool>& predictions,
                          const std::vector<std::vector<std::string>>* retrieved_ids) {
  if (records.size() != predictions.size()) throw LengthMismatch(records.size(), predictions.size());
  if (retrieved_ids && retrieved_ids->size() != records.size()) {
    throw LengthMismatch(records.size(), retrieved_ids->size());
  }
  std::vector<bool> golds;
  golds.reserve(records.size());
  for (const auto& r : records) golds.push_back(r.label);

  MetricReport report;
  auto overall = slice(predictions, golds);
  report.n = overall.n;
  report.macro_f1 = overall.macro_f1;
  report.bacc = overall.bacc;

  std::map<int, std::pair<std::vector<bool>, std::vector<bool>>> by_hop;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].hops) {
      by_hop[*records[i].hops].first.push_back(predictions[i]);
      by_hop[*records[i].hops].second.push_back(golds[i]);
    }
  }
  for (const auto& [hop, pg] : by_hop) report.per_hop[hop] = slice(pg.first, pg.second);

  if (retrieved_ids && !retrieved_ids->empty()) {
    double total = 0.0;
    std::size_t counted = 0;
    std::map<int, std::pair<double, std::size_t>> hop_recall;
    for (std::size_t i = 0; i < records.size(); ++i) {
      if (records[i].gold_doc_ids.empty()) continue;
      std::set<std::string> gold(records[i].gold_doc_ids.begin(), records[i].gold_doc_ids.end());
      // Union of every top-k retrieval the claim's program made.
      const auto& got = (*retrieved_ids)[i];
      double r = recall_at_k(std::set<std::string>(got.begin(), got.end()), gold);
      total += r;
      ++counted;
      if (records[i].hops) {
        hop_recall[*records[i].hops].first += r;
        hop_recall[*records[i].hops].second += 1;
      }
    }
    if (counted > 0) {
      report.recall_at_10 = total / static_cast<double>(counted);
      for (const auto& [hop, acc] : hop_recall) report.per_hop_recall[hop] = acc.first / static_cast<double>(acc.second);
    }
  }
  return report;
}

nlohmann::ordered_json to_json(const MetricReport& report) {
  nlohmann::ordered_json j;
  j["n"] = report.n;
  j["macro_f1"] = report.macro_f1;
  j["bacc"] = report.bacc;
  if (report.recall_at_10) j["recall_at_10"] = *report.recall_at_10;
  nlohmann::ordered_json hops = nlohmann::ordered_json::object();
  for (const auto& [hop, m] : report.per_hop) {
    nlohmann::ordered_json h;
    h["n"] = m.n;
    h["macro_f1"] = m.macro_f1;
    h["bacc"] = m.bacc;
    if (auto it = report.per_hop_recall.find(hop); it != report.per_hop_recall.end()) h["recall_at_10"] = it->second;
    hops[std::to_string(hop)] = h;
  }
  j["per_hop"] = hops;
  return j;
}

std::string format_table(const MetricReport& report) {
  std::ostringstream out;
  char buf[128];
  const bool recall = report.recall_at_10.has_value();
  std::snprintf(buf, sizeof buf, "%-10s %6s %9s %9s%s\n", "slice", "n", "macro_f1", "bacc", recall ? "  recall@10" : "");
  out << buf;
  auto row = [&](const std::string& name, std::size_t n, double f, double b, std::optional<double> r) {
    std::snprintf(buf, sizeof buf, "%-10s %6zu %9.4f %9.4f", name.c_str(), n, f * 100.0, b * 100.0);
    out << buf;
    if (recall) {
      if (r) {
        std::snprintf(buf, sizeof buf, " %10.4f", *r * 100.0);
        out << buf;
      } else {
        out << "          -";
      }
    }
    out << '\n';
  };
  for (const auto& [hop, m] : report.per_hop) {
    std::optional<double> r;
    if (auto it = report.per_hop_recall.find(hop); it != report.per_hop_recall.end()) r = it->second;
    row(std::to_string(hop) + "-hop", m.n, m.macro_f1, m.bacc, r);
  }
  row("all", report.n, report.macro_f1, report.bacc, report.recall_at_10);
  return out.str();
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_per_claim_csv(const std::filesystem::path& path, const std::vector<BenchmarkRecord>& records,
                         const std::vector<bool>& predictions,
                         const std::vector<std::vector<std::string>>* retrieved_ids) {
  if (records.size() != predictions.size()) throw LengthMismatch(records.size(), predictions.size());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << "id,claim,pred,gold,hop,recall\n";
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    out << csv_escape(r.id) << ',' << csv_escape(r.claim) << ',' << (predictions[i] ? "True" : "False") << ','
        << (r.label ? "True" : "False") << ',' << (r.hops ? std::to_string(*r.hops) : "") << ',';
    if (retrieved_ids && !r.gold_doc_ids.empty()) {
      std::set<std::string> gold(r.gold_doc_ids.begin(), r.gold_doc_ids.end());
      std::set<std::string> top((*retrieved_ids)[i].begin(), (*retrieved_ids)[i].end());
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.6f", recall_at_k(top, gold));
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace progcheck
