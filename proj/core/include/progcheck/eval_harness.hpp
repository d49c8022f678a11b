// Copyright 2026 The progcheck Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace progcheck {

enum class DatasetFormat { hover, feverous_s, generic };
std::string_view to_string(DatasetFormat f);
DatasetFormat parse_dataset_format(std::string_view s);

/// Retrieval depth used for a dataset: 10 for HOVER, 5 for FEVEROUS-S,
/// 10 for generic data.
std::size_t default_top_k(DatasetFormat f);

struct BenchmarkRecord {
  std::string id;
  std::string claim;
  bool label = false;
  std::optional<int> hops;
  std::vector<std::string> gold_doc_ids;
};

/// JSON-lines loader. Labels may be booleans or dataset strings
/// (SUPPORTED/SUPPORTS/TRUE vs NOT_SUPPORTED/REFUTES/FALSE, any case).
/// hover: `num_hops`, gold ids from `supporting_facts` titles or
/// `gold_doc_ids`; feverous_s: gold ids from `evidence` or `gold_doc_ids`.
/// Throws SchemaError(line) on a bad record.
std::vector<BenchmarkRecord> load_dataset(const std::filesystem::path& path, DatasetFormat format);

/// Mean of the per-class F1 over {True, False}; a class with zero
/// precision+recall contributes 0. Throws LengthMismatch, DataError on empty.
double macro_f1(const std::vector<bool>& preds, const std::vector<bool>& golds);

/// (recall_True + recall_False) / 2. Throws SingleClassGold when golds hold
/// only one class.
double balanced_accuracy(const std::vector<bool>& preds, const std::vector<bool>& golds);

struct SliceMetrics {
  std::size_t n = 0;
  double macro_f1 = 0.0;
  double bacc = 0.0;
};

struct MetricReport {
  std::size_t n = 0;
  double macro_f1 = 0.0;
  double bacc = 0.0;
  std::map<int, SliceMetrics> per_hop;
  std::optional<double> recall_at_10;
  std::map<int, double> per_hop_recall;
};

/// Overall and per-hop metrics. Slices whose golds hold a single class get
/// BAcc = recall of that class. recall@10 is averaged over claims that have
/// gold ids, and is present only when retrieved ids are supplied. A claim's
/// retrieved ids are the union over all of its top-k retrieve calls.
MetricReport evaluate_run(const std::vector<BenchmarkRecord>& records, const std::vector<bool>& predictions,
                          const std::vector<std::vector<std::string>>* retrieved_ids = nullptr);

nlohmann::ordered_json to_json(const MetricReport& report);
std::string format_table(const MetricReport& report);

/// claim,pred,gold,hop,recall rows (RFC 4180 quoting).
void write_per_claim_csv(const std::filesystem::path& path, const std::vector<BenchmarkRecord>& records,
                         const std::vector<bool>& predictions,
                         const std::vector<std::vector<std::string>>* retrieved_ids = nullptr);

std::string csv_escape(std::string_view field);

}  // namespace progcheck
