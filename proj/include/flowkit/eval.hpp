#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "flowkit/backends.hpp"
#include "flowkit/catalog.hpp"
#include "flowkit/harms.hpp"
#include "flowkit/metrics.hpp"
#include "flowkit/retrieval.hpp"

// Batch evaluation: per record, retrieve few-shots, build the prompt, call
// the backend, gate harms, parse + compile, score against the compiled
// ground truth, then aggregate per-testset rows.

namespace flowkit {

struct EvalRecord {
  std::string nl;
  /// Ground-truth DSL; may be empty only for harms-style records, which
  /// always score 0.
  std::string dsl;
  std::optional<std::vector<std::string>> signatures;
  std::optional<std::string> steps;
  std::optional<std::string> tenant_tag;
  std::string testset_type = "Good queries";
};

struct EvalConfig {
  int test_rag_k = 0;  // few-shots at test time: 0, 3 or 5
  bool exclude_ground_truth = true;
  std::uint64_t seed = 0;
  int max_tokens = 512;
  int workers = 1;  // records processed concurrently; output is order-independent
  std::string model_label = "model";
  std::string train_label = "-";
};

struct EvalDetail {
  std::size_t index = 0;
  std::string testset_type;
  OutcomeKind outcome = OutcomeKind::non_parsed;
  std::string note;  // error class / parse error when not parsed
  double similarity = 0.0;
  std::optional<double> latency_seconds;  // absent when the backend failed
  int completion_tokens = 0;
  std::vector<std::string> unknown_identifiers;  // off-catalog operations used
};

struct EvalRow {
  std::string testset_type;
  std::size_t n_samples = 0;
  double mean_similarity = 0.0;
  double non_parse_pct = 0.0;
  std::optional<double> latency_p10, latency_p50, latency_p90;
  double mean_completion_tokens = 0.0;
};

struct EvalReport {
  std::vector<EvalRow> rows;  // sorted by testset_type
  std::vector<EvalDetail> details;  // one per record, in input order
  std::string model_label;
  std::string train_label;
  int test_rag_k = 0;
};

/// Test set format: JSONL of {nl, dsl, signatures?, steps?, tenant_tag?,
/// testset_type?}. Every non-empty ground truth must compile against the
/// catalog; a corrupt reference is rejected here rather than silently
/// zeroing scores downstream.
std::vector<EvalRecord> load_eval_records(std::string_view jsonl, const Catalog& catalog);

/// Converts a harms test set into eval records (testset_type = category,
/// empty ground truth).
std::vector<EvalRecord> eval_records_from_harms(const std::vector<HarmExample>& examples);

/// Runs the full pipeline. `store` may be null when test_rag_k == 0.
/// Backend failures become non-parsed outcomes with a note; the batch never
/// aborts. Deterministic given (records, store, backend, config).
EvalReport run_eval(const std::vector<EvalRecord>& records, const ExampleStore* store,
                    Backend& backend, const Catalog& catalog, const EvalConfig& config);

/// Recomputes a row from its detail rows; used to audit aggregation.
EvalRow aggregate_row(const std::string& testset_type, const std::vector<EvalDetail>& details);

struct ReportDeltaRow {
  std::string testset_type;
  double d_similarity = 0.0;
  double d_non_parse_pct = 0.0;
  std::optional<double> d_p10, d_p50, d_p90;
};

/// Per-testset differences (b - a). Throws std::invalid_argument when the
/// two reports cover different testset types.
std::vector<ReportDeltaRow> compare_reports(const EvalReport& a, const EvalReport& b);

// Report serialization. JSON is machine-readable (set with_timestamp=false
// for byte-reproducible output); text is an aligned table; CSV has one row
// per testset with columns model, train_data, test_set, test_rag,
// similarity, non_parsed_pct.
std::string report_to_json(const EvalReport& report, bool with_timestamp);
std::string report_to_text(const EvalReport& report);
std::string report_to_csv(const EvalReport& report);
std::string delta_to_text(const std::vector<ReportDeltaRow>& delta);

}  // namespace flowkit
