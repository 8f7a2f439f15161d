#include "flowkit/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <map>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "flowkit/harms.hpp"
#include "flowkit/prompting.hpp"

namespace flowkit {

namespace {

std::string format(const char* fmt, double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, value);
  return buf;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (const char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += "\"";
  return out;
}

}  // namespace

std::vector<EvalRecord> load_eval_records(std::string_view jsonl, const Catalog& catalog) {
  std::vector<EvalRecord> records;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= jsonl.size()) {
    std::size_t end = jsonl.find('\n', start);
    if (end == std::string_view::npos) end = jsonl.size();
    std::string_view line = jsonl.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;

    const auto fail = [line_no](const std::string& why) {
      throw std::runtime_error("test set line " + std::to_string(line_no) + ": " + why);
    };
    nlohmann::json doc = nlohmann::json::parse(line, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) fail("not a JSON object");
    if (!doc.contains("nl") || !doc["nl"].is_string()) fail("missing string field 'nl'");

    EvalRecord record;
    record.nl = doc["nl"].get<std::string>();
    if (record.nl.empty()) fail("'nl' must be non-empty");
    if (doc.contains("dsl")) {
      if (!doc["dsl"].is_string()) fail("'dsl' must be a string");
      record.dsl = doc["dsl"].get<std::string>();
    }
    if (doc.contains("signatures")) {
      if (!doc["signatures"].is_array()) fail("'signatures' must be an array of strings");
      std::vector<std::string> signatures;
      for (const auto& s : doc["signatures"]) {
        if (!s.is_string()) fail("'signatures' must be an array of strings");
        signatures.push_back(s.get<std::string>());
      }
      record.signatures = std::move(signatures);
    }
    if (doc.contains("steps")) {
      if (!doc["steps"].is_string()) fail("'steps' must be a string");
      record.steps = doc["steps"].get<std::string>();
    }
    if (doc.contains("tenant_tag")) {
      if (!doc["tenant_tag"].is_string()) fail("'tenant_tag' must be a string");
      record.tenant_tag = doc["tenant_tag"].get<std::string>();
    }
    if (doc.contains("testset_type")) {
      if (!doc["testset_type"].is_string()) fail("'testset_type' must be a string");
      record.testset_type = doc["testset_type"].get<std::string>();
    }

    if (!record.dsl.empty()) {
      // Reject corrupt ground truth now instead of silently scoring 0 later.
      ParseResult parsed = parse(record.dsl);
      if (!is_parsed(parsed)) {
        const auto& err = std::get<ParseError>(parsed);
        fail("ground truth does not parse: " + err.message);
      }
      CompileResult compiled = compile(std::get<DslProgram>(parsed), catalog);
      if (!is_compiled(compiled)) {
        const auto& err = std::get<ParseError>(compiled);
        fail("ground truth does not compile: " + err.message);
      }
    }
    records.push_back(std::move(record));
  }
  return records;
}

std::vector<EvalRecord> eval_records_from_harms(const std::vector<HarmExample>& examples) {
  std::vector<EvalRecord> records;
  records.reserve(examples.size());
  for (const HarmExample& example : examples) {
    EvalRecord record;
    record.nl = example.nl;
    record.testset_type = std::string(to_string(example.category));
    records.push_back(std::move(record));
  }
  return records;
}

namespace {

EvalDetail evaluate_one(std::size_t index, const EvalRecord& record,
                        const std::optional<Flow>& ground_truth, const ExampleStore* store,
                        Backend& backend, const Catalog& catalog, const EvalConfig& config) {
  EvalDetail detail;
  detail.index = index;
  detail.testset_type = record.testset_type;

  PromptSpec spec;
  spec.nl_query = record.nl;
  spec.signatures = record.signatures;
  spec.steps = record.steps;
  spec.tenant_tag = record.tenant_tag;
  if (config.test_rag_k > 0 && store != nullptr) {
    const auto k = static_cast<std::size_t>(config.test_rag_k);
    ExampleStore::ExcludeFn exclude;
    if (config.exclude_ground_truth) {
      exclude = [&record](std::size_t, const ExampleRecord& candidate) {
        return candidate.nl == record.nl && candidate.dsl == record.dsl;
      };
    }
    for (const auto& hit : store->top_k(record.nl, k, exclude))
      spec.few_shots.push_back(store->record(hit.index));
  }

  GenerationRequest request;
  request.prompt = build_prompt(spec).text;
  request.max_tokens = config.max_tokens;
  request.request_id = "r" + std::to_string(index);

  GenerationResult result;
  try {
    result = backend.generate(request);
  } catch (const BackendError& e) {
    detail.outcome = OutcomeKind::non_parsed;
    detail.note = std::string(to_string(e.error_class)) + ": " + e.what();
    return detail;
  }
  detail.latency_seconds = result.latency_seconds;
  detail.completion_tokens = result.completion_tokens;

  const GateDecision gate = classify_completion(result.completion);
  if (gate.harm_flagged()) {
    detail.outcome = OutcomeKind::harm_flagged;
    detail.note = "harm sentinel";
    return detail;
  }

  ParseResult parsed = parse(result.completion);
  if (!is_parsed(parsed)) {
    const auto& err = std::get<ParseError>(parsed);
    detail.outcome = OutcomeKind::non_parsed;
    detail.note = std::string(to_string(err.kind)) + " error at byte " +
                  std::to_string(err.offset) + ": " + err.message;
    return detail;
  }
  CompileResult compiled = compile(std::get<DslProgram>(parsed), catalog);
  if (!is_compiled(compiled)) {
    const auto& err = std::get<ParseError>(compiled);
    detail.outcome = OutcomeKind::non_parsed;
    detail.note = "structural error: " + err.message;
    return detail;
  }

  const Flow& flow = std::get<Flow>(compiled);
  detail.outcome = OutcomeKind::parsed;
  detail.unknown_identifiers = signatures_of(flow, catalog).unknown;
  if (ground_truth) detail.similarity = flow_similarity(flow, *ground_truth);
  return detail;
}

}  // namespace

EvalRow aggregate_row(const std::string& testset_type, const std::vector<EvalDetail>& details) {
  EvalRow row;
  row.testset_type = testset_type;

  std::vector<double> scores;
  std::vector<OutcomeKind> kinds;
  std::vector<double> latencies;
  double token_sum = 0.0;
  std::size_t token_count = 0;
  for (const EvalDetail& detail : details) {
    if (detail.testset_type != testset_type) continue;
    scores.push_back(detail.similarity);
    kinds.push_back(detail.outcome);
    if (detail.latency_seconds) {
      latencies.push_back(*detail.latency_seconds);
      token_sum += detail.completion_tokens;
      ++token_count;
    }
  }
  row.n_samples = scores.size();
  if (row.n_samples == 0) return row;
  row.mean_similarity = mean_similarity(scores);
  row.non_parse_pct = non_parse_rate(std::span<const OutcomeKind>(kinds));
  if (!latencies.empty()) {
    row.latency_p10 = percentile(latencies, 10.0);
    row.latency_p50 = percentile(latencies, 50.0);
    row.latency_p90 = percentile(latencies, 90.0);
  }
  if (token_count > 0) row.mean_completion_tokens = token_sum / static_cast<double>(token_count);
  return row;
}

EvalReport run_eval(const std::vector<EvalRecord>& records, const ExampleStore* store,
                    Backend& backend, const Catalog& catalog, const EvalConfig& config) {
  if (records.empty()) throw std::invalid_argument("run_eval: no records");
  if (config.test_rag_k != 0 && config.test_rag_k != 3 && config.test_rag_k != 5)
    throw std::invalid_argument("run_eval: test_rag_k must be 0, 3 or 5");
  if (config.test_rag_k > 0 && store == nullptr)
    throw std::invalid_argument("run_eval: test_rag_k > 0 requires an example store");

  // Ground truths compile once up front.
  std::vector<std::optional<Flow>> ground_truths(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].dsl.empty()) continue;
    ParseResult parsed = parse(records[i].dsl);
    if (!is_parsed(parsed))
      throw std::invalid_argument("run_eval: record " + std::to_string(i) +
                                  " ground truth does not parse");
    CompileResult compiled = compile(std::get<DslProgram>(parsed), catalog);
    if (!is_compiled(compiled))
      throw std::invalid_argument("run_eval: record " + std::to_string(i) +
                                  " ground truth does not compile");
    ground_truths[i] = std::move(std::get<Flow>(compiled));
  }

  EvalReport report;
  report.model_label = config.model_label;
  report.train_label = config.train_label;
  report.test_rag_k = config.test_rag_k;
  report.details.resize(records.size());

  const int workers = std::max(1, config.workers);
  if (workers == 1) {
    for (std::size_t i = 0; i < records.size(); ++i)
      report.details[i] =
          evaluate_one(i, records[i], ground_truths[i], store, backend, catalog, config);
  } else {
    // Strided split; every thread writes only its own slots, and per-request
    // seeding keeps results independent of the schedule.
    std::vector<std::thread> pool;
    const auto n_threads = std::min<std::size_t>(static_cast<std::size_t>(workers),
                                                 records.size());
    for (std::size_t t = 0; t < n_threads; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t i = t; i < records.size(); i += n_threads)
          report.details[i] =
              evaluate_one(i, records[i], ground_truths[i], store, backend, catalog, config);
      });
    }
    for (std::thread& thread : pool) thread.join();
  }

  std::vector<std::string> types;
  for (const EvalDetail& detail : report.details)
    if (std::find(types.begin(), types.end(), detail.testset_type) == types.end())
      types.push_back(detail.testset_type);
  std::sort(types.begin(), types.end());
  for (const std::string& type : types) report.rows.push_back(aggregate_row(type, report.details));
  return report;
}

std::vector<ReportDeltaRow> compare_reports(const EvalReport& a, const EvalReport& b) {
  std::map<std::string, const EvalRow*> rows_a, rows_b;
  for (const EvalRow& row : a.rows) rows_a[row.testset_type] = &row;
  for (const EvalRow& row : b.rows) rows_b[row.testset_type] = &row;
  if (rows_a.size() != rows_b.size())
    throw std::invalid_argument("compare_reports: testset types differ");
  std::vector<ReportDeltaRow> delta;
  for (const auto& [type, row_a] : rows_a) {
    auto it = rows_b.find(type);
    if (it == rows_b.end())
      throw std::invalid_argument("compare_reports: testset '" + type + "' missing from b");
    const EvalRow* row_b = it->second;
    ReportDeltaRow d;
    d.testset_type = type;
    d.d_similarity = row_b->mean_similarity - row_a->mean_similarity;
    d.d_non_parse_pct = row_b->non_parse_pct - row_a->non_parse_pct;
    if (row_a->latency_p10 && row_b->latency_p10) d.d_p10 = *row_b->latency_p10 - *row_a->latency_p10;
    if (row_a->latency_p50 && row_b->latency_p50) d.d_p50 = *row_b->latency_p50 - *row_a->latency_p50;
    if (row_a->latency_p90 && row_b->latency_p90) d.d_p90 = *row_b->latency_p90 - *row_a->latency_p90;
    delta.push_back(std::move(d));
  }
  return delta;
}

std::string report_to_json(const EvalReport& report, bool with_timestamp) {
  nlohmann::ordered_json doc;
  doc["model"] = report.model_label;
  doc["train_data"] = report.train_label;
  doc["test_rag"] = report.test_rag_k;
  if (with_timestamp)
    doc["generated_at_unix_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(
                                      std::chrono::system_clock::now().time_since_epoch())
                                      .count();
  doc["rows"] = nlohmann::ordered_json::array();
  for (const EvalRow& row : report.rows) {
    nlohmann::ordered_json r;
    r["testset_type"] = row.testset_type;
    r["n_samples"] = row.n_samples;
    r["similarity"] = row.mean_similarity;
    r["non_parsed_pct"] = row.non_parse_pct;
    if (row.latency_p10) {
      r["latency_p10"] = *row.latency_p10;
      r["latency_p50"] = *row.latency_p50;
      r["latency_p90"] = *row.latency_p90;
    }
    r["mean_completion_tokens"] = row.mean_completion_tokens;
    doc["rows"].push_back(std::move(r));
  }
  doc["details"] = nlohmann::ordered_json::array();
  for (const EvalDetail& detail : report.details) {
    nlohmann::ordered_json d;
    d["index"] = detail.index;
    d["testset_type"] = detail.testset_type;
    d["outcome"] = detail.outcome == OutcomeKind::parsed       ? "parsed"
                   : detail.outcome == OutcomeKind::non_parsed ? "non_parsed"
                                                               : "harm_flagged";
    if (!detail.note.empty()) d["note"] = detail.note;
    d["similarity"] = detail.similarity;
    if (detail.latency_seconds) d["latency_seconds"] = *detail.latency_seconds;
    d["completion_tokens"] = detail.completion_tokens;
    if (!detail.unknown_identifiers.empty()) d["unknown_identifiers"] = detail.unknown_identifiers;
    doc["details"].push_back(std::move(d));
  }
  return doc.dump(2) + "\n";
}

std::string report_to_text(const EvalReport& report) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-24s %8s %12s %14s %8s %8s %8s %12s\n", "Testset type",
                "N", "Similarity", "Non-parsed %", "P10", "P50", "P90", "Mean tokens");
  out << line;
  for (const EvalRow& row : report.rows) {
    const std::string p10 = row.latency_p10 ? format("%.2f", *row.latency_p10) : "-";
    const std::string p50 = row.latency_p50 ? format("%.2f", *row.latency_p50) : "-";
    const std::string p90 = row.latency_p90 ? format("%.2f", *row.latency_p90) : "-";
    std::snprintf(line, sizeof(line), "%-24s %8zu %12.2f %14.1f %8s %8s %8s %12.1f\n",
                  row.testset_type.c_str(), row.n_samples, row.mean_similarity,
                  row.non_parse_pct, p10.c_str(), p50.c_str(), p90.c_str(),
                  row.mean_completion_tokens);
    out << line;
  }
  return out.str();
}

std::string report_to_csv(const EvalReport& report) {
  std::ostringstream out;
  out << "model,train_data,test_set,test_rag,similarity,non_parsed_pct\n";
  for (const EvalRow& row : report.rows) {
    out << csv_escape(report.model_label) << ',' << csv_escape(report.train_label) << ','
        << csv_escape(row.testset_type) << ',' << report.test_rag_k << ','
        << format("%.2f", row.mean_similarity) << ',' << format("%.1f", row.non_parse_pct)
        << '\n';
  }
  return out.str();
}

std::string delta_to_text(const std::vector<ReportDeltaRow>& delta) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-24s %12s %14s %8s %8s %8s\n", "Testset type",
                "dSimilarity", "dNon-parsed %", "dP10", "dP50", "dP90");
  out << line;
  for (const ReportDeltaRow& row : delta) {
    const std::string p10 = row.d_p10 ? format("%+.2f", *row.d_p10) : "-";
    const std::string p50 = row.d_p50 ? format("%+.2f", *row.d_p50) : "-";
    const std::string p90 = row.d_p90 ? format("%+.2f", *row.d_p90) : "-";
    std::snprintf(line, sizeof(line), "%-24s %+12.2f %+14.1f %8s %8s %8s\n",
                  row.testset_type.c_str(), row.d_similarity, row.d_non_parse_pct, p10.c_str(),
                  p50.c_str(), p90.c_str());
    out << line;
  }
  return out.str();
}

}  // namespace flowkit
