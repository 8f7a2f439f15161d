#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "flowkit/backends.hpp"

// Ramp-up load generator. Closed-loop virtual users: each worker issues its
// next request as soon as the previous one completes, so throughput
// saturates at concurrency x 60 / latency requests per minute. Fast mode
// steps to peak concurrency inside a short window; slow mode raises the
// worker count linearly across the ramp.

namespace flowkit {

struct RampPlan {
  enum class Mode { fast, slow };

  Mode mode = Mode::fast;
  int peak_concurrency = 20;
  double ramp_seconds = 2.0;    // fast: the step window; slow: the linear ramp
  double total_minutes = 1.0;   // whole run, ramp included
  std::string prompt = "load probe";
  int max_tokens = 512;
};

std::string_view to_string(RampPlan::Mode mode);

struct RequestOutcome {
  bool success = false;
  double latency_seconds = 0.0;
  BackendErrorClass error = BackendErrorClass::transport;  // meaningful when !success
  double completed_at_seconds = 0.0;  // offset from run start
};

struct LoadReport {
  std::string ramp_mode;
  double run_minutes = 0.0;
  std::size_t total_requests = 0;
  double rpm = 0.0;           // total_requests / run_minutes
  std::size_t failures = 0;
  double failure_pct = 0.0;   // failures x 100 / total_requests
  double fpm = 0.0;           // failures / run_minutes
  // Percentiles over successful-request latencies; absent when no request
  // succeeded (noted instead of fabricated).
  std::optional<double> latency_p10, latency_p50, latency_p90;
  std::string note;
};

struct LoadDiagnostics {
  std::size_t max_in_flight = 0;
  double time_to_peak_seconds = -1.0;  // first instant all workers were in flight
  std::vector<double> planned_start_offsets;
  std::vector<double> actual_start_offsets;
};

struct LoadRunResult {
  LoadReport report;
  LoadDiagnostics diagnostics;
  std::vector<RequestOutcome> outcomes;  // ordered by completion time
};

/// Deterministic aggregation; independent of outcome ordering. The report
/// identities (rpm, failure_pct, fpm) hold exactly as computed from the
/// integer counts before any display rounding.
LoadReport summarize(std::span<const RequestOutcome> outcomes, double run_minutes);

/// Throws std::invalid_argument on an invalid plan (peak < 1, non-positive
/// run time, ramp longer than the run).
LoadRunResult run_load(const RampPlan& plan, Backend& backend);

/// One row in Table-style column order: ramp mode, run time, total
/// requests, RPM, failures, failure %, FPM, latency P10/P50/P90.
/// Percentages and latencies display with one decimal.
std::string load_report_to_text(const LoadReport& report, bool with_header = true);
std::string load_report_to_json(const LoadReport& report);

}  // namespace flowkit
