#include "flowkit/loadtest.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "flowkit/metrics.hpp"

namespace flowkit {

std::string_view to_string(RampPlan::Mode mode) {
  return mode == RampPlan::Mode::fast ? "fast" : "slow";
}

LoadReport summarize(std::span<const RequestOutcome> outcomes, double run_minutes) {
  if (run_minutes <= 0.0) throw std::invalid_argument("summarize: run_minutes must be positive");

  LoadReport report;
  report.run_minutes = run_minutes;
  report.total_requests = outcomes.size();
  std::vector<double> success_latencies;
  for (const RequestOutcome& outcome : outcomes) {
    if (outcome.success)
      success_latencies.push_back(outcome.latency_seconds);
    else
      ++report.failures;
  }
  report.rpm = static_cast<double>(report.total_requests) / run_minutes;
  report.fpm = static_cast<double>(report.failures) / run_minutes;
  report.failure_pct = report.total_requests == 0
                           ? 0.0
                           : static_cast<double>(report.failures) * 100.0 /
                                 static_cast<double>(report.total_requests);
  if (!success_latencies.empty()) {
    report.latency_p10 = percentile(success_latencies, 10.0);
    report.latency_p50 = percentile(success_latencies, 50.0);
    report.latency_p90 = percentile(success_latencies, 90.0);
  } else {
    report.note = report.total_requests == 0 ? "no requests issued"
                                             : "no successful requests; latency omitted";
  }
  return report;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

LoadRunResult run_load(const RampPlan& plan, Backend& backend) {
  if (plan.peak_concurrency < 1)
    throw std::invalid_argument("run_load: peak concurrency must be >= 1");
  if (plan.total_minutes <= 0.0)
    throw std::invalid_argument("run_load: total run time must be positive");
  if (plan.ramp_seconds < 0.0 || plan.ramp_seconds > plan.total_minutes * 60.0)
    throw std::invalid_argument("run_load: ramp must fit inside the run time");

  const auto peak = static_cast<std::size_t>(plan.peak_concurrency);
  LoadRunResult result;
  result.diagnostics.planned_start_offsets.resize(peak);
  result.diagnostics.actual_start_offsets.resize(peak, -1.0);
  for (std::size_t i = 0; i < peak; ++i) {
    // Fast mode spreads starts across the step window; slow mode schedules
    // worker i at the moment the linear ramp calls for i+1 active workers.
    result.diagnostics.planned_start_offsets[i] =
        plan.mode == RampPlan::Mode::fast
            ? plan.ramp_seconds * static_cast<double>(i) / static_cast<double>(peak)
            : plan.ramp_seconds * static_cast<double>(i + 1) / static_cast<double>(peak);
  }

  std::mutex collect_mutex;
  std::vector<RequestOutcome> outcomes;
  std::atomic<std::size_t> in_flight{0};
  std::atomic<std::size_t> max_in_flight{0};
  std::atomic<double> time_to_peak{-1.0};

  const Clock::time_point start = Clock::now();
  const double deadline_seconds = plan.total_minutes * 60.0;

  auto worker = [&](std::size_t worker_index) {
    const double start_at = result.diagnostics.planned_start_offsets[worker_index];
    std::this_thread::sleep_until(start + std::chrono::duration<double>(start_at));
    result.diagnostics.actual_start_offsets[worker_index] = seconds_since(start);

    std::size_t sequence = 0;
    while (seconds_since(start) < deadline_seconds) {
      GenerationRequest request;
      request.prompt = plan.prompt;
      request.max_tokens = plan.max_tokens;
      request.request_id = "w" + std::to_string(worker_index) + "-" + std::to_string(++sequence);

      const std::size_t now_in_flight = in_flight.fetch_add(1) + 1;
      std::size_t observed = max_in_flight.load();
      while (now_in_flight > observed &&
             !max_in_flight.compare_exchange_weak(observed, now_in_flight)) {
      }
      if (now_in_flight >= peak && time_to_peak.load() < 0.0) {
        double expected = -1.0;
        time_to_peak.compare_exchange_strong(expected, seconds_since(start));
      }

      RequestOutcome outcome;
      const Clock::time_point issued = Clock::now();
      try {
        GenerationResult generated = backend.generate(request);
        outcome.success = true;
        outcome.latency_seconds = generated.latency_seconds;
      } catch (const BackendError& e) {
        outcome.success = false;
        outcome.latency_seconds = std::chrono::duration<double>(Clock::now() - issued).count();
        outcome.error = e.error_class;
      }
      in_flight.fetch_sub(1);
      outcome.completed_at_seconds = seconds_since(start);
      {
        std::lock_guard<std::mutex> lock(collect_mutex);
        outcomes.push_back(outcome);
      }
    }
  };

  std::vector<std::thread> workers;
  workers.reserve(peak);
  for (std::size_t i = 0; i < peak; ++i) workers.emplace_back(worker, i);
  for (std::thread& thread : workers) thread.join();

  std::sort(outcomes.begin(), outcomes.end(),
            [](const RequestOutcome& a, const RequestOutcome& b) {
              return a.completed_at_seconds < b.completed_at_seconds;
            });
  result.outcomes = std::move(outcomes);
  result.diagnostics.max_in_flight = max_in_flight.load();
  result.diagnostics.time_to_peak_seconds = time_to_peak.load();
  result.report = summarize(result.outcomes, plan.total_minutes);
  result.report.ramp_mode = std::string(to_string(plan.mode));
  return result;
}

std::string load_report_to_text(const LoadReport& report, bool with_header) {
  std::ostringstream out;
  char line[320];
  if (with_header) {
    std::snprintf(line, sizeof(line), "%-10s %9s %15s %8s %9s %11s %7s %12s %12s %12s\n",
                  "Ramp-up", "Run time", "Total Requests", "RPM", "Failures", "Failures %",
                  "FPM", "Latency P10", "Latency P50", "Latency P90");
    out << line;
  }
  const auto fmt_latency = [](const std::optional<double>& v) {
    char buf[32];
    if (!v) return std::string("-");
    std::snprintf(buf, sizeof(buf), "%.1f", *v);
    return std::string(buf);
  };
  std::snprintf(line, sizeof(line), "%-10s %9.4g %15zu %8.1f %9zu %11.1f %7.1f %12s %12s %12s\n",
                report.ramp_mode.empty() ? "-" : report.ramp_mode.c_str(), report.run_minutes,
                report.total_requests, report.rpm, report.failures, report.failure_pct,
                report.fpm, fmt_latency(report.latency_p10).c_str(),
                fmt_latency(report.latency_p50).c_str(), fmt_latency(report.latency_p90).c_str());
  out << line;
  if (!report.note.empty()) out << "note: " << report.note << "\n";
  return out.str();
}

std::string load_report_to_json(const LoadReport& report) {
  nlohmann::ordered_json doc;
  doc["ramp_mode"] = report.ramp_mode;
  doc["run_minutes"] = report.run_minutes;
  doc["total_requests"] = report.total_requests;
  doc["rpm"] = report.rpm;
  doc["failures"] = report.failures;
  doc["failure_pct"] = report.failure_pct;
  doc["fpm"] = report.fpm;
  if (report.latency_p10) {
    doc["latency_p10"] = *report.latency_p10;
    doc["latency_p50"] = *report.latency_p50;
    doc["latency_p90"] = *report.latency_p90;
  }
  if (!report.note.empty()) doc["note"] = report.note;
  return doc.dump(2) + "\n";
}

}  // namespace flowkit
