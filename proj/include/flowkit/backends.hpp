#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>

#include "flowkit/catalog.hpp"

// Uniform completion-backend contract with three implementations:
//   replay    — canned completions keyed by request id or prompt hash
//   synthetic — catalog-driven flow generator with seeded error/latency
//               injection, for desk-scale experiments
//   http      — JSON-over-HTTP client to an external completion server
//
// Backends must tolerate concurrent generate() calls from many workers.

namespace flowkit {

struct GenerationRequest {
  std::string prompt;       // non-empty
  int max_tokens = 512;     // positive
  std::string request_id;   // stable id; seeds the synthetic RNG stream
};

struct GenerationResult {
  std::string completion;
  int prompt_tokens = 0;
  int completion_tokens = 0;
  double latency_seconds = 0.0;
};

enum class BackendErrorClass { timeout, transport, bad_status, unknown_key };

std::string_view to_string(BackendErrorClass cls);

class BackendError : public std::runtime_error {
 public:
  BackendError(BackendErrorClass cls, const std::string& message)
      : std::runtime_error(message), error_class(cls) {}

  BackendErrorClass error_class;
};

class Backend {
 public:
  virtual ~Backend() = default;
  virtual GenerationResult generate(const GenerationRequest& request) = 0;
  virtual std::string name() const = 0;
};

/// Deterministic whitespace-and-punctuation token count. An approximation:
/// runs of [A-Za-z0-9_] count as one token, every other non-space byte as
/// one token each.
int count_tokens(std::string_view text);

// ---------------------------------------------------------------------------

/// Canned completions. Lookup tries the request id first, then the prompt
/// hash key. Strict mode raises unknown_key on a miss; otherwise a miss
/// yields an empty completion. Reported latency is always zero, so replay
/// runs are byte-reproducible.
class ReplayBackend final : public Backend {
 public:
  explicit ReplayBackend(bool strict = true) : strict_(strict) {}

  /// Replay file format: JSONL of {"key": string, "completion": string}.
  static ReplayBackend from_jsonl(std::string_view jsonl, bool strict = true);

  /// 16-hex-digit FNV-1a of the prompt bytes, usable as a replay key.
  static std::string prompt_key(std::string_view prompt);

  void add(std::string key, std::string completion);
  std::size_t size() const { return completions_.size(); }

  GenerationResult generate(const GenerationRequest& request) override;
  std::string name() const override { return "replay"; }

 private:
  std::unordered_map<std::string, std::string> completions_;
  bool strict_;
};

// ---------------------------------------------------------------------------

/// latency = base + per_token x completion_tokens + U[0, jitter)
struct LatencyModel {
  double base_seconds = 0.0;
  double per_token_seconds = 0.0;
  double jitter_seconds = 0.0;
};

struct SyntheticBackendConfig {
  std::shared_ptr<const Catalog> catalog;
  double p_fail = 0.0;     // probability of an unparseable completion
  double p_halluc = 0.0;   // probability of swapping in an off-catalog operation
  LatencyModel latency;
  std::uint64_t seed = 0;
  int max_actions = 5;     // actions per generated flow, 1..max
  /// Maximum concurrent in-flight requests; 0 means unbounded. Requests
  /// arriving beyond the cap are rejected with a transport error after
  /// base_seconds, which makes failure rate rise with offered load.
  std::size_t capacity = 0;
  /// When true, generate() blocks for the simulated latency so load tests
  /// see real pacing. Evaluation runs leave this off.
  bool pace = false;
};

/// Template-driven flow generator. Deterministic per (seed, request_id):
/// scheduling order never changes results. Generated flows always parse
/// and, with p_halluc = 0, use catalog operations only; hallucinated
/// operations are guaranteed absent from the catalog.
class SyntheticBackend final : public Backend {
 public:
  explicit SyntheticBackend(SyntheticBackendConfig config);

  GenerationResult generate(const GenerationRequest& request) override;
  std::string name() const override { return "synthetic"; }

 private:
  SyntheticBackendConfig config_;
  std::atomic<std::size_t> in_flight_{0};
};

// ---------------------------------------------------------------------------

/// Wire protocol: POST {path} with {"prompt": string, "max_tokens": int},
/// expecting 200 and {"text": string, "prompt_tokens": int,
/// "completion_tokens": int}. Latency is wall-clock. Every request carries
/// the configured timeout; an elapsed timeout is a BackendError(timeout),
/// other connection failures are transport, non-2xx responses bad_status.
struct HttpBackendConfig {
  std::string host;          // e.g. "localhost"
  int port = 80;
  std::string path = "/v1/completions";
  double timeout_seconds = 30.0;
  std::size_t pool_size = 8;  // bound on concurrently used connections
};

class HttpBackend final : public Backend {
 public:
  explicit HttpBackend(HttpBackendConfig config);
  ~HttpBackend() override;

  /// Accepts "host:port" or "http://host:port[/path]".
  static HttpBackendConfig parse_url(std::string_view url, double timeout_seconds = 30.0);

  GenerationResult generate(const GenerationRequest& request) override;
  std::string name() const override { return "http"; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// ---------------------------------------------------------------------------

/// Builds a backend from its textual spec:
///   replay:<jsonl-file>
///   synthetic[:key=value,...]   keys: p_fail, p_halluc, base, per_token,
///                               jitter, capacity, max_actions, pace, seed
///   http:<url>[,timeout=<seconds>]
/// The catalog backs the synthetic generator; `seed` is the default when
/// the spec does not override it.
std::unique_ptr<Backend> make_backend(std::string_view spec,
                                      std::shared_ptr<const Catalog> catalog,
                                      std::uint64_t seed);

}  // namespace flowkit
