#include "flowkit/backends.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "flowkit/dsl.hpp"

namespace flowkit {

std::string_view to_string(BackendErrorClass cls) {
  switch (cls) {
    case BackendErrorClass::timeout: return "timeout";
    case BackendErrorClass::transport: return "transport";
    case BackendErrorClass::bad_status: return "bad_status";
    case BackendErrorClass::unknown_key: return "unknown_key";
  }
  return "unknown";
}

int count_tokens(std::string_view text) {
  int count = 0;
  std::size_t i = 0;
  const auto is_word = [](unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
  };
  const auto is_space = [](unsigned char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v';
  };
  while (i < text.size()) {
    const unsigned char c = static_cast<unsigned char>(text[i]);
    if (is_space(c)) {
      ++i;
    } else if (is_word(c)) {
      ++count;
      while (i < text.size() && is_word(static_cast<unsigned char>(text[i]))) ++i;
    } else {
      ++count;  // each punctuation byte is its own token
      ++i;
    }
  }
  return count;
}

namespace {

std::uint64_t fnv1a64(std::string_view data, std::uint64_t hash = 1469598103934665603ull) {
  for (const char c : data) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 1099511628211ull;
  }
  return hash;
}

}  // namespace

// --------------------------------------------------------------------------
// ReplayBackend

std::string ReplayBackend::prompt_key(std::string_view prompt) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(prompt)));
  return std::string(buf);
}

ReplayBackend ReplayBackend::from_jsonl(std::string_view jsonl, bool strict) {
  ReplayBackend backend(strict);
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= jsonl.size()) {
    std::size_t end = jsonl.find('\n', start);
    if (end == std::string_view::npos) end = jsonl.size();
    std::string_view line = jsonl.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;

    nlohmann::json doc = nlohmann::json::parse(line, nullptr, false);
    if (doc.is_discarded() || !doc.is_object() || !doc.contains("key") ||
        !doc["key"].is_string() || !doc.contains("completion") || !doc["completion"].is_string())
      throw std::runtime_error("replay file line " + std::to_string(line_no) +
                               ": expected {\"key\": string, \"completion\": string}");
    backend.add(doc["key"].get<std::string>(), doc["completion"].get<std::string>());
  }
  return backend;
}

void ReplayBackend::add(std::string key, std::string completion) {
  completions_[std::move(key)] = std::move(completion);
}

GenerationResult ReplayBackend::generate(const GenerationRequest& request) {
  auto it = completions_.find(request.request_id);
  if (it == completions_.end()) it = completions_.find(prompt_key(request.prompt));
  if (it == completions_.end()) {
    if (strict_)
      throw BackendError(BackendErrorClass::unknown_key,
                         "replay: no completion for request '" + request.request_id + "'");
    return GenerationResult{"", count_tokens(request.prompt), 0, 0.0};
  }
  GenerationResult result;
  result.completion = it->second;
  result.prompt_tokens = count_tokens(request.prompt);
  result.completion_tokens = count_tokens(result.completion);
  result.latency_seconds = 0.0;
  return result;
}

// --------------------------------------------------------------------------
// SyntheticBackend

SyntheticBackend::SyntheticBackend(SyntheticBackendConfig config) : config_(std::move(config)) {
  if (config_.p_fail < 0.0 || config_.p_fail > 1.0 || config_.p_halluc < 0.0 ||
      config_.p_halluc > 1.0)
    throw std::invalid_argument("SyntheticBackend: probabilities must be in [0, 1]");
  if (!config_.catalog || config_.catalog->size() == 0)
    throw std::invalid_argument("SyntheticBackend: a non-empty catalog is required");
  if (config_.max_actions < 1)
    throw std::invalid_argument("SyntheticBackend: max_actions must be >= 1");
}

namespace {

class InFlightGuard {
 public:
  explicit InFlightGuard(std::atomic<std::size_t>& counter) : counter_(counter) {
    ++counter_;
  }
  ~InFlightGuard() { --counter_; }
  InFlightGuard(const InFlightGuard&) = delete;
  InFlightGuard& operator=(const InFlightGuard&) = delete;

 private:
  std::atomic<std::size_t>& counter_;
};

void sleep_seconds(double seconds) {
  if (seconds > 0.0)
    std::this_thread::sleep_for(std::chrono::duration<double>(seconds));
}

}  // namespace

GenerationResult SyntheticBackend::generate(const GenerationRequest& request) {
  InFlightGuard guard(in_flight_);

  std::mt19937_64 rng(fnv1a64(request.request_id, config_.seed ^ 0x9e3779b97f4a7c15ull));
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  if (config_.capacity > 0 && in_flight_.load() > config_.capacity) {
    // Over-capacity requests are turned away after the base service time.
    if (config_.pace) sleep_seconds(config_.latency.base_seconds);
    throw BackendError(BackendErrorClass::transport, "synthetic: server at capacity");
  }

  std::string completion;
  if (unit(rng) < config_.p_fail) {
    // Deliberately unlexable output ('%' is outside the token alphabet).
    completion = "%% generation failure " + std::to_string(rng() % 100000) + " %%";
  } else {
    const auto& signatures = config_.catalog->signatures();
    std::vector<std::size_t> triggers;
    std::vector<std::size_t> operations;
    for (std::size_t i = 0; i < signatures.size(); ++i)
      (signatures[i].is_trigger ? triggers : operations).push_back(i);

    DslProgram program;
    ActionStatement trigger;
    trigger.target = "triggerOutputs";
    trigger.awaited = true;
    if (!triggers.empty()) {
      const auto& sig = signatures[triggers[rng() % triggers.size()]];
      trigger.call.connector = sig.connector;
      trigger.call.operation = sig.operation;
    } else {
      trigger.call.connector = "commonTrigger";
      trigger.call.operation = "Recurrence";
      trigger.call.params.entries.emplace_back(
          "frequency", ParamValue{ParamValue::Storage{std::string("Day")}});
    }
    program.statements.emplace_back(std::move(trigger));

    const std::size_t n_actions =
        operations.empty() ? 0 : 1 + rng() % static_cast<std::size_t>(config_.max_actions);
    const bool hallucinate = !operations.empty() && unit(rng) < config_.p_halluc;
    const std::size_t halluc_at = n_actions > 0 ? rng() % n_actions : 0;
    for (std::size_t i = 0; i < n_actions; ++i) {
      const auto& sig = signatures[operations[rng() % operations.size()]];
      ActionStatement stmt;
      stmt.target = "outputs_" + std::to_string(i);
      stmt.call.connector = sig.connector;
      stmt.call.operation = sig.operation;
      if (hallucinate && i == halluc_at) {
        // Invent an operation and make sure it really is off-catalog.
        do {
          stmt.call.operation = sig.operation + "X" + std::to_string(rng() % 10000);
        } while (config_.catalog->find(stmt.call.identifier()) != nullptr);
      }
      if (rng() % 2 == 0)
        stmt.call.params.entries.emplace_back(
            "value", ParamValue{ParamValue::Storage{static_cast<std::int64_t>(rng() % 100)}});
      program.statements.emplace_back(std::move(stmt));
    }
    completion = serialize(program);
  }

  GenerationResult result;
  result.completion = std::move(completion);
  result.prompt_tokens = count_tokens(request.prompt);
  result.completion_tokens = count_tokens(result.completion);
  result.latency_seconds = config_.latency.base_seconds +
                           config_.latency.per_token_seconds * result.completion_tokens +
                           config_.latency.jitter_seconds * unit(rng);
  if (config_.pace) sleep_seconds(result.latency_seconds);
  return result;
}

// --------------------------------------------------------------------------
// Backend spec parsing

namespace {

std::string read_file_or_throw(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::vector<std::pair<std::string, std::string>> parse_kv_list(std::string_view text) {
  std::vector<std::pair<std::string, std::string>> pairs;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find(',', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view item = text.substr(start, end - start);
    start = end + 1;
    if (item.empty()) continue;
    const std::size_t eq = item.find('=');
    if (eq == std::string_view::npos)
      throw std::invalid_argument("backend spec: expected key=value, got '" + std::string(item) +
                                  "'");
    pairs.emplace_back(std::string(item.substr(0, eq)), std::string(item.substr(eq + 1)));
  }
  return pairs;
}

}  // namespace

std::unique_ptr<Backend> make_backend(std::string_view spec,
                                      std::shared_ptr<const Catalog> catalog,
                                      std::uint64_t seed) {
  const std::size_t colon = spec.find(':');
  const std::string_view kind = spec.substr(0, colon);
  const std::string_view rest = colon == std::string_view::npos ? "" : spec.substr(colon + 1);

  if (kind == "replay") {
    if (rest.empty())
      throw std::invalid_argument("backend spec: replay requires a file, e.g. replay:run.jsonl");
    return std::make_unique<ReplayBackend>(
        ReplayBackend::from_jsonl(read_file_or_throw(std::string(rest))));
  }

  if (kind == "synthetic") {
    SyntheticBackendConfig config;
    config.catalog = std::move(catalog);
    config.seed = seed;
    for (const auto& [key, value] : parse_kv_list(rest)) {
      if (key == "p_fail") config.p_fail = std::stod(value);
      else if (key == "p_halluc") config.p_halluc = std::stod(value);
      else if (key == "base") config.latency.base_seconds = std::stod(value);
      else if (key == "per_token") config.latency.per_token_seconds = std::stod(value);
      else if (key == "jitter") config.latency.jitter_seconds = std::stod(value);
      else if (key == "capacity") config.capacity = std::stoul(value);
      else if (key == "max_actions") config.max_actions = std::stoi(value);
      else if (key == "pace") config.pace = value == "1" || value == "true";
      else if (key == "seed") config.seed = std::stoull(value);
      else throw std::invalid_argument("backend spec: unknown synthetic key '" + key + "'");
    }
    return std::make_unique<SyntheticBackend>(std::move(config));
  }

  if (kind == "http") {
    if (rest.empty())
      throw std::invalid_argument("backend spec: http requires a url, e.g. http:localhost:8080");
    double timeout = 30.0;
    std::string_view url = rest;
    const std::size_t comma = rest.find(",timeout=");
    if (comma != std::string_view::npos) {
      timeout = std::stod(std::string(rest.substr(comma + 9)));
      url = rest.substr(0, comma);
    }
    return std::make_unique<HttpBackend>(HttpBackend::parse_url(url, timeout));
  }

  throw std::invalid_argument("backend spec: unknown backend kind '" + std::string(kind) + "'");
}

}  // namespace flowkit
