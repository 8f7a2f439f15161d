#include <chrono>
#include <condition_variable>
#include <mutex>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "flowkit/backends.hpp"

namespace flowkit {

namespace {

// Splits a timeout into the (seconds, microseconds) pair httplib wants.
std::pair<time_t, time_t> split_timeout(double seconds) {
  const auto whole = static_cast<time_t>(seconds);
  const auto micros = static_cast<time_t>((seconds - static_cast<double>(whole)) * 1e6);
  return {whole, micros};
}

}  // namespace

struct HttpBackend::Impl {
  explicit Impl(HttpBackendConfig cfg) : config(std::move(cfg)) {
    if (config.pool_size == 0) config.pool_size = 1;
  }

  std::unique_ptr<httplib::Client> acquire() {
    std::unique_lock<std::mutex> lock(mutex);
    available.wait(lock, [this] { return !idle.empty() || live_clients < config.pool_size; });
    if (!idle.empty()) {
      auto client = std::move(idle.back());
      idle.pop_back();
      return client;
    }
    ++live_clients;
    lock.unlock();
    auto client = std::make_unique<httplib::Client>(config.host, config.port);
    const auto [sec, usec] = split_timeout(config.timeout_seconds);
    client->set_connection_timeout(sec, usec);
    client->set_read_timeout(sec, usec);
    client->set_write_timeout(sec, usec);
    return client;
  }

  void release(std::unique_ptr<httplib::Client> client) {
    {
      std::lock_guard<std::mutex> lock(mutex);
      idle.push_back(std::move(client));
    }
    available.notify_one();
  }

  HttpBackendConfig config;
  std::mutex mutex;
  std::condition_variable available;
  std::vector<std::unique_ptr<httplib::Client>> idle;
  std::size_t live_clients = 0;
};

HttpBackend::HttpBackend(HttpBackendConfig config)
    : impl_(std::make_unique<Impl>(std::move(config))) {}

HttpBackend::~HttpBackend() = default;

HttpBackendConfig HttpBackend::parse_url(std::string_view url, double timeout_seconds) {
  HttpBackendConfig config;
  config.timeout_seconds = timeout_seconds;

  std::string_view rest = url;
  constexpr std::string_view scheme = "http://";
  if (rest.substr(0, scheme.size()) == scheme) rest = rest.substr(scheme.size());

  const std::size_t slash = rest.find('/');
  std::string_view authority = rest.substr(0, slash);
  if (slash != std::string_view::npos) config.path = std::string(rest.substr(slash));

  const std::size_t colon = authority.rfind(':');
  if (colon == std::string_view::npos) {
    config.host = std::string(authority);
  } else {
    config.host = std::string(authority.substr(0, colon));
    config.port = std::stoi(std::string(authority.substr(colon + 1)));
  }
  if (config.host.empty())
    throw std::invalid_argument("http backend: empty host in url '" + std::string(url) + "'");
  return config;
}

GenerationResult HttpBackend::generate(const GenerationRequest& request) {
  nlohmann::json body = {{"prompt", request.prompt}, {"max_tokens", request.max_tokens}};

  auto client = impl_->acquire();
  const auto started = std::chrono::steady_clock::now();
  httplib::Result res = client->Post(impl_->config.path, body.dump(), "application/json");
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  impl_->release(std::move(client));

  if (!res) {
    const auto err = res.error();
    if (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read ||
        err == httplib::Error::Write) {
      // httplib reports an elapsed read/write deadline as a Read/Write error.
      if (elapsed + 0.05 >= impl_->config.timeout_seconds)
        throw BackendError(BackendErrorClass::timeout, "http: request timed out");
    }
    throw BackendError(BackendErrorClass::transport,
                       "http: " + std::string(httplib::to_string(err)));
  }
  if (res->status < 200 || res->status >= 300)
    throw BackendError(BackendErrorClass::bad_status,
                       "http: server returned status " + std::to_string(res->status));

  nlohmann::json doc = nlohmann::json::parse(res->body, nullptr, false);
  if (doc.is_discarded() || !doc.is_object() || !doc.contains("text") || !doc["text"].is_string())
    throw BackendError(BackendErrorClass::transport, "http: malformed completion response body");

  GenerationResult result;
  result.completion = doc["text"].get<std::string>();
  result.prompt_tokens = doc.value("prompt_tokens", count_tokens(request.prompt));
  result.completion_tokens = doc.value("completion_tokens", count_tokens(result.completion));
  result.latency_seconds = elapsed;
  return result;
}

}  // namespace flowkit
