#include "flowkit/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace flowkit {

namespace {

std::uint64_t fnv1a(const unsigned char* data, std::size_t n) {
  std::uint64_t hash = 1469598103934665603ull;
  for (std::size_t i = 0; i < n; ++i) {
    hash ^= data[i];
    hash *= 1099511628211ull;
  }
  return hash;
}

char lower_ascii(char c) { return c >= 'A' && c <= 'Z' ? static_cast<char>(c + 32) : c; }

}  // namespace

TrigramEmbedder::TrigramEmbedder(std::size_t dimension) : dimension_(dimension) {
  if (dimension_ == 0) throw std::invalid_argument("TrigramEmbedder: dimension must be positive");
}

std::vector<float> TrigramEmbedder::embed(std::string_view text) const {
  std::vector<float> vec(dimension_, 0.0f);
  std::string lowered(text);
  for (char& c : lowered) c = lower_ascii(c);

  if (!lowered.empty()) {
    const std::size_t gram = std::min<std::size_t>(3, lowered.size());
    const auto* bytes = reinterpret_cast<const unsigned char*>(lowered.data());
    for (std::size_t i = 0; i + gram <= lowered.size(); ++i)
      vec[fnv1a(bytes + i, gram) % dimension_] += 1.0f;
  }

  double norm_sq = 0.0;
  for (const float v : vec) norm_sq += static_cast<double>(v) * static_cast<double>(v);
  if (norm_sq > 0.0) {
    const auto inv = static_cast<float>(1.0 / std::sqrt(norm_sq));
    for (float& v : vec) v *= inv;
  }
  return vec;
}

ExampleStore ExampleStore::build(std::vector<ExampleRecord> records,
                                 std::shared_ptr<const Embedder> embedder) {
  if (records.empty()) throw std::invalid_argument("ExampleStore: no records");
  if (!embedder) throw std::invalid_argument("ExampleStore: null embedder");

  ExampleStore store;
  const std::size_t dim = embedder->dimension();
  store.vectors_.resize(records.size() * dim);
  for (std::size_t i = 0; i < records.size(); ++i) {
    std::vector<float> v = embedder->embed(records[i].nl);
    if (v.size() != dim) throw std::invalid_argument("Embedder returned wrong dimension");
    std::copy(v.begin(), v.end(), store.vectors_.begin() + static_cast<std::ptrdiff_t>(i * dim));
  }
  store.records_ = std::move(records);
  store.embedder_ = std::move(embedder);
  return store;
}

std::vector<ExampleStore::Hit> ExampleStore::top_k(std::string_view query_nl,
                                                   std::size_t k) const {
  return top_k(query_nl, k, ExcludeFn{});
}

std::vector<ExampleStore::Hit> ExampleStore::top_k(std::string_view query_nl, std::size_t k,
                                                   const ExcludeFn& exclude) const {
  if (k == 0) throw std::invalid_argument("top_k: k must be >= 1");
  const std::size_t dim = embedder_->dimension();
  const std::vector<float> query = embedder_->embed(query_nl);

  std::vector<Hit> hits;
  hits.reserve(records_.size());
  for (std::size_t i = 0; i < records_.size(); ++i) {
    if (exclude && exclude(i, records_[i])) continue;
    const float* row = vectors_.data() + i * dim;
    double dot = 0.0;
    for (std::size_t d = 0; d < dim; ++d)
      dot += static_cast<double>(query[d]) * static_cast<double>(row[d]);
    hits.push_back(Hit{i, dot});
  }

  const auto better = [](const Hit& a, const Hit& b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    return a.index < b.index;
  };
  const std::size_t take = std::min(k, hits.size());
  std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(take), hits.end(),
                    better);
  hits.resize(take);
  return hits;
}

std::vector<ExampleRecord> load_example_records(std::string_view jsonl) {
  std::vector<ExampleRecord> records;
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
    const auto fail = [line_no](const std::string& why) {
      throw std::runtime_error("example corpus line " + std::to_string(line_no) + ": " + why);
    };
    if (doc.is_discarded() || !doc.is_object()) fail("not a JSON object");
    if (!doc.contains("nl") || !doc["nl"].is_string()) fail("missing string field 'nl'");
    if (!doc.contains("dsl") || !doc["dsl"].is_string()) fail("missing string field 'dsl'");

    ExampleRecord record;
    record.nl = doc["nl"].get<std::string>();
    record.dsl = doc["dsl"].get<std::string>();
    if (record.nl.empty() || record.dsl.empty()) fail("'nl' and 'dsl' must be non-empty");
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
    records.push_back(std::move(record));
  }
  return records;
}

}  // namespace flowkit
