#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

// Few-shot example store with top-k retrieval by cosine similarity over
// NL-query embeddings.

namespace flowkit {

struct ExampleRecord {
  std::string nl;
  std::string dsl;
  std::optional<std::vector<std::string>> signatures;
  std::optional<std::string> steps;

  bool operator==(const ExampleRecord&) const = default;
};

/// Text-to-unit-vector capability. Implementations must be deterministic
/// per input text and thread-safe for concurrent embed calls.
class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual std::size_t dimension() const = 0;
  virtual std::vector<float> embed(std::string_view text) const = 0;
};

/// Default dependency-free embedder: hashed character-trigram term
/// frequencies, ASCII-lowercased, L2-normalized. Good enough to rank
/// near-duplicate queries first; swap in a service-backed Embedder for
/// real semantic retrieval.
class TrigramEmbedder final : public Embedder {
 public:
  explicit TrigramEmbedder(std::size_t dimension = 256);
  std::size_t dimension() const override { return dimension_; }
  std::vector<float> embed(std::string_view text) const override;

 private:
  std::size_t dimension_;
};

class ExampleStore {
 public:
  struct Hit {
    std::size_t index;
    double similarity;
  };

  /// Exclusion predicate: return true to drop a candidate from the results
  /// (used to keep a test record out of its own few-shots).
  using ExcludeFn = std::function<bool(std::size_t index, const ExampleRecord& record)>;

  /// Embeds every record's NL text. Throws std::invalid_argument on an
  /// empty record list. Single-threaded build; the store is immutable
  /// afterwards and safe for concurrent queries.
  static ExampleStore build(std::vector<ExampleRecord> records,
                            std::shared_ptr<const Embedder> embedder);

  /// Top k records by descending cosine similarity to the query; ties break
  /// by ascending record index. Returns fewer than k when the store (after
  /// exclusions) is smaller.
  std::vector<Hit> top_k(std::string_view query_nl, std::size_t k) const;
  std::vector<Hit> top_k(std::string_view query_nl, std::size_t k,
                         const ExcludeFn& exclude) const;

  const ExampleRecord& record(std::size_t index) const { return records_[index]; }
  std::size_t size() const { return records_.size(); }
  const Embedder& embedder() const { return *embedder_; }

 private:
  ExampleStore() = default;

  std::vector<ExampleRecord> records_;
  std::vector<float> vectors_;  // size() x dimension, row-major
  std::shared_ptr<const Embedder> embedder_;
};

/// Parses the example corpus: JSONL, one record per line with fields `nl`,
/// `dsl`, optional `signatures` (array of strings), optional `steps`
/// (string). Blank lines are skipped. Throws std::runtime_error with the
/// offending line number on malformed input or empty nl/dsl.
std::vector<ExampleRecord> load_example_records(std::string_view jsonl);

}  // namespace flowkit
