#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "flowkit/dsl.hpp"

// Registry of valid connector operations. Used by the compiler to classify
// trigger statements and by hallucination checks to flag operations a model
// invented. Lookups are exact and case-sensitive.

namespace flowkit {

struct OperationSignature {
  std::string connector;
  std::string operation;
  bool is_trigger = false;
  std::optional<std::string> description;

  std::string identifier() const { return connector + "_" + operation; }
  std::string dotted() const { return connector + "." + operation; }

  bool operator==(const OperationSignature&) const = default;
};

class CatalogError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Catalog {
 public:
  Catalog() = default;

  /// Loads the JSON catalog format: an array of objects with fields
  /// `connector` (string), `operation` (string), `is_trigger` (bool,
  /// default false), `description` (optional string). Throws CatalogError
  /// on malformed input or a duplicate (connector, operation) pair.
  static Catalog from_json(std::string_view document);

  /// Throws CatalogError when (connector, operation) is already present.
  void add(OperationSignature signature);

  const OperationSignature* find(std::string_view identifier) const;
  bool is_trigger(std::string_view identifier) const;

  std::size_t size() const { return signatures_.size(); }
  const std::vector<OperationSignature>& signatures() const { return signatures_; }

  const std::string& version() const { return version_; }
  void set_version(std::string version) { version_ = std::move(version); }

 private:
  std::vector<OperationSignature> signatures_;
  std::unordered_map<std::string, std::size_t> by_identifier_;
  std::string version_;
};

/// Flow identifiers split into catalog-known signatures and unknown
/// (hallucinated) identifiers. Both lists are deduplicated and in document
/// order, trigger first; `unknown` is empty iff the flow is fully grounded.
struct SignaturePartition {
  std::vector<OperationSignature> known;
  std::vector<std::string> unknown;
};

SignaturePartition signatures_of(const Flow& flow, const Catalog& catalog);

/// Dotted operation names of everything the flow calls, deduplicated, in
/// document order with the trigger first. Used for prompt enrichment.
std::vector<std::string> extract_signature_list(const Flow& flow);

}  // namespace flowkit
