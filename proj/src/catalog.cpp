#include "flowkit/catalog.hpp"

#include <json.hpp>

namespace flowkit {

Catalog Catalog::from_json(std::string_view document) {
  nlohmann::json doc = nlohmann::json::parse(document, nullptr, false);
  if (doc.is_discarded()) throw CatalogError("catalog document is not valid JSON");
  if (!doc.is_array()) throw CatalogError("catalog document must be a JSON array");

  Catalog catalog;
  for (const auto& entry : doc) {
    if (!entry.is_object()) throw CatalogError("catalog entry must be a JSON object");
    if (!entry.contains("connector") || !entry["connector"].is_string() ||
        !entry.contains("operation") || !entry["operation"].is_string())
      throw CatalogError("catalog entry requires string fields 'connector' and 'operation'");

    OperationSignature sig;
    sig.connector = entry["connector"].get<std::string>();
    sig.operation = entry["operation"].get<std::string>();
    if (entry.contains("is_trigger")) {
      if (!entry["is_trigger"].is_boolean())
        throw CatalogError("catalog field 'is_trigger' must be a boolean");
      sig.is_trigger = entry["is_trigger"].get<bool>();
    }
    if (entry.contains("description")) {
      if (!entry["description"].is_string())
        throw CatalogError("catalog field 'description' must be a string");
      sig.description = entry["description"].get<std::string>();
    }
    catalog.add(std::move(sig));
  }
  return catalog;
}

void Catalog::add(OperationSignature signature) {
  std::string id = signature.identifier();
  if (by_identifier_.count(id) > 0)
    throw CatalogError("duplicate catalog entry: " + signature.dotted());
  by_identifier_.emplace(std::move(id), signatures_.size());
  signatures_.push_back(std::move(signature));
}

const OperationSignature* Catalog::find(std::string_view identifier) const {
  auto it = by_identifier_.find(std::string(identifier));
  return it == by_identifier_.end() ? nullptr : &signatures_[it->second];
}

bool Catalog::is_trigger(std::string_view identifier) const {
  const OperationSignature* sig = find(identifier);
  return sig != nullptr && sig->is_trigger;
}

namespace {

// Walks trigger-then-actions, calling fn once per first occurrence.
template <typename Fn>
void for_each_unique_identifier(const Flow& flow, Fn&& fn) {
  std::vector<std::string_view> seen;
  auto visit = [&](const std::string& identifier) {
    for (const std::string_view s : seen)
      if (s == identifier) return;
    seen.push_back(identifier);
    fn(identifier);
  };
  visit(flow.trigger);
  for (const std::string& action : flow.actions) visit(action);
}

}  // namespace

SignaturePartition signatures_of(const Flow& flow, const Catalog& catalog) {
  SignaturePartition partition;
  for_each_unique_identifier(flow, [&](const std::string& identifier) {
    if (const OperationSignature* sig = catalog.find(identifier))
      partition.known.push_back(*sig);
    else
      partition.unknown.push_back(identifier);
  });
  return partition;
}

std::vector<std::string> extract_signature_list(const Flow& flow) {
  std::vector<std::string> names;
  // The flow stores `connector_operation`; recover the dotted form from the
  // program body so connectors containing '_' split correctly.
  std::unordered_map<std::string, std::string> dotted_by_identifier;
  std::vector<const Statement*> stack;
  for (const Statement& stmt : flow.body.statements) stack.push_back(&stmt);
  for (std::size_t i = 0; i < stack.size(); ++i) {
    if (const auto* action = std::get_if<ActionStatement>(stack[i])) {
      dotted_by_identifier.emplace(action->call.identifier(), action->call.dotted());
    } else {
      const auto& block = std::get<IfBlock>(*stack[i]);
      for (const Statement& stmt : block.then_branch) stack.push_back(&stmt);
      for (const Statement& stmt : block.else_branch) stack.push_back(&stmt);
    }
  }
  for_each_unique_identifier(flow, [&](const std::string& identifier) {
    auto it = dotted_by_identifier.find(identifier);
    names.push_back(it != dotted_by_identifier.end() ? it->second : identifier);
  });
  return names;
}

}  // namespace flowkit
