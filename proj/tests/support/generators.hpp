#pragma once

// Shared test utilities: a synthetic catalog, a random well-formed program
// generator for round-trip and similarity tests, and the independent
// brute-force oracles the implementations are checked against.

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "flowkit/catalog.hpp"
#include "flowkit/dsl.hpp"

namespace flowkit::test {

/// Catalog of `n_ops` operations across a few synthetic connectors, the
/// first `n_triggers` of them trigger-style.
inline Catalog make_synthetic_catalog(std::size_t n_ops = 50, std::size_t n_triggers = 5) {
  Catalog catalog;
  catalog.add({"commonTrigger", "Recurrence", true, std::nullopt});
  for (std::size_t i = 1; i < n_triggers; ++i)
    catalog.add({"shared_events", "OnThing" + std::to_string(i), true, std::nullopt});
  for (std::size_t i = n_triggers; i < n_ops; ++i) {
    const std::string connector = "shared_conn" + std::to_string(i % 7);
    catalog.add({connector, "Op" + std::to_string(i), false, std::nullopt});
  }
  return catalog;
}

class ProgramGenerator {
 public:
  ProgramGenerator(const Catalog& catalog, std::uint64_t seed)
      : catalog_(catalog), rng_(seed) {
    for (const OperationSignature& sig : catalog.signatures())
      (sig.is_trigger ? triggers_ : operations_).push_back(&sig);
  }

  /// Statements uniformly in [1, max_statements], optional conditional
  /// blocks, parameter objects that exercise every value shape.
  DslProgram generate(std::size_t max_statements = 8, bool allow_conditionals = true) {
    DslProgram program;
    target_counter_ = 0;
    program.statements.push_back(make_trigger_statement());
    const std::size_t extra = rng_() % max_statements;  // [0, max-1] additional
    for (std::size_t i = 0; i < extra; ++i) {
      if (allow_conditionals && chance(0.15))
        program.statements.push_back(make_if_block(0));
      else
        program.statements.push_back(make_action_statement());
    }
    return program;
  }

  ActionCall random_action_call() {
    const OperationSignature* sig = operations_[rng_() % operations_.size()];
    ActionCall call;
    call.connector = sig->connector;
    call.operation = sig->operation;
    call.params = random_params(0);
    return call;
  }

 private:
  bool chance(double p) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng_) < p;
  }

  std::string fresh_target() { return "out_" + std::to_string(target_counter_++); }

  Statement make_trigger_statement() {
    const OperationSignature* sig = triggers_[rng_() % triggers_.size()];
    ActionStatement stmt;
    stmt.target = fresh_target();
    stmt.awaited = true;
    stmt.call.connector = sig->connector;
    stmt.call.operation = sig->operation;
    stmt.call.params = random_params(0);
    return stmt;
  }

  Statement make_action_statement() {
    ActionStatement stmt;
    stmt.target = fresh_target();
    stmt.awaited = chance(0.3);
    stmt.call = random_action_call();
    return stmt;
  }

  Statement make_if_block(std::size_t depth) {
    IfBlock block;
    block.condition = random_reference();
    const std::size_t then_count = 1 + rng_() % 2;
    for (std::size_t i = 0; i < then_count; ++i) {
      if (depth < 2 && chance(0.1))
        block.then_branch.push_back(make_if_block(depth + 1));
      else
        block.then_branch.push_back(make_action_statement());
    }
    if (chance(0.5)) {
      const std::size_t else_count = 1 + rng_() % 2;
      for (std::size_t i = 0; i < else_count; ++i)
        block.else_branch.push_back(make_action_statement());
    }
    return block;
  }

  Reference random_reference() {
    Reference ref;
    const std::size_t segments = 1 + rng_() % 3;
    for (std::size_t i = 0; i < segments; ++i)
      ref.path.push_back(i == 0 ? "ref_" + std::to_string(rng_() % 20)
                                : "field" + std::to_string(rng_() % 5));
    return ref;
  }

  ParamObject random_params(std::size_t depth) {
    ParamObject obj;
    const std::size_t n = rng_() % 4;  // empty params are common
    for (std::size_t i = 0; i < n; ++i)
      obj.entries.emplace_back("key" + std::to_string(i), random_value(depth));
    return obj;
  }

  ParamValue random_value(std::size_t depth) {
    const std::size_t pick = rng_() % (depth >= 2 ? 6 : 8);
    switch (pick) {
      case 0: return ParamValue{ParamValue::Storage{nullptr}};
      case 1: return ParamValue{ParamValue::Storage{chance(0.5)}};
      case 2:
        return ParamValue{ParamValue::Storage{
            static_cast<std::int64_t>(rng_() % 20000) - 10000}};
      case 3: {
        static const double kDoubles[] = {0.5, -2.25, 3.1415, 1e9, -0.001, 42.0, 7.5e-3};
        return ParamValue{ParamValue::Storage{kDoubles[rng_() % 7]}};
      }
      case 4: return ParamValue{ParamValue::Storage{random_string()}};
      case 5: return ParamValue{ParamValue::Storage{random_reference()}};
      case 6: {
        ParamArray arr;
        const std::size_t n = rng_() % 3;
        for (std::size_t i = 0; i < n; ++i) arr.push_back(random_value(depth + 1));
        return ParamValue{ParamValue::Storage{std::move(arr)}};
      }
      default: return ParamValue{ParamValue::Storage{random_params(depth + 1)}};
    }
  }

  std::string random_string() {
    // Mixes plain text with every escape class the serializer handles.
    static const std::string kPieces[] = {
        "Seattle", "Eastern Standard Time", "Day",      "a b c", "quote\"inside",
        "back\\slash", "line\nbreak", "tab\tchar", "ctrl\x01byte", "caf\xc3\xa9",
    };
    std::string out = kPieces[rng_() % 10];
    if (chance(0.3)) out += " " + kPieces[rng_() % 10];
    return out;
  }

  const Catalog& catalog_;
  std::mt19937_64 rng_;
  std::vector<const OperationSignature*> triggers_;
  std::vector<const OperationSignature*> operations_;
  std::size_t target_counter_ = 0;
};

/// Brute-force LCS oracle: enumerates every subsequence of `a` (via bitmask)
/// and keeps the longest that is also a subsequence of `b`. Exponential in
/// |a|; callers keep |a| small.
template <typename Seq>
std::size_t lcs_by_enumeration(const Seq& a, const Seq& b) {
  std::size_t best = 0;
  const std::size_t n = a.size();
  for (std::uint64_t mask = 0; mask < (1ull << n); ++mask) {
    const auto bits = static_cast<std::size_t>(__builtin_popcountll(mask));
    if (bits <= best) continue;
    // Check the masked subsequence of a against b, in order.
    std::size_t j = 0;
    bool found = true;
    for (std::size_t i = 0; i < n && found; ++i) {
      if (!(mask & (1ull << i))) continue;
      while (j < b.size() && !(b[j] == a[i])) ++j;
      if (j == b.size())
        found = false;
      else
        ++j;
    }
    if (found) best = bits;
  }
  return best;
}

}  // namespace flowkit::test
