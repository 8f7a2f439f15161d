#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "flowkit/dsl.hpp"

// Scoring primitives: longest-common-subsequence flow similarity, the
// non-parse percentage, and nearest-rank latency percentiles.

namespace flowkit {

enum class OutcomeKind { parsed, non_parsed, harm_flagged };

/// Result of putting one model completion through the gate + compiler.
/// Exactly one of `flow` / `error` is set for parsed / non_parsed;
/// harm_flagged carries neither.
struct ParseOutcome {
  OutcomeKind kind = OutcomeKind::non_parsed;
  std::optional<Flow> flow;
  std::optional<ParseError> error;

  static ParseOutcome parsed(Flow f) { return {OutcomeKind::parsed, std::move(f), std::nullopt}; }
  static ParseOutcome non_parsed(ParseError e) {
    return {OutcomeKind::non_parsed, std::nullopt, std::move(e)};
  }
  static ParseOutcome harm_flagged() {
    return {OutcomeKind::harm_flagged, std::nullopt, std::nullopt};
  }
};

/// Length of the longest common subsequence of the two identifier
/// sequences. Elements need not be consecutive in either input.
/// Symmetric, and never larger than the shorter input.
std::size_t lcss(std::span<const std::string> a, std::span<const std::string> b);

/// Similarity of two compiled flows in [0, 1]:
///
///   lcss(actionsA + trigger, actionsB + trigger)
///   --------------------------------------------
///   max(|actionsA + trigger|, |actionsB + trigger|)
///
/// The denominator is always >= 1 because every sequence ends with the
/// trigger. 1.0 iff the two sequences are identical.
double flow_similarity(const Flow& a, const Flow& b);

/// Same ratio applied directly to two pre-extracted sequences.
double sequence_similarity(std::span<const std::string> a, std::span<const std::string> b);

/// 100 x (non-parsed + harm-flagged) / total. A harm flag counts as
/// non-parsed: the flag is unparseable by construction. Throws
/// std::invalid_argument on an empty list.
double non_parse_rate(std::span<const ParseOutcome> outcomes);
double non_parse_rate(std::span<const OutcomeKind> outcomes);

/// Complement of non_parse_rate; the two always sum to exactly 100.
double parse_rate(std::span<const ParseOutcome> outcomes);
double parse_rate(std::span<const OutcomeKind> outcomes);

/// Arithmetic mean of per-record similarity scores. Callers contribute 0
/// for non-parsed and harm-flagged records. Throws on an empty list.
double mean_similarity(std::span<const double> scores);

/// Nearest-rank percentile: sort ascending, take the element at index
/// ceil(p/100 * n) - 1. Requires a non-empty sample list and p in (0, 100).
double percentile(std::span<const double> samples, double p);

}  // namespace flowkit
