#include "flowkit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace flowkit {

std::size_t lcss(std::span<const std::string> a, std::span<const std::string> b) {
  if (a.empty() || b.empty()) return 0;
  // Standard LCS dynamic program, rolling single row.
  std::vector<std::size_t> row(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diagonal = 0;  // row[j-1] from the previous iteration of i
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t above = row[j];
      row[j] = a[i - 1] == b[j - 1] ? diagonal + 1 : std::max(above, row[j - 1]);
      diagonal = above;
    }
  }
  return row[b.size()];
}

double sequence_similarity(std::span<const std::string> a, std::span<const std::string> b) {
  const std::size_t longest = std::max(a.size(), b.size());
  if (longest == 0) return 0.0;
  return static_cast<double>(lcss(a, b)) / static_cast<double>(longest);
}

double flow_similarity(const Flow& a, const Flow& b) {
  const std::vector<std::string> seq_a = extract_action_sequence(a);
  const std::vector<std::string> seq_b = extract_action_sequence(b);
  return sequence_similarity(seq_a, seq_b);
}

namespace {

template <typename T, typename Pred>
double rate_where(std::span<const T> outcomes, Pred pred) {
  if (outcomes.empty()) throw std::invalid_argument("non_parse_rate: empty outcome list");
  std::size_t count = 0;
  for (const T& outcome : outcomes)
    if (pred(outcome)) ++count;
  return static_cast<double>(count) * 100.0 / static_cast<double>(outcomes.size());
}

bool counts_as_non_parsed(OutcomeKind kind) {
  return kind == OutcomeKind::non_parsed || kind == OutcomeKind::harm_flagged;
}

}  // namespace

double non_parse_rate(std::span<const ParseOutcome> outcomes) {
  return rate_where(outcomes,
                    [](const ParseOutcome& o) { return counts_as_non_parsed(o.kind); });
}

double non_parse_rate(std::span<const OutcomeKind> outcomes) {
  return rate_where(outcomes, [](OutcomeKind k) { return counts_as_non_parsed(k); });
}

double parse_rate(std::span<const ParseOutcome> outcomes) {
  return 100.0 - non_parse_rate(outcomes);
}

double parse_rate(std::span<const OutcomeKind> outcomes) {
  return 100.0 - non_parse_rate(outcomes);
}

double mean_similarity(std::span<const double> scores) {
  if (scores.empty()) throw std::invalid_argument("mean_similarity: empty score list");
  double sum = 0.0;
  for (const double s : scores) sum += s;
  return sum / static_cast<double>(scores.size());
}

double percentile(std::span<const double> samples, double p) {
  if (samples.empty()) throw std::invalid_argument("percentile: empty sample list");
  if (!(p > 0.0 && p < 100.0)) throw std::invalid_argument("percentile: p must be in (0, 100)");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  // p * n / 100 evaluated in this order so integral percentiles stay exact.
  const double k = p * static_cast<double>(sorted.size()) / 100.0;
  auto rank = static_cast<std::size_t>(std::ceil(k));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

}  // namespace flowkit
