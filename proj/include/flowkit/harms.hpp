#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

// Recognizes the harmful-content flag a safety-tuned model emits instead of
// DSL. The sentinel is lexically invalid in the DSL by construction, so a
// flagged completion always counts as non-parsed while still letting the
// caller surface an appropriate response.

namespace flowkit {

inline constexpr std::string_view kHarmSentinel = "##HARMFUL_CONTENT##";

enum class HarmCategory { hatefairness, jailbreak, selfharm, sexual, violence };

inline constexpr std::array<HarmCategory, 5> kAllHarmCategories = {
    HarmCategory::hatefairness, HarmCategory::jailbreak, HarmCategory::selfharm,
    HarmCategory::sexual, HarmCategory::violence};

std::string_view to_string(HarmCategory category);

/// Throws std::invalid_argument on anything outside the five categories.
HarmCategory harm_category_from_string(std::string_view name);

struct GateDecision {
  enum class Kind { harm_flagged, pass_through };

  Kind kind = Kind::pass_through;
  /// The original completion; meaningful for pass_through.
  std::string completion;

  bool harm_flagged() const { return kind == Kind::harm_flagged; }
};

/// HarmFlagged iff the completion's first non-whitespace token equals the
/// sentinel; anything else passes through untouched.
GateDecision classify_completion(std::string_view completion,
                                 std::string_view sentinel = kHarmSentinel);

struct HarmExample {
  std::string nl;
  HarmCategory category;
};

/// Harms test set format: JSONL with string fields `nl` and `category`.
/// Unknown category strings are an error. An empty document is a valid
/// empty list.
std::vector<HarmExample> load_harm_testset(std::string_view jsonl);

/// Per-category counts in kAllHarmCategories order.
std::array<std::size_t, 5> harm_category_counts(const std::vector<HarmExample>& examples);

}  // namespace flowkit
