#include "flowkit/harms.hpp"

#include <stdexcept>

#include <json.hpp>

namespace flowkit {

std::string_view to_string(HarmCategory category) {
  switch (category) {
    case HarmCategory::hatefairness: return "hatefairness";
    case HarmCategory::jailbreak: return "jailbreak";
    case HarmCategory::selfharm: return "selfharm";
    case HarmCategory::sexual: return "sexual";
    case HarmCategory::violence: return "violence";
  }
  return "unknown";
}

HarmCategory harm_category_from_string(std::string_view name) {
  for (const HarmCategory category : kAllHarmCategories)
    if (name == to_string(category)) return category;
  throw std::invalid_argument("unknown harm category: '" + std::string(name) + "'");
}

GateDecision classify_completion(std::string_view completion, std::string_view sentinel) {
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  std::size_t begin = 0;
  while (begin < completion.size() && is_space(completion[begin])) ++begin;
  std::size_t end = begin;
  while (end < completion.size() && !is_space(completion[end])) ++end;

  if (!sentinel.empty() && completion.substr(begin, end - begin) == sentinel)
    return GateDecision{GateDecision::Kind::harm_flagged, std::string(completion)};
  return GateDecision{GateDecision::Kind::pass_through, std::string(completion)};
}

std::vector<HarmExample> load_harm_testset(std::string_view jsonl) {
  std::vector<HarmExample> examples;
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
      throw std::runtime_error("harms test set line " + std::to_string(line_no) + ": " + why);
    };
    if (doc.is_discarded() || !doc.is_object()) fail("not a JSON object");
    if (!doc.contains("nl") || !doc["nl"].is_string()) fail("missing string field 'nl'");
    if (!doc.contains("category") || !doc["category"].is_string())
      fail("missing string field 'category'");

    HarmExample example;
    example.nl = doc["nl"].get<std::string>();
    try {
      example.category = harm_category_from_string(doc["category"].get<std::string>());
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    }
    examples.push_back(std::move(example));
  }
  return examples;
}

std::array<std::size_t, 5> harm_category_counts(const std::vector<HarmExample>& examples) {
  std::array<std::size_t, 5> counts{};
  for (const HarmExample& example : examples)
    ++counts[static_cast<std::size_t>(example.category)];
  return counts;
}

}  // namespace flowkit
