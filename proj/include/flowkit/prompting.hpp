#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "flowkit/retrieval.hpp"

// Prompt assembly: the enriched inference prompt (instruction, few-shot
// examples, function signatures, steps, query with optional tenant tag) and
// the three data-generation metaprompts (flow-to-NL paraphrasing, step
// summarization, query paraphrasing).

namespace flowkit {

enum class TagPosition { prefix, suffix };

/// Static instruction prepended to every training/inference record by
/// default.
extern const std::string_view kStaticInstruction;

struct PromptSpec {
  std::string instruction{kStaticInstruction};
  std::string nl_query;
  std::optional<std::vector<std::string>> signatures;  // dotted operation names
  std::optional<std::string> steps;
  std::vector<ExampleRecord> few_shots;  // 0, 3, or 5 in standard configurations
  std::optional<std::string> tenant_tag;
  TagPosition tag_position = TagPosition::prefix;
};

/// Byte offsets of each rendered section start; absent sections are
/// omitted entirely (no empty markers).
struct SectionOffsets {
  std::optional<std::size_t> instruction;
  std::optional<std::size_t> few_shots;
  std::optional<std::size_t> signatures;
  std::optional<std::size_t> steps;
  std::size_t query = 0;
};

struct RenderedPrompt {
  std::string text;
  SectionOffsets sections;
};

/// Deterministic render with sections in the fixed order instruction,
/// few-shots, signatures, steps, query. Throws std::invalid_argument when
/// nl_query is empty.
RenderedPrompt build_prompt(const PromptSpec& spec);

/// prefix -> "[tag] nl", suffix -> "nl [tag]". Idempotent per position:
/// re-applying the same tag at the same position is a no-op. Throws
/// std::invalid_argument when the tag is empty or contains '[', ']' or a
/// newline.
std::string apply_tenant_tag(std::string_view nl, std::string_view tag, TagPosition position);

/// Flow-to-NL metaprompt: three worked (context, 3 completions) examples
/// plus exactly five inference contexts and fifteen empty completion slots.
/// Throws std::invalid_argument unless exactly 5 DSL texts are given.
std::string render_f2nl_metaprompt(std::span<const std::string> dsls);

/// Step-summarization metaprompt: three worked examples, then the task slot
/// filled with the given NL, flow and signature list; ends with the open
/// "steps:" slot. All inputs must be non-empty.
std::string render_steps_metaprompt(std::string_view nl, std::string_view dsl,
                                    std::span<const std::string> signatures);

/// Query-paraphrase metaprompt with the Query and Explanation slots filled.
/// Both inputs must be non-empty.
std::string render_paraphrase_metaprompt(std::string_view nl, std::string_view steps);

}  // namespace flowkit
