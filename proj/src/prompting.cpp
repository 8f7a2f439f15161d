#include "flowkit/prompting.hpp"

#include <stdexcept>

namespace flowkit {

namespace templates {
extern const std::string_view kStaticInstructionText;
extern const std::string_view kF2nlHeader;
extern const std::string_view kF2nlSlots;
extern const std::string_view kStepsHeader;
extern const std::string_view kParaphraseHeader;
}  // namespace templates

const std::string_view kStaticInstruction = templates::kStaticInstructionText;

std::string apply_tenant_tag(std::string_view nl, std::string_view tag, TagPosition position) {
  if (tag.empty()) throw std::invalid_argument("tenant tag must be non-empty");
  if (tag.find_first_of("[]\n") != std::string_view::npos)
    throw std::invalid_argument("tenant tag must not contain '[', ']' or newlines");

  const std::string token = "[" + std::string(tag) + "]";
  if (position == TagPosition::prefix) {
    if (nl == token || nl.substr(0, token.size() + 1) == token + " ")
      return std::string(nl);  // already tagged
    return token + " " + std::string(nl);
  }
  if (nl == token ||
      (nl.size() > token.size() && nl.substr(nl.size() - token.size() - 1) == " " + token))
    return std::string(nl);
  return std::string(nl) + " " + token;
}

RenderedPrompt build_prompt(const PromptSpec& spec) {
  if (spec.nl_query.empty()) throw std::invalid_argument("build_prompt: nl_query is empty");

  RenderedPrompt prompt;
  std::string& out = prompt.text;
  const auto begin_section = [&out](std::optional<std::size_t>& offset) {
    if (!out.empty()) out += "\n";
    offset = out.size();
  };

  if (!spec.instruction.empty()) {
    begin_section(prompt.sections.instruction);
    out += "### Instruction\n";
    out += spec.instruction;
    out += "\n";
  }

  if (!spec.few_shots.empty()) {
    begin_section(prompt.sections.few_shots);
    out += "### Examples\n";
    for (std::size_t i = 0; i < spec.few_shots.size(); ++i) {
      if (i > 0) out += "\n";
      out += "NL: " + spec.few_shots[i].nl + "\n";
      out += "DSL: " + spec.few_shots[i].dsl + "\n";
    }
  }

  if (spec.signatures && !spec.signatures->empty()) {
    begin_section(prompt.sections.signatures);
    out += "### Functions\n";
    for (const std::string& name : *spec.signatures) out += name + "\n";
  }

  if (spec.steps && !spec.steps->empty()) {
    begin_section(prompt.sections.steps);
    out += "### Steps\n";
    out += *spec.steps;
    out += "\n";
  }

  std::optional<std::size_t> query_offset;
  begin_section(query_offset);
  prompt.sections.query = *query_offset;
  out += "### Query\n";
  if (spec.tenant_tag)
    out += apply_tenant_tag(spec.nl_query, *spec.tenant_tag, spec.tag_position);
  else
    out += spec.nl_query;
  out += "\n";

  return prompt;
}

std::string render_f2nl_metaprompt(std::span<const std::string> dsls) {
  if (dsls.size() != 5)
    throw std::invalid_argument("render_f2nl_metaprompt: exactly 5 DSL texts required, got " +
                                std::to_string(dsls.size()));
  std::string out(templates::kF2nlHeader);
  for (std::size_t i = 0; i < dsls.size(); ++i) {
    out += "context " + std::to_string(i + 4) + ": ";
    out += dsls[i];
    out += "\n";
  }
  out += templates::kF2nlSlots;
  return out;
}

std::string render_steps_metaprompt(std::string_view nl, std::string_view dsl,
                                    std::span<const std::string> signatures) {
  if (nl.empty() || dsl.empty() || signatures.empty())
    throw std::invalid_argument("render_steps_metaprompt: nl, dsl and signatures are required");

  std::string out(templates::kStepsHeader);
  out += "\"";
  out += nl;
  out += "\"\n\n\"flow\": ";
  out += dsl;
  out += "\n\n\"signatures\":\n\n";
  for (std::size_t i = 0; i < signatures.size(); ++i) {
    out += "\"" + signatures[i] + "\"";
    out += i + 1 < signatures.size() ? ",\n" : "\n";
  }
  out += "\nsteps:";
  return out;
}

std::string render_paraphrase_metaprompt(std::string_view nl, std::string_view steps) {
  if (nl.empty() || steps.empty())
    throw std::invalid_argument("render_paraphrase_metaprompt: nl and steps are required");
  std::string out(templates::kParaphraseHeader);
  out += "Query: ";
  out += nl;
  out += "\n\nExplanation: ";
  out += steps;
  out += "\n";
  return out;
}

}  // namespace flowkit
