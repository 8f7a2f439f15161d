#include "flowkit/catalog.hpp"
#include "flowkit/dsl.hpp"

namespace flowkit {

namespace {

// Document-order walk; if-branches flatten then-before-else.
void collect_actions(const std::vector<Statement>& statements,
                     std::vector<const ActionStatement*>& out) {
  for (const Statement& stmt : statements) {
    if (const auto* action = std::get_if<ActionStatement>(&stmt)) {
      out.push_back(action);
    } else {
      const auto& block = std::get<IfBlock>(stmt);
      collect_actions(block.then_branch, out);
      collect_actions(block.else_branch, out);
    }
  }
}

}  // namespace

bool is_trigger_call(const ActionCall& call, const Catalog& catalog) {
  return call.connector == "commonTrigger" || catalog.is_trigger(call.identifier());
}

CompileResult compile(const DslProgram& program, const Catalog& catalog) {
  if (program.statements.empty())
    return ParseError{ParseError::Kind::structural, 0, "program has no statements"};

  std::vector<const ActionStatement*> ordered;
  collect_actions(program.statements, ordered);

  const auto* first = std::get_if<ActionStatement>(&program.statements.front());
  if (first == nullptr)
    return ParseError{ParseError::Kind::structural, 0,
                      "no trigger-position statement: program starts with a conditional block"};
  if (!is_trigger_call(first->call, catalog))
    return ParseError{ParseError::Kind::structural, 0,
                      "first statement '" + first->call.dotted() + "' is not a trigger"};

  Flow flow;
  flow.trigger = first->call.identifier();
  for (const ActionStatement* stmt : ordered) {
    if (stmt == first) continue;
    if (is_trigger_call(stmt->call, catalog))
      return ParseError{ParseError::Kind::structural, 0,
                        "multiple trigger statements: '" + stmt->call.dotted() + "'"};
    flow.actions.push_back(stmt->call.identifier());
  }
  flow.body = program;
  return flow;
}

std::vector<std::string> extract_action_sequence(const Flow& flow) {
  std::vector<std::string> sequence = flow.actions;
  sequence.push_back(flow.trigger);
  return sequence;
}

}  // namespace flowkit
