#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

// Core workflow-DSL model: AST, parser, canonical serializer, and the
// compiler that reduces a program to its trigger + action identifier form.
//
// A program is a sequence of assignment statements, each invoking one
// connector operation with a JSON parameter object:
//
//   triggerOutputs = await commonTrigger.Recurrence({ "frequency": "Day" });
//   outputs_mail = shared_flowpush.SendEmailNotification({});
//
// Parameter objects are strict JSON extended with bare dotted reference
// paths (e.g. triggerOutputs.body.value) so later steps can consume earlier
// outputs. An optional `if (ref) { ... } else { ... }` block groups
// statements under a condition.

namespace flowkit {

class Catalog;

// ---------------------------------------------------------------------------
// Parameter values

struct ParamValue;

/// Dotted identifier path referring to a prior statement's output,
/// e.g. `triggerOutputs.body.value`. Single-segment paths are allowed but
/// must not collide with the JSON keywords true/false/null.
struct Reference {
  std::vector<std::string> path;  // non-empty

  std::string dotted() const;
  bool operator==(const Reference&) const = default;
};

/// JSON object with insertion-ordered, unique keys.
struct ParamObject {
  std::vector<std::pair<std::string, ParamValue>> entries;

  const ParamValue* find(std::string_view key) const;
};

using ParamArray = std::vector<ParamValue>;

/// One JSON value: scalar, nested object/array, or a Reference.
/// Integral and floating numbers are distinct alternatives; the serializer
/// keeps them distinguishable (floats always carry a '.' or exponent).
struct ParamValue {
  using Storage = std::variant<std::nullptr_t, bool, std::int64_t, double,
                               std::string, Reference, ParamArray, ParamObject>;
  Storage value;
};

bool operator==(const ParamValue& a, const ParamValue& b);
inline bool operator!=(const ParamValue& a, const ParamValue& b) { return !(a == b); }
bool operator==(const ParamObject& a, const ParamObject& b);
inline bool operator!=(const ParamObject& a, const ParamObject& b) { return !(a == b); }

// ---------------------------------------------------------------------------
// Statements

/// One connector-operation invocation, e.g. shared_msnweather.TodaysForecast({...}).
struct ActionCall {
  std::string connector;
  std::string operation;
  ParamObject params;

  /// Canonical matching form: `connector_operation` (keeps any `shared_` prefix).
  std::string identifier() const;
  /// Dotted form used in signature lists and prompts: `connector.operation`.
  std::string dotted() const;

  bool operator==(const ActionCall&) const = default;
};

/// `target = [await] connector.operation({...});`
struct ActionStatement {
  std::string target;
  bool awaited = false;
  ActionCall call;

  bool operator==(const ActionStatement&) const = default;
};

struct IfBlock;
using Statement = std::variant<ActionStatement, IfBlock>;

/// `if (ref) { ... } else { ... }` — else branch may be empty.
struct IfBlock {
  Reference condition;
  std::vector<Statement> then_branch;
  std::vector<Statement> else_branch;
};

bool operator==(const IfBlock& a, const IfBlock& b);
inline bool operator!=(const IfBlock& a, const IfBlock& b) { return !(a == b); }

struct DslProgram {
  std::vector<Statement> statements;

  bool operator==(const DslProgram&) const = default;
};

// ---------------------------------------------------------------------------
// Parsing

struct ParseError {
  enum class Kind { lexical, syntactic, structural };

  Kind kind = Kind::syntactic;
  std::size_t offset = 0;  // byte offset into the source text
  std::string message;
};

std::string_view to_string(ParseError::Kind kind);

using ParseResult = std::variant<DslProgram, ParseError>;

/// Parses arbitrary text. Total: any input yields a program or a ParseError,
/// never a crash. Structural checks (at least one statement, a plain
/// statement in trigger position, unique assignment targets) run after the
/// grammar accepts.
ParseResult parse(std::string_view source);

/// Canonical text form: one statement per line, `;` terminators, JSON with
/// `": "` / `", "` separators and insertion-ordered keys. parse(serialize(p))
/// is structurally equal to p for every well-formed program.
std::string serialize(const DslProgram& program);

// ---------------------------------------------------------------------------
// Compilation

/// Canonical compiled form: the trigger identifier plus the remaining action
/// identifiers in document order (if-branches flattened, then before else).
struct Flow {
  std::string trigger;
  std::vector<std::string> actions;
  DslProgram body;
};

using CompileResult = std::variant<Flow, ParseError>;

/// A statement is the trigger when its connector is `commonTrigger` or the
/// catalog marks its identifier is_trigger. Exactly one statement may
/// qualify and it must be the first.
bool is_trigger_call(const ActionCall& call, const Catalog& catalog);

CompileResult compile(const DslProgram& program, const Catalog& catalog);

/// The sequence scored by the similarity metric: actions in document order
/// with the trigger appended last. Length is always |actions| + 1.
std::vector<std::string> extract_action_sequence(const Flow& flow);

/// Display form of an action identifier: strips one leading `shared_`.
/// Never used for matching.
std::string display_identifier(std::string_view identifier);

// Convenience accessors over ParseResult / CompileResult.
inline bool is_parsed(const ParseResult& r) { return std::holds_alternative<DslProgram>(r); }
inline bool is_compiled(const CompileResult& r) { return std::holds_alternative<Flow>(r); }

}  // namespace flowkit
