#include "flowkit/dsl.hpp"

#include <charconv>
#include <cstdio>

namespace flowkit {

namespace {

void write_escaped_string(std::string& out, std::string_view s) {
  out.push_back('"');
  for (const char ch : s) {
    const unsigned char c = static_cast<unsigned char>(ch);
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (c < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out.push_back(ch);
        }
    }
  }
  out.push_back('"');
}

void write_double(std::string& out, double d) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), d);
  std::string_view text(buf, static_cast<std::size_t>(ptr - buf));
  out += text;
  // Keep floats distinguishable from integers on re-parse.
  if (text.find('.') == std::string_view::npos && text.find('e') == std::string_view::npos &&
      text.find("inf") == std::string_view::npos && text.find("nan") == std::string_view::npos)
    out += ".0";
}

void write_value(std::string& out, const ParamValue& value);

void write_object(std::string& out, const ParamObject& obj) {
  if (obj.entries.empty()) {
    out += "{}";
    return;
  }
  out += "{ ";
  bool first = true;
  for (const auto& [key, value] : obj.entries) {
    if (!first) out += ", ";
    first = false;
    write_escaped_string(out, key);
    out += ": ";
    write_value(out, value);
  }
  out += " }";
}

void write_value(std::string& out, const ParamValue& value) {
  std::visit(
      [&out](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::nullptr_t>) {
          out += "null";
        } else if constexpr (std::is_same_v<T, bool>) {
          out += v ? "true" : "false";
        } else if constexpr (std::is_same_v<T, std::int64_t>) {
          out += std::to_string(v);
        } else if constexpr (std::is_same_v<T, double>) {
          write_double(out, v);
        } else if constexpr (std::is_same_v<T, std::string>) {
          write_escaped_string(out, v);
        } else if constexpr (std::is_same_v<T, Reference>) {
          out += v.dotted();
        } else if constexpr (std::is_same_v<T, ParamArray>) {
          out.push_back('[');
          for (std::size_t i = 0; i < v.size(); ++i) {
            if (i > 0) out += ", ";
            write_value(out, v[i]);
          }
          out.push_back(']');
        } else {
          write_object(out, v);
        }
      },
      value.value);
}

void write_indent(std::string& out, std::size_t depth) {
  out.append(depth * 2, ' ');
}

void write_statement(std::string& out, const Statement& stmt, std::size_t depth);

void write_branch(std::string& out, const std::vector<Statement>& branch, std::size_t depth) {
  for (const Statement& stmt : branch) write_statement(out, stmt, depth);
}

void write_statement(std::string& out, const Statement& stmt, std::size_t depth) {
  if (const auto* action = std::get_if<ActionStatement>(&stmt)) {
    write_indent(out, depth);
    out += action->target;
    out += " = ";
    if (action->awaited) out += "await ";
    out += action->call.connector;
    out.push_back('.');
    out += action->call.operation;
    out.push_back('(');
    write_object(out, action->call.params);
    out += ");\n";
    return;
  }
  const auto& block = std::get<IfBlock>(stmt);
  write_indent(out, depth);
  out += "if (";
  out += block.condition.dotted();
  out += ") {\n";
  write_branch(out, block.then_branch, depth + 1);
  write_indent(out, depth);
  if (!block.else_branch.empty()) {
    out += "} else {\n";
    write_branch(out, block.else_branch, depth + 1);
    write_indent(out, depth);
  }
  out += "}\n";
}

}  // namespace

std::string serialize(const DslProgram& program) {
  std::string out;
  for (const Statement& stmt : program.statements) write_statement(out, stmt, 0);
  if (!out.empty() && out.back() == '\n') out.pop_back();
  return out;
}

}  // namespace flowkit
