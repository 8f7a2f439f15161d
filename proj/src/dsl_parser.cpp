#include "flowkit/dsl.hpp"

#include <cmath>
#include <charconv>
#include <unordered_map>

namespace flowkit {

namespace {

constexpr std::size_t kMaxNestingDepth = 192;

enum class TokenType {
  ident,
  string,
  integer,
  floating,
  assign,       // =
  dot,          // .
  comma,        // ,
  colon,        // :
  semicolon,    // ;
  lparen,
  rparen,
  lbrace,
  rbrace,
  lbracket,
  rbracket,
  end,
};

struct Token {
  TokenType type = TokenType::end;
  std::size_t offset = 0;
  std::string text;      // ident name or decoded string content
  std::int64_t int_value = 0;
  double float_value = 0.0;
};

bool is_ident_start(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}

bool is_ident_char(unsigned char c) {
  return is_ident_start(c) || (c >= '0' && c <= '9');
}

bool is_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\n';
}

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

class Lexer {
 public:
  explicit Lexer(std::string_view source) : src_(source) {}

  // Returns all tokens or a lexical error.
  std::variant<std::vector<Token>, ParseError> run() {
    std::vector<Token> tokens;
    while (true) {
      skip_whitespace();
      if (pos_ >= src_.size()) {
        tokens.push_back(Token{TokenType::end, pos_, {}, 0, 0.0});
        return tokens;
      }
      auto tok = next_token();
      if (error_) return *error_;
      tokens.push_back(std::move(tok));
    }
  }

 private:
  void skip_whitespace() {
    while (pos_ < src_.size() && is_space(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  Token next_token() {
    const std::size_t start = pos_;
    const unsigned char c = static_cast<unsigned char>(src_[pos_]);

    switch (c) {
      case '=': ++pos_; return Token{TokenType::assign, start, {}, 0, 0.0};
      case '.': ++pos_; return Token{TokenType::dot, start, {}, 0, 0.0};
      case ',': ++pos_; return Token{TokenType::comma, start, {}, 0, 0.0};
      case ':': ++pos_; return Token{TokenType::colon, start, {}, 0, 0.0};
      case ';': ++pos_; return Token{TokenType::semicolon, start, {}, 0, 0.0};
      case '(': ++pos_; return Token{TokenType::lparen, start, {}, 0, 0.0};
      case ')': ++pos_; return Token{TokenType::rparen, start, {}, 0, 0.0};
      case '{': ++pos_; return Token{TokenType::lbrace, start, {}, 0, 0.0};
      case '}': ++pos_; return Token{TokenType::rbrace, start, {}, 0, 0.0};
      case '[': ++pos_; return Token{TokenType::lbracket, start, {}, 0, 0.0};
      case ']': ++pos_; return Token{TokenType::rbracket, start, {}, 0, 0.0};
      case '"': return lex_string();
      default: break;
    }

    if (is_ident_start(c)) return lex_ident();
    if ((c >= '0' && c <= '9') || c == '-') return lex_number();

    return fail(start, "unexpected character");
  }

  Token lex_ident() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && is_ident_char(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    return Token{TokenType::ident, start, std::string(src_.substr(start, pos_ - start)), 0, 0.0};
  }

  Token lex_number() {
    const std::size_t start = pos_;
    if (src_[pos_] == '-') ++pos_;
    if (pos_ >= src_.size() || !std::isdigit(static_cast<unsigned char>(src_[pos_])))
      return fail(start, "malformed number");
    if (src_[pos_] == '0') {
      ++pos_;
    } else {
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }
    bool is_float = false;
    if (pos_ < src_.size() && src_[pos_] == '.') {
      is_float = true;
      ++pos_;
      if (pos_ >= src_.size() || !std::isdigit(static_cast<unsigned char>(src_[pos_])))
        return fail(start, "malformed number: expected digit after '.'");
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      is_float = true;
      ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (pos_ >= src_.size() || !std::isdigit(static_cast<unsigned char>(src_[pos_])))
        return fail(start, "malformed number: empty exponent");
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    const std::string_view lexeme = src_.substr(start, pos_ - start);
    Token tok{is_float ? TokenType::floating : TokenType::integer, start, {}, 0, 0.0};
    if (!is_float) {
      auto [ptr, ec] = std::from_chars(lexeme.data(), lexeme.data() + lexeme.size(), tok.int_value);
      if (ec == std::errc::result_out_of_range) {
        // Too large for int64; keep it as a float.
        tok.type = TokenType::floating;
      } else if (ec != std::errc()) {
        return fail(start, "malformed number");
      }
    }
    if (tok.type == TokenType::floating) {
      auto [ptr, ec] =
          std::from_chars(lexeme.data(), lexeme.data() + lexeme.size(), tok.float_value);
      if (ec != std::errc() || !std::isfinite(tok.float_value))
        return fail(start, "number out of range");
    }
    return tok;
  }

  Token lex_string() {
    const std::size_t start = pos_;
    ++pos_;  // opening quote
    std::string decoded;
    while (true) {
      if (pos_ >= src_.size()) return fail(start, "unterminated string");
      const unsigned char c = static_cast<unsigned char>(src_[pos_]);
      if (c == '"') {
        ++pos_;
        return Token{TokenType::string, start, std::move(decoded), 0, 0.0};
      }
      if (c < 0x20) return fail(pos_, "unescaped control character in string");
      if (c != '\\') {
        decoded.push_back(static_cast<char>(c));
        ++pos_;
        continue;
      }
      // Escape sequence.
      ++pos_;
      if (pos_ >= src_.size()) return fail(start, "unterminated string");
      const char esc = src_[pos_];
      ++pos_;
      switch (esc) {
        case '"': decoded.push_back('"'); break;
        case '\\': decoded.push_back('\\'); break;
        case '/': decoded.push_back('/'); break;
        case 'b': decoded.push_back('\b'); break;
        case 'f': decoded.push_back('\f'); break;
        case 'n': decoded.push_back('\n'); break;
        case 'r': decoded.push_back('\r'); break;
        case 't': decoded.push_back('\t'); break;
        case 'u': {
          auto cp = lex_hex4();
          if (!cp) return fail(pos_, "invalid \\u escape");
          std::uint32_t code = *cp;
          if (code >= 0xD800 && code <= 0xDBFF) {
            // High surrogate: a low surrogate must follow.
            if (pos_ + 1 >= src_.size() || src_[pos_] != '\\' || src_[pos_ + 1] != 'u')
              return fail(pos_, "unpaired surrogate in \\u escape");
            pos_ += 2;
            auto low = lex_hex4();
            if (!low || *low < 0xDC00 || *low > 0xDFFF)
              return fail(pos_, "unpaired surrogate in \\u escape");
            code = 0x10000 + ((code - 0xD800) << 10) + (*low - 0xDC00);
          } else if (code >= 0xDC00 && code <= 0xDFFF) {
            return fail(pos_, "unpaired surrogate in \\u escape");
          }
          append_utf8(decoded, code);
          break;
        }
        default:
          return fail(pos_ - 1, "invalid escape sequence");
      }
    }
  }

  std::optional<std::uint32_t> lex_hex4() {
    if (pos_ + 4 > src_.size()) return std::nullopt;
    std::uint32_t value = 0;
    for (int i = 0; i < 4; ++i) {
      const char c = src_[pos_ + i];
      value <<= 4;
      if (c >= '0' && c <= '9') value |= static_cast<std::uint32_t>(c - '0');
      else if (c >= 'a' && c <= 'f') value |= static_cast<std::uint32_t>(c - 'a' + 10);
      else if (c >= 'A' && c <= 'F') value |= static_cast<std::uint32_t>(c - 'A' + 10);
      else return std::nullopt;
    }
    pos_ += 4;
    return value;
  }

  Token fail(std::size_t offset, std::string message) {
    error_ = ParseError{ParseError::Kind::lexical, offset, std::move(message)};
    return Token{};
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::optional<ParseError> error_;
};

// Recursive-descent parser over the token stream.
class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  ParseResult run() {
    DslProgram program;
    if (peek().type == TokenType::end)
      return ParseError{ParseError::Kind::structural, 0, "program has no statements"};

    bool first = true;
    while (peek().type != TokenType::end) {
      if (first && is_if_keyword()) {
        return ParseError{ParseError::Kind::structural, peek().offset,
                          "no trigger-position statement: program starts with a conditional block"};
      }
      auto stmt = parse_construct(0);
      if (error_) return *error_;
      program.statements.push_back(std::move(*stmt));
      first = false;
    }
    return program;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    const std::size_t i = pos_ + ahead;
    return i < tokens_.size() ? tokens_[i] : tokens_.back();
  }

  const Token& advance() { return tokens_[pos_ < tokens_.size() - 1 ? pos_++ : pos_]; }

  bool is_if_keyword() const {
    return peek().type == TokenType::ident && peek().text == "if" &&
           peek(1).type == TokenType::lparen;
  }

  std::optional<Statement> parse_construct(std::size_t depth) {
    if (depth > kMaxNestingDepth) {
      fail(ParseError::Kind::syntactic, peek().offset, "nesting too deep");
      return std::nullopt;
    }
    if (is_if_keyword()) return parse_if_block(depth);
    return parse_action_statement();
  }

  std::optional<Statement> parse_action_statement() {
    if (peek().type != TokenType::ident) {
      fail(ParseError::Kind::syntactic, peek().offset, "expected assignment target identifier");
      return std::nullopt;
    }
    ActionStatement stmt;
    const Token& target_tok = advance();
    stmt.target = target_tok.text;
    if (!targets_.emplace(stmt.target, target_tok.offset).second) {
      fail(ParseError::Kind::structural, target_tok.offset,
           "duplicate assignment target '" + stmt.target + "'");
      return std::nullopt;
    }

    if (!expect(TokenType::assign, "expected '='")) return std::nullopt;

    // `await` is a contextual keyword: it only counts when another identifier
    // (the connector) follows.
    if (peek().type == TokenType::ident && peek().text == "await" &&
        peek(1).type == TokenType::ident) {
      stmt.awaited = true;
      advance();
    }

    if (peek().type != TokenType::ident) {
      fail(ParseError::Kind::syntactic, peek().offset, "expected connector identifier");
      return std::nullopt;
    }
    stmt.call.connector = advance().text;
    if (!expect(TokenType::dot, "expected '.' between connector and operation"))
      return std::nullopt;
    if (peek().type != TokenType::ident) {
      fail(ParseError::Kind::syntactic, peek().offset, "expected operation identifier");
      return std::nullopt;
    }
    stmt.call.operation = advance().text;

    if (!expect(TokenType::lparen, "expected '('")) return std::nullopt;
    auto params = parse_object(0);
    if (error_) return std::nullopt;
    stmt.call.params = std::move(*params);
    if (!expect(TokenType::rparen, "expected ')'")) return std::nullopt;
    if (!expect(TokenType::semicolon, "expected ';'")) return std::nullopt;
    return Statement{std::move(stmt)};
  }

  std::optional<Statement> parse_if_block(std::size_t depth) {
    advance();  // if
    if (!expect(TokenType::lparen, "expected '(' after if")) return std::nullopt;
    auto cond = parse_reference();
    if (error_) return std::nullopt;
    IfBlock block;
    block.condition = std::move(*cond);
    if (!expect(TokenType::rparen, "expected ')' after condition")) return std::nullopt;
    if (!parse_branch(block.then_branch, depth)) return std::nullopt;
    if (peek().type == TokenType::ident && peek().text == "else" &&
        peek(1).type == TokenType::lbrace) {
      advance();
      if (!parse_branch(block.else_branch, depth)) return std::nullopt;
    }
    return Statement{std::move(block)};
  }

  bool parse_branch(std::vector<Statement>& out, std::size_t depth) {
    if (!expect(TokenType::lbrace, "expected '{'")) return false;
    if (peek().type == TokenType::rbrace) {
      fail(ParseError::Kind::syntactic, peek().offset, "conditional branch has no statements");
      return false;
    }
    while (peek().type != TokenType::rbrace) {
      if (peek().type == TokenType::end) {
        fail(ParseError::Kind::syntactic, peek().offset, "unterminated conditional block");
        return false;
      }
      auto stmt = parse_construct(depth + 1);
      if (error_) return false;
      out.push_back(std::move(*stmt));
    }
    advance();  // }
    return true;
  }

  std::optional<Reference> parse_reference() {
    if (peek().type != TokenType::ident) {
      fail(ParseError::Kind::syntactic, peek().offset, "expected reference path");
      return std::nullopt;
    }
    Reference ref;
    ref.path.push_back(advance().text);
    while (peek().type == TokenType::dot) {
      advance();
      if (peek().type != TokenType::ident) {
        fail(ParseError::Kind::syntactic, peek().offset, "expected identifier after '.'");
        return std::nullopt;
      }
      ref.path.push_back(advance().text);
    }
    return ref;
  }

  std::optional<ParamObject> parse_object(std::size_t depth) {
    if (depth > kMaxNestingDepth) {
      fail(ParseError::Kind::syntactic, peek().offset, "nesting too deep");
      return std::nullopt;
    }
    if (!expect(TokenType::lbrace, "expected '{'")) return std::nullopt;
    ParamObject obj;
    if (peek().type == TokenType::rbrace) {
      advance();
      return obj;
    }
    while (true) {
      if (peek().type != TokenType::string) {
        fail(ParseError::Kind::syntactic, peek().offset, "expected string key");
        return std::nullopt;
      }
      const Token& key_tok = advance();
      if (obj.find(key_tok.text) != nullptr) {
        fail(ParseError::Kind::syntactic, key_tok.offset,
             "duplicate parameter key \"" + key_tok.text + "\"");
        return std::nullopt;
      }
      if (!expect(TokenType::colon, "expected ':' after key")) return std::nullopt;
      auto value = parse_value(depth + 1);
      if (error_) return std::nullopt;
      obj.entries.emplace_back(key_tok.text, std::move(*value));
      if (peek().type == TokenType::comma) {
        advance();
        continue;
      }
      if (!expect(TokenType::rbrace, "expected ',' or '}'")) return std::nullopt;
      return obj;
    }
  }

  std::optional<ParamValue> parse_value(std::size_t depth) {
    if (depth > kMaxNestingDepth) {
      fail(ParseError::Kind::syntactic, peek().offset, "nesting too deep");
      return std::nullopt;
    }
    const Token& tok = peek();
    switch (tok.type) {
      case TokenType::string: {
        ParamValue v{ParamValue::Storage{advance().text}};
        return v;
      }
      case TokenType::integer:
        return ParamValue{ParamValue::Storage{advance().int_value}};
      case TokenType::floating:
        return ParamValue{ParamValue::Storage{advance().float_value}};
      case TokenType::lbrace: {
        auto obj = parse_object(depth);
        if (error_) return std::nullopt;
        return ParamValue{ParamValue::Storage{std::move(*obj)}};
      }
      case TokenType::lbracket: {
        advance();
        ParamArray arr;
        if (peek().type == TokenType::rbracket) {
          advance();
          return ParamValue{ParamValue::Storage{std::move(arr)}};
        }
        while (true) {
          auto element = parse_value(depth + 1);
          if (error_) return std::nullopt;
          arr.push_back(std::move(*element));
          if (peek().type == TokenType::comma) {
            advance();
            continue;
          }
          if (!expect(TokenType::rbracket, "expected ',' or ']'")) return std::nullopt;
          return ParamValue{ParamValue::Storage{std::move(arr)}};
        }
      }
      case TokenType::ident: {
        // Bare keyword literal unless a dotted path follows.
        if (peek(1).type != TokenType::dot) {
          if (tok.text == "true") { advance(); return ParamValue{ParamValue::Storage{true}}; }
          if (tok.text == "false") { advance(); return ParamValue{ParamValue::Storage{false}}; }
          if (tok.text == "null") { advance(); return ParamValue{ParamValue::Storage{nullptr}}; }
        }
        auto ref = parse_reference();
        if (error_) return std::nullopt;
        return ParamValue{ParamValue::Storage{std::move(*ref)}};
      }
      default:
        fail(ParseError::Kind::syntactic, tok.offset, "expected JSON value");
        return std::nullopt;
    }
  }

  bool expect(TokenType type, std::string message) {
    if (peek().type != type) {
      fail(ParseError::Kind::syntactic, peek().offset, std::move(message));
      return false;
    }
    advance();
    return true;
  }

  void fail(ParseError::Kind kind, std::size_t offset, std::string message) {
    if (!error_) error_ = ParseError{kind, offset, std::move(message)};
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::optional<ParseError> error_;
  std::unordered_map<std::string, std::size_t> targets_;
};

}  // namespace

const ParamValue* ParamObject::find(std::string_view key) const {
  for (const auto& [k, v] : entries)
    if (k == key) return &v;
  return nullptr;
}

bool operator==(const ParamValue& a, const ParamValue& b) { return a.value == b.value; }

bool operator==(const ParamObject& a, const ParamObject& b) { return a.entries == b.entries; }

bool operator==(const IfBlock& a, const IfBlock& b) {
  return a.condition == b.condition && a.then_branch == b.then_branch &&
         a.else_branch == b.else_branch;
}

std::string Reference::dotted() const {
  std::string out;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i > 0) out.push_back('.');
    out += path[i];
  }
  return out;
}

std::string ActionCall::identifier() const { return connector + "_" + operation; }

std::string ActionCall::dotted() const { return connector + "." + operation; }

std::string_view to_string(ParseError::Kind kind) {
  switch (kind) {
    case ParseError::Kind::lexical: return "lexical";
    case ParseError::Kind::syntactic: return "syntactic";
    case ParseError::Kind::structural: return "structural";
  }
  return "unknown";
}

ParseResult parse(std::string_view source) {
  auto lexed = Lexer(source).run();
  if (std::holds_alternative<ParseError>(lexed)) return std::get<ParseError>(lexed);
  return Parser(std::move(std::get<std::vector<Token>>(lexed))).run();
}

std::string display_identifier(std::string_view identifier) {
  constexpr std::string_view prefix = "shared_";
  if (identifier.substr(0, prefix.size()) == prefix && identifier.size() > prefix.size())
    return std::string(identifier.substr(prefix.size()));
  return std::string(identifier);
}

}  // namespace flowkit
