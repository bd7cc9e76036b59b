#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "continuette/source.hpp"

namespace continuette {

enum class TokenKind {
  // keywords
  kModule, kVoid, kEvent, kSends, kSend, kExpect, kCatch, kFinal, kRequired,
  kThrow, kReturn, kNew, kIf, kElse, kWhile, kPrint, kNull, kTrue, kFalse,
  // atoms
  kIdent, kInt, kString,
  // punctuation
  kLParen, kRParen, kLBrace, kRBrace, kComma, kSemi, kDot,
  kAssign, kEq, kNe, kLt, kLe, kGt, kGe,
  kPlus, kMinus, kStar, kSlash, kPercent, kAndAnd, kOrOr, kBang,
  kEof,
};

struct Token {
  TokenKind kind;
  Span span;
  std::string text;       // identifier name, decoded string literal, or lexeme
  std::int64_t int_value = 0;
};

/// Short human-readable name: "kw:send", "ident", "lparen", ...
std::string_view token_kind_name(TokenKind kind);

/// Name a reserved type that is lexed as an identifier but may not be
/// declared as a module or used outside a catch clause.
inline constexpr std::string_view kContinuityErrorName = "ContinuityError";

/// Base of lexer and parser failures; always carries a span inside the input.
class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(std::string code, Span span, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)), span_(span) {}

  const std::string& code() const { return code_; }
  Span span() const { return span_; }

 private:
  std::string code_;
  Span span_;
};

class LexError : public SyntaxError {
 public:
  LexError(Span span, const std::string& message) : SyntaxError("E_LEX", span, message) {}
};

/// Splits source text into tokens. The returned stream always ends with kEof
/// (whose span is the empty range at the end of input). `//` comments and
/// whitespace are skipped.
std::vector<Token> tokenize(std::string_view source);

}  // namespace continuette
