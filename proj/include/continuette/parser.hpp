#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "continuette/ast.hpp"
#include "continuette/lexer.hpp"

namespace continuette {

class ParseError : public SyntaxError {
 public:
  ParseError(Span span, const std::string& message, std::vector<std::string> expected)
      : SyntaxError("E_PARSE", span, message), expected_(std::move(expected)) {}

  /// Token descriptions that would have been accepted at the error position.
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  std::vector<std::string> expected_;
};

/// Builds the AST from a token stream produced by tokenize(). Expect arms stay
/// attached to their send statements; see desugar_expect().
SourceProgram parse(const std::vector<Token>& tokens);

/// tokenize() followed by parse().
SourceProgram parse_source(std::string_view source);

}  // namespace continuette
