#pragma once

#include <string>
#include <vector>

#include "continuette/source.hpp"

namespace continuette {

/// One reported problem. `code` is a stable identifier such as E_PARSE,
/// E_TYPE or E_COMMIT_UNDISCHARGED.
struct Diagnostic {
  std::string code;
  Span span;
  std::string message;
  std::vector<Span> related;
};

/// Renders `{"code","file","line","col","message"}` on one line.
std::string to_json_line(const Diagnostic& diag, const SourceMap& sources);

}  // namespace continuette
