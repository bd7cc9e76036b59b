#pragma once

#include <string>

#include "continuette/ast.hpp"

namespace continuette {

/// Renders the program back to concrete syntax that reparses to the same
/// structure.
std::string pretty_print(const SourceProgram& program);

/// Span-free S-expression dump used to compare ASTs structurally.
std::string structural_dump(const SourceProgram& program);

}  // namespace continuette
