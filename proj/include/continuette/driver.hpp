#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "continuette/diagnostic.hpp"
#include "continuette/sema.hpp"
#include "continuette/source.hpp"

namespace continuette {

struct CompileResult {
  /// Present once names and types resolved cleanly; later checks may still
  /// have reported diagnostics (a forced run can use it anyway).
  std::optional<ResolvedProgram> program;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return program.has_value() && diagnostics.empty(); }
};

/// syntax -> desugar -> resolve/typecheck -> sends conformance -> commitments.
CompileResult compile(const SourceMap& sources);

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reads and concatenates the files in order.
SourceMap load_files(const std::vector<std::string>& paths);

}  // namespace continuette
