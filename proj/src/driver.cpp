#include "continuette/driver.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "continuette/commit.hpp"
#include "continuette/parser.hpp"

namespace continuette {

CompileResult compile(const SourceMap& sources) {
  CompileResult result;
  SourceProgram parsed;
  try {
    parsed = parse_source(sources.text());
  } catch (const SyntaxError& e) {
    result.diagnostics.push_back({e.code(), e.span(), e.what(), {}});
    return result;
  }

  DesugarResult desugared = desugar_expect(std::move(parsed));
  result.diagnostics = std::move(desugared.errors);
  ResolveResult resolved = resolve_and_typecheck(std::move(desugared.program));
  const bool resolved_ok = resolved.ok();
  result.diagnostics.insert(result.diagnostics.end(), resolved.errors.begin(), resolved.errors.end());
  if (resolved_ok) {
    for (auto& d : check_sends_conformance(resolved.resolved)) result.diagnostics.push_back(std::move(d));
    for (const auto& e : check_commitments(resolved.resolved)) result.diagnostics.push_back(to_diagnostic(e));
    result.program = std::move(resolved.resolved);
  }
  std::stable_sort(result.diagnostics.begin(), result.diagnostics.end(),
                   [](const Diagnostic& a, const Diagnostic& b) { return a.span.begin < b.span.begin; });
  return result;
}

SourceMap load_files(const std::vector<std::string>& paths) {
  SourceMap sources;
  for (const auto& path : paths) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    sources.add(path, buf.str());
  }
  return sources;
}

}  // namespace continuette
