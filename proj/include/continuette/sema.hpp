#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "continuette/ast.hpp"
#include "continuette/diagnostic.hpp"

namespace continuette {

namespace codes {
inline constexpr std::string_view kUnresolved = "E_UNRESOLVED";
inline constexpr std::string_view kType = "E_TYPE";
inline constexpr std::string_view kEventCalled = "E_EVENT_CALLED";
inline constexpr std::string_view kExpectUndeclared = "E_EXPECT_UNDECLARED";
inline constexpr std::string_view kExpectClash = "E_EXPECT_CLASH";
inline constexpr std::string_view kLocalCapture = "E_LOCAL_CAPTURE";
inline constexpr std::string_view kRequiredNull = "E_REQUIRED_NULL";
inline constexpr std::string_view kSendsConformance = "E_SENDS_CONFORMANCE";
}  // namespace codes

struct DesugarResult {
  SourceProgram program;
  std::vector<Diagnostic> errors;
};

/// Lifts every `send f(args) expect g(params) {body}` into a plain send plus a
/// module-level event `g(params) {body}`. Lifted bodies may not read the
/// enclosing method's locals or parameters (E_LOCAL_CAPTURE); a lifted name
/// that already exists in the module is E_EXPECT_CLASH. Applying this to an
/// already desugared program returns it unchanged.
DesugarResult desugar_expect(SourceProgram program);

/// A SourceProgram whose annotation fields have all been filled in.
struct ResolvedProgram {
  SourceProgram program;
};

struct ResolveResult {
  ResolvedProgram resolved;
  std::vector<Diagnostic> errors;

  bool ok() const { return errors.empty(); }
};

/// Binds names, assigns expression types and enforces the call/send rules.
/// Reports every violation found rather than stopping at the first.
ResolveResult resolve_and_typecheck(SourceProgram program);

/// Checks that sends-clauses agree with the methods they name and with the
/// places that rely on them: expect sites and transitive discharges.
std::vector<Diagnostic> check_sends_conformance(const ResolvedProgram& program);

/// Looks a method name up from inside `module`: the module itself first, then
/// a name that is unique across the whole program. nullopt if missing or
/// ambiguous.
std::optional<MethodRef> lookup_method(const SourceProgram& program, int module, std::string_view name);

/// Resolves a written type name; `String` is accepted for `string`.
std::optional<Type> resolve_type_name(const SourceProgram& program, std::string_view name);

std::string type_to_string(const SourceProgram& program, Type type);

/// True when a value of type `from` may be stored where `to` is expected.
bool assignable(Type from, Type to);

}  // namespace continuette
