#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "continuette/cfg.hpp"
#include "continuette/diagnostic.hpp"
#include "continuette/sema.hpp"

namespace continuette {

namespace codes {
inline constexpr std::string_view kCommitUndischarged = "E_COMMIT_UNDISCHARGED";
inline constexpr std::string_view kPassthroughNotFinal = "E_PASSTHROUGH_NOT_FINAL";
inline constexpr std::string_view kPassthroughArg = "E_PASSTHROUGH_ARG";
inline constexpr std::string_view kLoopOnlyDischarge = "E_LOOP_ONLY_DISCHARGE";
}  // namespace codes

/// True iff `param` is declared final or is never assigned in the body.
bool effectively_final(const MethodDecl& method, int param);

enum class DischargeMatch {
  kNone,         // different target, no relevant sends-clause
  kDirect,       // invokes the committed target with the pass-throughs
  kTransitive,   // the invoked method's own sends-clause carries the obligation
  kWrongArg,     // right target, a pass-through position is not the bare parameter
  kNotFinal,     // right shape, but a pass-through parameter is reassigned
};

/// Classifies how the invocation in `stmt` (a call or send) relates to
/// `method.sends[commitment]`.
DischargeMatch classify_discharge(const SourceProgram& program, const MethodDecl& method,
                                  int commitment, const Invocation& call);

bool discharges(const SourceProgram& program, const MethodDecl& method, int commitment,
                const Invocation& call);

/// One branch decision along a path through the method body.
struct BranchChoice {
  EdgeKind kind;
  Span at;
};

struct CommitError {
  std::string code;
  Span span;
  MethodRef method;
  int commitment = -1;
  std::vector<BranchChoice> witness;
  std::string message;
};

/// Solver bookkeeping. `updates` counts block facts that actually changed; a
/// monotone solver never exceeds blocks x commitments per method.
struct CommitStats {
  int methods = 0;
  long long updates = 0;
  int bound_violations = 0;
};

struct MethodAnalysis {
  std::vector<CommitError> errors;
  int updates = 0;
  int blocks = 0;
  int commitments = 0;
};

/// Per-block result of the must-analysis. Facts are indexed by commitment;
/// 1 means discharged on every normal path reaching that point.
struct MustSolution {
  Cfg cfg;
  std::vector<std::vector<char>> gen;
  std::vector<std::vector<char>> in;
  std::vector<std::vector<char>> out;
  int updates = 0;
};

MustSolution solve_must(const SourceProgram& program, const MethodDecl& method, CfgOptions options = {});

/// Forward must-analysis for one method: a commitment counts as discharged at
/// an exit only if every normal path reaching it discharges it.
MethodAnalysis check_method_commitments(const SourceProgram& program, MethodRef method);

std::vector<CommitError> check_commitments(const ResolvedProgram& program, CommitStats* stats = nullptr);

Diagnostic to_diagnostic(const CommitError& error);

std::string witness_to_string(const std::vector<BranchChoice>& witness);

}  // namespace continuette
