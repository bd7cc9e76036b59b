#include "continuette/commit.hpp"

#include <deque>

namespace continuette {
namespace {

bool assigns_param(const Block& block, int param);

bool assigns_param_stmt(const Stmt& s, int param) {
  if (const auto* a = std::get_if<Assign>(&s.node)) {
    const auto* name = std::get_if<NameRef>(&a->target.node);
    return name && name->kind == NameKind::kParam && name->slot == param;
  }
  if (const auto* i = std::get_if<If>(&s.node)) {
    return assigns_param(i->then_block, param) || (i->else_block && assigns_param(*i->else_block, param));
  }
  if (const auto* w = std::get_if<While>(&s.node)) return assigns_param(w->body, param);
  if (const auto* b = std::get_if<Block>(&s.node)) return assigns_param(*b, param);
  return false;
}

bool assigns_param(const Block& block, int param) {
  for (const auto& s : block.stmts) {
    if (assigns_param_stmt(s, param)) return true;
  }
  return false;
}

bool is_param_ref(const Expr& e, int param) {
  const auto* name = std::get_if<NameRef>(&e.node);
  return name && name->kind == NameKind::kParam && name->slot == param;
}

const Invocation* invocation_of(const Stmt& s) {
  if (const auto* c = std::get_if<CallStmt>(&s.node)) return &c->call;
  if (const auto* sd = std::get_if<SendStmt>(&s.node)) return &sd->call;
  return nullptr;
}

using Fact = std::vector<char>;
using Solution = MustSolution;

}  // namespace

MustSolution solve_must(const SourceProgram& prog, const MethodDecl& meth, CfgOptions options) {
  Solution sol;
  sol.cfg = build_cfg(meth, options);
  const std::size_t nb = sol.cfg.blocks.size();
  const std::size_t nc = meth.sends.size();
  sol.gen.assign(nb, Fact(nc, 0));
  for (std::size_t b = 0; b < nb; ++b) {
    for (const Stmt* s : sol.cfg.blocks[b].stmts) {
      const Invocation* inv = invocation_of(*s);
      if (!inv) continue;
      for (std::size_t k = 0; k < nc; ++k) {
        if (discharges(prog, meth, static_cast<int>(k), *inv)) sol.gen[b][k] = 1;
      }
    }
  }
  // Must-analysis: start from "everything discharged" and intersect downward.
  sol.in.assign(nb, Fact(nc, 1));
  sol.out.assign(nb, Fact(nc, 1));
  std::deque<int> work;
  std::vector<char> queued(nb, 1);
  for (std::size_t b = 0; b < nb; ++b) work.push_back(static_cast<int>(b));
  while (!work.empty()) {
    const int b = work.front();
    work.pop_front();
    queued[b] = 0;
    const auto& blk = sol.cfg.blocks[b];
    Fact in(nc, b == sol.cfg.entry ? 0 : 1);
    for (int p : blk.preds) {
      for (std::size_t k = 0; k < nc; ++k) in[k] = in[k] && sol.out[p][k];
    }
    Fact out = in;
    for (std::size_t k = 0; k < nc; ++k) out[k] = out[k] || sol.gen[b][k];
    sol.in[b] = std::move(in);
    if (out != sol.out[b]) {
      sol.out[b] = std::move(out);
      ++sol.updates;
      for (const auto& e : blk.succs) {
        if (!queued[e.target]) {
          queued[e.target] = 1;
          work.push_back(e.target);
        }
      }
    }
  }
  return sol;
}

namespace {

struct Witness {
  std::vector<BranchChoice> choices;
  const CfgEdge* last = nullptr;
};

// Breadth-first path from entry to normal exit through blocks that do not
// discharge commitment k.
Witness find_witness(const Solution& sol, std::size_t k) {
  const auto& cfg = sol.cfg;
  const std::size_t nb = cfg.blocks.size();
  std::vector<const CfgEdge*> via(nb, nullptr);
  std::vector<int> from(nb, -1);
  std::vector<char> seen(nb, 0);
  std::deque<int> work;
  if (!sol.gen[cfg.entry][k]) {
    work.push_back(cfg.entry);
    seen[cfg.entry] = 1;
  }
  while (!work.empty()) {
    const int b = work.front();
    work.pop_front();
    if (b == cfg.normal_exit) break;
    for (const auto& e : cfg.blocks[b].succs) {
      if (e.kind == EdgeKind::kThrow || seen[e.target] || sol.gen[e.target][k]) continue;
      seen[e.target] = 1;
      via[e.target] = &e;
      from[e.target] = b;
      work.push_back(e.target);
    }
  }
  Witness w;
  if (!seen[cfg.normal_exit]) return w;
  std::vector<const CfgEdge*> path;
  for (int b = cfg.normal_exit; from[b] >= 0; b = from[b]) path.push_back(via[b]);
  for (auto it = path.rbegin(); it != path.rend(); ++it) {
    const EdgeKind kind = (*it)->kind;
    if (kind == EdgeKind::kThen || kind == EdgeKind::kElse || kind == EdgeKind::kLoopEnter ||
        kind == EdgeKind::kLoopExit) {
      w.choices.push_back({kind, (*it)->origin});
    }
  }
  w.last = path.empty() ? nullptr : path.front();
  return w;
}

struct NearMiss {
  DischargeMatch match = DischargeMatch::kNone;
  Span span;
};

void find_near_miss(const SourceProgram& prog, const MethodDecl& meth, int k, const Block& block, NearMiss& found) {
  for (const auto& s : block.stmts) {
    if (found.match != DischargeMatch::kNone) return;
    if (const Invocation* inv = invocation_of(s)) {
      const DischargeMatch m = classify_discharge(prog, meth, k, *inv);
      if (m == DischargeMatch::kWrongArg || m == DischargeMatch::kNotFinal) found = {m, s.span};
    } else if (const auto* i = std::get_if<If>(&s.node)) {
      find_near_miss(prog, meth, k, i->then_block, found);
      if (i->else_block) find_near_miss(prog, meth, k, *i->else_block, found);
    } else if (const auto* w = std::get_if<While>(&s.node)) {
      find_near_miss(prog, meth, k, w->body, found);
    } else if (const auto* b = std::get_if<Block>(&s.node)) {
      find_near_miss(prog, meth, k, *b, found);
    }
  }
}

std::string commitment_text(const CommitmentSpec& c) {
  std::string out = c.target_name + "(";
  for (std::size_t i = 0; i < c.params.size(); ++i) {
    if (i) out += ", ";
    out += c.params[i].type.name + " " + c.params[i].name;
  }
  return out + ")";
}

}  // namespace

bool effectively_final(const MethodDecl& method, int param) {
  if (param < 0 || param >= static_cast<int>(method.params.size())) return false;
  return method.params[param].is_final || !assigns_param(method.body, param);
}

DischargeMatch classify_discharge(const SourceProgram& program, const MethodDecl& method, int commitment,
                                  const Invocation& call) {
  const CommitmentSpec& c = method.sends[commitment];
  if (!call.target.valid() || !c.target.valid() || c.passthrough.size() != c.params.size()) {
    return DischargeMatch::kNone;
  }
  if (call.target == c.target) {
    DischargeMatch result = DischargeMatch::kDirect;
    for (std::size_t j = 0; j < c.params.size(); ++j) {
      const int p = c.passthrough[j];
      if (p < 0) continue;
      if (j >= call.arity() || !is_param_ref(call.argument(j), p)) return DischargeMatch::kWrongArg;
      if (!effectively_final(method, p)) result = DischargeMatch::kNotFinal;
    }
    return result;
  }
  DischargeMatch best = DischargeMatch::kNone;
  const MethodDecl& callee = program.method(call.target);
  for (const auto& theirs : callee.sends) {
    if (!(theirs.target == c.target) || theirs.params.size() != c.params.size() ||
        theirs.passthrough.size() != theirs.params.size()) {
      continue;
    }
    bool fed = true;
    bool final_ok = true;
    for (std::size_t j = 0; j < c.params.size() && fed; ++j) {
      const int p = c.passthrough[j];
      if (p < 0) continue;
      const int q = theirs.passthrough[j];
      if (q < 0 || q >= static_cast<int>(call.arity()) || !is_param_ref(call.argument(q), p)) {
        fed = false;
      } else if (!effectively_final(method, p)) {
        final_ok = false;
      }
    }
    if (fed && final_ok) return DischargeMatch::kTransitive;
    if (fed) best = DischargeMatch::kNotFinal;
  }
  return best;
}

bool discharges(const SourceProgram& program, const MethodDecl& method, int commitment, const Invocation& call) {
  const DischargeMatch m = classify_discharge(program, method, commitment, call);
  return m == DischargeMatch::kDirect || m == DischargeMatch::kTransitive;
}

MethodAnalysis check_method_commitments(const SourceProgram& program, MethodRef ref) {
  const MethodDecl& meth = program.method(ref);
  MethodAnalysis result;
  result.commitments = static_cast<int>(meth.sends.size());
  const Solution sol = solve_must(program, meth, {});
  result.updates = sol.updates;
  result.blocks = static_cast<int>(sol.cfg.blocks.size());
  if (meth.sends.empty()) return result;

  const Fact& at_exit = sol.in[sol.cfg.normal_exit];
  std::optional<Solution> relaxed;
  for (std::size_t k = 0; k < meth.sends.size(); ++k) {
    if (at_exit[k]) continue;
    const CommitmentSpec& c = meth.sends[k];
    CommitError err;
    err.method = ref;
    err.commitment = static_cast<int>(k);
    const Witness w = find_witness(sol, k);
    err.witness = w.choices;
    err.span = w.last && w.last->kind == EdgeKind::kReturn ? w.last->origin : meth.name_span;

    NearMiss miss;
    find_near_miss(program, meth, static_cast<int>(k), meth.body, miss);
    if (miss.match == DischargeMatch::kNotFinal) {
      err.code = codes::kPassthroughNotFinal;
      err.span = miss.span;
      err.message = "'" + meth.name + "' invokes '" + c.target_name +
                    "' but a pass-through parameter is reassigned, so the value sent may differ from the value received";
    } else if (miss.match == DischargeMatch::kWrongArg) {
      err.code = codes::kPassthroughArg;
      err.span = miss.span;
      err.message = "'" + meth.name + "' invokes '" + c.target_name +
                    "' without passing its pass-through parameter(s) unchanged";
    } else {
      if (!relaxed) relaxed = solve_must(program, meth, {.loops_run_at_least_once = true});
      if (relaxed->in[relaxed->cfg.normal_exit][k]) {
        err.code = codes::kLoopOnlyDischarge;
        err.message = "'" + meth.name + "' discharges " + commitment_text(c) +
                      " only inside a loop body, which may run zero times";
      } else {
        err.code = codes::kCommitUndischarged;
        err.message = "'" + meth.name + "' can finish without discharging " + commitment_text(c);
      }
    }
    if (!err.witness.empty()) err.message += " (path: " + witness_to_string(err.witness) + ")";
    result.errors.push_back(std::move(err));
  }
  return result;
}

std::vector<CommitError> check_commitments(const ResolvedProgram& program, CommitStats* stats) {
  std::vector<CommitError> errors;
  const auto& prog = program.program;
  for (std::size_t m = 0; m < prog.modules.size(); ++m) {
    for (std::size_t i = 0; i < prog.modules[m].methods.size(); ++i) {
      MethodAnalysis a = check_method_commitments(prog, {static_cast<int>(m), static_cast<int>(i)});
      if (stats) {
        ++stats->methods;
        stats->updates += a.updates;
        if (a.updates > a.blocks * a.commitments) ++stats->bound_violations;
      }
      for (auto& e : a.errors) errors.push_back(std::move(e));
    }
  }
  return errors;
}

Diagnostic to_diagnostic(const CommitError& error) { return {error.code, error.span, error.message, {}}; }

std::string witness_to_string(const std::vector<BranchChoice>& witness) {
  std::string out;
  for (std::size_t i = 0; i < witness.size(); ++i) {
    if (i) out += ", ";
    out += edge_kind_name(witness[i].kind);
  }
  return out;
}

}  // namespace continuette
