#include "continuette/sema.hpp"

namespace continuette {
namespace {

bool same_signature(const std::vector<Param>& a, const std::vector<Param>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(a[i].resolved == b[i].resolved)) return false;
  }
  return true;
}

std::string signature(const SourceProgram& prog, const std::string& name, const std::vector<Param>& ps) {
  std::string out = name + "(";
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (i) out += ", ";
    out += type_to_string(prog, ps[i].resolved);
  }
  return out + ")";
}

class Conformance {
 public:
  Conformance(const SourceProgram& prog, std::vector<Diagnostic>& out) : prog_(prog), out_(out) {}

  void run() {
    for (std::size_t m = 0; m < prog_.modules.size(); ++m) {
      for (std::size_t i = 0; i < prog_.modules[m].methods.size(); ++i) {
        const MethodDecl& meth = prog_.modules[m].methods[i];
        clause_matches_targets(meth);
        if (!meth.sends.empty()) transitive_uses(meth, meth.body);
      }
    }
    expect_sites();
  }

 private:
  void report(std::string_view code, Span span, std::string message, std::vector<Span> related = {}) {
    out_.push_back({std::string(code), span, std::move(message), std::move(related)});
  }

  void clause_matches_targets(const MethodDecl& meth) {
    for (const auto& c : meth.sends) {
      if (!c.target.valid()) continue;
      const MethodDecl& target = prog_.method(c.target);
      if (!same_signature(c.params, target.params)) {
        report(codes::kSendsConformance, c.span,
               "'" + meth.name + "' commits to " + signature(prog_, c.target_name, c.params) + " but '" +
                   target.name + "' is declared " + signature(prog_, target.name, target.params),
               {target.name_span});
      }
    }
  }

  // An invocation of a method whose own sends-clause names one of our targets
  // may be relied on to carry the commitment; the two clauses must agree.
  void transitive_uses(const MethodDecl& meth, const Block& block) {
    for (const auto& s : block.stmts) {
      const Invocation* inv = nullptr;
      if (const auto* c = std::get_if<CallStmt>(&s.node)) inv = &c->call;
      else if (const auto* sd = std::get_if<SendStmt>(&s.node)) inv = &sd->call;
      else if (const auto* i = std::get_if<If>(&s.node)) {
        transitive_uses(meth, i->then_block);
        if (i->else_block) transitive_uses(meth, *i->else_block);
      } else if (const auto* w = std::get_if<While>(&s.node)) transitive_uses(meth, w->body);
      else if (const auto* b = std::get_if<Block>(&s.node)) transitive_uses(meth, *b);
      if (!inv || !inv->target.valid()) continue;
      const MethodDecl& callee = prog_.method(inv->target);
      for (const auto& ours : meth.sends) {
        if (!ours.target.valid() || ours.target == inv->target) continue;
        for (const auto& theirs : callee.sends) {
          if (!(theirs.target == ours.target)) continue;
          if (!same_signature(ours.params, theirs.params)) {
            report(codes::kSendsConformance, s.span,
                   "'" + callee.name + "' commits to " + signature(prog_, theirs.target_name, theirs.params) +
                       ", which does not conform to " + signature(prog_, ours.target_name, ours.params) +
                       " required by '" + meth.name + "'",
                   {ours.span, theirs.span});
          }
        }
      }
    }
  }

  void expect_sites() {
    for (const auto& site : prog_.expect_sites) {
      if (!site.callee_ref.valid()) continue;
      const MethodDecl& callee = prog_.method(site.callee_ref);
      const int event_idx = prog_.modules[site.sender.module].find_method(site.event);
      if (event_idx < 0) continue;
      const MethodRef event{site.sender.module, event_idx};
      if (callee.sends.empty()) {
        report(codes::kSendsConformance, site.span,
               "'" + callee.name + "' declares no sends-clause, so it cannot guarantee '" + site.event + "'",
               {callee.name_span});
        continue;
      }
      bool declared = false;
      for (const auto& c : callee.sends) declared = declared || c.target == event;
      if (!declared) {
        report(codes::kExpectUndeclared, site.span,
               "'" + callee.name + "' does not declare 'sends " + site.event + "(...)'", {callee.name_span});
      }
    }
  }

  const SourceProgram& prog_;
  std::vector<Diagnostic>& out_;
};

}  // namespace

std::vector<Diagnostic> check_sends_conformance(const ResolvedProgram& program) {
  std::vector<Diagnostic> out;
  Conformance(program.program, out).run();
  return out;
}

}  // namespace continuette
