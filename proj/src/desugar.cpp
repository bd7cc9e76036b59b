#include <set>
#include <string>

#include "continuette/sema.hpp"

namespace continuette {
namespace {

void collect_locals(const Block& block, std::set<std::string>& out);

void collect_locals_stmt(const Stmt& s, std::set<std::string>& out) {
  if (const auto* d = std::get_if<VarDecl>(&s.node)) out.insert(d->name);
  else if (const auto* i = std::get_if<If>(&s.node)) {
    collect_locals(i->then_block, out);
    if (i->else_block) collect_locals(*i->else_block, out);
  } else if (const auto* w = std::get_if<While>(&s.node)) collect_locals(w->body, out);
  else if (const auto* b = std::get_if<Block>(&s.node)) collect_locals(*b, out);
  // Expect arms are separate scopes.
}

void collect_locals(const Block& block, std::set<std::string>& out) {
  for (const auto& s : block.stmts) collect_locals_stmt(s, out);
}

/// Reports names in a lifted body that can only refer to the enclosing
/// method's parameters or locals.
class CaptureScan {
 public:
  CaptureScan(const std::set<std::string>& enclosing, std::set<std::string> own, std::vector<Diagnostic>& errors,
              const std::string& event)
      : enclosing_(enclosing), own_(std::move(own)), errors_(errors), event_(event) {}

  void block(const Block& b) {
    for (const auto& s : b.stmts) stmt(s);
  }

 private:
  void expr(const Expr& e) {
    std::visit(
        [this, &e](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, NameRef>) {
            if (!own_.count(n.name) && enclosing_.count(n.name) && reported_.insert(n.name).second) {
              errors_.push_back({std::string(codes::kLocalCapture), e.span,
                                 "expect body of '" + event_ + "' cannot access '" + n.name +
                                     "' of the enclosing method; pass it as a parameter",
                                 {}});
            }
          } else if constexpr (std::is_same_v<T, FieldGet>) {
            expr(*n.object);
          } else if constexpr (std::is_same_v<T, Unary>) {
            expr(*n.operand);
          } else if constexpr (std::is_same_v<T, Binary>) {
            expr(*n.lhs);
            expr(*n.rhs);
          }
        },
        e.node);
  }

  void invocation(const Invocation& inv) {
    if (inv.receiver) expr(**inv.receiver);
    for (const auto& a : inv.args) expr(a);
  }

  void stmt(const Stmt& s) {
    std::visit(
        [this](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, VarDecl>) {
            expr(n.init);
          } else if constexpr (std::is_same_v<T, Assign>) {
            expr(n.target);
            expr(n.value);
          } else if constexpr (std::is_same_v<T, If>) {
            expr(n.cond);
            block(n.then_block);
            if (n.else_block) block(*n.else_block);
          } else if constexpr (std::is_same_v<T, While>) {
            expr(n.cond);
            block(n.body);
          } else if constexpr (std::is_same_v<T, CallStmt>) {
            invocation(n.call);
          } else if constexpr (std::is_same_v<T, SendStmt>) {
            invocation(n.call);  // a nested arm is checked when its own parent is lifted
          } else if constexpr (std::is_same_v<T, Throw>) {
            expr(n.message);
          } else if constexpr (std::is_same_v<T, Print>) {
            expr(n.value);
          } else if constexpr (std::is_same_v<T, Block>) {
            block(n);
          }
        },
        s.node);
  }

  const std::set<std::string>& enclosing_;
  std::set<std::string> own_;
  std::vector<Diagnostic>& errors_;
  const std::string& event_;
  std::set<std::string> reported_;
};

class Desugarer {
 public:
  explicit Desugarer(SourceProgram& prog, std::vector<Diagnostic>& errors) : prog_(prog), errors_(errors) {}

  void run() {
    for (std::size_t m = 0; m < prog_.modules.size(); ++m) {
      // Lifted events are appended and then processed in turn, so nested arms lift too.
      for (std::size_t i = 0; i < prog_.modules[m].methods.size(); ++i) {
        std::vector<MethodDecl> lifted;
        MethodDecl& method = prog_.modules[m].methods[i];
        std::set<std::string> enclosing;
        for (const auto& p : method.params) enclosing.insert(p.name);
        collect_locals(method.body, enclosing);
        const MethodRef self{static_cast<int>(m), static_cast<int>(i)};
        walk(method.body, static_cast<int>(m), self, enclosing, lifted);
        if (method.catch_clause) {
          std::set<std::string> catch_scope = enclosing;
          catch_scope.insert(method.catch_clause->binder);
          collect_locals(method.catch_clause->body, catch_scope);
          walk(method.catch_clause->body, static_cast<int>(m), self, catch_scope, lifted);
        }
        for (auto& l : lifted) prog_.modules[m].methods.push_back(std::move(l));
      }
    }
  }

 private:
  bool member_exists(const ModuleDecl& mod, const std::vector<MethodDecl>& pending, const std::string& name) const {
    if (mod.find_field(name) >= 0 || mod.find_method(name) >= 0) return true;
    for (const auto& p : pending) {
      if (p.name == name) return true;
    }
    return false;
  }

  void walk(Block& block, int module, MethodRef self, const std::set<std::string>& enclosing,
            std::vector<MethodDecl>& lifted) {
    for (auto& s : block.stmts) {
      if (auto* i = std::get_if<If>(&s.node)) {
        walk(i->then_block, module, self, enclosing, lifted);
        if (i->else_block) walk(*i->else_block, module, self, enclosing, lifted);
      } else if (auto* w = std::get_if<While>(&s.node)) {
        walk(w->body, module, self, enclosing, lifted);
      } else if (auto* b = std::get_if<Block>(&s.node)) {
        walk(*b, module, self, enclosing, lifted);
      } else if (auto* send = std::get_if<SendStmt>(&s.node); send && send->expect) {
        lift(*send, s.span, module, self, enclosing, lifted);
      }
    }
  }

  void lift(SendStmt& send, Span span, int module, MethodRef self, const std::set<std::string>& enclosing,
            std::vector<MethodDecl>& lifted) {
    ExpectArm arm = std::move(*send.expect);
    send.expect.reset();
    const ModuleDecl& mod = prog_.modules[module];
    if (member_exists(mod, lifted, arm.name)) {
      errors_.push_back({std::string(codes::kExpectClash), arm.name_span,
                         "expect arm '" + arm.name + "' clashes with an existing member of module '" + mod.name + "'",
                         {}});
      return;
    }
    std::set<std::string> own;
    for (const auto& p : arm.params) own.insert(p.name);
    collect_locals(arm.body, own);
    CaptureScan(enclosing, std::move(own), errors_, arm.name).block(arm.body);

    MethodDecl event;
    event.kind = MethodKind::kEvent;
    event.name = arm.name;
    event.name_span = arm.name_span;
    event.span = Span::cover(arm.name_span, arm.body.span);
    event.params = std::move(arm.params);
    event.body = std::move(arm.body);
    event.lifted = true;
    lifted.push_back(std::move(event));
    prog_.expect_sites.push_back({self, send.call.method, lifted.back().name, span, {}});
  }

  SourceProgram& prog_;
  std::vector<Diagnostic>& errors_;
};

}  // namespace

DesugarResult desugar_expect(SourceProgram program) {
  DesugarResult result;
  Desugarer(program, result.errors).run();
  result.program = std::move(program);
  return result;
}

}  // namespace continuette
