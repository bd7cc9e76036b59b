#include <map>
#include <set>
#include <string>

#include "continuette/sema.hpp"

namespace continuette {

std::optional<MethodRef> lookup_method(const SourceProgram& program, int module, std::string_view name) {
  if (module >= 0 && module < static_cast<int>(program.modules.size())) {
    const int local = program.modules[module].find_method(name);
    if (local >= 0) return MethodRef{module, local};
  }
  std::optional<MethodRef> found;
  for (std::size_t m = 0; m < program.modules.size(); ++m) {
    const int idx = program.modules[m].find_method(name);
    if (idx < 0) continue;
    if (found) return std::nullopt;  // ambiguous
    found = MethodRef{static_cast<int>(m), idx};
  }
  return found;
}

std::optional<Type> resolve_type_name(const SourceProgram& program, std::string_view name) {
  if (name == "int") return Type::of(Type::Kind::kInt);
  if (name == "bool") return Type::of(Type::Kind::kBool);
  if (name == "string" || name == "String") return Type::of(Type::Kind::kStr);
  if (name == "Object") return Type::of(Type::Kind::kObject);
  if (name == "ContinuityError") return Type::of(Type::Kind::kError);
  const int m = program.find_module(name);
  if (m >= 0) return Type::module_ref(m);
  return std::nullopt;
}

std::string type_to_string(const SourceProgram& program, Type type) {
  switch (type.kind) {
    case Type::Kind::kUnknown: return "<unknown>";
    case Type::Kind::kInt: return "int";
    case Type::Kind::kBool: return "bool";
    case Type::Kind::kStr: return "string";
    case Type::Kind::kObject: return "Object";
    case Type::Kind::kNull: return "null";
    case Type::Kind::kError: return "ContinuityError";
    case Type::Kind::kModule:
      return type.module >= 0 && type.module < static_cast<int>(program.modules.size())
                 ? program.modules[type.module].name
                 : "<module>";
  }
  return "?";
}

bool assignable(Type from, Type to) {
  if (from.kind == Type::Kind::kUnknown || to.kind == Type::Kind::kUnknown) return true;
  if (from == to) return true;
  if (from.kind == Type::Kind::kNull) return to.is_reference();
  if (to.kind == Type::Kind::kObject) return from.is_reference();
  return false;
}

namespace {

bool is_builtin_type_name(std::string_view name) {
  return name == "int" || name == "bool" || name == "string" || name == "String" || name == "Object";
}

using Kind = Type::Kind;

class Resolver {
 public:
  Resolver(SourceProgram& prog, std::vector<Diagnostic>& errors) : prog_(prog), errors_(errors) {}

  void run() {
    declarations();
    for (std::size_t m = 0; m < prog_.modules.size(); ++m) {
      module_ = static_cast<int>(m);
      for (std::size_t i = 0; i < prog_.modules[m].methods.size(); ++i) {
        method_ = MethodRef{module_, static_cast<int>(i)};
        body(prog_.modules[m].methods[i]);
      }
    }
  }

 private:
  void error(std::string_view code, Span span, std::string message) {
    errors_.push_back({std::string(code), span, std::move(message), {}});
  }

  Type type_of(const TypeName& name) {
    if (auto t = resolve_type_name(prog_, name.name)) return *t;
    error(codes::kUnresolved, name.span, "unknown type '" + name.name + "'");
    return Type::unknown();
  }

  std::string show(Type t) const { return type_to_string(prog_, t); }

  void declarations() {
    std::set<std::string> module_names;
    for (auto& mod : prog_.modules) {
      if (!module_names.insert(mod.name).second) {
        error(codes::kType, mod.name_span, "duplicate module '" + mod.name + "'");
      }
      if (is_builtin_type_name(mod.name)) {
        error(codes::kType, mod.name_span, "module name '" + mod.name + "' is a built-in type");
      }
    }
    for (std::size_t m = 0; m < prog_.modules.size(); ++m) {
      module_ = static_cast<int>(m);
      auto& mod = prog_.modules[m];
      std::set<std::string> members;
      for (auto& f : mod.fields) {
        if (!members.insert(f.name).second) {
          error(codes::kType, f.name_span, "duplicate member '" + f.name + "' in module '" + mod.name + "'");
        }
        f.resolved = type_of(f.type);
        if (f.init) {
          f.init->type = literal_type(*f.init);
          if (!assignable(f.init->type, f.resolved)) {
            error(codes::kType, f.init->span,
                  "field '" + f.name + "' of type " + show(f.resolved) + " cannot hold " + show(f.init->type));
          }
        }
      }
      for (auto& meth : mod.methods) {
        if (!members.insert(meth.name).second) {
          error(codes::kType, meth.name_span, "duplicate member '" + meth.name + "' in module '" + mod.name + "'");
        }
        params(meth.params);
      }
      for (auto& meth : mod.methods) sends_clause(meth);
    }
  }

  void params(std::vector<Param>& ps) {
    std::set<std::string> seen;
    for (auto& p : ps) {
      if (!seen.insert(p.name).second) error(codes::kType, p.span, "duplicate parameter '" + p.name + "'");
      p.resolved = type_of(p.type);
      if (p.resolved.kind == Kind::kError) {
        error(codes::kType, p.type.span, "ContinuityError may only be bound by a catch clause");
      }
    }
  }

  void sends_clause(MethodDecl& meth) {
    for (auto& c : meth.sends) {
      params(c.params);
      if (auto target = lookup_method(prog_, module_, c.target_name)) {
        c.target = *target;
      } else {
        error(codes::kUnresolved, c.span, "sends-clause target '" + c.target_name + "' does not name a unique method");
      }
      c.passthrough.assign(c.params.size(), -1);
      for (std::size_t j = 0; j < c.params.size(); ++j) {
        for (std::size_t i = 0; i < meth.params.size(); ++i) {
          if (meth.params[i].name != c.params[j].name) continue;
          c.passthrough[j] = static_cast<int>(i);
          if (!(meth.params[i].resolved == c.params[j].resolved)) {
            error(codes::kType, c.params[j].span,
                  "pass-through parameter '" + c.params[j].name + "' is declared " + show(meth.params[i].resolved) +
                      " in '" + meth.name + "' but " + show(c.params[j].resolved) + " in its sends-clause");
          }
        }
      }
    }
  }

  Type literal_type(const Expr& e) const {
    if (std::holds_alternative<IntLit>(e.node)) return Type::of(Kind::kInt);
    if (std::holds_alternative<BoolLit>(e.node)) return Type::of(Kind::kBool);
    if (std::holds_alternative<StrLit>(e.node)) return Type::of(Kind::kStr);
    return Type::of(Kind::kNull);
  }

  // ---- bodies ----

  MethodDecl& current() { return prog_.method(method_); }

  void body(MethodDecl& meth) {
    scopes_.clear();
    binder_.reset();
    block(meth.body);
    if (meth.catch_clause) {
      binder_ = meth.catch_clause->binder;
      for (const auto& p : meth.params) {
        if (p.name == *binder_) {
          error(codes::kType, meth.catch_clause->binder_span, "catch binder '" + p.name + "' shadows a parameter");
        }
      }
      block(meth.catch_clause->body);
      binder_.reset();
    }
  }

  void block(Block& b) {
    scopes_.emplace_back();
    for (auto& s : b.stmts) stmt(s);
    scopes_.pop_back();
  }

  bool name_visible(const std::string& name) {
    for (const auto& scope : scopes_) {
      if (scope.count(name)) return true;
    }
    for (const auto& p : current().params) {
      if (p.name == name) return true;
    }
    return binder_ && *binder_ == name;
  }

  void require(const Expr& e, Kind kind, std::string_view what) {
    if (e.type.kind != Kind::kUnknown && e.type.kind != kind) {
      error(codes::kType, e.span, std::string(what) + " must be " + show(Type::of(kind)) + ", found " + show(e.type));
    }
  }

  void stmt(Stmt& s) {
    std::visit(
        [this, &s](auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, VarDecl>) {
            n.resolved = type_of(n.type);
            expr(n.init);
            if (!assignable(n.init.type, n.resolved)) {
              error(codes::kType, n.init.span,
                    "cannot initialize " + show(n.resolved) + " '" + n.name + "' with " + show(n.init.type));
            }
            if (name_visible(n.name)) {
              error(codes::kType, n.name_span, "'" + n.name + "' is already declared in this method");
            }
            scopes_.back()[n.name] = n.resolved;
          } else if constexpr (std::is_same_v<T, Assign>) {
            expr(n.target);
            expr(n.value);
            assignment_target(n.target);
            if (!assignable(n.value.type, n.target.type)) {
              error(codes::kType, n.value.span, "cannot assign " + show(n.value.type) + " to " + show(n.target.type));
            }
          } else if constexpr (std::is_same_v<T, If>) {
            expr(n.cond);
            require(n.cond, Kind::kBool, "condition");
            block(n.then_block);
            if (n.else_block) block(*n.else_block);
          } else if constexpr (std::is_same_v<T, While>) {
            expr(n.cond);
            require(n.cond, Kind::kBool, "condition");
            block(n.body);
          } else if constexpr (std::is_same_v<T, CallStmt>) {
            invocation(n.call, false, s.span);
          } else if constexpr (std::is_same_v<T, SendStmt>) {
            invocation(n.call, true, s.span);
          } else if constexpr (std::is_same_v<T, Throw>) {
            expr(n.message);
            require(n.message, Kind::kStr, "thrown value");
          } else if constexpr (std::is_same_v<T, Print>) {
            expr(n.value);
          } else if constexpr (std::is_same_v<T, Block>) {
            block(n);
          }
        },
        s.node);
  }

  void assignment_target(const Expr& target) {
    if (const auto* name = std::get_if<NameRef>(&target.node)) {
      if (name->kind == NameKind::kParam && current().params[name->slot].is_final) {
        error(codes::kType, target.span, "cannot assign to final parameter '" + name->name + "'");
      }
      if (name->kind == NameKind::kBinder) {
        error(codes::kType, target.span, "cannot assign to catch binder '" + name->name + "'");
      }
    } else if (const auto* get = std::get_if<FieldGet>(&target.node)) {
      if (get->object->type.kind == Kind::kError) {
        error(codes::kType, target.span, "ContinuityError members are read-only");
      }
    }
  }

  void invocation(Invocation& inv, bool is_send, Span stmt_span) {
    for (auto& a : inv.args) expr(a);
    std::optional<MethodRef> target;
    if (inv.receiver) {
      Expr& recv = **inv.receiver;
      expr(recv);
      if (recv.type.kind == Kind::kModule) {
        const int idx = prog_.modules[recv.type.module].find_method(inv.method);
        if (idx >= 0) {
          target = MethodRef{recv.type.module, idx};
        } else {
          error(codes::kUnresolved, inv.method_span,
                "module '" + prog_.modules[recv.type.module].name + "' has no method '" + inv.method + "'");
        }
      } else if (recv.type.kind != Kind::kUnknown) {
        error(codes::kType, recv.span, "cannot invoke '" + inv.method + "' on a value of type " + show(recv.type));
      }
    } else {
      target = lookup_method(prog_, module_, inv.method);
      if (!target) error(codes::kUnresolved, inv.method_span, "unknown or ambiguous method '" + inv.method + "'");
    }
    if (!target) return;
    inv.target = *target;
    const MethodDecl& callee = prog_.method(*target);

    const std::size_t written = inv.args.size();
    if (inv.receiver && callee.params.size() == written + 1) {
      inv.receiver_is_arg = true;
    } else if (callee.params.size() != written) {
      error(codes::kType, inv.method_span,
            "'" + callee.name + "' takes " + std::to_string(callee.params.size()) + " argument(s), given " +
                std::to_string(written + (inv.receiver ? 1 : 0)));
      return;
    }

    for (std::size_t i = 0; i < callee.params.size(); ++i) {
      const Expr& arg = inv.argument(i);
      const Param& p = callee.params[i];
      if (p.is_required && std::holds_alternative<NullLit>(arg.node)) {
        error(codes::kRequiredNull, arg.span, "null passed to required parameter '" + p.name + "' of '" + callee.name + "'");
      } else if (!assignable(arg.type, p.resolved)) {
        error(codes::kType, arg.span,
              "argument " + std::to_string(i + 1) + " of '" + callee.name + "' must be " + show(p.resolved) +
                  ", found " + show(arg.type));
      }
    }

    if (!is_send) {
      if (callee.is_event()) {
        error(codes::kEventCalled, inv.method_span,
              "event method '" + callee.name + "' can only be invoked via send");
      }
      return;
    }
    for (const auto& c : callee.sends) {
      if (!lookup_method(prog_, module_, c.target_name)) {
        error(codes::kUnresolved, stmt_span,
              "'" + callee.name + "' commits to send '" + c.target_name + "', which does not resolve here");
      }
    }
    for (auto& site : prog_.expect_sites) {
      if (site.sender == method_ && site.span.begin == stmt_span.begin && site.span.end == stmt_span.end) {
        site.callee_ref = *target;
      }
    }
  }

  void expr(Expr& e) {
    e.type = std::visit(
        [this, &e](auto& n) -> Type {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, IntLit>) {
            return Type::of(Kind::kInt);
          } else if constexpr (std::is_same_v<T, BoolLit>) {
            return Type::of(Kind::kBool);
          } else if constexpr (std::is_same_v<T, StrLit>) {
            return Type::of(Kind::kStr);
          } else if constexpr (std::is_same_v<T, NullLit>) {
            return Type::of(Kind::kNull);
          } else if constexpr (std::is_same_v<T, NameRef>) {
            return name(n, e.span);
          } else if constexpr (std::is_same_v<T, FieldGet>) {
            expr(*n.object);
            const Type obj = n.object->type;
            if (obj.kind == Kind::kModule) {
              const auto& mod = prog_.modules[obj.module];
              n.field_index = mod.find_field(n.field);
              if (n.field_index >= 0) return mod.fields[n.field_index].resolved;
              error(codes::kUnresolved, e.span, "module '" + mod.name + "' has no field '" + n.field + "'");
            } else if (obj.kind == Kind::kError) {
              if (n.field == "message" || n.field == "cause") return Type::of(Kind::kStr);
              error(codes::kUnresolved, e.span, "ContinuityError has no member '" + n.field + "'");
            } else if (obj.kind != Kind::kUnknown) {
              error(codes::kType, e.span, "cannot read field '" + n.field + "' of " + show(obj));
            }
            return Type::unknown();
          } else if constexpr (std::is_same_v<T, NewInstance>) {
            n.module_index = prog_.find_module(n.module);
            if (n.module_index >= 0) return Type::module_ref(n.module_index);
            error(codes::kUnresolved, e.span, "unknown module '" + n.module + "'");
            return Type::unknown();
          } else if constexpr (std::is_same_v<T, Unary>) {
            expr(*n.operand);
            if (n.op == UnaryOp::kNeg) {
              require(*n.operand, Kind::kInt, "operand of '-'");
              return Type::of(Kind::kInt);
            }
            require(*n.operand, Kind::kBool, "operand of '!'");
            return Type::of(Kind::kBool);
          } else {
            expr(*n.lhs);
            expr(*n.rhs);
            return binary(n, e.span);
          }
        },
        e.node);
  }

  Type name(NameRef& n, Span span) {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      if (auto found = it->find(n.name); found != it->end()) {
        n.kind = NameKind::kLocal;
        return found->second;
      }
    }
    const auto& ps = current().params;
    for (std::size_t i = 0; i < ps.size(); ++i) {
      if (ps[i].name == n.name) {
        n.kind = NameKind::kParam;
        n.slot = static_cast<int>(i);
        return ps[i].resolved;
      }
    }
    if (binder_ && *binder_ == n.name) {
      n.kind = NameKind::kBinder;
      n.slot = -1;
      return Type::of(Kind::kError);
    }
    const auto& mod = prog_.modules[module_];
    const int field = mod.find_field(n.name);
    if (field >= 0) {
      n.kind = NameKind::kField;
      n.slot = field;
      return mod.fields[field].resolved;
    }
    error(codes::kUnresolved, span, "unknown name '" + n.name + "'");
    return Type::unknown();
  }

  Type binary(const Binary& b, Span span) {
    const Type l = b.lhs->type;
    const Type r = b.rhs->type;
    const bool unknown = l.kind == Kind::kUnknown || r.kind == Kind::kUnknown;
    switch (b.op) {
      case BinaryOp::kAdd:
        if (l.kind == Kind::kStr || r.kind == Kind::kStr) return Type::of(Kind::kStr);
        [[fallthrough]];
      case BinaryOp::kSub: case BinaryOp::kMul: case BinaryOp::kDiv: case BinaryOp::kMod:
        require(*b.lhs, Kind::kInt, "arithmetic operand");
        require(*b.rhs, Kind::kInt, "arithmetic operand");
        return Type::of(Kind::kInt);
      case BinaryOp::kLt: case BinaryOp::kLe: case BinaryOp::kGt: case BinaryOp::kGe:
        require(*b.lhs, Kind::kInt, "comparison operand");
        require(*b.rhs, Kind::kInt, "comparison operand");
        return Type::of(Kind::kBool);
      case BinaryOp::kEq: case BinaryOp::kNe:
        if (!unknown && !assignable(l, r) && !assignable(r, l)) {
          error(codes::kType, span, "cannot compare " + show(l) + " with " + show(r));
        }
        return Type::of(Kind::kBool);
      case BinaryOp::kAnd: case BinaryOp::kOr:
        require(*b.lhs, Kind::kBool, "logical operand");
        require(*b.rhs, Kind::kBool, "logical operand");
        return Type::of(Kind::kBool);
    }
    return Type::unknown();
  }

  SourceProgram& prog_;
  std::vector<Diagnostic>& errors_;
  int module_ = -1;
  MethodRef method_;
  std::vector<std::map<std::string, Type>> scopes_;
  std::optional<std::string> binder_;
};

}  // namespace

ResolveResult resolve_and_typecheck(SourceProgram program) {
  ResolveResult result;
  Resolver(program, result.errors).run();
  result.resolved.program = std::move(program);
  return result;
}

}  // namespace continuette
