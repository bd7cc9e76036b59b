#include "continuette/printer.hpp"

#include <sstream>

namespace continuette {
namespace {

int precedence(BinaryOp op) {
  switch (op) {
    case BinaryOp::kOr: return 1;
    case BinaryOp::kAnd: return 2;
    case BinaryOp::kEq: case BinaryOp::kNe: return 3;
    case BinaryOp::kLt: case BinaryOp::kLe: case BinaryOp::kGt: case BinaryOp::kGe: return 4;
    case BinaryOp::kAdd: case BinaryOp::kSub: return 5;
    case BinaryOp::kMul: case BinaryOp::kDiv: case BinaryOp::kMod: return 6;
  }
  return 0;
}

constexpr int kUnaryPrecedence = 7;

std::string_view op_text(BinaryOp op) {
  switch (op) {
    case BinaryOp::kAdd: return "+";
    case BinaryOp::kSub: return "-";
    case BinaryOp::kMul: return "*";
    case BinaryOp::kDiv: return "/";
    case BinaryOp::kMod: return "%";
    case BinaryOp::kLt: return "<";
    case BinaryOp::kLe: return "<=";
    case BinaryOp::kGt: return ">";
    case BinaryOp::kGe: return ">=";
    case BinaryOp::kEq: return "==";
    case BinaryOp::kNe: return "!=";
    case BinaryOp::kAnd: return "&&";
    case BinaryOp::kOr: return "||";
  }
  return "?";
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out + "\"";
}

int expr_precedence(const Expr& e) {
  if (const auto* b = std::get_if<Binary>(&e.node)) return precedence(b->op);
  if (std::holds_alternative<Unary>(e.node)) return kUnaryPrecedence;
  return 8;
}

std::string expr_text(const Expr& e);

std::string wrapped(const Expr& e, int min_prec) {
  std::string s = expr_text(e);
  return expr_precedence(e) < min_prec ? "(" + s + ")" : s;
}

std::string expr_text(const Expr& e) {
  return std::visit(
      [](const auto& n) -> std::string {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, IntLit>) {
          return std::to_string(n.value);
        } else if constexpr (std::is_same_v<T, BoolLit>) {
          return n.value ? "true" : "false";
        } else if constexpr (std::is_same_v<T, StrLit>) {
          return quote(n.value);
        } else if constexpr (std::is_same_v<T, NullLit>) {
          return "null";
        } else if constexpr (std::is_same_v<T, NameRef>) {
          return n.name;
        } else if constexpr (std::is_same_v<T, FieldGet>) {
          return wrapped(*n.object, 8) + "." + n.field;
        } else if constexpr (std::is_same_v<T, NewInstance>) {
          return "new " + n.module + "()";
        } else if constexpr (std::is_same_v<T, Unary>) {
          return std::string(n.op == UnaryOp::kNeg ? "-" : "!") + wrapped(*n.operand, kUnaryPrecedence);
        } else {
          const int p = precedence(n.op);
          return wrapped(*n.lhs, p) + " " + std::string(op_text(n.op)) + " " + wrapped(*n.rhs, p + 1);
        }
      },
      e.node);
}

std::string params_text(const std::vector<Param>& params) {
  std::string out = "(";
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (i) out += ", ";
    if (params[i].is_final) out += "final ";
    if (params[i].is_required) out += "required ";
    out += params[i].type.name + " " + params[i].name;
  }
  return out + ")";
}

std::string invocation_text(const Invocation& inv) {
  std::string out;
  if (inv.receiver) out += wrapped(**inv.receiver, 8) + ".";
  out += inv.method + "(";
  for (std::size_t i = 0; i < inv.args.size(); ++i) {
    if (i) out += ", ";
    out += expr_text(inv.args[i]);
  }
  return out + ")";
}

class Printer {
 public:
  std::string run(const SourceProgram& prog) {
    for (std::size_t i = 0; i < prog.modules.size(); ++i) {
      if (i) out_ << "\n";
      module(prog.modules[i]);
    }
    return out_.str();
  }

 private:
  void indent() { out_ << std::string(static_cast<std::size_t>(depth_) * 2, ' '); }

  void module(const ModuleDecl& m) {
    out_ << "module " << m.name << " {\n";
    ++depth_;
    for (const auto& f : m.fields) {
      indent();
      out_ << f.type.name << " " << f.name;
      if (f.init) out_ << " = " << expr_text(*f.init);
      out_ << ";\n";
    }
    for (const auto& meth : m.methods) method(meth);
    --depth_;
    out_ << "}\n";
  }

  void method(const MethodDecl& m) {
    indent();
    out_ << (m.is_event() ? "event " : "void ") << m.name << params_text(m.params);
    for (std::size_t i = 0; i < m.sends.size(); ++i) {
      out_ << (i ? ", " : " sends ") << m.sends[i].target_name << params_text(m.sends[i].params);
    }
    out_ << " ";
    block(m.body);
    if (m.catch_clause) {
      out_ << " catch (ContinuityError " << m.catch_clause->binder << ") ";
      block(m.catch_clause->body);
    }
    out_ << "\n";
  }

  void block(const Block& b) {
    out_ << "{\n";
    ++depth_;
    for (const auto& s : b.stmts) {
      indent();
      stmt(s);
      out_ << "\n";
    }
    --depth_;
    indent();
    out_ << "}";
  }

  void stmt(const Stmt& s) {
    std::visit(
        [this](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, VarDecl>) {
            out_ << n.type.name << " " << n.name << " = " << expr_text(n.init) << ";";
          } else if constexpr (std::is_same_v<T, Assign>) {
            out_ << expr_text(n.target) << " = " << expr_text(n.value) << ";";
          } else if constexpr (std::is_same_v<T, If>) {
            out_ << "if (" << expr_text(n.cond) << ") ";
            block(n.then_block);
            if (n.else_block) {
              out_ << " else ";
              block(*n.else_block);
            }
          } else if constexpr (std::is_same_v<T, While>) {
            out_ << "while (" << expr_text(n.cond) << ") ";
            block(n.body);
          } else if constexpr (std::is_same_v<T, CallStmt>) {
            out_ << invocation_text(n.call) << ";";
          } else if constexpr (std::is_same_v<T, SendStmt>) {
            out_ << "send " << invocation_text(n.call);
            if (n.expect) {
              out_ << " expect " << n.expect->name << params_text(n.expect->params) << " ";
              block(n.expect->body);
            }
            out_ << ";";
          } else if constexpr (std::is_same_v<T, Return>) {
            out_ << "return;";
          } else if constexpr (std::is_same_v<T, Throw>) {
            out_ << "throw " << expr_text(n.message) << ";";
          } else if constexpr (std::is_same_v<T, Print>) {
            out_ << "print " << expr_text(n.value) << ";";
          } else {
            block(n);
          }
        },
        s.node);
  }

  std::ostringstream out_;
  int depth_ = 0;
};

// Structural dump: every node kind and payload, no spans or annotations.

void dump_expr(std::ostream& os, const Expr& e);

void dump_params(std::ostream& os, const std::vector<Param>& params) {
  os << "(params";
  for (const auto& p : params) {
    os << " (" << (p.is_final ? "final " : "") << (p.is_required ? "required " : "") << p.type.name << " " << p.name << ")";
  }
  os << ")";
}

void dump_invocation(std::ostream& os, const Invocation& inv) {
  os << "(invoke " << inv.method;
  if (inv.receiver) {
    os << " (recv ";
    dump_expr(os, **inv.receiver);
    os << ")";
  }
  for (const auto& a : inv.args) {
    os << " ";
    dump_expr(os, a);
  }
  os << ")";
}

void dump_expr(std::ostream& os, const Expr& e) {
  std::visit(
      [&os](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, IntLit>) os << "(int " << n.value << ")";
        else if constexpr (std::is_same_v<T, BoolLit>) os << "(bool " << n.value << ")";
        else if constexpr (std::is_same_v<T, StrLit>) os << "(str " << quote(n.value) << ")";
        else if constexpr (std::is_same_v<T, NullLit>) os << "(null)";
        else if constexpr (std::is_same_v<T, NameRef>) os << "(name " << n.name << ")";
        else if constexpr (std::is_same_v<T, FieldGet>) {
          os << "(get ";
          dump_expr(os, *n.object);
          os << " " << n.field << ")";
        } else if constexpr (std::is_same_v<T, NewInstance>) os << "(new " << n.module << ")";
        else if constexpr (std::is_same_v<T, Unary>) {
          os << "(" << (n.op == UnaryOp::kNeg ? "neg " : "not ");
          dump_expr(os, *n.operand);
          os << ")";
        } else {
          os << "(" << op_text(n.op) << " ";
          dump_expr(os, *n.lhs);
          os << " ";
          dump_expr(os, *n.rhs);
          os << ")";
        }
      },
      e.node);
}

void dump_block(std::ostream& os, const Block& b);

void dump_stmt(std::ostream& os, const Stmt& s) {
  std::visit(
      [&os](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, VarDecl>) {
          os << "(var " << n.type.name << " " << n.name << " ";
          dump_expr(os, n.init);
          os << ")";
        } else if constexpr (std::is_same_v<T, Assign>) {
          os << "(assign ";
          dump_expr(os, n.target);
          os << " ";
          dump_expr(os, n.value);
          os << ")";
        } else if constexpr (std::is_same_v<T, If>) {
          os << "(if ";
          dump_expr(os, n.cond);
          os << " ";
          dump_block(os, n.then_block);
          if (n.else_block) {
            os << " ";
            dump_block(os, *n.else_block);
          }
          os << ")";
        } else if constexpr (std::is_same_v<T, While>) {
          os << "(while ";
          dump_expr(os, n.cond);
          os << " ";
          dump_block(os, n.body);
          os << ")";
        } else if constexpr (std::is_same_v<T, CallStmt>) {
          os << "(call ";
          dump_invocation(os, n.call);
          os << ")";
        } else if constexpr (std::is_same_v<T, SendStmt>) {
          os << "(send ";
          dump_invocation(os, n.call);
          if (n.expect) {
            os << " (expect " << n.expect->name << " ";
            dump_params(os, n.expect->params);
            os << " ";
            dump_block(os, n.expect->body);
            os << ")";
          }
          os << ")";
        } else if constexpr (std::is_same_v<T, Return>) {
          os << "(return)";
        } else if constexpr (std::is_same_v<T, Throw>) {
          os << "(throw ";
          dump_expr(os, n.message);
          os << ")";
        } else if constexpr (std::is_same_v<T, Print>) {
          os << "(print ";
          dump_expr(os, n.value);
          os << ")";
        } else {
          dump_block(os, n);
        }
      },
      s.node);
}

void dump_block(std::ostream& os, const Block& b) {
  os << "(block";
  for (const auto& s : b.stmts) {
    os << " ";
    dump_stmt(os, s);
  }
  os << ")";
}

}  // namespace

std::string pretty_print(const SourceProgram& program) { return Printer().run(program); }

std::string structural_dump(const SourceProgram& program) {
  std::ostringstream os;
  for (const auto& m : program.modules) {
    os << "(module " << m.name;
    for (const auto& f : m.fields) {
      os << " (field " << f.type.name << " " << f.name;
      if (f.init) {
        os << " ";
        dump_expr(os, *f.init);
      }
      os << ")";
    }
    for (const auto& meth : m.methods) {
      os << " (" << (meth.is_event() ? "event " : "void ") << meth.name << " ";
      dump_params(os, meth.params);
      for (const auto& c : meth.sends) {
        os << " (sends " << c.target_name << " ";
        dump_params(os, c.params);
        os << ")";
      }
      os << " ";
      dump_block(os, meth.body);
      if (meth.catch_clause) {
        os << " (catch " << meth.catch_clause->binder << " ";
        dump_block(os, meth.catch_clause->body);
        os << ")";
      }
      os << ")";
    }
    os << ")\n";
  }
  return os.str();
}

}  // namespace continuette
