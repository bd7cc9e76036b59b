#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "continuette/box.hpp"
#include "continuette/source.hpp"
#include "continuette/types.hpp"

namespace continuette {

// Annotation fields (marked "sema") are left at their defaults by the parser
// and filled in by resolve_and_typecheck.

/// Reference to a method by position: program.modules[module].methods[method].
struct MethodRef {
  int module = -1;
  int method = -1;

  bool valid() const { return module >= 0 && method >= 0; }
  friend bool operator==(const MethodRef&, const MethodRef&) = default;
};

struct TypeName {
  std::string name;
  Span span;
};

struct Param {
  std::string name;
  TypeName type;
  bool is_final = false;
  bool is_required = false;
  Span span;
  Type resolved;  // sema
};

struct Expr;

struct IntLit { std::int64_t value = 0; };
struct BoolLit { bool value = false; };
struct StrLit { std::string value; };
struct NullLit {};

enum class NameKind { kUnresolved, kLocal, kParam, kField, kBinder };

struct NameRef {
  std::string name;
  NameKind kind = NameKind::kUnresolved;  // sema
  int slot = -1;                          // sema: param index or field index
};

struct FieldGet {
  Box<Expr> object;
  std::string field;
  int field_index = -1;  // sema; -1 for ContinuityError members
};

struct NewInstance {
  std::string module;
  int module_index = -1;  // sema
};

enum class UnaryOp { kNeg, kNot };
enum class BinaryOp { kAdd, kSub, kMul, kDiv, kMod, kLt, kLe, kGt, kGe, kEq, kNe, kAnd, kOr };

struct Unary {
  UnaryOp op;
  Box<Expr> operand;
};

struct Binary {
  BinaryOp op;
  Box<Expr> lhs;
  Box<Expr> rhs;
};

struct Expr {
  Span span;
  std::variant<IntLit, BoolLit, StrLit, NullLit, NameRef, FieldGet, NewInstance, Unary, Binary> node;
  Type type;  // sema
};

struct Stmt;

struct Block {
  Span span;
  std::vector<Stmt> stmts;
};

/// `name(args)` or `receiver.name(args)`.
struct Invocation {
  std::optional<Box<Expr>> receiver;
  std::string method;
  Span method_span;
  std::vector<Expr> args;
  MethodRef target;              // sema
  bool receiver_is_arg = false;  // sema: receiver is prepended as argument 0

  std::size_t arity() const { return args.size() + (receiver_is_arg ? 1 : 0); }
  /// Argument at position i of the resolved parameter list.
  const Expr& argument(std::size_t i) const {
    if (receiver_is_arg) return i == 0 ? **receiver : args[i - 1];
    return args[i];
  }
};

struct VarDecl {
  TypeName type;
  std::string name;
  Span name_span;
  Expr init;
  Type resolved;  // sema
};

struct Assign {
  Expr target;  // NameRef or FieldGet
  Expr value;
};

struct If {
  Expr cond;
  Block then_block;
  std::optional<Block> else_block;
};

struct While {
  Expr cond;
  Block body;
};

struct CallStmt {
  Invocation call;
};

struct CatchClause {
  std::string binder;
  Span binder_span;
  Block body;
};

struct ExpectArm {
  std::string name;
  Span name_span;
  std::vector<Param> params;
  Block body;
};

struct SendStmt {
  Invocation call;
  std::optional<ExpectArm> expect;
};

struct Return {};

struct Throw {
  Expr message;
};

struct Print {
  Expr value;
};

struct Stmt {
  Span span;
  std::variant<VarDecl, Assign, If, While, CallStmt, SendStmt, Return, Throw, Print, Block> node;
};

/// One declared future obligation in a sends-clause.
struct CommitmentSpec {
  std::string target_name;
  Span span;
  std::vector<Param> params;
  MethodRef target;                  // sema
  std::vector<int> passthrough;      // sema: per clause param, index of the same-named enclosing param or -1
};

enum class MethodKind { kVoid, kEvent };

struct MethodDecl {
  MethodKind kind = MethodKind::kVoid;
  std::string name;
  Span name_span;
  Span span;
  std::vector<Param> params;
  std::vector<CommitmentSpec> sends;
  Block body;
  std::optional<CatchClause> catch_clause;
  bool lifted = false;  // produced from an expect arm

  bool is_event() const { return kind == MethodKind::kEvent; }
};

struct FieldDecl {
  TypeName type;
  std::string name;
  Span name_span;
  std::optional<Expr> init;  // literal only
  Type resolved;             // sema
};

struct ModuleDecl {
  std::string name;
  Span name_span;
  Span span;
  std::vector<FieldDecl> fields;
  std::vector<MethodDecl> methods;

  int find_method(std::string_view name) const;
  int find_field(std::string_view name) const;
};

/// Where an expect arm was lifted from; kept for the sends-conformance check.
struct ExpectSite {
  MethodRef sender;       // method containing the send (indices valid after desugaring)
  std::string callee;     // name of the invoked method
  std::string event;      // name of the lifted event
  Span span;              // the send statement
  MethodRef callee_ref;   // sema: resolved target of the send
};

struct SourceProgram {
  std::vector<ModuleDecl> modules;
  std::vector<ExpectSite> expect_sites;

  int find_module(std::string_view name) const;
  const MethodDecl& method(MethodRef ref) const { return modules[ref.module].methods[ref.method]; }
  MethodDecl& method(MethodRef ref) { return modules[ref.module].methods[ref.method]; }
  std::string qualified_name(MethodRef ref) const;
};

}  // namespace continuette
