#include "continuette/parser.hpp"

#include <initializer_list>

namespace continuette {
namespace {

constexpr int kMaxNesting = 200;

class Parser {
 public:
  explicit Parser(const std::vector<Token>& tokens) : toks_(tokens) {
    if (toks_.empty() || toks_.back().kind != TokenKind::kEof) {
      throw ParseError({}, "token stream must end with end of input", {});
    }
  }

  SourceProgram program() {
    SourceProgram prog;
    while (!at(TokenKind::kEof)) {
      if (!at(TokenKind::kModule)) fail({"kw:module", "end of input"});
      prog.modules.push_back(module());
    }
    return prog;
  }

 private:
  // RAII nesting counter; keeps recursion bounded on adversarial input.
  class Nest {
   public:
    explicit Nest(Parser& p) : p_(p) {
      if (++p_.depth_ > kMaxNesting) throw ParseError(p_.peek().span, "nesting too deep", {});
    }
    ~Nest() { --p_.depth_; }
    Nest(const Nest&) = delete;
    Nest& operator=(const Nest&) = delete;

   private:
    Parser& p_;
  };

  const Token& peek(std::size_t ahead = 0) const {
    const std::size_t i = pos_ + ahead;
    return i < toks_.size() ? toks_[i] : toks_.back();
  }
  bool at(TokenKind k, std::size_t ahead = 0) const { return peek(ahead).kind == k; }
  const Token& advance() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  Span prev_span() const { return pos_ > 0 ? toks_[pos_ - 1].span : toks_[0].span; }

  bool accept(TokenKind k) {
    if (!at(k)) return false;
    advance();
    return true;
  }

  [[noreturn]] void fail(std::initializer_list<std::string_view> expected) {
    std::vector<std::string> exp(expected.begin(), expected.end());
    std::string msg = "expected ";
    for (std::size_t i = 0; i < exp.size(); ++i) {
      if (i) msg += i + 1 == exp.size() ? " or " : ", ";
      msg += exp[i];
    }
    msg += ", found ";
    msg += peek().kind == TokenKind::kEof ? "end of input" : "'" + peek().text + "'";
    throw ParseError(peek().span, msg, std::move(exp));
  }

  const Token& expect(TokenKind k) {
    if (!at(k)) fail({token_kind_name(k)});
    return advance();
  }

  ModuleDecl module() {
    ModuleDecl mod;
    const Span start = expect(TokenKind::kModule).span;
    const Token& name = expect(TokenKind::kIdent);
    if (name.text == kContinuityErrorName) {
      throw ParseError(name.span, "ContinuityError is a reserved type name", {"ident"});
    }
    mod.name = name.text;
    mod.name_span = name.span;
    expect(TokenKind::kLBrace);
    while (!at(TokenKind::kRBrace)) {
      if (at(TokenKind::kVoid) || at(TokenKind::kEvent)) {
        mod.methods.push_back(method());
      } else if (at(TokenKind::kIdent)) {
        mod.fields.push_back(field());
      } else {
        fail({"kw:void", "kw:event", "type name", "rbrace"});
      }
    }
    mod.span = Span::cover(start, expect(TokenKind::kRBrace).span);
    return mod;
  }

  TypeName type_name() {
    const Token& t = expect(TokenKind::kIdent);
    return {t.text, t.span};
  }

  FieldDecl field() {
    FieldDecl f;
    f.type = type_name();
    const Token& name = expect(TokenKind::kIdent);
    f.name = name.text;
    f.name_span = name.span;
    if (accept(TokenKind::kAssign)) f.init = literal();
    expect(TokenKind::kSemi);
    return f;
  }

  Expr literal() {
    const Span start = peek().span;
    if (at(TokenKind::kMinus) && at(TokenKind::kInt, 1)) {
      advance();
      const Token& t = advance();
      return Expr{Span::cover(start, t.span), IntLit{-t.int_value}, {}};
    }
    switch (peek().kind) {
      case TokenKind::kInt: return Expr{start, IntLit{advance().int_value}, {}};
      case TokenKind::kString: return Expr{start, StrLit{advance().text}, {}};
      case TokenKind::kTrue: advance(); return Expr{start, BoolLit{true}, {}};
      case TokenKind::kFalse: advance(); return Expr{start, BoolLit{false}, {}};
      case TokenKind::kNull: advance(); return Expr{start, NullLit{}, {}};
      default: fail({"int", "string", "kw:true", "kw:false", "kw:null"});
    }
  }

  Param param() {
    Param p;
    const Span start = peek().span;
    if (accept(TokenKind::kFinal)) p.is_final = true;
    if (accept(TokenKind::kRequired)) p.is_required = true;
    p.type = type_name();
    p.name = expect(TokenKind::kIdent).text;
    p.span = Span::cover(start, prev_span());
    return p;
  }

  std::vector<Param> param_list() {
    std::vector<Param> params;
    expect(TokenKind::kLParen);
    if (!at(TokenKind::kRParen)) {
      params.push_back(param());
      while (accept(TokenKind::kComma)) params.push_back(param());
    }
    expect(TokenKind::kRParen);
    return params;
  }

  MethodDecl method() {
    MethodDecl m;
    const Span start = peek().span;
    m.kind = advance().kind == TokenKind::kEvent ? MethodKind::kEvent : MethodKind::kVoid;
    const Token& name = expect(TokenKind::kIdent);
    m.name = name.text;
    m.name_span = name.span;
    m.params = param_list();
    if (accept(TokenKind::kSends)) {
      do {
        CommitmentSpec c;
        const Token& target = expect(TokenKind::kIdent);
        c.target_name = target.text;
        c.params = param_list();
        c.span = Span::cover(target.span, prev_span());
        m.sends.push_back(std::move(c));
      } while (accept(TokenKind::kComma));
    }
    m.body = block();
    if (at(TokenKind::kCatch)) {
      if (m.kind != MethodKind::kEvent) {
        throw ParseError(peek().span, "catch clause is only allowed on event methods", {"kw:void", "kw:event", "rbrace"});
      }
      m.catch_clause = catch_clause();
    }
    m.span = Span::cover(start, prev_span());
    return m;
  }

  CatchClause catch_clause() {
    expect(TokenKind::kCatch);
    expect(TokenKind::kLParen);
    const Token& type = expect(TokenKind::kIdent);
    if (type.text != kContinuityErrorName) {
      throw ParseError(type.span, "catch parameter must have type ContinuityError", {"ContinuityError"});
    }
    const Token& binder = expect(TokenKind::kIdent);
    expect(TokenKind::kRParen);
    return CatchClause{binder.text, binder.span, block()};
  }

  Block block() {
    Nest nest(*this);
    Block b;
    const Span start = expect(TokenKind::kLBrace).span;
    while (!at(TokenKind::kRBrace)) {
      if (at(TokenKind::kEof)) fail({"rbrace"});
      b.stmts.push_back(statement());
    }
    b.span = Span::cover(start, expect(TokenKind::kRBrace).span);
    return b;
  }

  Stmt statement() {
    const Span start = peek().span;
    auto finish = [&](auto node) { return Stmt{Span::cover(start, prev_span()), std::move(node)}; };
    switch (peek().kind) {
      case TokenKind::kLBrace: {
        Block b = block();
        return finish(std::move(b));
      }
      case TokenKind::kIf: {
        advance();
        expect(TokenKind::kLParen);
        Expr cond = expression();
        expect(TokenKind::kRParen);
        If node{std::move(cond), block(), std::nullopt};
        if (accept(TokenKind::kElse)) {
          if (at(TokenKind::kIf)) {
            Nest nest(*this);
            Stmt nested = statement();
            const Span span = nested.span;
            Block chained;
            chained.span = span;
            chained.stmts.push_back(std::move(nested));
            node.else_block = std::move(chained);
          } else {
            node.else_block = block();
          }
        }
        return finish(std::move(node));
      }
      case TokenKind::kWhile: {
        advance();
        expect(TokenKind::kLParen);
        Expr cond = expression();
        expect(TokenKind::kRParen);
        While node{std::move(cond), block()};
        return finish(std::move(node));
      }
      case TokenKind::kReturn:
        advance();
        expect(TokenKind::kSemi);
        return finish(Return{});
      case TokenKind::kThrow: {
        advance();
        Throw node{expression()};
        expect(TokenKind::kSemi);
        return finish(std::move(node));
      }
      case TokenKind::kPrint: {
        advance();
        Print node{expression()};
        expect(TokenKind::kSemi);
        return finish(std::move(node));
      }
      case TokenKind::kSend: {
        advance();
        SendStmt node{invocation(postfix()), std::nullopt};
        if (accept(TokenKind::kExpect)) {
          ExpectArm arm;
          const Token& name = expect(TokenKind::kIdent);
          arm.name = name.text;
          arm.name_span = name.span;
          arm.params = param_list();
          arm.body = block();
          if (at(TokenKind::kCatch)) {
            throw ParseError(peek().span, "an expect arm cannot have a catch clause; declare the event on its own",
                             {"semi", "rbrace"});
          }
          node.expect = std::move(arm);
          accept(TokenKind::kSemi);
        } else {
          expect(TokenKind::kSemi);
        }
        return finish(std::move(node));
      }
      case TokenKind::kIdent:
        if (at(TokenKind::kIdent, 1)) {
          VarDecl decl;
          decl.type = type_name();
          const Token& name = expect(TokenKind::kIdent);
          decl.name = name.text;
          decl.name_span = name.span;
          expect(TokenKind::kAssign);
          decl.init = expression();
          expect(TokenKind::kSemi);
          return finish(std::move(decl));
        }
        break;
      default:
        break;
    }
    if (!starts_expression()) {
      fail({"statement"});
    }
    Expr target = postfix();
    if (at(TokenKind::kLParen)) {
      CallStmt node{invocation(std::move(target))};
      expect(TokenKind::kSemi);
      return finish(std::move(node));
    }
    if (accept(TokenKind::kAssign)) {
      if (!std::holds_alternative<NameRef>(target.node) && !std::holds_alternative<FieldGet>(target.node)) {
        throw ParseError(target.span, "left side of assignment must be a name or field", {"ident"});
      }
      Assign node{std::move(target), expression()};
      expect(TokenKind::kSemi);
      return finish(std::move(node));
    }
    fail({"lparen", "'='"});
  }

  bool starts_expression() const {
    switch (peek().kind) {
      case TokenKind::kIdent: case TokenKind::kInt: case TokenKind::kString: case TokenKind::kTrue:
      case TokenKind::kFalse: case TokenKind::kNull: case TokenKind::kNew: case TokenKind::kLParen:
        return true;
      default:
        return false;
    }
  }

  Invocation invocation(Expr callee) {
    Invocation inv;
    if (auto* name = std::get_if<NameRef>(&callee.node)) {
      inv.method = name->name;
      inv.method_span = callee.span;
    } else if (auto* get = std::get_if<FieldGet>(&callee.node)) {
      inv.method = get->field;
      inv.method_span = {static_cast<std::uint32_t>(callee.span.end - get->field.size()), callee.span.end};
      inv.receiver = Box<Expr>(std::move(*get->object));
    } else {
      throw ParseError(callee.span, "only a method name can be invoked", {"ident"});
    }
    expect(TokenKind::kLParen);
    if (!at(TokenKind::kRParen)) {
      inv.args.push_back(expression());
      while (accept(TokenKind::kComma)) inv.args.push_back(expression());
    }
    expect(TokenKind::kRParen);
    return inv;
  }

  // Expressions, lowest precedence first.

  Expr expression() {
    Nest nest(*this);
    return logical_or();
  }

  Expr binary(Expr lhs, BinaryOp op, Expr rhs) {
    const Span span = Span::cover(lhs.span, rhs.span);
    return Expr{span, Binary{op, Box<Expr>(std::move(lhs)), Box<Expr>(std::move(rhs))}, {}};
  }

  Expr logical_or() {
    Expr lhs = logical_and();
    while (accept(TokenKind::kOrOr)) lhs = binary(std::move(lhs), BinaryOp::kOr, logical_and());
    return lhs;
  }

  Expr logical_and() {
    Expr lhs = equality();
    while (accept(TokenKind::kAndAnd)) lhs = binary(std::move(lhs), BinaryOp::kAnd, equality());
    return lhs;
  }

  Expr equality() {
    Expr lhs = relational();
    while (true) {
      if (accept(TokenKind::kEq)) lhs = binary(std::move(lhs), BinaryOp::kEq, relational());
      else if (accept(TokenKind::kNe)) lhs = binary(std::move(lhs), BinaryOp::kNe, relational());
      else return lhs;
    }
  }

  Expr relational() {
    Expr lhs = additive();
    while (true) {
      if (accept(TokenKind::kLt)) lhs = binary(std::move(lhs), BinaryOp::kLt, additive());
      else if (accept(TokenKind::kLe)) lhs = binary(std::move(lhs), BinaryOp::kLe, additive());
      else if (accept(TokenKind::kGt)) lhs = binary(std::move(lhs), BinaryOp::kGt, additive());
      else if (accept(TokenKind::kGe)) lhs = binary(std::move(lhs), BinaryOp::kGe, additive());
      else return lhs;
    }
  }

  Expr additive() {
    Expr lhs = multiplicative();
    while (true) {
      if (accept(TokenKind::kPlus)) lhs = binary(std::move(lhs), BinaryOp::kAdd, multiplicative());
      else if (accept(TokenKind::kMinus)) lhs = binary(std::move(lhs), BinaryOp::kSub, multiplicative());
      else return lhs;
    }
  }

  Expr multiplicative() {
    Expr lhs = unary();
    while (true) {
      if (accept(TokenKind::kStar)) lhs = binary(std::move(lhs), BinaryOp::kMul, unary());
      else if (accept(TokenKind::kSlash)) lhs = binary(std::move(lhs), BinaryOp::kDiv, unary());
      else if (accept(TokenKind::kPercent)) lhs = binary(std::move(lhs), BinaryOp::kMod, unary());
      else return lhs;
    }
  }

  Expr unary() {
    Nest nest(*this);
    const Span start = peek().span;
    if (accept(TokenKind::kMinus)) {
      Expr operand = unary();
      const Span span = Span::cover(start, operand.span);
      return Expr{span, Unary{UnaryOp::kNeg, Box<Expr>(std::move(operand))}, {}};
    }
    if (accept(TokenKind::kBang)) {
      Expr operand = unary();
      const Span span = Span::cover(start, operand.span);
      return Expr{span, Unary{UnaryOp::kNot, Box<Expr>(std::move(operand))}, {}};
    }
    return postfix();
  }

  Expr postfix() {
    Expr e = primary();
    while (at(TokenKind::kDot)) {
      advance();
      const Token& name = expect(TokenKind::kIdent);
      const Span span = Span::cover(e.span, name.span);
      e = Expr{span, FieldGet{Box<Expr>(std::move(e)), name.text}, {}};
    }
    return e;
  }

  Expr primary() {
    const Span start = peek().span;
    switch (peek().kind) {
      case TokenKind::kInt: return Expr{start, IntLit{advance().int_value}, {}};
      case TokenKind::kString: return Expr{start, StrLit{advance().text}, {}};
      case TokenKind::kTrue: advance(); return Expr{start, BoolLit{true}, {}};
      case TokenKind::kFalse: advance(); return Expr{start, BoolLit{false}, {}};
      case TokenKind::kNull: advance(); return Expr{start, NullLit{}, {}};
      case TokenKind::kIdent: return Expr{start, NameRef{advance().text}, {}};
      case TokenKind::kNew: {
        advance();
        const Token& name = expect(TokenKind::kIdent);
        expect(TokenKind::kLParen);
        expect(TokenKind::kRParen);
        return Expr{Span::cover(start, prev_span()), NewInstance{name.text}, {}};
      }
      case TokenKind::kLParen: {
        advance();
        Expr inner = expression();
        expect(TokenKind::kRParen);
        inner.span = Span::cover(start, prev_span());
        return inner;
      }
      default:
        fail({"expression"});
    }
  }

  const std::vector<Token>& toks_;
  std::size_t pos_ = 0;
  int depth_ = 0;
};

}  // namespace

SourceProgram parse(const std::vector<Token>& tokens) { return Parser(tokens).program(); }

SourceProgram parse_source(std::string_view source) { return parse(tokenize(source)); }

}  // namespace continuette
