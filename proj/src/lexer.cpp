#include "continuette/lexer.hpp"

#include <array>
#include <charconv>
#include <utility>

namespace continuette {
namespace {

constexpr std::array<std::pair<std::string_view, TokenKind>, 19> kKeywords{{
    {"module", TokenKind::kModule},     {"void", TokenKind::kVoid},     {"event", TokenKind::kEvent},
    {"sends", TokenKind::kSends},       {"send", TokenKind::kSend},     {"expect", TokenKind::kExpect},
    {"catch", TokenKind::kCatch},       {"final", TokenKind::kFinal},   {"required", TokenKind::kRequired},
    {"throw", TokenKind::kThrow},       {"return", TokenKind::kReturn}, {"new", TokenKind::kNew},
    {"if", TokenKind::kIf},             {"else", TokenKind::kElse},     {"while", TokenKind::kWhile},
    {"print", TokenKind::kPrint},       {"null", TokenKind::kNull},     {"true", TokenKind::kTrue},
    {"false", TokenKind::kFalse},
}};

bool is_ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_trivia();
      if (pos_ >= src_.size()) break;
      out.push_back(next());
    }
    const auto end = static_cast<std::uint32_t>(src_.size());
    out.push_back(Token{TokenKind::kEof, {end, end}, "", 0});
    return out;
  }

 private:
  void skip_trivia() {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
        ++pos_;
      } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  Span span_from(std::size_t begin) const {
    return {static_cast<std::uint32_t>(begin), static_cast<std::uint32_t>(pos_)};
  }

  Token make(TokenKind kind, std::size_t begin) {
    return Token{kind, span_from(begin), std::string(src_.substr(begin, pos_ - begin)), 0};
  }

  Token next() {
    const std::size_t begin = pos_;
    const char c = src_[pos_];
    if (is_ident_start(c)) {
      while (pos_ < src_.size() && (is_ident_start(src_[pos_]) || is_digit(src_[pos_]))) ++pos_;
      Token tok = make(TokenKind::kIdent, begin);
      for (const auto& [word, kind] : kKeywords) {
        if (tok.text == word) tok.kind = kind;
      }
      return tok;
    }
    if (is_digit(c)) {
      while (pos_ < src_.size() && is_digit(src_[pos_])) ++pos_;
      if (pos_ < src_.size() && is_ident_start(src_[pos_])) {
        throw LexError({static_cast<std::uint32_t>(pos_), static_cast<std::uint32_t>(pos_ + 1)},
                       "identifier character directly after integer literal");
      }
      Token tok = make(TokenKind::kInt, begin);
      const auto [ptr, ec] = std::from_chars(tok.text.data(), tok.text.data() + tok.text.size(), tok.int_value);
      if (ec != std::errc()) throw LexError(tok.span, "integer literal out of range: " + tok.text);
      return tok;
    }
    if (c == '"') return string_literal();

    ++pos_;
    auto two = [&](char second, TokenKind yes, TokenKind no) {
      if (pos_ < src_.size() && src_[pos_] == second) {
        ++pos_;
        return make(yes, begin);
      }
      return make(no, begin);
    };
    switch (c) {
      case '(': return make(TokenKind::kLParen, begin);
      case ')': return make(TokenKind::kRParen, begin);
      case '{': return make(TokenKind::kLBrace, begin);
      case '}': return make(TokenKind::kRBrace, begin);
      case ',': return make(TokenKind::kComma, begin);
      case ';': return make(TokenKind::kSemi, begin);
      case '.': return make(TokenKind::kDot, begin);
      case '+': return make(TokenKind::kPlus, begin);
      case '-': return make(TokenKind::kMinus, begin);
      case '*': return make(TokenKind::kStar, begin);
      case '/': return make(TokenKind::kSlash, begin);
      case '%': return make(TokenKind::kPercent, begin);
      case '=': return two('=', TokenKind::kEq, TokenKind::kAssign);
      case '!': return two('=', TokenKind::kNe, TokenKind::kBang);
      case '<': return two('=', TokenKind::kLe, TokenKind::kLt);
      case '>': return two('=', TokenKind::kGe, TokenKind::kGt);
      case '&':
        if (pos_ < src_.size() && src_[pos_] == '&') {
          ++pos_;
          return make(TokenKind::kAndAnd, begin);
        }
        break;
      case '|':
        if (pos_ < src_.size() && src_[pos_] == '|') {
          ++pos_;
          return make(TokenKind::kOrOr, begin);
        }
        break;
      default:
        break;
    }
    throw LexError({static_cast<std::uint32_t>(begin), static_cast<std::uint32_t>(begin + 1)},
                   "unrecognized character");
  }

  Token string_literal() {
    const std::size_t begin = pos_++;
    std::string value;
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (c == '"') {
        ++pos_;
        Token tok = make(TokenKind::kString, begin);
        tok.text = std::move(value);
        return tok;
      }
      if (c == '\n') break;
      if (c == '\\') {
        if (pos_ + 1 >= src_.size()) break;
        const char e = src_[pos_ + 1];
        switch (e) {
          case 'n': value += '\n'; break;
          case 't': value += '\t'; break;
          case '"': value += '"'; break;
          case '\\': value += '\\'; break;
          default:
            throw LexError({static_cast<std::uint32_t>(pos_), static_cast<std::uint32_t>(pos_ + 2)},
                           "unknown escape sequence");
        }
        pos_ += 2;
        continue;
      }
      value += c;
      ++pos_;
    }
    throw LexError({static_cast<std::uint32_t>(begin), static_cast<std::uint32_t>(begin + 1)},
                   "unterminated string literal");
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string_view token_kind_name(TokenKind kind) {
  switch (kind) {
    case TokenKind::kModule: return "kw:module";
    case TokenKind::kVoid: return "kw:void";
    case TokenKind::kEvent: return "kw:event";
    case TokenKind::kSends: return "kw:sends";
    case TokenKind::kSend: return "kw:send";
    case TokenKind::kExpect: return "kw:expect";
    case TokenKind::kCatch: return "kw:catch";
    case TokenKind::kFinal: return "kw:final";
    case TokenKind::kRequired: return "kw:required";
    case TokenKind::kThrow: return "kw:throw";
    case TokenKind::kReturn: return "kw:return";
    case TokenKind::kNew: return "kw:new";
    case TokenKind::kIf: return "kw:if";
    case TokenKind::kElse: return "kw:else";
    case TokenKind::kWhile: return "kw:while";
    case TokenKind::kPrint: return "kw:print";
    case TokenKind::kNull: return "kw:null";
    case TokenKind::kTrue: return "kw:true";
    case TokenKind::kFalse: return "kw:false";
    case TokenKind::kIdent: return "ident";
    case TokenKind::kInt: return "int";
    case TokenKind::kString: return "string";
    case TokenKind::kLParen: return "lparen";
    case TokenKind::kRParen: return "rparen";
    case TokenKind::kLBrace: return "lbrace";
    case TokenKind::kRBrace: return "rbrace";
    case TokenKind::kComma: return "comma";
    case TokenKind::kSemi: return "semi";
    case TokenKind::kDot: return "dot";
    case TokenKind::kAssign: return "'='";
    case TokenKind::kEq: return "'=='";
    case TokenKind::kNe: return "'!='";
    case TokenKind::kLt: return "'<'";
    case TokenKind::kLe: return "'<='";
    case TokenKind::kGt: return "'>'";
    case TokenKind::kGe: return "'>='";
    case TokenKind::kPlus: return "'+'";
    case TokenKind::kMinus: return "'-'";
    case TokenKind::kStar: return "'*'";
    case TokenKind::kSlash: return "'/'";
    case TokenKind::kPercent: return "'%'";
    case TokenKind::kAndAnd: return "'&&'";
    case TokenKind::kOrOr: return "'||'";
    case TokenKind::kBang: return "'!'";
    case TokenKind::kEof: return "end of input";
  }
  return "?";
}

std::vector<Token> tokenize(std::string_view source) { return Lexer(source).run(); }

}  // namespace continuette
