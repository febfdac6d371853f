#pragma once

#include <cctype>
#include <charconv>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "pseudomul/op.hpp"
#include "pseudomul/xreal.hpp"

namespace pseudomul::dsl {

/// Byte range into the source text, for diagnostics.
struct SourceSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
  friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::string message, SourceSpan span)
      : std::runtime_error(std::move(message)), span_(span) {}
  SourceSpan span() const { return span_; }

 private:
  SourceSpan span_;
};

enum class Var { S, T };
enum class UnaryFn { Tanh, Atanh, Exp, Ln, Sqrt };
enum class BinaryFn { Max, Min, Pow };
enum class ArithOp { Add, Sub, Mul, Div };
enum class CmpOp { Lt, Le, Gt, Ge, Eq, Ne };
enum class BoolOp { And, Or };

struct Expr;
struct Cond;
using ExprPtr = std::shared_ptr<const Expr>;
using CondPtr = std::shared_ptr<const Cond>;

struct VarNode {
  Var which;
};
struct LiteralNode {
  XReal value;
};
struct UnaryNode {
  UnaryFn fn;
  ExprPtr arg;
};
struct BinaryFnNode {
  BinaryFn fn;
  ExprPtr lhs, rhs;
};
struct ArithNode {
  ArithOp op;
  ExprPtr lhs, rhs;
};
struct IfNode {
  CondPtr cond;
  ExprPtr then_branch, else_branch;
};

struct CompareNode {
  CmpOp op;
  ExprPtr lhs, rhs;
};
struct LogicNode {
  BoolOp op;
  CondPtr lhs, rhs;
};
struct NotNode {
  CondPtr arg;
};

/// Expression AST node. Equality is structural and ignores spans, which is
/// what the print/reparse round-trip property needs.
struct Expr {
  std::variant<VarNode, LiteralNode, UnaryNode, BinaryFnNode, ArithNode, IfNode>
      node;
  SourceSpan span;
};

struct Cond {
  std::variant<CompareNode, LogicNode, NotNode> node;
  SourceSpan span;
};

bool equal(const ExprPtr& a, const ExprPtr& b);
bool equal(const CondPtr& a, const CondPtr& b);

inline bool equal(const ExprPtr& a, const ExprPtr& b) {
  if (a->node.index() != b->node.index()) return false;
  if (const auto* v = std::get_if<VarNode>(&a->node)) {
    return v->which == std::get<VarNode>(b->node).which;
  }
  if (const auto* l = std::get_if<LiteralNode>(&a->node)) {
    return l->value == std::get<LiteralNode>(b->node).value;
  }
  if (const auto* u = std::get_if<UnaryNode>(&a->node)) {
    const auto& o = std::get<UnaryNode>(b->node);
    return u->fn == o.fn && equal(u->arg, o.arg);
  }
  if (const auto* f = std::get_if<BinaryFnNode>(&a->node)) {
    const auto& o = std::get<BinaryFnNode>(b->node);
    return f->fn == o.fn && equal(f->lhs, o.lhs) && equal(f->rhs, o.rhs);
  }
  if (const auto* ar = std::get_if<ArithNode>(&a->node)) {
    const auto& o = std::get<ArithNode>(b->node);
    return ar->op == o.op && equal(ar->lhs, o.lhs) && equal(ar->rhs, o.rhs);
  }
  const auto& i = std::get<IfNode>(a->node);
  const auto& o = std::get<IfNode>(b->node);
  return equal(i.cond, o.cond) && equal(i.then_branch, o.then_branch) &&
         equal(i.else_branch, o.else_branch);
}

inline bool equal(const CondPtr& a, const CondPtr& b) {
  if (a->node.index() != b->node.index()) return false;
  if (const auto* c = std::get_if<CompareNode>(&a->node)) {
    const auto& o = std::get<CompareNode>(b->node);
    return c->op == o.op && equal(c->lhs, o.lhs) && equal(c->rhs, o.rhs);
  }
  if (const auto* l = std::get_if<LogicNode>(&a->node)) {
    const auto& o = std::get<LogicNode>(b->node);
    return l->op == o.op && equal(l->lhs, o.lhs) && equal(l->rhs, o.rhs);
  }
  return equal(std::get<NotNode>(a->node).arg,
               std::get<NotNode>(b->node).arg);
}

// ---------------------------------------------------------------------------
// Lexer

namespace detail {

enum class TokKind {
  Number,
  Ident,
  LParen,
  RParen,
  Comma,
  Plus,
  Minus,
  Star,
  Slash,
  Lt,
  Le,
  Gt,
  Ge,
  EqEq,
  Ne,
  End,
};

struct Token {
  TokKind kind;
  std::string_view text;
  SourceSpan span;
};

inline std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto push = [&](TokKind k, std::size_t b, std::size_t e) {
    out.push_back({k, src.substr(b, e - b), {b, e}});
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t b = i;
      while (i < src.size() &&
             (std::isdigit(static_cast<unsigned char>(src[i])) ||
              src[i] == '.' || src[i] == 'e' || src[i] == 'E' ||
              ((src[i] == '+' || src[i] == '-') && i > b &&
               (src[i - 1] == 'e' || src[i - 1] == 'E')))) {
        ++i;
      }
      push(TokKind::Number, b, i);
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t b = i;
      while (i < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[i])) ||
              src[i] == '_')) {
        ++i;
      }
      push(TokKind::Ident, b, i);
      continue;
    }
    std::size_t b = i;
    auto two = [&](char second) {
      return i + 1 < src.size() && src[i + 1] == second;
    };
    switch (c) {
      case '(': push(TokKind::LParen, b, ++i); break;
      case ')': push(TokKind::RParen, b, ++i); break;
      case ',': push(TokKind::Comma, b, ++i); break;
      case '+': push(TokKind::Plus, b, ++i); break;
      case '-': push(TokKind::Minus, b, ++i); break;
      case '*': push(TokKind::Star, b, ++i); break;
      case '/': push(TokKind::Slash, b, ++i); break;
      case '<':
        if (two('=')) {
          i += 2;
          push(TokKind::Le, b, i);
        } else {
          push(TokKind::Lt, b, ++i);
        }
        break;
      case '>':
        if (two('=')) {
          i += 2;
          push(TokKind::Ge, b, i);
        } else {
          push(TokKind::Gt, b, ++i);
        }
        break;
      case '=':
        if (two('=')) {
          i += 2;
          push(TokKind::EqEq, b, i);
        } else {
          throw ParseError("expected `==`", {b, b + 1});
        }
        break;
      case '!':
        if (two('=')) {
          i += 2;
          push(TokKind::Ne, b, i);
        } else {
          throw ParseError("stray `!`", {b, b + 1});
        }
        break;
      default:
        throw ParseError(std::string("unexpected character `") + c + "`",
                         {b, b + 1});
    }
  }
  out.push_back({TokKind::End, {}, {src.size(), src.size()}});
  return out;
}

// ---------------------------------------------------------------------------
// Parser: recursive descent, standard precedence
// (if < comparison-conditions < additive < multiplicative < application).
// The one ambiguity, `(` opening either a parenthesized condition or an
// arithmetic group, is resolved by a bounded backtrack inside conditions.

class Parser {
 public:
  explicit Parser(std::string_view src) : toks_(lex(src)) {}

  ExprPtr parse_whole() {
    ExprPtr e = parse_expr();
    if (peek().kind != TokKind::End) {
      throw ParseError("trailing input after expression", peek().span);
    }
    return e;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& advance() { return toks_[pos_++]; }
  bool at(TokKind k) const { return peek().kind == k; }
  bool accept(TokKind k) {
    if (!at(k)) return false;
    ++pos_;
    return true;
  }
  void expect(TokKind k, const char* what) {
    if (!accept(k)) {
      throw ParseError(std::string("expected ") + what, peek().span);
    }
  }
  bool at_keyword(std::string_view kw) const {
    return peek().kind == TokKind::Ident && peek().text == kw;
  }
  bool accept_keyword(std::string_view kw) {
    if (!at_keyword(kw)) return false;
    ++pos_;
    return true;
  }

  static ExprPtr make(Expr e) { return std::make_shared<Expr>(std::move(e)); }
  static CondPtr make(Cond c) { return std::make_shared<Cond>(std::move(c)); }

  ExprPtr parse_expr() {
    if (accept_keyword("if")) {
      std::size_t b = toks_[pos_ - 1].span.begin;
      CondPtr c = parse_cond();
      if (!accept_keyword("then")) {
        throw ParseError("expected `then`", peek().span);
      }
      ExprPtr th = parse_expr();
      if (!accept_keyword("else")) {
        throw ParseError("expected `else`", peek().span);
      }
      ExprPtr el = parse_expr();
      return make({IfNode{std::move(c), std::move(th), std::move(el)},
                   {b, el->span.end}});
    }
    return parse_additive();
  }

  CondPtr parse_cond() { return parse_or(); }

  CondPtr parse_or() {
    CondPtr lhs = parse_and();
    while (accept_keyword("or")) {
      CondPtr rhs = parse_and();
      SourceSpan s{lhs->span.begin, rhs->span.end};
      lhs = make({LogicNode{BoolOp::Or, std::move(lhs), std::move(rhs)}, s});
    }
    return lhs;
  }

  CondPtr parse_and() {
    CondPtr lhs = parse_cond_unary();
    while (accept_keyword("and")) {
      CondPtr rhs = parse_cond_unary();
      SourceSpan s{lhs->span.begin, rhs->span.end};
      lhs = make({LogicNode{BoolOp::And, std::move(lhs), std::move(rhs)}, s});
    }
    return lhs;
  }

  CondPtr parse_cond_unary() {
    if (accept_keyword("not")) {
      std::size_t b = toks_[pos_ - 1].span.begin;
      CondPtr arg = parse_cond_unary();
      return make({NotNode{std::move(arg)}, {b, arg->span.end}});
    }
    if (at(TokKind::LParen)) {
      // Could be `(cond)` or the start of an arithmetic comparison like
      // `(s + 1) < 2`; try the condition reading first and back off.
      std::size_t saved = pos_;
      try {
        advance();
        CondPtr inner = parse_cond();
        expect(TokKind::RParen, "`)`");
        return inner;
      } catch (const ParseError&) {
        pos_ = saved;
      }
    }
    return parse_comparison();
  }

  CondPtr parse_comparison() {
    ExprPtr lhs = parse_additive();
    CmpOp op;
    switch (peek().kind) {
      case TokKind::Lt: op = CmpOp::Lt; break;
      case TokKind::Le: op = CmpOp::Le; break;
      case TokKind::Gt: op = CmpOp::Gt; break;
      case TokKind::Ge: op = CmpOp::Ge; break;
      case TokKind::EqEq: op = CmpOp::Eq; break;
      case TokKind::Ne: op = CmpOp::Ne; break;
      default:
        throw ParseError("expected comparison operator", peek().span);
    }
    advance();
    ExprPtr rhs = parse_additive();
    SourceSpan s{lhs->span.begin, rhs->span.end};
    return make({CompareNode{op, std::move(lhs), std::move(rhs)}, s});
  }

  ExprPtr parse_additive() {
    ExprPtr lhs = parse_multiplicative();
    for (;;) {
      ArithOp op;
      if (accept(TokKind::Plus)) {
        op = ArithOp::Add;
      } else if (accept(TokKind::Minus)) {
        op = ArithOp::Sub;
      } else {
        return lhs;
      }
      ExprPtr rhs = parse_multiplicative();
      SourceSpan s{lhs->span.begin, rhs->span.end};
      lhs = make({ArithNode{op, std::move(lhs), std::move(rhs)}, s});
    }
  }

  ExprPtr parse_multiplicative() {
    ExprPtr lhs = parse_application();
    for (;;) {
      ArithOp op;
      if (accept(TokKind::Star)) {
        op = ArithOp::Mul;
      } else if (accept(TokKind::Slash)) {
        op = ArithOp::Div;
      } else {
        return lhs;
      }
      ExprPtr rhs = parse_application();
      SourceSpan s{lhs->span.begin, rhs->span.end};
      lhs = make({ArithNode{op, std::move(lhs), std::move(rhs)}, s});
    }
  }

  ExprPtr parse_application() {
    const Token& tok = peek();
    if (tok.kind == TokKind::Number) {
      advance();
      double m = 0.0;
      auto [p, ec] =
          std::from_chars(tok.text.data(), tok.text.data() + tok.text.size(), m);
      if (ec != std::errc() || p != tok.text.data() + tok.text.size() ||
          !(m >= 0.0) || std::isinf(m)) {
        throw ParseError("malformed number", tok.span);
      }
      return make({LiteralNode{XReal::finite(m)}, tok.span});
    }
    if (tok.kind == TokKind::LParen) {
      advance();
      ExprPtr inner = parse_expr();
      expect(TokKind::RParen, "`)`");
      return inner;
    }
    if (tok.kind == TokKind::Ident) {
      std::string_view id = tok.text;
      if (id == "s") {
        advance();
        return make({VarNode{Var::S}, tok.span});
      }
      if (id == "t") {
        advance();
        return make({VarNode{Var::T}, tok.span});
      }
      if (id == "inf") {
        advance();
        return make({LiteralNode{XReal::infinity()}, tok.span});
      }
      if (auto u = unary_fn(id)) {
        advance();
        expect(TokKind::LParen, "`(`");
        ExprPtr arg = parse_expr();
        expect(TokKind::RParen, "`)`");
        return make({UnaryNode{*u, std::move(arg)},
                     {tok.span.begin, toks_[pos_ - 1].span.end}});
      }
      if (auto b = binary_fn(id)) {
        advance();
        expect(TokKind::LParen, "`(`");
        ExprPtr lhs = parse_expr();
        expect(TokKind::Comma, "`,`");
        ExprPtr rhs = parse_expr();
        expect(TokKind::RParen, "`)`");
        return make({BinaryFnNode{*b, std::move(lhs), std::move(rhs)},
                     {tok.span.begin, toks_[pos_ - 1].span.end}});
      }
      throw ParseError("unknown identifier `" + std::string(id) + "`",
                       tok.span);
    }
    throw ParseError("expected expression", tok.span);
  }

  static std::optional<UnaryFn> unary_fn(std::string_view id) {
    if (id == "tanh") return UnaryFn::Tanh;
    if (id == "atanh") return UnaryFn::Atanh;
    if (id == "exp") return UnaryFn::Exp;
    if (id == "ln") return UnaryFn::Ln;
    if (id == "sqrt") return UnaryFn::Sqrt;
    return std::nullopt;
  }
  static std::optional<BinaryFn> binary_fn(std::string_view id) {
    if (id == "max") return BinaryFn::Max;
    if (id == "min") return BinaryFn::Min;
    if (id == "pow") return BinaryFn::Pow;
    return std::nullopt;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline ExprPtr parse(std::string_view source) {
  return detail::Parser(source).parse_whole();
}

// ---------------------------------------------------------------------------
// Printer: canonical fully parenthesized form, reparses to an equal tree.

namespace detail {

inline void print_expr(const ExprPtr& e, std::string& out);
inline void print_cond(const CondPtr& c, std::string& out);

inline const char* unary_name(UnaryFn f) {
  switch (f) {
    case UnaryFn::Tanh: return "tanh";
    case UnaryFn::Atanh: return "atanh";
    case UnaryFn::Exp: return "exp";
    case UnaryFn::Ln: return "ln";
    case UnaryFn::Sqrt: return "sqrt";
  }
  return "?";
}
inline const char* binary_name(BinaryFn f) {
  switch (f) {
    case BinaryFn::Max: return "max";
    case BinaryFn::Min: return "min";
    case BinaryFn::Pow: return "pow";
  }
  return "?";
}
inline const char* arith_name(ArithOp o) {
  switch (o) {
    case ArithOp::Add: return " + ";
    case ArithOp::Sub: return " - ";
    case ArithOp::Mul: return " * ";
    case ArithOp::Div: return " / ";
  }
  return "?";
}
inline const char* cmp_name(CmpOp o) {
  switch (o) {
    case CmpOp::Lt: return " < ";
    case CmpOp::Le: return " <= ";
    case CmpOp::Gt: return " > ";
    case CmpOp::Ge: return " >= ";
    case CmpOp::Eq: return " == ";
    case CmpOp::Ne: return " != ";
  }
  return "?";
}

inline void print_expr(const ExprPtr& e, std::string& out) {
  if (const auto* v = std::get_if<VarNode>(&e->node)) {
    out += v->which == Var::S ? 's' : 't';
  } else if (const auto* l = std::get_if<LiteralNode>(&e->node)) {
    out += format_xreal(l->value);
  } else if (const auto* u = std::get_if<UnaryNode>(&e->node)) {
    out += unary_name(u->fn);
    out += '(';
    print_expr(u->arg, out);
    out += ')';
  } else if (const auto* f = std::get_if<BinaryFnNode>(&e->node)) {
    out += binary_name(f->fn);
    out += '(';
    print_expr(f->lhs, out);
    out += ", ";
    print_expr(f->rhs, out);
    out += ')';
  } else if (const auto* a = std::get_if<ArithNode>(&e->node)) {
    out += '(';
    print_expr(a->lhs, out);
    out += arith_name(a->op);
    print_expr(a->rhs, out);
    out += ')';
  } else {
    const auto& i = std::get<IfNode>(e->node);
    out += "(if ";
    print_cond(i.cond, out);
    out += " then ";
    print_expr(i.then_branch, out);
    out += " else ";
    print_expr(i.else_branch, out);
    out += ')';
  }
}

inline void print_cond(const CondPtr& c, std::string& out) {
  if (const auto* cmp = std::get_if<CompareNode>(&c->node)) {
    print_expr(cmp->lhs, out);
    out += cmp_name(cmp->op);
    print_expr(cmp->rhs, out);
  } else if (const auto* l = std::get_if<LogicNode>(&c->node)) {
    out += '(';
    print_cond(l->lhs, out);
    out += l->op == BoolOp::And ? " and " : " or ";
    print_cond(l->rhs, out);
    out += ')';
  } else {
    out += "not (";
    print_cond(std::get<NotNode>(c->node).arg, out);
    out += ')';
  }
}

}  // namespace detail

inline std::string print(const ExprPtr& e) {
  std::string out;
  detail::print_expr(e, out);
  return out;
}

// ---------------------------------------------------------------------------
// Evaluator. Works on IEEE doubles where +inf is the infinite element and
// negative values may appear as intermediates (`max(s - 1, 0)` is legal).
// Domain faults are tagged errors, not exceptions that escape a sweep:
//   inf + x = inf, inf * x = inf for x > 0, 0 * inf = 0, x / inf = 0,
//   inf / inf and inf - anything are faults, as are atanh past its pole,
//   ln and sqrt outside their domains, division by zero, and any negative
//   final result.

namespace detail {

struct FaultSignal {
  std::string code;
};

[[noreturn]] inline void fault(const char* code) { throw FaultSignal{code}; }

inline double eval_expr(const ExprPtr& e, double s, double t);
inline bool eval_cond(const CondPtr& c, double s, double t);

inline double checked(double v, const char* code) {
  if (std::isnan(v)) fault(code);
  if (std::isinf(v) && v < 0.0) fault(code);
  return v;
}

inline double eval_arith(ArithOp op, double a, double b) {
  switch (op) {
    case ArithOp::Add:
      return checked(a + b, "add-undefined");
    case ArithOp::Sub:
      if (std::isinf(a) || std::isinf(b)) fault("inf-minus");
      return checked(a - b, "sub-overflow");
    case ArithOp::Mul:
      if ((a == 0.0 && std::isinf(b)) || (b == 0.0 && std::isinf(a))) {
        return 0.0;
      }
      return checked(a * b, "mul-undefined");
    case ArithOp::Div:
      if (b == 0.0) fault("div-by-zero");
      if (std::isinf(a) && std::isinf(b)) fault("inf-div-inf");
      return checked(a / b, "div-undefined");
  }
  fault("bad-arith");
}

inline double eval_unary(UnaryFn fn, double x) {
  switch (fn) {
    case UnaryFn::Tanh:
      return std::tanh(x);
    case UnaryFn::Atanh:
      if (!(std::fabs(x) < 1.0)) fault("atanh-domain");
      return std::atanh(x);
    case UnaryFn::Exp:
      return std::exp(x);  // overflow saturates to +inf
    case UnaryFn::Ln:
      if (!(x > 0.0)) fault("log-domain");
      return std::log(x);
    case UnaryFn::Sqrt:
      if (x < 0.0) fault("sqrt-domain");
      return std::sqrt(x);
  }
  fault("bad-unary");
}

inline double eval_expr(const ExprPtr& e, double s, double t) {
  if (const auto* v = std::get_if<VarNode>(&e->node)) {
    return v->which == Var::S ? s : t;
  }
  if (const auto* l = std::get_if<LiteralNode>(&e->node)) {
    return l->value.as_double();
  }
  if (const auto* u = std::get_if<UnaryNode>(&e->node)) {
    return eval_unary(u->fn, eval_expr(u->arg, s, t));
  }
  if (const auto* f = std::get_if<BinaryFnNode>(&e->node)) {
    double a = eval_expr(f->lhs, s, t);
    double b = eval_expr(f->rhs, s, t);
    switch (f->fn) {
      case BinaryFn::Max: return std::max(a, b);
      case BinaryFn::Min: return std::min(a, b);
      case BinaryFn::Pow:
        if (a == 0.0 && b < 0.0) fault("pow-domain");
        return checked(std::pow(a, b), "pow-domain");
    }
  }
  if (const auto* a = std::get_if<ArithNode>(&e->node)) {
    return eval_arith(a->op, eval_expr(a->lhs, s, t),
                      eval_expr(a->rhs, s, t));
  }
  const auto& i = std::get<IfNode>(e->node);
  // Only the selected branch is evaluated, so guards can shield faults.
  return eval_cond(i.cond, s, t) ? eval_expr(i.then_branch, s, t)
                                 : eval_expr(i.else_branch, s, t);
}

inline bool eval_cond(const CondPtr& c, double s, double t) {
  if (const auto* cmp = std::get_if<CompareNode>(&c->node)) {
    double a = eval_expr(cmp->lhs, s, t);
    double b = eval_expr(cmp->rhs, s, t);
    switch (cmp->op) {
      case CmpOp::Lt: return a < b;
      case CmpOp::Le: return a <= b;
      case CmpOp::Gt: return a > b;
      case CmpOp::Ge: return a >= b;
      case CmpOp::Eq: return a == b;
      case CmpOp::Ne: return a != b;
    }
  }
  if (const auto* l = std::get_if<LogicNode>(&c->node)) {
    // Short-circuit left to right.
    if (l->op == BoolOp::And) {
      return eval_cond(l->lhs, s, t) && eval_cond(l->rhs, s, t);
    }
    return eval_cond(l->lhs, s, t) || eval_cond(l->rhs, s, t);
  }
  return !eval_cond(std::get<NotNode>(c->node).arg, s, t);
}

}  // namespace detail

/// Evaluates an AST at (s, t) with XReal semantics.
inline EvalResult evaluate(const ExprPtr& expr, XReal s, XReal t) {
  try {
    double r = detail::eval_expr(expr, s.as_double(), t.as_double());
    if (r < 0.0) return EvalResult::fault("negative-result");
    return EvalResult::value(XReal::from_double(r));
  } catch (const detail::FaultSignal& f) {
    return EvalResult::fault(f.code);
  }
}

/// Wraps a parsed expression as an operation. No identity is declared;
/// the axiom module discovers identities by search.
inline PseudoMulOp compile(ExprPtr expr, std::string name) {
  PseudoMulOp op;
  op.name = std::move(name);
  op.apply_fn = [expr = std::move(expr)](XReal s, XReal t) {
    return evaluate(expr, s, t);
  };
  return op;
}

}  // namespace pseudomul::dsl
