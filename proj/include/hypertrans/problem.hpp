#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "hypertrans/classifier.hpp"

namespace hypertrans {

struct ProblemConfig {
  std::optional<long> truncation;
  std::optional<long> degree;
  std::optional<long> orbit;
  std::optional<std::vector<long>> iterate;
  std::optional<unsigned long> seed;

  friend bool operator==(const ProblemConfig& a, const ProblemConfig& b) {
    return a.truncation == b.truncation && a.degree == b.degree && a.orbit == b.orbit &&
           a.iterate == b.iterate && a.seed == b.seed;
  }
};

// A parsed problem file: one difference equation over one difference field,
// an optional series prefix, and optional configuration overrides.
struct ProblemFile {
  CaseTag tag;
  long ramification = 1;
  std::vector<RatFunc> op_coeffs;
  RatFunc rhs;
  std::optional<std::vector<std::pair<long, Rat>>> prefix_pairs;
  ProblemConfig config;

  DiffOperator op() const { return DiffOperator(tag, op_coeffs); }
  AffineEquation equation() const { return AffineEquation{op(), rhs}; }

  std::optional<TruncatedSeries> prefix() const {
    if (!prefix_pairs) return std::nullopt;
    const auto& pairs = *prefix_pairs;
    long val = pairs.front().first;
    long top = pairs.back().first;
    std::vector<Rat> stored(static_cast<size_t>(top - val + 1), Rat(0));
    for (const auto& [e, c] : pairs) stored[static_cast<size_t>(e - val)] = c;
    return TruncatedSeries(tag, tag.point, ramification, val, std::move(stored));
  }

  ClassifyConfig classify_config() const {
    ClassifyConfig cfg;
    if (config.truncation) cfg.truncation_order = *config.truncation;
    if (config.degree) cfg.match_degree = *config.degree;
    if (config.orbit) cfg.orbit_bound = *config.orbit;
    if (config.iterate) cfg.iterate_scan = *config.iterate;
    return cfg;
  }

  friend bool operator==(const ProblemFile& a, const ProblemFile& b) {
    return a.tag == b.tag && a.ramification == b.ramification && a.op_coeffs == b.op_coeffs &&
           a.rhs == b.rhs && a.prefix_pairs == b.prefix_pairs && a.config == b.config;
  }
};

namespace detail {

struct Token {
  enum Kind { Ident, Number, Punct, End } kind = End;
  std::string text;
  long line = 1;
  long col = 1;
};

[[noreturn]] inline void fail_at(const Token& t, const std::string& msg) {
  fail(ErrorKind::ParseError,
       "line " + std::to_string(t.line) + ", column " + std::to_string(t.col) + ": " + msg);
}

inline std::vector<Token> lex_problem(const std::string& text) {
  std::vector<Token> out;
  long line = 1;
  long col = 1;
  size_t i = 0;
  auto push = [&](Token::Kind k, std::string s, long l, long c) {
    out.push_back(Token{k, std::move(s), l, c});
  };
  while (i < text.size()) {
    char ch = text[i];
    if (ch == '\n') {
      push(Token::Punct, ";", line, col);
      ++line;
      col = 1;
      ++i;
      continue;
    }
    if (ch == ' ' || ch == '\t' || ch == '\r') {
      ++col;
      ++i;
      continue;
    }
    if (ch == '#') {
      while (i < text.size() && text[i] != '\n') ++i;
      continue;
    }
    long tl = line, tc = col;
    if (std::isdigit(static_cast<unsigned char>(ch))) {
      size_t j = i;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      if (j < text.size() && text[j] == '.') {
        ++j;
        while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      }
      if (j < text.size() && (text[j] == 'e' || text[j] == 'E')) {
        size_t k = j + 1;
        if (k < text.size() && (text[k] == '+' || text[k] == '-')) ++k;
        if (k < text.size() && std::isdigit(static_cast<unsigned char>(text[k]))) {
          while (k < text.size() && std::isdigit(static_cast<unsigned char>(text[k]))) ++k;
          j = k;
        }
      }
      push(Token::Number, text.substr(i, j - i), tl, tc);
      col += static_cast<long>(j - i);
      i = j;
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
      size_t j = i;
      while (j < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) {
        ++j;
      }
      push(Token::Ident, text.substr(i, j - i), tl, tc);
      col += static_cast<long>(j - i);
      i = j;
      continue;
    }
    if (std::string("=:;,+-*/^()").find(ch) != std::string::npos) {
      push(Token::Punct, std::string(1, ch), tl, tc);
      ++col;
      ++i;
      continue;
    }
    fail(ErrorKind::ParseError, "line " + std::to_string(line) + ", column " +
                                    std::to_string(col) + ": unexpected character '" +
                                    std::string(1, ch) + "'");
  }
  out.push_back(Token{Token::End, "", line, col});
  return out;
}

inline Rat rat_from_number(const Token& t) {
  const std::string& s = t.text;
  size_t dot = s.find('.');
  size_t ex = s.find_first_of("eE");
  std::string digits = s.substr(0, std::min(dot, ex));
  long frac = 0;
  if (dot != std::string::npos) {
    std::string fd = s.substr(dot + 1, (ex == std::string::npos ? s.size() : ex) - dot - 1);
    digits += fd;
    frac = static_cast<long>(fd.size());
  }
  long e10 = 0;
  if (ex != std::string::npos) e10 = std::stol(s.substr(ex + 1));
  Rat v(mpz_class(digits.empty() ? "0" : digits));
  long shift = e10 - frac;
  mpz_class pw;
  mpz_ui_pow_ui(pw.get_mpz_t(), 10, static_cast<unsigned long>(shift < 0 ? -shift : shift));
  if (shift >= 0)
    v *= Rat(pw);
  else
    v /= Rat(pw);
  v.canonicalize();
  return v;
}

struct ExprNode {
  enum Kind { Num, VarX, VarQ, VarS, FCall, Add, Sub, Mul, Div, Pow, Neg } kind;
  Rat value;
  std::unique_ptr<ExprNode> lhs, rhs;
  Token at;
};

using ExprPtr = std::unique_ptr<ExprNode>;

// Recursive-descent expression parser over a token stream. Implicit
// multiplication by juxtaposition is accepted: "q^2 x" means "q^2 * x".
class ExprParser {
 public:
  ExprParser(const std::vector<Token>& toks, size_t& pos) : toks_(toks), pos_(pos) {}

  ExprPtr parse_expr() {
    ExprPtr n = parse_term();
    while (is_punct("+") || is_punct("-")) {
      Token op = next();
      ExprPtr r = parse_term();
      n = make(op.text == "+" ? ExprNode::Add : ExprNode::Sub, op, std::move(n), std::move(r));
    }
    return n;
  }

 private:
  const std::vector<Token>& toks_;
  size_t& pos_;

  const Token& peek() const { return toks_[pos_]; }
  Token next() { return toks_[pos_++]; }
  bool is_punct(const char* s) const {
    return peek().kind == Token::Punct && peek().text == s;
  }
  bool starts_atom() const {
    if (peek().kind == Token::Number || peek().kind == Token::Ident) return true;
    return is_punct("(");
  }

  static ExprPtr make(ExprNode::Kind k, Token at, ExprPtr l = nullptr, ExprPtr r = nullptr) {
    auto n = std::make_unique<ExprNode>();
    n->kind = k;
    n->at = std::move(at);
    n->lhs = std::move(l);
    n->rhs = std::move(r);
    return n;
  }

  ExprPtr parse_term() {
    ExprPtr n = parse_factor();
    while (true) {
      if (is_punct("*") || is_punct("/")) {
        Token op = next();
        ExprPtr r = parse_factor();
        n = make(op.text == "*" ? ExprNode::Mul : ExprNode::Div, op, std::move(n), std::move(r));
        continue;
      }
      if (starts_atom()) {
        Token op = peek();
        ExprPtr r = parse_factor();
        n = make(ExprNode::Mul, op, std::move(n), std::move(r));
        continue;
      }
      return n;
    }
  }

  ExprPtr parse_factor() {
    if (is_punct("-") || is_punct("+")) {
      Token op = next();
      ExprPtr inner = parse_factor();
      if (op.text == "+") return inner;
      return make(ExprNode::Neg, op, std::move(inner));
    }
    ExprPtr base = parse_atom();
    if (is_punct("^")) {
      Token op = next();
      bool negexp = false;
      if (is_punct("-")) {
        next();
        negexp = true;
      }
      if (peek().kind != Token::Number) fail_at(peek(), "expected an integer exponent");
      Token e = next();
      if (e.text.find_first_of(".eE") != std::string::npos)
        fail_at(e, "exponents must be integers");
      auto n = make(ExprNode::Pow, op, std::move(base));
      n->value = rat_from_number(e);
      if (negexp) n->value = -n->value;
      return n;
    }
    return base;
  }

  ExprPtr parse_atom() {
    const Token& t = peek();
    if (t.kind == Token::Number) {
      Token v = next();
      auto n = make(ExprNode::Num, v);
      n->value = rat_from_number(v);
      return n;
    }
    if (t.kind == Token::Ident) {
      Token id = next();
      if (id.text == "x") return make(ExprNode::VarX, id);
      if (id.text == "q") return make(ExprNode::VarQ, id);
      if (id.text == "S") return make(ExprNode::VarS, id);
      if (id.text == "f") {
        if (!is_punct("(")) fail_at(peek(), "expected '(' after f");
        next();
        ExprPtr arg = parse_expr();
        if (!is_punct(")")) fail_at(peek(), "expected ')'");
        next();
        return make(ExprNode::FCall, id, std::move(arg));
      }
      fail_at(id, "unknown name '" + id.text + "'");
    }
    if (is_punct("(")) {
      next();
      ExprPtr inner = parse_expr();
      if (!is_punct(")")) fail_at(peek(), "expected ')'");
      next();
      return inner;
    }
    fail_at(t, "expected a number, name, or '('");
  }
};

// Scalar evaluation: rational functions of x, with q bound to the dilation
// parameter when the field has one.
inline RatFunc eval_scalar(const ExprNode& n, const std::optional<Rat>& qval) {
  switch (n.kind) {
    case ExprNode::Num:
      return RatFunc(n.value);
    case ExprNode::VarX:
      return RatFunc(Poly::x());
    case ExprNode::VarQ:
      if (!qval) fail_at(n.at, "q is only available in the q dilation case");
      return RatFunc(*qval);
    case ExprNode::VarS:
      fail_at(n.at, "S is only available in operator expressions");
    case ExprNode::FCall:
      fail_at(n.at, "f is not allowed in this expression");
    case ExprNode::Add:
      return eval_scalar(*n.lhs, qval) + eval_scalar(*n.rhs, qval);
    case ExprNode::Sub:
      return eval_scalar(*n.lhs, qval) - eval_scalar(*n.rhs, qval);
    case ExprNode::Mul:
      return eval_scalar(*n.lhs, qval) * eval_scalar(*n.rhs, qval);
    case ExprNode::Div: {
      RatFunc d = eval_scalar(*n.rhs, qval);
      if (d.is_zero()) fail_at(n.at, "division by zero");
      return eval_scalar(*n.lhs, qval) / d;
    }
    case ExprNode::Pow: {
      if (n.value.get_den() != 1) fail_at(n.at, "exponents must be integers");
      long e = static_cast<long>(n.value.get_num().get_si());
      RatFunc b = eval_scalar(*n.lhs, qval);
      if (e < 0) {
        if (b.is_zero()) fail_at(n.at, "division by zero");
        b = RatFunc(Rat(1)) / b;
        e = -e;
      }
      RatFunc r(Rat(1));
      for (long i = 0; i < e; ++i) r = r * b;
      return r;
    }
    case ExprNode::Neg:
      return RatFunc() - eval_scalar(*n.lhs, qval);
  }
  fail_at(n.at, "malformed expression");
}

// A scalar plus a combination of f-atoms, each recording which power of the
// operator the argument of f selects.
struct LinForm {
  RatFunc scalar;
  std::map<long, RatFunc> fterms;
  bool has_f() const { return !fterms.empty(); }
};

inline long sigma_power_of(const RatFunc& arg, const CaseTag& tag, const Token& at) {
  RatFunc cur(Poly::x());
  for (long k = 0; k <= 40; ++k) {
    if (arg == cur) return k;
    cur = apply_sigma(cur, tag);
  }
  fail_at(at, "the argument of f is not an iterate of the operator applied to x");
}

inline LinForm eval_linear(const ExprNode& n, const CaseTag& tag, const std::optional<Rat>& qval) {
  auto scalar_only = [&](const LinForm& v, const Token& at) -> RatFunc {
    if (v.has_f()) fail_at(at, "the equation must be linear in f");
    return v.scalar;
  };
  switch (n.kind) {
    case ExprNode::FCall: {
      RatFunc arg = eval_scalar(*n.lhs, qval);
      long k = sigma_power_of(arg, tag, n.at);
      LinForm out;
      out.fterms[k] = RatFunc(Rat(1));
      return out;
    }
    case ExprNode::Add:
    case ExprNode::Sub: {
      LinForm a = eval_linear(*n.lhs, tag, qval);
      LinForm b = eval_linear(*n.rhs, tag, qval);
      bool sub = n.kind == ExprNode::Sub;
      a.scalar = sub ? a.scalar - b.scalar : a.scalar + b.scalar;
      for (auto& [k, c] : b.fterms) {
        RatFunc& slot = a.fterms[k];
        slot = sub ? slot - c : slot + c;
      }
      return a;
    }
    case ExprNode::Mul: {
      LinForm a = eval_linear(*n.lhs, tag, qval);
      LinForm b = eval_linear(*n.rhs, tag, qval);
      if (a.has_f() && b.has_f()) fail_at(n.at, "the equation must be linear in f");
      if (b.has_f()) std::swap(a, b);
      RatFunc c = b.scalar;
      a.scalar = a.scalar * c;
      for (auto& [k, g] : a.fterms) g = g * c;
      return a;
    }
    case ExprNode::Div: {
      LinForm a = eval_linear(*n.lhs, tag, qval);
      RatFunc d = scalar_only(eval_linear(*n.rhs, tag, qval), n.at);
      if (d.is_zero()) fail_at(n.at, "division by zero");
      a.scalar = a.scalar / d;
      for (auto& [k, g] : a.fterms) g = g / d;
      return a;
    }
    case ExprNode::Neg: {
      LinForm a = eval_linear(*n.lhs, tag, qval);
      a.scalar = RatFunc() - a.scalar;
      for (auto& [k, g] : a.fterms) g = RatFunc() - g;
      return a;
    }
    case ExprNode::Pow: {
      if (n.value == Rat(1)) return eval_linear(*n.lhs, tag, qval);
      LinForm base = eval_linear(*n.lhs, tag, qval);
      if (base.has_f()) fail_at(n.at, "the equation must be linear in f");
      LinForm out;
      out.scalar = eval_scalar(n, qval);
      return out;
    }
    default: {
      LinForm out;
      out.scalar = eval_scalar(n, qval);
      return out;
    }
  }
}

inline DiffOperator eval_operator(const ExprNode& n, const CaseTag& tag,
                                  const std::optional<Rat>& qval) {
  switch (n.kind) {
    case ExprNode::VarS:
      return DiffOperator::rho_power(tag, 1);
    case ExprNode::FCall:
      fail_at(n.at, "f is not allowed in operator expressions");
    case ExprNode::Add:
      return eval_operator(*n.lhs, tag, qval) + eval_operator(*n.rhs, tag, qval);
    case ExprNode::Sub:
      return eval_operator(*n.lhs, tag, qval) - eval_operator(*n.rhs, tag, qval);
    case ExprNode::Mul:
      return ore_mul(eval_operator(*n.lhs, tag, qval), eval_operator(*n.rhs, tag, qval));
    case ExprNode::Div: {
      DiffOperator d = eval_operator(*n.rhs, tag, qval);
      if (d.is_zero()) fail_at(n.at, "division by zero");
      if (d.order() != 0) fail_at(n.at, "operators can only be divided by scalars");
      return (RatFunc(Rat(1)) / d.coeff(0)) * eval_operator(*n.lhs, tag, qval);
    }
    case ExprNode::Neg:
      return DiffOperator::zero(tag) - eval_operator(*n.lhs, tag, qval);
    case ExprNode::Pow: {
      if (n.value.get_den() != 1 || n.value < 0)
        fail_at(n.at, "operator exponents must be nonnegative integers");
      long e = static_cast<long>(n.value.get_num().get_si());
      DiffOperator b = eval_operator(*n.lhs, tag, qval);
      DiffOperator r = DiffOperator::identity(tag);
      for (long i = 0; i < e; ++i) r = ore_mul(r, b);
      return r;
    }
    default:
      return DiffOperator(tag, {eval_scalar(n, qval)});
  }
}

inline long long_from(const Token& t) {
  Rat v = rat_from_number(t);
  if (v.get_den() != 1) fail_at(t, "expected an integer");
  return static_cast<long>(v.get_num().get_si());
}

}  // namespace detail

// Parses the problem-file DSL. Statements are separated by newlines or
// semicolons: a case declaration, one equation (sugar form "eq:" with f
// applied to iterates of x, or coefficient form "op:" plus optional "rhs:"),
// an optional series prefix, and optional config overrides.
inline ProblemFile parse_problem(const std::string& text) {
  using detail::Token;
  std::vector<Token> toks = detail::lex_problem(text);
  size_t pos = 0;

  auto peek = [&]() -> const Token& { return toks[pos]; };
  auto next = [&]() -> Token { return toks[pos++]; };
  auto is_punct = [&](const char* s) {
    return peek().kind == Token::Punct && peek().text == s;
  };
  auto skip_separators = [&]() {
    while (is_punct(";")) next();
  };
  auto expect_punct = [&](const char* s) {
    if (!is_punct(s)) detail::fail_at(peek(), std::string("expected '") + s + "'");
    next();
  };

  ProblemFile p;
  bool have_case = false;
  bool have_eq = false;
  bool have_rhs = false;
  bool eq_sugar = false;
  std::optional<Rat> qval;

  auto parse_expr_tree = [&]() {
    detail::ExprParser ep(toks, pos);
    return ep.parse_expr();
  };

  auto require_case = [&](const Token& at) {
    if (!have_case) detail::fail_at(at, "declare the case before the equation and prefix");
  };

  auto parse_rat_literal = [&]() -> Rat {
    bool neg = false;
    if (is_punct("-")) {
      next();
      neg = true;
    }
    if (peek().kind != Token::Number) detail::fail_at(peek(), "expected a rational value");
    Rat v = detail::rat_from_number(next());
    if (is_punct("/")) {
      next();
      if (peek().kind != Token::Number) detail::fail_at(peek(), "expected a denominator");
      Rat d = detail::rat_from_number(next());
      if (d == 0) detail::fail_at(peek(), "division by zero");
      v /= d;
    }
    return neg ? Rat(-v) : v;
  };

  skip_separators();
  while (peek().kind != Token::End) {
    Token key = peek();
    if (key.kind != Token::Ident) detail::fail_at(key, "expected a statement keyword");
    next();
    if (key.text == "case") {
      if (have_case) detail::fail_at(key, "duplicate case declaration");
      expect_punct("=");
      if (peek().kind != Token::Ident) detail::fail_at(peek(), "expected shift, q, or mahler");
      Token name = next();
      std::optional<Rat> hval, qparam;
      std::optional<long> pval;
      long ram = 1;
      while (peek().kind == Token::Ident) {
        Token pk = next();
        expect_punct("=");
        if (pk.text == "h" || pk.text == "q") {
          Rat v = parse_rat_literal();
          if (pk.text == "h")
            hval = v;
          else
            qparam = v;
        } else if (pk.text == "p" || pk.text == "ram") {
          if (peek().kind != Token::Number) detail::fail_at(peek(), "expected an integer");
          long v = detail::long_from(next());
          if (pk.text == "p")
            pval = v;
          else
            ram = v;
        } else {
          detail::fail_at(pk, "unknown case parameter '" + pk.text + "'");
        }
      }
      if (ram < 1) fail(ErrorKind::SemanticError, "ramification must be at least 1");
      if (name.text == "shift") {
        Rat h = hval.value_or(Rat(1));
        if (h == 0) fail(ErrorKind::SemanticError, "the shift step must be nonzero");
        if (qparam || pval)
          detail::fail_at(name, "shift takes only the parameter h");
        p.tag = CaseTag::shift(h);
        p.tag.point = ExpansionPoint::Infinity;
      } else if (name.text == "q") {
        if (!qparam) fail(ErrorKind::SemanticError, "the q dilation case needs q=<value>");
        if (hval || pval) detail::fail_at(name, "the q dilation case takes only the parameter q");
        Rat q = *qparam;
        if (q == 0 || q == 1 || q == -1)
          fail(ErrorKind::SemanticError, "q must be nonzero and not a root of unity");
        p.tag = CaseTag::qdiff(q);
        p.tag.point = ExpansionPoint::Zero;
        qval = q;
      } else if (name.text == "mahler") {
        if (!pval) fail(ErrorKind::SemanticError, "the Mahler case needs p=<integer>");
        if (hval || qparam) detail::fail_at(name, "the Mahler case takes only the parameter p");
        if (*pval < 2) fail(ErrorKind::SemanticError, "the Mahler parameter must be at least 2");
        p.tag = CaseTag::mahler(*pval);
        p.tag.point = ExpansionPoint::Zero;
      } else {
        detail::fail_at(name, "unknown case '" + name.text + "'");
      }
      p.ramification = ram;
      have_case = true;
    } else if (key.text == "eq") {
      require_case(key);
      if (have_eq) detail::fail_at(key, "duplicate equation");
      expect_punct(":");
      auto lhs = parse_expr_tree();
      expect_punct("=");
      auto rhs = parse_expr_tree();
      detail::LinForm lf = detail::eval_linear(*lhs, p.tag, qval);
      detail::LinForm rf_ = detail::eval_linear(*rhs, p.tag, qval);
      lf.scalar = lf.scalar - rf_.scalar;
      for (auto& [k, c] : rf_.fterms) {
        RatFunc& slot = lf.fterms[k];
        slot = slot - c;
      }
      long top = -1;
      for (auto& [k, c] : lf.fterms)
        if (!c.is_zero()) top = std::max(top, k);
      if (top < 0) detail::fail_at(key, "the equation does not involve f");
      p.op_coeffs.assign(static_cast<size_t>(top + 1), RatFunc());
      for (auto& [k, c] : lf.fterms)
        if (k <= top) p.op_coeffs[static_cast<size_t>(k)] = c;
      p.rhs = RatFunc() - lf.scalar;
      have_eq = true;
    } else if (key.text == "op") {
      require_case(key);
      if (have_eq) detail::fail_at(key, "duplicate equation");
      expect_punct(":");
      while (true) {
        auto tree = parse_expr_tree();
        p.op_coeffs.push_back(detail::eval_scalar(*tree, qval));
        if (!is_punct(",")) break;
        next();
      }
      have_eq = true;
    } else if (key.text == "rhs") {
      require_case(key);
      if (have_rhs) detail::fail_at(key, "duplicate right hand side");
      expect_punct(":");
      auto tree = parse_expr_tree();
      p.rhs = detail::eval_scalar(*tree, qval);
      have_rhs = true;
    } else if (key.text == "prefix") {
      require_case(key);
      if (p.prefix_pairs) detail::fail_at(key, "duplicate prefix");
      expect_punct(":");
      std::vector<std::pair<long, Rat>> pairs;
      while (true) {
        bool negexp = false;
        if (is_punct("-")) {
          next();
          negexp = true;
        }
        if (peek().kind != Token::Number) detail::fail_at(peek(), "expected an exponent");
        Token et = next();
        long e = detail::long_from(et);
        if (negexp) e = -e;
        expect_punct(":");
        auto tree = parse_expr_tree();
        RatFunc v = detail::eval_scalar(*tree, qval);
        if (!v.is_constant()) detail::fail_at(et, "prefix coefficients must be rational constants");
        pairs.emplace_back(e, v.constant_value());
        if (!is_punct(",")) break;
        next();
      }
      std::sort(pairs.begin(), pairs.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      for (size_t i = 1; i < pairs.size(); ++i)
        if (pairs[i].first == pairs[i - 1].first)
          detail::fail_at(key, "duplicate prefix exponent " + std::to_string(pairs[i].first));
      p.prefix_pairs = std::move(pairs);
    } else if (key.text == "config") {
      expect_punct(":");
      while (peek().kind == Token::Ident) {
        Token pk = next();
        expect_punct("=");
        if (pk.text == "iterate") {
          std::vector<long> scan;
          while (true) {
            if (peek().kind != Token::Number) detail::fail_at(peek(), "expected an integer");
            scan.push_back(detail::long_from(next()));
            if (!is_punct(",")) break;
            next();
          }
          p.config.iterate = std::move(scan);
        } else if (pk.text == "truncation" || pk.text == "degree" || pk.text == "orbit" ||
                   pk.text == "seed") {
          if (peek().kind != Token::Number) detail::fail_at(peek(), "expected an integer");
          long v = detail::long_from(next());
          if (pk.text == "truncation")
            p.config.truncation = v;
          else if (pk.text == "degree")
            p.config.degree = v;
          else if (pk.text == "orbit")
            p.config.orbit = v;
          else
            p.config.seed = static_cast<unsigned long>(v);
        } else {
          detail::fail_at(pk, "unknown config key '" + pk.text + "'");
        }
      }
    } else {
      detail::fail_at(key, "unknown statement '" + key.text + "'");
    }
    if (peek().kind != Token::End) {
      if (!is_punct(";")) detail::fail_at(peek(), "expected the end of the statement");
      skip_separators();
    }
  }

  if (!have_case) fail(ErrorKind::ParseError, "line 1, column 1: missing case declaration");
  if (!have_eq) fail(ErrorKind::ParseError, "line 1, column 1: missing equation");
  bool all_zero = true;
  for (const auto& c : p.op_coeffs)
    if (!c.is_zero()) all_zero = false;
  if (all_zero) fail(ErrorKind::SemanticError, "the operator is zero");
  if (have_rhs && p.op_coeffs.empty()) fail(ErrorKind::SemanticError, "rhs needs an op statement");
  return p;
}

// Parses an operator expression in S over the given difference field, for
// example "(S - x)*(S - 1)" or "S^2 - (1+x)*S + x".
inline DiffOperator parse_operator_expr(const std::string& text, const CaseTag& tag) {
  std::vector<detail::Token> toks = detail::lex_problem(text);
  size_t pos = 0;
  detail::ExprParser ep(toks, pos);
  auto tree = ep.parse_expr();
  if (toks[pos].kind != detail::Token::End) detail::fail_at(toks[pos], "unexpected trailing input");
  std::optional<Rat> qval;
  if (tag.kind == CaseKind::QDiff) qval = tag.q;
  return detail::eval_operator(*tree, tag, qval);
}

// Parses a scalar expression (no f, no S); x is allowed when allow_x is set.
inline RatFunc parse_scalar_expr(const std::string& text, bool allow_x = true,
                                 const std::optional<Rat>& qval = std::nullopt) {
  std::vector<detail::Token> toks = detail::lex_problem(text);
  size_t pos = 0;
  detail::ExprParser ep(toks, pos);
  auto tree = ep.parse_expr();
  if (toks[pos].kind != detail::Token::End) detail::fail_at(toks[pos], "unexpected trailing input");
  RatFunc v = detail::eval_scalar(*tree, qval);
  if (!allow_x && !v.is_constant())
    fail(ErrorKind::ParseError, "line 1, column 1: expected a constant");
  return v;
}

// Canonical text form; parse_problem(render(p)) reproduces p exactly.
inline std::string render(const ProblemFile& p) {
  std::ostringstream os;
  os << "case=";
  switch (p.tag.kind) {
    case CaseKind::Shift:
      os << "shift h=" << rat_str(p.tag.h);
      break;
    case CaseKind::QDiff:
      os << "q q=" << rat_str(p.tag.q);
      break;
    case CaseKind::Mahler:
      os << "mahler p=" << p.tag.p;
      break;
  }
  if (p.ramification != 1) os << " ram=" << p.ramification;
  os << "\nop: ";
  for (size_t i = 0; i < p.op_coeffs.size(); ++i) {
    if (i) os << ", ";
    os << p.op_coeffs[i].str();
  }
  if (!p.rhs.is_zero()) os << "\nrhs: " << p.rhs.str();
  if (p.prefix_pairs) {
    os << "\nprefix: ";
    for (size_t i = 0; i < p.prefix_pairs->size(); ++i) {
      if (i) os << ", ";
      os << (*p.prefix_pairs)[i].first << ":" << rat_str((*p.prefix_pairs)[i].second);
    }
  }
  std::ostringstream cfg;
  if (p.config.truncation) cfg << " truncation=" << *p.config.truncation;
  if (p.config.degree) cfg << " degree=" << *p.config.degree;
  if (p.config.orbit) cfg << " orbit=" << *p.config.orbit;
  if (p.config.iterate) {
    cfg << " iterate=";
    for (size_t i = 0; i < p.config.iterate->size(); ++i) {
      if (i) cfg << ",";
      cfg << (*p.config.iterate)[i];
    }
  }
  if (p.config.seed) cfg << " seed=" << *p.config.seed;
  if (!cfg.str().empty()) os << "\nconfig:" << cfg.str();
  os << "\n";
  return os.str();
}

}  // namespace hypertrans
