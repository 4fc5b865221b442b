#pragma once

// Case-tagged Ore polynomials: operators sum a_i rho^i acting on rational
// functions and truncated series, with the twisted product rho*a = sigma(a)*rho.
// Operators are stored as a monic coefficient vector times a content factor;
// the true coefficient of rho^i is content() * monic_coeffs()[i].

#include <utility>
#include <vector>

#include "hypertrans/series.hpp"

namespace hypertrans {

class DiffOperator {
 public:
  DiffOperator(const CaseTag& tag, std::vector<RatFunc> coeffs)
      : tag_(tag), c_(std::move(coeffs)) {
    while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
    if (c_.empty()) {
      content_ = RatFunc();
      return;
    }
    content_ = c_.back();
    for (auto& a : c_) a = a / content_;
  }

  static DiffOperator zero(const CaseTag& tag) { return DiffOperator(tag, {}); }
  static DiffOperator identity(const CaseTag& tag) {
    return DiffOperator(tag, {RatFunc(Rat(1))});
  }
  static DiffOperator rho_power(const CaseTag& tag, long k) {
    std::vector<RatFunc> c(static_cast<size_t>(k) + 1);
    c.back() = RatFunc(Rat(1));
    return DiffOperator(tag, std::move(c));
  }

  const CaseTag& tag() const { return tag_; }
  bool is_zero() const { return c_.empty(); }
  long order() const { return static_cast<long>(c_.size()) - 1; }
  const RatFunc& content() const { return content_; }
  const std::vector<RatFunc>& monic_coeffs() const { return c_; }

  RatFunc coeff(long i) const {
    if (i < 0 || i > order() || is_zero()) return RatFunc();
    return content_ * c_[static_cast<size_t>(i)];
  }

  std::vector<RatFunc> coeffs() const {
    std::vector<RatFunc> out;
    out.reserve(c_.size());
    for (long i = 0; i <= order(); ++i) out.push_back(coeff(i));
    return out;
  }

  // Largest k such that the coefficients of rho^0..rho^(k-1) all vanish.
  long trailing_index() const {
    long k = 0;
    while (k <= order() && c_[static_cast<size_t>(k)].is_zero()) ++k;
    return k;
  }

  friend bool operator==(const DiffOperator& a, const DiffOperator& b) {
    if (!(a.tag_ == b.tag_) || a.order() != b.order()) return false;
    for (long i = 0; i <= a.order(); ++i)
      if (!(a.coeff(i) == b.coeff(i))) return false;
    return true;
  }
  friend bool operator!=(const DiffOperator& a, const DiffOperator& b) { return !(a == b); }

  friend DiffOperator operator+(const DiffOperator& a, const DiffOperator& b) {
    require_same_tag(a, b);
    std::vector<RatFunc> c(static_cast<size_t>(std::max(a.order(), b.order()) + 1));
    for (long i = 0; i < static_cast<long>(c.size()); ++i) c[static_cast<size_t>(i)] = a.coeff(i) + b.coeff(i);
    return DiffOperator(a.tag_, std::move(c));
  }

  friend DiffOperator operator-(const DiffOperator& a, const DiffOperator& b) {
    require_same_tag(a, b);
    std::vector<RatFunc> c(static_cast<size_t>(std::max(a.order(), b.order()) + 1));
    for (long i = 0; i < static_cast<long>(c.size()); ++i) c[static_cast<size_t>(i)] = a.coeff(i) - b.coeff(i);
    return DiffOperator(a.tag_, std::move(c));
  }

  friend DiffOperator operator*(const RatFunc& g, const DiffOperator& a) {
    std::vector<RatFunc> c = a.coeffs();
    for (auto& x : c) x = g * x;
    return DiffOperator(a.tag_, std::move(c));
  }

  std::string str() const {
    if (is_zero()) return "0";
    std::string out;
    for (long i = order(); i >= 0; --i) {
      RatFunc a = coeff(i);
      if (a.is_zero()) continue;
      std::string term;
      bool negated = false;
      if (a.is_constant() && a.constant_value() < 0) {
        negated = true;
        a = RatFunc(Rat(-1)) * a;
      }
      std::string cs = a.str();
      bool unit = a.is_constant() && a.constant_value() == 1;
      if (i == 0) {
        term = cs;
      } else {
        std::string rho = i == 1 ? "rho" : "rho^" + std::to_string(i);
        if (unit)
          term = rho;
        else if (cs.find_first_of("+-* /") != std::string::npos)
          term = "(" + cs + ")*" + rho;
        else
          term = cs + "*" + rho;
      }
      if (out.empty())
        out = negated ? "-" + term : term;
      else
        out += (negated ? " - " : " + ") + term;
    }
    return out;
  }

 private:
  CaseTag tag_;
  std::vector<RatFunc> c_;
  RatFunc content_;

  static void require_same_tag(const DiffOperator& a, const DiffOperator& b) {
    if (!(a.tag_ == b.tag_))
      fail(ErrorKind::CaseMismatch, "operators live over different difference fields");
  }
};

// An operator together with a rational right-hand side: L(f) = rhs.
struct AffineEquation {
  DiffOperator op;
  RatFunc rhs;
};

inline DiffOperator ore_mul(const DiffOperator& a, const DiffOperator& b) {
  if (!(a.tag() == b.tag()))
    fail(ErrorKind::CaseMismatch, "operators live over different difference fields");
  if (a.is_zero() || b.is_zero()) return DiffOperator::zero(a.tag());
  std::vector<RatFunc> c(static_cast<size_t>(a.order() + b.order() + 1));
  for (long i = 0; i <= a.order(); ++i) {
    RatFunc ai = a.coeff(i);
    if (ai.is_zero()) continue;
    for (long j = 0; j <= b.order(); ++j) {
      RatFunc bj = b.coeff(j);
      if (bj.is_zero()) continue;
      c[static_cast<size_t>(i + j)] += ai * apply_sigma(bj, a.tag(), i);
    }
  }
  return DiffOperator(a.tag(), std::move(c));
}

inline std::pair<DiffOperator, DiffOperator> ore_right_divmod(const DiffOperator& l,
                                                              const DiffOperator& d) {
  if (!(l.tag() == d.tag()))
    fail(ErrorKind::CaseMismatch, "operators live over different difference fields");
  if (d.is_zero()) fail(ErrorKind::ZeroDivisor, "right division by the zero operator");
  DiffOperator q = DiffOperator::zero(l.tag());
  DiffOperator r = l;
  RatFunc dlc = d.coeff(d.order());
  while (!r.is_zero() && r.order() >= d.order()) {
    long k = r.order() - d.order();
    RatFunc g = r.coeff(r.order()) / apply_sigma(dlc, l.tag(), k);
    std::vector<RatFunc> mono(static_cast<size_t>(k) + 1);
    mono.back() = g;
    DiffOperator t(l.tag(), std::move(mono));
    q = q + t;
    r = r - ore_mul(t, d);
  }
  check_internal(ore_mul(q, d) + r == l, "Ore division failed re-multiplication");
  return {q, r};
}

inline RatFunc apply_operator(const DiffOperator& l, const RatFunc& f) {
  RatFunc acc;
  for (long i = 0; i <= l.order(); ++i) {
    RatFunc ai = l.coeff(i);
    if (ai.is_zero()) continue;
    acc = acc + ai * apply_sigma(f, l.tag(), i);
  }
  return acc;
}

// Multiplies a series by a rational function, expanding the function far
// enough that only the series' own truncation limits the result.
inline TruncatedSeries mul_ratfunc_series(const RatFunc& a, const TruncatedSeries& s) {
  if (a.is_zero())
    return TruncatedSeries::zero_truncation(s.tag(), s.point(), s.ramification(), s.order());
  long va = s.point() == ExpansionPoint::Zero ? *a.valuation_at_zero() * s.ramification()
                                              : -a.degree_at_infinity();
  long want = s.order() - s.val() + va;
  TruncatedSeries as = expand_ratfunc(a, s.tag(), s.point(), want, s.ramification());
  return as * s;
}

inline TruncatedSeries apply_operator(const DiffOperator& l, const TruncatedSeries& f) {
  if (!(l.tag() == f.tag()))
    fail(ErrorKind::CaseMismatch, "operator and series cases differ");
  std::optional<TruncatedSeries> acc;
  for (long i = 0; i <= l.order(); ++i) {
    RatFunc ai = l.coeff(i);
    if (ai.is_zero()) continue;
    TruncatedSeries term = mul_ratfunc_series(ai, apply_sigma_series(f, i));
    acc = acc ? *acc + term : term;
  }
  if (!acc) return TruncatedSeries::zero_truncation(l.tag(), f.point(), f.ramification(),
                                                    f.order());
  return *acc;
}

inline DiffOperator right_factor_from_rational_solution(const DiffOperator& l, const RatFunc& g) {
  if (g.is_zero() || !apply_operator(l, g).is_zero())
    fail(ErrorKind::NotASolution, "the candidate does not solve the operator");
  RatFunc ratio = apply_sigma(g, l.tag()) / g;
  DiffOperator d(l.tag(), {-ratio, RatFunc(Rat(1))});
  auto [q, r] = ore_right_divmod(l, d);
  check_internal(r.is_zero(), "right factor from a rational solution must divide exactly");
  return d;
}

// Splits L as L' * rho^k with nonzero trailing coefficient of L'.
inline std::pair<DiffOperator, long> strip_rho_powers(const DiffOperator& l) {
  if (l.is_zero()) return {l, 0};
  long k = l.trailing_index();
  if (k == 0) return {l, 0};
  std::vector<RatFunc> c;
  for (long i = k; i <= l.order(); ++i) c.push_back(l.coeff(i));
  return {DiffOperator(l.tag(), std::move(c)), k};
}

// Turns L(f) = rhs into a homogeneous operator annihilating every solution.
inline DiffOperator homogenize(const AffineEquation& eq) {
  if (eq.rhs.is_zero()) return eq.op;
  RatFunc ratio = apply_sigma(eq.rhs, eq.op.tag()) / eq.rhs;
  DiffOperator front(eq.op.tag(), {-ratio, RatFunc(Rat(1))});
  return ore_mul(front, eq.op);
}

}  // namespace hypertrans
