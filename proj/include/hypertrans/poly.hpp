#pragma once

#include <algorithm>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "rational.hpp"

namespace hypertrans {

// Dense univariate polynomial over Q. Coefficient i is the coefficient of
// x^i; the top coefficient is always nonzero, the zero polynomial has an
// empty coefficient vector and degree -1.
class Poly {
 public:
  Poly() = default;
  explicit Poly(const Rat& c) {
    if (c != 0) c_.push_back(c);
  }
  explicit Poly(std::vector<Rat> coeffs) : c_(std::move(coeffs)) { trim(); }

  static Poly zero() { return Poly(); }
  static Poly one() { return Poly(Rat(1)); }
  static Poly x() { return monomial(1, Rat(1)); }
  static Poly monomial(long exp, const Rat& coeff) {
    Poly p;
    if (coeff == 0) return p;
    check_internal(exp >= 0, "monomial exponent must be nonnegative");
    p.c_.assign(static_cast<size_t>(exp) + 1, Rat(0));
    p.c_.back() = coeff;
    return p;
  }

  long degree() const { return static_cast<long>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  bool is_constant() const { return c_.size() <= 1; }
  bool is_one() const { return c_.size() == 1 && c_[0] == 1; }
  long num_terms() const {
    long n = 0;
    for (const auto& c : c_)
      if (c != 0) ++n;
    return n;
  }

  const Rat& operator[](long i) const {
    static const Rat kZero(0);
    if (i < 0 || i >= static_cast<long>(c_.size())) return kZero;
    return c_[static_cast<size_t>(i)];
  }
  const std::vector<Rat>& coeffs() const { return c_; }

  const Rat& leading() const {
    check_internal(!c_.empty(), "leading coefficient of zero polynomial");
    return c_.back();
  }

  // Smallest exponent with a nonzero coefficient; -1 for the zero polynomial.
  long valuation() const {
    for (size_t i = 0; i < c_.size(); ++i)
      if (c_[i] != 0) return static_cast<long>(i);
    return -1;
  }

  const Rat& trailing() const {
    long v = valuation();
    check_internal(v >= 0, "trailing coefficient of zero polynomial");
    return c_[static_cast<size_t>(v)];
  }

  friend Poly operator+(const Poly& a, const Poly& b) {
    std::vector<Rat> r(std::max(a.c_.size(), b.c_.size()), Rat(0));
    for (size_t i = 0; i < a.c_.size(); ++i) r[i] += a.c_[i];
    for (size_t i = 0; i < b.c_.size(); ++i) r[i] += b.c_[i];
    return Poly(std::move(r));
  }
  friend Poly operator-(const Poly& a, const Poly& b) {
    std::vector<Rat> r(std::max(a.c_.size(), b.c_.size()), Rat(0));
    for (size_t i = 0; i < a.c_.size(); ++i) r[i] += a.c_[i];
    for (size_t i = 0; i < b.c_.size(); ++i) r[i] -= b.c_[i];
    return Poly(std::move(r));
  }
  Poly operator-() const {
    Poly r(*this);
    for (auto& c : r.c_) c = -c;
    return r;
  }
  friend Poly operator*(const Poly& a, const Poly& b) {
    if (a.is_zero() || b.is_zero()) return Poly();
    std::vector<Rat> r(a.c_.size() + b.c_.size() - 1, Rat(0));
    for (size_t i = 0; i < a.c_.size(); ++i) {
      if (a.c_[i] == 0) continue;
      for (size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
    }
    return Poly(std::move(r));
  }
  friend Poly operator*(const Rat& s, const Poly& a) {
    if (s == 0) return Poly();
    Poly r(a);
    for (auto& c : r.c_) c *= s;
    return r;
  }
  Poly& operator+=(const Poly& o) { return *this = *this + o; }
  Poly& operator-=(const Poly& o) { return *this = *this - o; }
  Poly& operator*=(const Poly& o) { return *this = *this * o; }

  friend bool operator==(const Poly& a, const Poly& b) { return a.c_ == b.c_; }
  friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

  // Euclidean division by a nonzero divisor: returns (quotient, remainder).
  static std::pair<Poly, Poly> divmod(const Poly& num, const Poly& den) {
    check_internal(!den.is_zero(), "division by zero polynomial");
    Poly q, r = num;
    while (!r.is_zero() && r.degree() >= den.degree()) {
      long k = r.degree() - den.degree();
      Rat f = r.leading() / den.leading();
      Poly t = monomial(k, f);
      q += t;
      r -= t * den;
    }
    return {q, r};
  }

  friend Poly operator/(const Poly& a, const Poly& b) {
    auto [q, r] = divmod(a, b);
    check_internal(r.is_zero(), "inexact polynomial division");
    return q;
  }
  friend Poly operator%(const Poly& a, const Poly& b) { return divmod(a, b).second; }

  bool divides(const Poly& other) const { return divmod(other, *this).second.is_zero(); }

  // Monic gcd.
  // Monic gcd via a primitive pseudo-remainder sequence over the integers,
  // which keeps intermediate coefficients from exploding on large degrees.
  static Poly gcd(const Poly& pa, const Poly& pb) {
    if (pa.is_zero() && pb.is_zero()) return Poly();
    if (pa.is_zero()) return (Rat(1) / pb.leading()) * pb;
    if (pb.is_zero()) return (Rat(1) / pa.leading()) * pa;
    std::vector<Int> a = integer_primitive(pa);
    std::vector<Int> b = integer_primitive(pb);
    if (a.size() < b.size()) std::swap(a, b);
    while (!b.empty()) {
      std::vector<Int> r = pseudo_rem(a, b);
      make_primitive(r);
      a = std::move(b);
      b = std::move(r);
    }
    std::vector<Rat> c(a.size());
    for (size_t i = 0; i < a.size(); ++i) c[i] = Rat(a[i]);
    Poly g(std::move(c));
    return (Rat(1) / g.leading()) * g;
  }

  static Poly lcm(const Poly& a, const Poly& b) {
    if (a.is_zero() || b.is_zero()) return Poly();
    Poly g = gcd(a, b);
    Poly l = (a / g) * b;
    return (Rat(1) / l.leading()) * l;
  }

  Rat eval(const Rat& x0) const {
    Rat acc(0);
    for (size_t i = c_.size(); i-- > 0;) acc = acc * x0 + c_[i];
    return acc;
  }

  Poly derivative() const {
    if (c_.size() <= 1) return Poly();
    std::vector<Rat> r(c_.size() - 1);
    for (size_t i = 1; i < c_.size(); ++i) r[i - 1] = Rat(long(i)) * c_[i];
    return Poly(std::move(r));
  }

  // f(x + t), Taylor shift by repeated synthetic division.
  Poly shift_x(const Rat& t) const {
    if (t == 0 || is_zero()) return *this;
    std::vector<Rat> work = c_;
    std::vector<Rat> out(c_.size());
    for (size_t k = 0; k < c_.size(); ++k) {
      for (size_t i = work.size() - 1; i-- > k;) work[i] += t * work[i + 1];
      out[k] = work[k];
    }
    return Poly(std::move(out));
  }

  // f(s * x).
  Poly scale_x(const Rat& s) const {
    if (is_zero()) return *this;
    if (s == 0) return Poly((*this)[0]);
    std::vector<Rat> r = c_;
    Rat p(1);
    for (size_t i = 1; i < r.size(); ++i) {
      p *= s;
      r[i] *= p;
    }
    return Poly(std::move(r));
  }

  // f(x^m).
  Poly stretch_x(long m) const {
    check_internal(m >= 1, "stretch exponent must be >= 1");
    if (is_zero() || m == 1) return *this;
    std::vector<Rat> r(static_cast<size_t>(degree()) * m + 1, Rat(0));
    for (size_t i = 0; i < c_.size(); ++i) r[i * m] = c_[i];
    return Poly(std::move(r));
  }

  // Inverse of stretch_x: g with g(x^m) == f, when the support allows it.
  std::optional<Poly> unstretch_x(long m) const {
    check_internal(m >= 1, "unstretch exponent must be >= 1");
    if (is_zero() || m == 1) return *this;
    std::vector<Rat> r(static_cast<size_t>(degree()) / m + 1, Rat(0));
    for (size_t i = 0; i < c_.size(); ++i) {
      if (c_[i] == 0) continue;
      if (i % m != 0) return std::nullopt;
      r[i / m] = c_[i];
    }
    return Poly(std::move(r));
  }

  // x^deg * f(1/x).
  Poly reverse() const {
    std::vector<Rat> r(c_.rbegin(), c_.rend());
    return Poly(std::move(r));
  }

  // f / x^valuation.
  Poly strip_x() const {
    if (is_zero()) return *this;
    long v = valuation();
    return Poly(std::vector<Rat>(c_.begin() + v, c_.end()));
  }

  Poly monic() const {
    if (is_zero()) return *this;
    return (Rat(1) / leading()) * *this;
  }

  // lcm of coefficient denominators; scaling by it gives integer coefficients.
  Int denominator_lcm() const {
    Int l(1);
    for (const auto& c : c_) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den().get_mpz_t());
    return l;
  }

  // Cauchy bound: every complex root z has |z| <= bound.
  Rat root_bound() const {
    check_internal(!is_zero(), "root bound of zero polynomial");
    Rat m(0);
    for (size_t i = 0; i + 1 < c_.size(); ++i) m = std::max(m, rat_abs(c_[i]));
    return 1 + m / rat_abs(leading());
  }

  // Lower bound on |z| over nonzero roots z (requires f(0) != 0 after
  // stripping x factors is the caller's business).
  Rat root_lower_bound() const {
    check_internal(!is_zero() && (*this)[0] != 0, "root lower bound needs f(0) != 0");
    return 1 / reverse().root_bound();
  }

  // Resultant of two polynomials via the Euclidean remainder sequence.
  static Rat resultant(const Poly& f, const Poly& g) {
    if (f.is_zero() || g.is_zero()) return Rat(0);
    Poly a = f, b = g;
    Rat acc(1);
    bool swapped = false;
    // res(a, b) = (-1)^(deg a * deg b) res(b, a); keep deg a >= deg b.
    while (true) {
      if (a.degree() < b.degree()) {
        if ((a.degree() % 2) && (b.degree() % 2)) acc = -acc;
        std::swap(a, b);
      }
      if (b.degree() == 0) {
        return acc * rat_pow(b.leading(), a.degree());
      }
      Poly r = a % b;
      if (r.is_zero()) return Rat(0);
      acc *= rat_pow(b.leading(), a.degree() - r.degree());
      if ((a.degree() % 2) && (b.degree() % 2)) acc = -acc;
      a = std::move(b);
      b = std::move(r);
    }
  }

  std::string str(const std::string& var = "x") const {
    if (is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (size_t i = c_.size(); i-- > 0;) {
      const Rat& c = c_[i];
      if (c == 0) continue;
      Rat ac = rat_abs(c);
      if (first) {
        if (c < 0) os << "-";
        first = false;
      } else {
        os << (c < 0 ? " - " : " + ");
      }
      bool unit = (ac == 1);
      if (i == 0) {
        os << ac.get_str();
      } else {
        if (!unit) os << ac.get_str() << "*";
        os << var;
        if (i > 1) os << "^" << i;
      }
    }
    return os.str();
  }

 private:
  void trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
  }

  // Integer coefficient vector of the primitive part (positive leading sign).
  static std::vector<Int> integer_primitive(const Poly& p) {
    Int den(1);
    for (const auto& r : p.c_)
      mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), mpq_denref(r.get_mpq_t()));
    std::vector<Int> w(p.c_.size());
    for (size_t i = 0; i < w.size(); ++i) {
      Rat scaled = p.c_[i] * Rat(den);
      w[i] = scaled.get_num();
    }
    make_primitive(w);
    return w;
  }

  static void make_primitive(std::vector<Int>& w) {
    while (!w.empty() && w.back() == 0) w.pop_back();
    if (w.empty()) return;
    Int g(0);
    for (const auto& x : w) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
    if (sgn(w.back()) < 0) g = -g;
    for (auto& x : w) x /= g;
  }

  // Remainder of lc(b)^s * a divided by b over the integers, for the s the
  // elimination happens to need; only the primitive part matters to callers.
  static std::vector<Int> pseudo_rem(std::vector<Int> r, const std::vector<Int>& b) {
    long db = static_cast<long>(b.size()) - 1;
    const Int& lb = b.back();
    auto trim = [&r] {
      while (!r.empty() && r.back() == 0) r.pop_back();
    };
    trim();
    while (static_cast<long>(r.size()) - 1 >= db) {
      long k = static_cast<long>(r.size()) - 1 - db;
      Int top = r.back();
      for (auto& x : r) x *= lb;
      for (long j = 0; j <= db; ++j)
        r[static_cast<size_t>(k + j)] -= top * b[static_cast<size_t>(j)];
      trim();
    }
    return r;
  }

  std::vector<Rat> c_;
};

// Lagrange interpolation through distinct sample points.
inline Poly interpolate(const std::vector<std::pair<Rat, Rat>>& samples) {
  Poly acc;
  for (size_t i = 0; i < samples.size(); ++i) {
    Poly basis = Poly::one();
    Rat denom(1);
    for (size_t j = 0; j < samples.size(); ++j) {
      if (i == j) continue;
      basis *= Poly({std::vector<Rat>{-samples[j].first, Rat(1)}});
      denom *= samples[i].first - samples[j].first;
    }
    acc += (samples[i].second / denom) * basis;
  }
  return acc;
}

}  // namespace hypertrans
