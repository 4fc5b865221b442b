#pragma once

#include <optional>
#include <string>
#include <utility>

#include "poly.hpp"

namespace hypertrans {

// Rational function over Q in canonical form: gcd(num, den) = 1, den monic,
// zero represented as 0/1. Equality is therefore structural.
class RatFunc {
 public:
  RatFunc() : num_(), den_(Poly::one()) {}
  explicit RatFunc(const Rat& c) : num_(Poly(c)), den_(Poly::one()) {}
  explicit RatFunc(const Poly& p) : num_(p), den_(Poly::one()) {}
  RatFunc(Poly num, Poly den) : num_(std::move(num)), den_(std::move(den)) { normalize(); }

  static RatFunc zero() { return RatFunc(); }
  static RatFunc one() { return RatFunc(Rat(1)); }
  static RatFunc x() { return RatFunc(Poly::x()); }
  // c * x^e with e of either sign.
  static RatFunc monomial(long e, const Rat& c) {
    if (e >= 0) return RatFunc(Poly::monomial(e, c));
    return RatFunc(Poly(c), Poly::monomial(-e, Rat(1)));
  }

  const Poly& num() const { return num_; }
  const Poly& den() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }
  bool is_constant() const { return num_.is_constant() && den_.is_one(); }
  bool is_polynomial() const { return den_.is_one(); }
  Rat constant_value() const {
    check_internal(is_constant(), "not a constant");
    return num_[0];
  }

  friend RatFunc operator+(const RatFunc& a, const RatFunc& b) {
    return RatFunc(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
  }
  friend RatFunc operator-(const RatFunc& a, const RatFunc& b) {
    return RatFunc(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
  }
  RatFunc operator-() const {
    RatFunc r = *this;
    r.num_ = -r.num_;
    return r;
  }
  friend RatFunc operator*(const RatFunc& a, const RatFunc& b) {
    return RatFunc(a.num_ * b.num_, a.den_ * b.den_);
  }
  friend RatFunc operator/(const RatFunc& a, const RatFunc& b) {
    check_internal(!b.is_zero(), "division by zero rational function");
    return RatFunc(a.num_ * b.den_, a.den_ * b.num_);
  }
  RatFunc& operator+=(const RatFunc& o) { return *this = *this + o; }
  RatFunc& operator-=(const RatFunc& o) { return *this = *this - o; }
  RatFunc& operator*=(const RatFunc& o) { return *this = *this * o; }
  RatFunc& operator/=(const RatFunc& o) { return *this = *this / o; }

  RatFunc pow(long e) const {
    if (e == 0) return one();
    check_internal(!is_zero() || e > 0, "zero to a negative power");
    RatFunc base = e < 0 ? one() / *this : *this;
    long n = e < 0 ? -e : e;
    RatFunc acc = one();
    while (n > 0) {
      if (n & 1) acc *= base;
      base *= base;
      n >>= 1;
    }
    return acc;
  }

  friend bool operator==(const RatFunc& a, const RatFunc& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const RatFunc& a, const RatFunc& b) { return !(a == b); }

  std::optional<Rat> eval(const Rat& x0) const {
    Rat d = den_.eval(x0);
    if (d == 0) return std::nullopt;
    return num_.eval(x0) / d;
  }

  RatFunc derivative() const {
    return RatFunc(num_.derivative() * den_ - num_ * den_.derivative(), den_ * den_);
  }

  // Order of vanishing at 0 (negative for a pole); 0 maps to +infinity,
  // reported as nullopt.
  std::optional<long> valuation_at_zero() const {
    if (is_zero()) return std::nullopt;
    return num_.valuation() - den_.valuation();
  }

  // deg num - deg den: the order of growth at infinity.
  long degree_at_infinity() const {
    check_internal(!is_zero(), "degree of zero rational function");
    return num_.degree() - den_.degree();
  }

  // max(deg num, deg den); a crude height used for search bounds.
  long height() const { return std::max(num_.degree(), den_.degree()); }

  std::string str(const std::string& var = "x") const {
    if (den_.is_one()) return num_.str(var);
    auto wrap = [](const std::string& s) {
      return s.find_first_of("+-* ") == std::string::npos ? s : "(" + s + ")";
    };
    return wrap(num_.str(var)) + "/" + wrap(den_.str(var));
  }

 private:
  void normalize() {
    check_internal(!den_.is_zero(), "zero denominator");
    if (num_.is_zero()) {
      den_ = Poly::one();
      return;
    }
    Poly g = Poly::gcd(num_, den_);
    if (!g.is_one()) {
      num_ = num_ / g;
      den_ = den_ / g;
    }
    Rat lead = den_.leading();
    if (lead != 1) {
      Rat inv = 1 / lead;
      num_ = inv * num_;
      den_ = inv * den_;
    }
  }

  Poly num_, den_;
};

}  // namespace hypertrans
