#pragma once

// Truncated Laurent/Puiseux series with the sigma and derivation actions.
//
// A series stores exact rational coefficients for exponent steps
// val, val+1, ..., order-1 of the local uniformizer t, where
//   point ZERO:      t = x^(1/ell)
//   point INFINITY:  t = 1/x          (ell is always 1 here)
// Every exponent step below `order` is known: steps below `val` are zero,
// steps in [val, order) are stored explicitly.  Operations propagate the
// guaranteed order pessimistically and never overstate what is known.

#include <numeric>
#include <optional>
#include <sstream>
#include <vector>

#include "hypertrans/cases.hpp"
#include "hypertrans/ratfunc.hpp"

namespace hypertrans {

class TruncatedSeries {
 public:
  TruncatedSeries(const CaseTag& tag, ExpansionPoint point, long ell, long val,
                  std::vector<Rat> coeffs)
      : tag_(tag), point_(point), ell_(ell), val_(val), c_(std::move(coeffs)) {
    if (ell_ < 1) fail(ErrorKind::SemanticError, "ramification index must be positive");
    if (point_ == ExpansionPoint::Infinity && tag_.kind != CaseKind::Shift)
      fail(ErrorKind::CaseMismatch, "series at infinity exist only for the shift case");
    if (point_ == ExpansionPoint::Zero && tag_.kind == CaseKind::Shift)
      fail(ErrorKind::CaseMismatch, "shift series are expanded at infinity");
    if (point_ == ExpansionPoint::None)
      fail(ErrorKind::SemanticError, "series needs an expansion point");
    if (tag_.kind == CaseKind::Shift && ell_ != 1)
      fail(ErrorKind::UnsupportedCase, "no ramification in the shift case");
    if (c_.empty()) fail(ErrorKind::TruncationTooShort, "empty coefficient window");
    normalize();
  }

  static TruncatedSeries zero_truncation(const CaseTag& tag, ExpansionPoint point, long ell,
                                         long order) {
    return TruncatedSeries(tag, point, ell, order - 1, {Rat(0)});
  }

  const CaseTag& tag() const { return tag_; }
  ExpansionPoint point() const { return point_; }
  long ramification() const { return ell_; }
  long val() const { return val_; }
  long order() const { return val_ + static_cast<long>(c_.size()); }

  bool is_zero() const {
    for (const auto& a : c_)
      if (a != 0) return false;
    return true;
  }

  // Exact valuation of the truncation, or nullopt when it is identically zero.
  std::optional<long> true_val() const {
    for (size_t i = 0; i < c_.size(); ++i)
      if (c_[i] != 0) return val_ + static_cast<long>(i);
    return std::nullopt;
  }

  // Coefficient of t^(m/ell).  Steps below the stored window are known zero;
  // steps at or beyond the truncation order are not known.
  const Rat& coeff_step(long m) const {
    static const Rat kZero(0);
    if (m >= order())
      fail(ErrorKind::TruncationTooShort, "coefficient beyond the truncation order");
    if (m < val_) return kZero;
    return c_[static_cast<size_t>(m - val_)];
  }

  const std::vector<Rat>& stored() const { return c_; }

  TruncatedSeries truncated(long new_order) const {
    if (new_order >= order()) return *this;
    if (new_order <= val_) return zero_truncation(tag_, point_, ell_, new_order);
    std::vector<Rat> w(c_.begin(), c_.begin() + static_cast<size_t>(new_order - val_));
    return TruncatedSeries(tag_, point_, ell_, val_, std::move(w));
  }

  // Rewrites the series over a finer ramification lattice (new_ell a multiple
  // of the current one); intermediate steps are known zero.
  TruncatedSeries with_ramification(long new_ell) const {
    if (new_ell == ell_) return *this;
    if (new_ell < ell_ || new_ell % ell_ != 0)
      fail(ErrorKind::NoncommensurableRamification,
           "ramification can only be refined to a multiple");
    long f = new_ell / ell_;
    std::vector<Rat> w(static_cast<size_t>((order() - val_) * f), Rat(0));
    for (size_t i = 0; i < c_.size(); ++i) w[i * static_cast<size_t>(f)] = c_[i];
    return TruncatedSeries(tag_, point_, ell_, val_ * f, std::move(w)).with_ell_tag(new_ell);
  }

  TruncatedSeries operator-() const {
    std::vector<Rat> w(c_);
    for (auto& a : w) a = -a;
    return TruncatedSeries(tag_, point_, ell_, val_, std::move(w));
  }

  friend TruncatedSeries operator+(const TruncatedSeries& a, const TruncatedSeries& b) {
    auto [x, y] = merged(a, b);
    long v = std::min(x.val_, y.val_);
    long n = std::min(x.order(), y.order());
    std::vector<Rat> w(static_cast<size_t>(n - v), Rat(0));
    for (long m = v; m < n; ++m)
      w[static_cast<size_t>(m - v)] = x.coeff_window(m) + y.coeff_window(m);
    return TruncatedSeries(x.tag_, x.point_, x.ell_, v, std::move(w));
  }

  friend TruncatedSeries operator-(const TruncatedSeries& a, const TruncatedSeries& b) {
    return a + (-b);
  }

  friend TruncatedSeries operator*(const TruncatedSeries& a, const TruncatedSeries& b) {
    auto [x, y] = merged(a, b);
    long v = x.val_ + y.val_;
    long n = std::min(x.order() + y.val_, y.order() + x.val_);
    if (n <= v) fail(ErrorKind::TruncationTooShort, "product has no certain coefficient");
    std::vector<Rat> w(static_cast<size_t>(n - v), Rat(0));
    for (size_t i = 0; i < x.c_.size(); ++i) {
      if (x.c_[i] == 0) continue;
      for (size_t j = 0; j < y.c_.size(); ++j) {
        long e = x.val_ + static_cast<long>(i) + y.val_ + static_cast<long>(j);
        if (e >= n) break;
        w[static_cast<size_t>(e - v)] += x.c_[i] * y.c_[j];
      }
    }
    return TruncatedSeries(x.tag_, x.point_, x.ell_, v, std::move(w));
  }

  friend TruncatedSeries operator*(const Rat& s, const TruncatedSeries& a) {
    std::vector<Rat> w(a.c_);
    for (auto& x : w) x *= s;
    return TruncatedSeries(a.tag_, a.point_, a.ell_, a.val_, std::move(w));
  }

  friend TruncatedSeries div(const TruncatedSeries& a, const TruncatedSeries& b) {
    auto [x, y] = merged(a, b);
    auto vb = y.true_val();
    if (!vb) fail(ErrorKind::ZeroDivisor, "division by an identically zero truncation");
    long la = x.order() - x.val_;
    long lb = y.order() - *vb;
    long len = std::min(la, lb);
    if (len <= 0) fail(ErrorKind::TruncationTooShort, "quotient has no certain coefficient");
    const Rat& b0 = y.coeff_window(*vb);
    std::vector<Rat> q(static_cast<size_t>(len), Rat(0));
    for (long k = 0; k < len; ++k) {
      Rat acc = x.coeff_window(x.val_ + k);
      for (long j = 1; j <= k; ++j) acc -= y.coeff_window(*vb + j) * q[static_cast<size_t>(k - j)];
      q[static_cast<size_t>(k)] = acc / b0;
    }
    return TruncatedSeries(x.tag_, x.point_, x.ell_, x.val_ - *vb, std::move(q));
  }

  // Structural equality of truncations: same tag, point, order and coefficients
  // on the merged ramification lattice.
  friend bool operator==(const TruncatedSeries& a, const TruncatedSeries& b) {
    if (!(a.tag_ == b.tag_) || a.point_ != b.point_) return false;
    auto [x, y] = merged(a, b);
    if (x.order() != y.order()) return false;
    long v = std::min(x.val_, y.val_);
    for (long m = v; m < x.order(); ++m)
      if (x.coeff_window(m) != y.coeff_window(m)) return false;
    return true;
  }
  friend bool operator!=(const TruncatedSeries& a, const TruncatedSeries& b) {
    return !(a == b);
  }

  std::string str() const {
    std::ostringstream os;
    bool first = true;
    for (size_t i = 0; i < c_.size(); ++i) {
      if (c_[i] == 0) continue;
      long m = val_ + static_cast<long>(i);
      Rat coef = c_[i];
      if (first) {
        if (coef < 0) os << "-";
      } else {
        os << (coef < 0 ? " - " : " + ");
      }
      Rat ac = rat_abs(coef);
      std::string term = exponent_str(m);
      if (term.empty())
        os << rat_str(ac);
      else if (ac == 1)
        os << term;
      else
        os << rat_str(ac) << "*" << term;
      first = false;
    }
    if (first) os << "0";
    os << " + O(" << big_o_str() << ")";
    return os.str();
  }

 private:
  CaseTag tag_;
  ExpansionPoint point_;
  long ell_;
  long val_;
  std::vector<Rat> c_;

  TruncatedSeries with_ell_tag(long new_ell) const {
    TruncatedSeries r = *this;
    r.ell_ = new_ell;
    return r;
  }

  // Coefficient lookup that never throws; callers stay inside the window.
  const Rat& coeff_window(long m) const {
    static const Rat kZero(0);
    if (m < val_ || m >= order()) return kZero;
    return c_[static_cast<size_t>(m - val_)];
  }

  void normalize() {
    size_t lead = 0;
    while (lead + 1 < c_.size() && c_[lead] == 0) ++lead;
    if (lead > 0) {
      val_ += static_cast<long>(lead);
      c_.erase(c_.begin(), c_.begin() + static_cast<long>(lead));
    }
  }

  static std::pair<TruncatedSeries, TruncatedSeries> merged(const TruncatedSeries& a,
                                                            const TruncatedSeries& b) {
    if (!(a.tag_ == b.tag_) || a.point_ != b.point_)
      fail(ErrorKind::CaseMismatch, "series live over different difference fields");
    long l = std::lcm(a.ell_, b.ell_);
    return {a.with_ramification(l), b.with_ramification(l)};
  }

  std::string exponent_str(long m) const {
    if (m == 0) return "";
    long num = point_ == ExpansionPoint::Infinity ? -m : m;
    long den = ell_;
    long g = std::gcd(num < 0 ? -num : num, den);
    num /= g;
    den /= g;
    std::ostringstream os;
    os << "x";
    if (num == 1 && den == 1) return os.str();
    os << "^";
    if (den == 1)
      os << num;
    else
      os << "(" << num << "/" << den << ")";
    return os.str();
  }

  std::string big_o_str() const {
    long m = order();
    long num = point_ == ExpansionPoint::Infinity ? -m : m;
    long den = ell_;
    long g = std::gcd(num < 0 ? -num : num, den);
    std::ostringstream os;
    os << "x^";
    if (den / g == 1)
      os << num / g;
    else
      os << "(" << num / g << "/" << den / g << ")";
    return os.str();
  }
};

enum class SeriesOp { Add, Mul, Div };

inline TruncatedSeries series_arith(const TruncatedSeries& a, const TruncatedSeries& b,
                                    SeriesOp op) {
  switch (op) {
    case SeriesOp::Add: return a + b;
    case SeriesOp::Mul: return a * b;
    case SeriesOp::Div: return div(a, b);
  }
  fail(ErrorKind::Internal, "unknown series operation");
}

// Coefficients of (1 + h t)^e as a power series of the given length.
inline std::vector<Rat> binomial_series(const Rat& h, long e, long len) {
  std::vector<Rat> b(static_cast<size_t>(std::max<long>(len, 1)), Rat(0));
  b[0] = 1;
  for (long j = 0; j + 1 < len; ++j)
    b[static_cast<size_t>(j + 1)] = b[static_cast<size_t>(j)] * h * Rat(e - j) / Rat(j + 1);
  return b;
}

inline TruncatedSeries apply_sigma_series(const TruncatedSeries& f, long r = 1) {
  const CaseTag& tag = f.tag();
  if (r == 0) return f;
  switch (tag.kind) {
    case CaseKind::QDiff: {
      auto root = rat_root(tag.q, f.ramification());
      if (!root)
        fail(ErrorKind::NonRationalRamifiedParameter,
             "q has no rational root of order " + std::to_string(f.ramification()));
      std::vector<Rat> w;
      w.reserve(f.stored().size());
      for (long m = f.val(); m < f.order(); ++m)
        w.push_back(f.coeff_step(m) * rat_pow(*root, m * r));
      return TruncatedSeries(tag, f.point(), f.ramification(), f.val(), std::move(w));
    }
    case CaseKind::Mahler: {
      if (r < 0) fail(ErrorKind::UnsupportedCase, "Mahler sigma is not invertible on series");
      long pr = 1;
      for (long i = 0; i < r; ++i) pr *= tag.p;
      long v = f.val() * pr;
      long n = f.order() * pr;
      std::vector<Rat> w(static_cast<size_t>(n - v), Rat(0));
      for (long m = f.val(); m < f.order(); ++m)
        w[static_cast<size_t>(m * pr - v)] = f.coeff_step(m);
      return TruncatedSeries(tag, f.point(), f.ramification(), v, std::move(w));
    }
    case CaseKind::Shift: {
      // f(x + rh) at infinity: substitute u -> u / (1 + rh u).
      Rat step = Rat(r) * tag.h;
      if (f.is_zero()) return f;
      long v = f.val();
      long len = f.order() - v;
      std::vector<Rat> g(f.stored());
      std::vector<Rat> w = binomial_series(step, -1, len);
      auto mul_trunc = [len](const std::vector<Rat>& a, const std::vector<Rat>& b) {
        std::vector<Rat> c(static_cast<size_t>(len), Rat(0));
        for (size_t i = 0; i < a.size() && static_cast<long>(i) < len; ++i) {
          if (a[i] == 0) continue;
          for (size_t j = 0; j < b.size() && static_cast<long>(i + j) < len; ++j)
            c[i + j] += a[i] * b[j];
        }
        return c;
      };
      // phi = u * w(u); composition by Horner in phi.
      std::vector<Rat> comp(static_cast<size_t>(len), Rat(0));
      for (size_t k = g.size(); k-- > 0;) {
        // comp = comp * phi + g[k]; multiplying by u shifts indices up by one.
        std::vector<Rat> t = mul_trunc(comp, w);
        std::vector<Rat> shifted(static_cast<size_t>(len), Rat(0));
        for (long i = 0; i + 1 < len; ++i)
          shifted[static_cast<size_t>(i + 1)] = t[static_cast<size_t>(i)];
        shifted[0] += g[k];
        comp = std::move(shifted);
      }
      std::vector<Rat> head = mul_trunc(comp, binomial_series(step, -v, len));
      return TruncatedSeries(tag, f.point(), 1, v, std::move(head));
    }
  }
  fail(ErrorKind::Internal, "unknown case kind");
}

inline TruncatedSeries derive_series(const TruncatedSeries& f) {
  const CaseTag& tag = f.tag();
  if (f.point() == ExpansionPoint::Infinity) {
    // d/dx sends x^(-m) to -m x^(-m-1): step m -> m+1 with factor -m.
    std::vector<Rat> w;
    w.reserve(f.stored().size());
    for (long m = f.val(); m < f.order(); ++m) w.push_back(Rat(-m) * f.coeff_step(m));
    return TruncatedSeries(tag, f.point(), 1, f.val() + 1, std::move(w));
  }
  // x d/dx sends x^(m/ell) to (m/ell) x^(m/ell).
  std::vector<Rat> w;
  w.reserve(f.stored().size());
  for (long m = f.val(); m < f.order(); ++m)
    w.push_back(rat(m, f.ramification()) * f.coeff_step(m));
  return TruncatedSeries(tag, f.point(), f.ramification(), f.val(), std::move(w));
}

// Power series expansion of n/d at 0 where d(0) != 0, to `len` coefficients.
inline std::vector<Rat> power_series_quotient(const Poly& n, const Poly& d, long len) {
  check_internal(!d.is_zero() && d[0] != 0, "quotient expansion needs a unit denominator");
  std::vector<Rat> q(static_cast<size_t>(std::max<long>(len, 0)), Rat(0));
  for (long k = 0; k < len; ++k) {
    Rat acc = n[k];
    for (long j = 1; j <= k && j <= d.degree(); ++j) acc -= d[j] * q[static_cast<size_t>(k - j)];
    q[static_cast<size_t>(k)] = acc / d[0];
  }
  return q;
}

// Exact expansion of a rational function at 0 or infinity, with `order`
// exponent steps of the ramified uniformizer known.
inline TruncatedSeries expand_ratfunc(const RatFunc& f, const CaseTag& tag, ExpansionPoint point,
                                      long order, long ell = 1) {
  if (f.is_zero()) return TruncatedSeries::zero_truncation(tag, point, ell, order);
  if (point == ExpansionPoint::Zero) {
    long v = *f.valuation_at_zero();
    Poly n = f.num().strip_x();
    Poly d = f.den().strip_x();
    long vs = v * ell;
    long len = order - vs;
    if (len <= 0) return TruncatedSeries::zero_truncation(tag, point, ell, order);
    long xlen = (len + ell - 1) / ell;
    std::vector<Rat> unit = power_series_quotient(n, d, xlen);
    std::vector<Rat> w(static_cast<size_t>(len), Rat(0));
    for (long k = 0; k < xlen; ++k) {
      long pos = k * ell;
      if (pos < len) w[static_cast<size_t>(pos)] = unit[static_cast<size_t>(k)];
    }
    return TruncatedSeries(tag, point, ell, vs, std::move(w));
  }
  // At infinity substitute x = 1/u and expand in u.
  long v = -f.degree_at_infinity();
  Poly rn = f.num().reverse();
  Poly rd = f.den().reverse();
  long len = order - v;
  if (len <= 0) return TruncatedSeries::zero_truncation(tag, point, 1, order);
  std::vector<Rat> unit = power_series_quotient(rn, rd, len);
  return TruncatedSeries(tag, point, 1, v, std::move(unit));
}

}  // namespace hypertrans
