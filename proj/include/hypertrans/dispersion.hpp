#pragma once

#include <cstdint>
#include <vector>

#include "cases.hpp"

namespace hypertrans {

namespace detail {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

inline u64 addm(u64 a, u64 b, u64 p) {
  u64 s = a + b;
  return s >= p ? s - p : s;
}
inline u64 subm(u64 a, u64 b, u64 p) { return a >= b ? a - b : a + p - b; }
inline u64 mulm(u64 a, u64 b, u64 p) { return static_cast<u64>(u128(a) * b % p); }

inline u64 powm(u64 a, u64 e, u64 p) {
  u64 r = 1 % p;
  while (e) {
    if (e & 1) r = mulm(r, a, p);
    a = mulm(a, a, p);
    e >>= 1;
  }
  return r;
}

inline u64 invm(u64 a, u64 p) { return powm(a, p - 2, p); }

inline void trim_mod(std::vector<u64>& c) {
  while (!c.empty() && c.back() == 0) c.pop_back();
}

// In-place remainder of a by b over F_p; b must be nonempty after trimming.
inline void rem_mod(std::vector<u64>& a, const std::vector<u64>& b, u64 p) {
  u64 inv = invm(b.back(), p);
  while (a.size() >= b.size()) {
    u64 f = mulm(a.back(), inv, p);
    size_t off = a.size() - b.size();
    for (size_t i = 0; i + 1 < b.size(); ++i) a[off + i] = subm(a[off + i], mulm(f, b[i], p), p);
    a.pop_back();
    trim_mod(a);
    if (a.empty()) return;
  }
}

inline long gcd_degree_mod(std::vector<u64> a, std::vector<u64> b, u64 p) {
  trim_mod(a);
  trim_mod(b);
  while (!b.empty()) {
    rem_mod(a, b, p);
    std::swap(a, b);
  }
  return static_cast<long>(a.size()) - 1;
}

// Replaces g(y) by g(y + a) over F_p.
inline void taylor_shift_mod(std::vector<u64>& g, u64 a, u64 p) {
  if (a == 0) return;
  long d = static_cast<long>(g.size()) - 1;
  for (long k = 0; k < d; ++k)
    for (long i = d - 1; i >= k; --i) g[i] = addm(g[i], mulm(a, g[i + 1], p), p);
}

// Rational coefficients scaled to a primitive integer vector.
inline std::vector<mpz_class> integer_coeffs(const Poly& f) {
  Rat scale = f.denominator_lcm();
  std::vector<mpz_class> out;
  mpz_class content = 0;
  for (long i = 0; i <= f.degree(); ++i) {
    Rat c = f[i] * scale;
    out.push_back(mpz_class(c.get_num()));
    mpz_gcd(content.get_mpz_t(), content.get_mpz_t(), out.back().get_mpz_t());
  }
  if (content > 1)
    for (auto& c : out) mpz_divexact(c.get_mpz_t(), c.get_mpz_t(), content.get_mpz_t());
  return out;
}

inline u64 mod_of(const mpz_class& v, u64 p) {
  unsigned long r = mpz_fdiv_ui(v.get_mpz_t(), static_cast<unsigned long>(p));
  return static_cast<u64>(r);
}

inline std::vector<u64> mod_coeffs(const std::vector<mpz_class>& v, u64 p) {
  std::vector<u64> out;
  out.reserve(v.size());
  for (const auto& c : v) out.push_back(mod_of(c, p));
  return out;
}

}  // namespace detail

// Dispersion set: all integers l >= 0 such that f(x) and sigma^l(g)(x) have a
// common root, i.e. Res_x(f(x), g(x + l*h)) = 0 (shift) or
// Res_x(f(x), g(q^l * x)) = 0 (q-difference). The scan range comes from
// Cauchy-type bounds on the root moduli, which is what makes the set finite
// and the computation complete. The shift scan filters candidates with a gcd
// over a word-size prime field before confirming them exactly, so the cost
// per offset stays flat even when the coefficients are large. The Mahler case
// has no analogous finite orbit structure here and is rejected.
inline std::vector<long> dispersion(const Poly& f, const Poly& g, const CaseTag& tag) {
  if (f.is_zero() || g.is_zero()) fail(ErrorKind::SemanticError, "dispersion of zero polynomial");
  std::vector<long> out;
  if (f.is_constant() || g.is_constant()) return out;
  switch (tag.kind) {
    case CaseKind::Shift: {
      // A common root of f(x) and g(x + l*h) gives roots z_f of f and z_g of
      // g with l*h = z_g - z_f, so |l| <= (B_f + B_g) / |h|.
      Rat bound = (f.root_bound() + g.root_bound()) / rat_abs(tag.h);
      if (bound > 4000000) fail(ErrorKind::Internal, "dispersion scan runaway");
      long lmax = static_cast<long>(bound.get_d());
      while (Rat(lmax) > bound) --lmax;
      while (Rat(lmax + 1) <= bound) ++lmax;

      // Rescale x = y / den(h) so that sigma becomes an integer shift of y.
      mpz_class hn = tag.h.get_num(), hd = tag.h.get_den();
      Poly fi = f.scale_x(Rat(1) / Rat(hd));
      Poly gi = g.scale_x(Rat(1) / Rat(hd));
      std::vector<mpz_class> fz = detail::integer_coeffs(fi);
      std::vector<mpz_class> gz = detail::integer_coeffs(gi);

      static const detail::u64 primes[] = {2305843009213693951ull, 2147483647ull, 2147483629ull,
                                           1000000007ull, 998244353ull};
      const detail::u64* prime = nullptr;
      for (const auto& p : primes)
        if (detail::mod_of(fz.back(), p) != 0 && detail::mod_of(gz.back(), p) != 0 &&
            detail::mod_of(hd, p) != 0) {
          prime = &p;
          break;
        }

      if (prime) {
        detail::u64 p = *prime;
        std::vector<detail::u64> fp = detail::mod_coeffs(fz, p);
        std::vector<detail::u64> gp = detail::mod_coeffs(gz, p);
        detail::u64 step = detail::mod_of(hn, p);
        for (long l = 0; l <= lmax; ++l) {
          if (l > 0) detail::taylor_shift_mod(gp, step, p);
          if (detail::gcd_degree_mod(fp, gp, p) >= 1 &&
              !Poly::gcd(f, g.shift_x(Rat(l) * tag.h)).is_constant())
            out.push_back(l);
        }
      } else {
        for (long l = 0; l <= lmax; ++l)
          if (!Poly::gcd(f, g.shift_x(Rat(l) * tag.h)).is_constant()) out.push_back(l);
      }
      return out;
    }
    case CaseKind::QDiff: {
      if (f[0] == 0 || g[0] == 0)
        fail(ErrorKind::SemanticError, "q-dispersion requires inputs coprime to x");
      // A common root of f(x) and g(q^l x) gives nonzero roots z_f, z_g with
      // q^l = z_g / z_f, so |q|^l lies in [m_g/B_f, B_g/m_f].
      Rat lo = g.root_lower_bound() / f.root_bound();
      Rat hi = g.root_bound() / f.root_lower_bound();
      Rat aq = rat_abs(tag.q);
      Rat t(1);
      for (long l = 0;; ++l) {
        if (aq > 1 && t > hi) break;
        if (aq < 1 && t < lo) break;
        if (t >= lo && t <= hi && Poly::resultant(f, g.scale_x(rat_pow(tag.q, l))) == 0)
          out.push_back(l);
        t *= aq;
        if (l > 1000000) fail(ErrorKind::Internal, "dispersion scan runaway");
      }
      return out;
    }
    case CaseKind::Mahler:
      fail(ErrorKind::UnsupportedCase, "dispersion is not defined for the Mahler case");
  }
  return out;
}

}  // namespace hypertrans
