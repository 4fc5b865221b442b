#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hypertrans/cases.hpp"
#include "hypertrans/dispersion.hpp"
#include "hypertrans/ore.hpp"
#include "hypertrans/poly.hpp"
#include "hypertrans/ratfunc.hpp"
#include "hypertrans/rational.hpp"
#include "hypertrans/rationality.hpp"
#include "hypertrans/series.hpp"

namespace hypertrans {

// Multiplicative normal form a = a_star * sigma(e)/e where a_star is
// standard: no zero or pole of a_star meets a zero or pole of sigma^l(a_star)
// for any l >= 1.
struct StandardDecomposition {
  RatFunc a_star;
  RatFunc e;
};

namespace detail {

// prod_{j=0}^{len-1} sigma^j(g).  For this w the quotient sigma(w)/w
// telescopes to sigma^len(g)/g, which is what moves an orbit-linked factor
// pair of the input into the e part of the decomposition.
inline RatFunc sigma_chain(const Poly& g, const CaseTag& tag, long len) {
  Poly w = Poly::one();
  for (long j = 0; j < len; ++j) w = w * apply_sigma(g, tag, j);
  return RatFunc(w);
}

struct OrbitLink {
  long ell = 0;
  int pair = 0;  // 0 num/num, 1 den/den, 2 num/den, 3 den/num
  Poly g;        // common factor of X and sigma^ell(Y)
};

// Smallest l >= 1 such that num or den of the current multiplier shares a
// factor with a sigma^l image of num or den.  The q-case works on x-stripped
// parts: the x-power factors live on the fixed orbit of 0 and are standard.
inline std::optional<OrbitLink> find_orbit_link(const Poly& n, const Poly& d,
                                                const CaseTag& tag) {
  Poly sn = n, sd = d;
  if (tag.kind == CaseKind::QDiff) {
    sn = sn.strip_x();
    sd = sd.strip_x();
  }
  const Poly* part[2] = {&sn, &sd};
  static const int xs[4] = {0, 1, 0, 1};
  static const int ys[4] = {0, 1, 1, 0};
  std::optional<OrbitLink> best;
  for (int pi = 0; pi < 4; ++pi) {
    const Poly& x = *part[xs[pi]];
    const Poly& y = *part[ys[pi]];
    if (x.is_constant() || y.is_constant()) continue;
    std::vector<long> ds = dispersion(x, y, tag);
    std::sort(ds.begin(), ds.end());
    for (long ell : ds) {
      if (ell < 1) continue;
      Poly g = Poly::gcd(x, apply_sigma(y, tag, ell));
      if (g.is_constant()) continue;
      if (!best || ell < best->ell) best = OrbitLink{ell, pi, g};
      break;
    }
  }
  return best;
}

}  // namespace detail

// Splits a nonzero multiplier as a = a_star * sigma(e)/e with a_star
// standard.  Each round picks an orbit-linked factor pair, multiplies the
// working multiplier by sigma(w)/w or its inverse for the telescoping chain
// w of the linked factor, and lets the rational normalization cancel what
// the link made redundant; linked positions either merge or annihilate, so
// the loop terminates.
inline StandardDecomposition standard_decompose(const RatFunc& a, const CaseTag& tag) {
  if (tag.kind == CaseKind::Mahler)
    fail(ErrorKind::UnsupportedCase, "standard decomposition needs a finite-orbit sigma");
  if (a.is_zero()) fail(ErrorKind::SemanticError, "standard decomposition of zero");
  RatFunc cur = a;
  RatFunc e(Rat(1));
  long size = a.num().degree() + a.den().degree() + 2;
  long guard = 4 * size * size + 8;
  for (long it = 0; it < guard; ++it) {
    auto lk = detail::find_orbit_link(cur.num(), cur.den(), tag);
    if (!lk) {
      StandardDecomposition out{cur, e};
      check_internal(a * out.e == out.a_star * apply_sigma(out.e, tag),
                     "standard decomposition drifted");
      return out;
    }
    Poly gdown = apply_sigma(lk->g, tag, -lk->ell);
    RatFunc w = detail::sigma_chain(gdown, tag, lk->ell);
    if (lk->pair == 0 || lk->pair == 2) {
      cur = cur * w / apply_sigma(w, tag);
      e = e * w;
    } else {
      cur = cur * apply_sigma(w, tag) / w;
      e = e / w;
    }
  }
  fail(ErrorKind::Internal, "standard decomposition did not settle");
}

// Rational solutions h of sigma(h) - a_star*h = b.  When a_star is an integer
// power q^r the solve runs in the normal form b = sigma(h) - a_star*h + d*x^r
// with a scalar d absorbing the one resonant coefficient the plain equation
// cannot reach; d is folded back to zero inside the solution family whenever
// that is possible.
struct Telescoper {
  bool family_found = false;  // some (h, d) satisfies the normal form
  bool solvable = false;      // a plain telescoper exists, i.e. d = 0
  bool normal_form = false;   // the q-power path with the x^r term was used
  RatFunc h;
  Rat d = Rat(0);
  long r = 0;
  std::vector<RatFunc> kernel;  // rational solutions of sigma(k) = a_star*k
};

inline Telescoper telescope_solve(const RatFunc& a_star, const RatFunc& b, const CaseTag& tag,
                                  const RationalSolveOptions& opt = {}) {
  if (tag.kind == CaseKind::Mahler)
    fail(ErrorKind::UnsupportedCase, "telescoping is decided for the shift and q cases only");
  if (a_star.is_zero()) fail(ErrorKind::SemanticError, "telescoping needs a nonzero multiplier");
  DiffOperator op(tag, {-a_star, RatFunc(Rat(1))});
  Telescoper out;
  if (tag.kind == CaseKind::QDiff && a_star.is_constant()) {
    auto r = q_power_exponent(a_star.constant_value(), tag.q);
    if (r) {
      out.normal_form = true;
      out.r = *r;
      auto ps = parametric_rational_solution(AffineEquation{op, b},
                                             {RatFunc::monomial(*r, Rat(1))}, opt);
      out.family_found = ps.found;
      if (!ps.found) return out;
      RatFunc h = ps.y;
      Rat d = ps.scalars[0];
      size_t pivot = ps.kernel.size();
      for (size_t i = 0; i < ps.kernel.size(); ++i)
        if (ps.kernel[i].second[0] != 0) {
          pivot = i;
          break;
        }
      std::vector<RatFunc> kernel;
      if (pivot < ps.kernel.size()) {
        const Rat& dp = ps.kernel[pivot].second[0];
        if (d != 0) h = h - RatFunc(d / dp) * ps.kernel[pivot].first;
        d = Rat(0);
        for (size_t i = 0; i < ps.kernel.size(); ++i) {
          if (i == pivot) continue;
          kernel.push_back(ps.kernel[i].first -
                           RatFunc(ps.kernel[i].second[0] / dp) * ps.kernel[pivot].first);
        }
      } else {
        for (auto& k : ps.kernel) kernel.push_back(k.first);
      }
      out.h = h;
      out.d = -d;
      out.solvable = d == 0;
      out.kernel = std::move(kernel);
      return out;
    }
  }
  auto sp = rational_solution_space(AffineEquation{op, b}, opt);
  out.family_found = sp.has_particular;
  out.solvable = sp.has_particular;
  if (sp.has_particular) out.h = sp.particular;
  out.kernel = sp.basis;
  return out;
}

// Witness of the multiplicative criterion a = c * x^alpha * sigma(g)/g in
// the Mahler case.  Every nonzero series solution of sigma(f) = a*f is
// differentially algebraic exactly when such a witness exists.
struct MahlerMultWitness {
  Rat c;
  long alpha = 0;
  RatFunc g;
};

// Decides the multiplicative criterion.  With g normalized to be coprime to
// x and g(0) = 1 the data is pinned: alpha is the valuation of a at 0, c is
// the value of a*x^(-alpha) there, and g is the unique power series solving
// g(x^p) = a*x^(-alpha)/c * g(x).  The quotient sigma(g)/g inflates the
// larger of the numerator and denominator degrees of g by a factor p - 1
// after cancellation, so the height of any rational g is at most
// height(a*x^(-alpha)/c) / (p - 1) and a bounded reconstruction from the
// series prefix is a complete search.
inline std::optional<MahlerMultWitness> mahler_mult_criterion(const RatFunc& a,
                                                              const CaseTag& tag) {
  if (tag.kind != CaseKind::Mahler)
    fail(ErrorKind::CaseMismatch, "the multiplicative criterion is a Mahler-case test");
  if (a.is_zero()) fail(ErrorKind::SemanticError, "criterion input must be nonzero");
  long p = tag.p;
  long alpha = *a.valuation_at_zero();
  long deg = a.degree_at_infinity();
  long imbalance = deg - alpha;
  if (imbalance % (p - 1) != 0) return std::nullopt;
  RatFunc ax = a * RatFunc::monomial(-alpha, Rat(1));
  auto c0 = ax.eval(Rat(0));
  check_internal(c0.has_value() && *c0 != 0, "normalized criterion input is a unit at 0");
  Rat c = *c0;
  RatFunc atil = ax / RatFunc(c);
  long hb = atil.height() / (p - 1);
  long order = 2 * hb + 4;
  TruncatedSeries as = expand_ratfunc(atil, tag, ExpansionPoint::Zero, order);
  std::vector<Rat> gs(static_cast<size_t>(order), Rat(0));
  gs[0] = Rat(1);
  for (long n = 1; n < order; ++n) {
    Rat acc = (n % p == 0) ? gs[static_cast<size_t>(n / p)] : Rat(0);
    for (long k = 1; k <= n; ++k) acc -= as.coeff_step(k) * gs[static_cast<size_t>(n - k)];
    gs[static_cast<size_t>(n)] = acc;
  }
  TruncatedSeries gser(tag, ExpansionPoint::Zero, 1, 0, std::move(gs));
  auto cand = rational_match(gser, hb);
  if (!cand) return std::nullopt;
  MahlerMultWitness w{c, alpha, *cand};
  RatFunc rebuilt = RatFunc(c) * RatFunc::monomial(alpha, Rat(1)) * apply_sigma(w.g, tag);
  if (!(a * w.g == rebuilt)) return std::nullopt;
  return w;
}

enum class CertificateKind {
  TelescoperAbsent,
  MahlerMultFail,
  NoRationalMatch,
  OrderOneExact,
};

inline const char* certificate_kind_name(CertificateKind k) {
  switch (k) {
    case CertificateKind::TelescoperAbsent: return "TELESCOPER_ABSENT";
    case CertificateKind::MahlerMultFail: return "MAHLER_MULT_FAIL";
    case CertificateKind::NoRationalMatch: return "NO_RATIONAL_MATCH";
    case CertificateKind::OrderOneExact: return "ORDER1_EXACT";
  }
  return "?";
}

// Machine-checkable grounds for a hypertranscendence verdict: the exact
// reduction data plus the bounds of the searches that came back empty.
struct HypertranscendenceCertificate {
  CertificateKind kind = CertificateKind::NoRationalMatch;
  std::string detail;
  std::optional<StandardDecomposition> decomposition;
  std::optional<RatFunc> reduced_rhs;
  std::optional<Rat> forced_residual;
  long residual_exponent = 0;
  long height_bound = -1;
  long truncation_order = -1;
  long degree_bound = -1;
  long orbit_bound = -1;
  long hankel_rank = -1;
};

}  // namespace hypertrans
