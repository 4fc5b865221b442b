#pragma once

// Rationality testing for truncated series and exact rational solution spaces
// of difference operators. Three layers: Kronecker-Hankel determinant
// profiles of a coefficient window, Pade reconstruction that only returns
// exactly re-verified witnesses, and solution-space computation through
// universal denominators (shift case), their q-dilation analogue with a
// Laurent window at zero, and an orbit-bounded candidate search in the
// Mahler case. Shift and q-dilation spaces are complete; Mahler spaces are
// complete only relative to the configured orbit bound and are flagged so.

#include <algorithm>
#include <optional>
#include <utility>
#include <vector>

#include "hypertrans/dispersion.hpp"
#include "hypertrans/linalg.hpp"
#include "hypertrans/ore.hpp"

namespace hypertrans {

namespace detail {

inline Rat coeff_or(const Poly& p, long k) {
  if (k < 0 || k > p.degree() || p.is_zero()) return Rat(0);
  return p[k];
}

inline Poly exact_div(const Poly& a, const Poly& b) {
  auto [q, r] = Poly::divmod(a, b);
  check_internal(r.is_zero(), "polynomial division expected to be exact");
  return q;
}

inline long div_floor(long a, long b) {
  check_internal(b > 0, "floor division needs a positive divisor");
  long q = a / b;
  if (a % b != 0 && a < 0) --q;
  return q;
}

inline long div_ceil(long a, long b) { return -div_floor(-a, b); }

// Exact quotient a/b over signed longs, or nothing when it is not an integer.
inline std::optional<long> exact_quotient(long a, long b) {
  check_internal(b != 0, "exact quotient by zero");
  if (a % b != 0) return std::nullopt;
  return a / b;
}

inline Poly squarefree_part(const Poly& p) {
  if (p.is_zero() || p.is_constant()) return Poly::one();
  Poly g = Poly::gcd(p, p.derivative());
  return exact_div(p, g).monic();
}

// Number of distinct real roots strictly greater than a, via a Sturm chain
// on the squarefree part.
inline long real_roots_above(const Poly& p, long a) {
  Poly g = squarefree_part(p);
  if (g.is_constant()) return 0;
  std::vector<Poly> chain = {g, g.derivative()};
  while (!chain.back().is_zero()) {
    const Poly& s0 = chain[chain.size() - 2];
    const Poly& s1 = chain.back();
    chain.push_back(-(s0 % s1));
  }
  chain.pop_back();
  auto variations = [](const std::vector<int>& signs) {
    long v = 0;
    int prev = 0;
    for (int s : signs) {
      if (s == 0) continue;
      if (prev != 0 && s != prev) ++v;
      prev = s;
    }
    return v;
  };
  std::vector<int> at_a, at_inf;
  for (const Poly& s : chain) {
    Rat va = s.eval(Rat(a));
    at_a.push_back(sgn(va));
    at_inf.push_back(s.is_zero() ? 0 : sgn(s.leading()));
  }
  return variations(at_a) - variations(at_inf);
}

struct RootWindow {
  std::vector<long> roots;  // integer roots inside [lo, hi]
  bool beyond_hi = false;   // a real root exceeds hi
};

inline RootWindow integer_roots_window(const Poly& p, long lo, long hi) {
  RootWindow out;
  if (p.is_zero() || p.is_constant()) return out;
  Poly g = squarefree_part(p);
  for (long k = lo; k <= hi; ++k)
    if (g.eval(Rat(k)) == 0) out.roots.push_back(k);
  out.beyond_hi = real_roots_above(g, hi) > 0;
  return out;
}

// Integer m with zpoly(q^m) = 0. The window of viable m comes from root
// modulus bounds, so the scan is finite and complete for |q| != 1.
inline std::vector<long> q_power_roots(const Poly& zpoly, const Rat& q) {
  std::vector<long> out;
  if (zpoly.is_zero()) fail(ErrorKind::Internal, "q-power roots of the zero polynomial");
  Poly zp = zpoly.strip_x();
  if (zp.is_constant()) return out;
  Rat rb = zp.root_bound();
  Rat rlb = zp.root_lower_bound();
  Rat aq = rat_abs(q);
  auto run = [&](long m0, long step) {
    long guard = 0;
    for (long m = m0;; m += step) {
      if (++guard > 200000) fail(ErrorKind::Internal, "q-power root scan runaway");
      Rat t = rat_pow(aq, m);
      bool small = t < rlb, big = t > rb;
      bool leaving = step > 0 ? (aq > 1 ? big : small) : (aq > 1 ? small : big);
      if (leaving) break;
      if (!small && !big && zp.eval(rat_pow(q, m)) == 0) out.push_back(m);
    }
  };
  run(0, 1);
  run(-1, -1);
  std::sort(out.begin(), out.end());
  return out;
}

// Leading-exponent family at infinity for a shift operator with polynomial
// coefficients: chi_k(D) is the coefficient of x^(bdeg + D - k) in
// sum_i b_i(x) * (x + i h)^D, a polynomial in the symbolic degree D. The
// scan returns the first k where it is not identically zero.
struct ShiftIndicial {
  long kstar = 0;
  Poly chi;   // in the degree variable
  long bdeg = 0;
};

inline ShiftIndicial shift_indicial(const std::vector<Poly>& b, const Rat& h) {
  long bdeg = -1;
  for (const Poly& bi : b)
    if (!bi.is_zero()) bdeg = std::max(bdeg, bi.degree());
  check_internal(bdeg >= 0, "indicial data of the zero operator");
  std::vector<Poly> binom = {Poly::one()};
  long cap = bdeg + 8 * static_cast<long>(b.size()) + 96;
  for (long k = 0; k <= cap; ++k) {
    while (static_cast<long>(binom.size()) <= k) {
      long j = static_cast<long>(binom.size());
      Poly next = binom.back() * (Poly::x() - Poly(Rat(j - 1)));
      binom.push_back((Rat(1) / Rat(j)) * next);
    }
    Poly chi;
    for (long j = 0; j <= k; ++j) {
      Rat c(0);
      Rat ih(0);
      for (long i = 0; i < static_cast<long>(b.size()); ++i, ih += h)
        if (!b[static_cast<size_t>(i)].is_zero())
          c += coeff_or(b[static_cast<size_t>(i)], bdeg - k + j) * rat_pow(ih, j);
      if (c != 0) chi += c * binom[static_cast<size_t>(j)];
    }
    if (!chi.is_zero()) return {k, chi, bdeg};
  }
  fail(ErrorKind::Internal, "leading-exponent scan exhausted");
}

// Operator and right-hand data with all denominators cleared.
struct ClearedEquation {
  std::vector<Poly> b;       // polynomial coefficient of rho^i
  Poly rhs;
  std::vector<Poly> terms;   // parametric right-hand columns
};

inline ClearedEquation clear_equation(const AffineEquation& eq, const std::vector<RatFunc>& terms) {
  const DiffOperator& l = eq.op;
  if (l.is_zero()) fail(ErrorKind::SemanticError, "cannot solve the zero operator");
  if (l.trailing_index() > 0)
    fail(ErrorKind::ZeroTrailingCoefficient, "strip rho powers before solving");
  Poly den = Poly::one();
  for (long i = 0; i <= l.order(); ++i) den = Poly::lcm(den, l.coeff(i).den());
  den = Poly::lcm(den, eq.rhs.den());
  for (const RatFunc& t : terms) {
    if (t.is_zero()) fail(ErrorKind::SemanticError, "parametric term must be nonzero");
    den = Poly::lcm(den, t.den());
  }
  auto cleared = [&](const RatFunc& f) {
    RatFunc g = f * RatFunc(den);
    check_internal(g.is_polynomial(), "denominator clearing left a fraction");
    return g.num();
  };
  ClearedEquation out;
  for (long i = 0; i <= l.order(); ++i) out.b.push_back(cleared(l.coeff(i)));
  out.rhs = cleared(eq.rhs);
  for (const RatFunc& t : terms) out.terms.push_back(cleared(t));
  return out;
}

// Candidate denominator from maximal root chains of the trailing coefficient
// against the back-shifted leading coefficient. Inputs must already be
// coprime to x in the q-dilation case.
inline Poly universal_denominator(const Poly& trailing, const Poly& leading_shifted,
                                  const CaseTag& tag) {
  Poly a = trailing, bp = leading_shifted;
  Poly u = Poly::one();
  if (a.is_constant() || bp.is_constant()) return u;
  std::vector<long> ds = dispersion(bp, a, tag);
  std::sort(ds.rbegin(), ds.rend());
  for (long d : ds) {
    Poly g = Poly::gcd(a, apply_sigma(bp, tag, -d)).monic();
    if (g.is_constant()) continue;
    a = exact_div(a, g);
    bp = exact_div(bp, apply_sigma(g, tag, d));
    for (long j = 0; j <= d; ++j) u *= apply_sigma(g, tag, j);
  }
  return u;
}

struct Ansatz {
  Poly den = Poly::one();  // solutions are s / den with s polynomial
  long dmax = -1;          // degree bound for s; -1 forces s = 0
  bool complete = true;
  long orbit_bound = 0;
};

// Lowest and highest x-levels reachable by the right-hand data.
struct RhsLevels {
  bool present = false;
  long min_val = 0;
  long max_deg = 0;
};

inline RhsLevels rhs_levels(const ClearedEquation& ce) {
  RhsLevels out;
  auto feed = [&](const Poly& p) {
    if (p.is_zero()) return;
    if (!out.present) {
      out = {true, p.valuation(), p.degree()};
      return;
    }
    out.min_val = std::min(out.min_val, p.valuation());
    out.max_deg = std::max(out.max_deg, p.degree());
  };
  feed(ce.rhs);
  for (const Poly& t : ce.terms) feed(t);
  return out;
}

inline void require_cap(long value, long cap, const char* what) {
  if (value > cap)
    fail(ErrorKind::DegreeBoundExceeded,
         std::string(what) + " needs degree " + std::to_string(value) +
             " which exceeds the cap " + std::to_string(cap));
}

}  // namespace detail

// Knobs for the rational solution search. The degree cap guards every
// linear-algebra dimension; the orbit bound limits the Mahler candidate
// denominator and is reported back in the result.
struct RationalSolveOptions {
  long degree_cap = 64;
  long mahler_orbit_bound = 8;
};

namespace detail {

inline Ansatz build_shift_ansatz(const ClearedEquation& ce, const CaseTag& tag,
                                 const RationalSolveOptions& opt) {
  long n = static_cast<long>(ce.b.size()) - 1;
  Ansatz out;
  out.den = universal_denominator(ce.b.front(), apply_sigma(ce.b.back(), tag, -n), tag);
  ShiftIndicial ind = shift_indicial(ce.b, tag.h);
  RootWindow rw = integer_roots_window(ind.chi, -out.den.degree(), opt.degree_cap);
  if (rw.beyond_hi)
    fail(ErrorKind::DegreeBoundExceeded,
         "a candidate solution degree exceeds the cap " + std::to_string(opt.degree_cap));
  std::vector<long> cands = rw.roots;
  RhsLevels lv = rhs_levels(ce);
  if (lv.present) cands.push_back(lv.max_deg - ind.bdeg + ind.kstar);
  if (cands.empty()) return out;
  long dtop = *std::max_element(cands.begin(), cands.end());
  require_cap(dtop, opt.degree_cap, "shift solution");
  out.dmax = dtop + out.den.degree();
  if (out.dmax < -1) out.dmax = -1;
  return out;
}

inline Ansatz build_qdiff_ansatz(const ClearedEquation& ce, const CaseTag& tag,
                                 const RationalSolveOptions& opt) {
  long n = static_cast<long>(ce.b.size()) - 1;
  Ansatz out;
  Poly u = universal_denominator(ce.b.front().strip_x(),
                                 apply_sigma(ce.b.back(), tag, -n).strip_x(), tag);
  RhsLevels lv = rhs_levels(ce);

  auto side_poly = [&](bool low) {
    long level = 0;
    bool first = true;
    for (const Poly& bi : ce.b) {
      if (bi.is_zero()) continue;
      long v = low ? bi.valuation() : bi.degree();
      level = first ? v : (low ? std::min(level, v) : std::max(level, v));
      first = false;
    }
    std::vector<Rat> c(ce.b.size(), Rat(0));
    for (size_t i = 0; i < ce.b.size(); ++i) {
      const Poly& bi = ce.b[i];
      if (bi.is_zero()) continue;
      if ((low ? bi.valuation() : bi.degree()) == level) c[i] = low ? bi[bi.valuation()] : bi.leading();
    }
    return std::pair<Poly, long>(Poly(std::move(c)), level);
  };

  auto [zlow, vstar] = side_poly(true);
  std::vector<long> low_cands = q_power_roots(zlow, tag.q);
  if (lv.present) low_cands.push_back(lv.min_val - vstar);
  auto [zhigh, dstar] = side_poly(false);
  std::vector<long> high_cands = q_power_roots(zhigh, tag.q);
  if (lv.present) high_cands.push_back(lv.max_deg - dstar);

  if (low_cands.empty() || high_cands.empty()) {
    out.den = u;
    return out;
  }
  long mmin = *std::min_element(low_cands.begin(), low_cands.end());
  long eminus = std::max(0L, -mmin);
  require_cap(eminus, opt.degree_cap, "pole order at zero");
  long mmax = *std::max_element(high_cands.begin(), high_cands.end());
  out.den = Poly::monomial(eminus, Rat(1)) * u;
  out.dmax = mmax + eminus + u.degree();
  require_cap(out.dmax, opt.degree_cap + out.den.degree(), "q-dilation numerator");
  if (out.dmax < -1) out.dmax = -1;
  return out;
}

inline Ansatz build_mahler_ansatz(const ClearedEquation& ce, const CaseTag& tag,
                                  const RationalSolveOptions& opt) {
  Ansatz out;
  out.complete = false;
  out.orbit_bound = std::max(1L, opt.mahler_orbit_bound);

  std::vector<long> idx, stretch;
  long st = 1;
  for (size_t i = 0; i < ce.b.size(); ++i) {
    if (!ce.b[i].is_zero()) {
      idx.push_back(static_cast<long>(i));
      stretch.push_back(st);
    }
    if (i + 1 < ce.b.size()) {
      st *= tag.p;
      if (st > (1L << 50)) fail(ErrorKind::SemanticError, "Mahler exponent stretch overflow");
    }
  }
  RhsLevels lv = rhs_levels(ce);

  auto tie_candidates = [&](const std::vector<long>& lev) {
    std::vector<long> cands;
    for (size_t a = 0; a < idx.size(); ++a)
      for (size_t c = a + 1; c < idx.size(); ++c)
        if (auto m = exact_quotient(lev[c] - lev[a], stretch[a] - stretch[c])) cands.push_back(*m);
    return cands;
  };
  std::vector<long> vlev, dlev;
  for (long i : idx) {
    vlev.push_back(ce.b[static_cast<size_t>(i)].valuation());
    dlev.push_back(ce.b[static_cast<size_t>(i)].degree());
  }

  std::vector<long> low_cands = tie_candidates(vlev);
  if (lv.present) {
    long m = div_ceil(lv.min_val - vlev[0], stretch[0]);
    for (size_t a = 1; a < idx.size(); ++a)
      m = std::max(m, div_ceil(lv.min_val - vlev[a], stretch[a]));
    low_cands.push_back(m);
  }
  std::vector<long> high_cands = tie_candidates(dlev);
  if (lv.present) {
    long m = div_floor(lv.max_deg - dlev[0], stretch[0]);
    for (size_t a = 1; a < idx.size(); ++a)
      m = std::min(m, div_floor(lv.max_deg - dlev[a], stretch[a]));
    high_cands.push_back(m);
  }

  Poly prod = ce.b.front().strip_x() * ce.b.back().strip_x();
  Poly rad = squarefree_part(prod);
  long mult = prod.degree() - rad.degree() + 1;

  if (low_cands.empty() || high_cands.empty()) return out;
  long mmin = *std::min_element(low_cands.begin(), low_cands.end());
  long eminus = std::max(0L, -mmin);
  require_cap(eminus, opt.degree_cap, "pole order at zero");
  long mmax = *std::max_element(high_cands.begin(), high_cands.end());

  long vdeg = 0;
  long pj = 1;
  for (long j = 0; j < out.orbit_bound; ++j) {
    vdeg += pj * mult * rad.degree();
    if (j + 1 < out.orbit_bound) {
      pj *= tag.p;
      if (pj > (1L << 40)) fail(ErrorKind::DegreeBoundExceeded, "Mahler orbit denominator overflow");
    }
  }
  long dmax = mmax + eminus + vdeg;
  require_cap(dmax, opt.degree_cap + eminus + vdeg, "Mahler numerator");
  require_cap(mmax, opt.degree_cap, "Mahler solution");
  require_cap(vdeg, 4 * opt.degree_cap + 256, "Mahler orbit denominator");

  Poly v = Poly::one();
  if (!rad.is_constant()) {
    Poly radm = Poly::one();
    for (long j = 0; j < mult; ++j) radm *= rad;
    for (long j = 0; j < out.orbit_bound; ++j) v *= apply_sigma(radm, tag, j);
  }
  out.den = Poly::monomial(eminus, Rat(1)) * v;
  out.dmax = dmax < -1 ? -1 : dmax;
  return out;
}

}  // namespace detail

// A rational solution of op(y) = rhs + sum_j scalars[j] * terms[j] together
// with a basis of the homogeneous (y, scalars) pairs.
struct ParametricSolution {
  bool found = false;
  RatFunc y;
  std::vector<Rat> scalars;
  std::vector<std::pair<RatFunc, std::vector<Rat>>> kernel;
};

inline ParametricSolution parametric_rational_solution(const AffineEquation& eq,
                                                       const std::vector<RatFunc>& terms,
                                                       const RationalSolveOptions& opt = {}) {
  const DiffOperator& l = eq.op;
  const CaseTag& tag = l.tag();
  detail::ClearedEquation ce = detail::clear_equation(eq, terms);
  long n = static_cast<long>(ce.b.size()) - 1;

  detail::Ansatz an;
  switch (tag.kind) {
    case CaseKind::Shift: an = detail::build_shift_ansatz(ce, tag, opt); break;
    case CaseKind::QDiff: an = detail::build_qdiff_ansatz(ce, tag, opt); break;
    case CaseKind::Mahler: an = detail::build_mahler_ansatz(ce, tag, opt); break;
  }

  Poly mult = apply_sigma(an.den, tag, 0);
  for (long i = 1; i <= n; ++i) mult = Poly::lcm(mult, apply_sigma(an.den, tag, i));
  std::vector<Poly> bsys;
  for (long i = 0; i <= n; ++i)
    bsys.push_back(ce.b[static_cast<size_t>(i)] *
                   detail::exact_div(mult, apply_sigma(an.den, tag, i)));
  Poly rsys = ce.rhs * mult;
  std::vector<Poly> tsys;
  for (const Poly& t : ce.terms) tsys.push_back(t * mult);

  long ncols = (an.dmax + 1) + static_cast<long>(tsys.size());
  std::vector<Poly> cols;
  for (long k = 0; k <= an.dmax; ++k) {
    Poly col;
    for (long i = 0; i <= n; ++i)
      if (!bsys[static_cast<size_t>(i)].is_zero())
        col += bsys[static_cast<size_t>(i)] * apply_sigma(Poly::monomial(k, Rat(1)), tag, i);
    cols.push_back(col);
  }
  for (const Poly& t : tsys) cols.push_back(-t);

  long maxdeg = rsys.is_zero() ? -1 : rsys.degree();
  for (const Poly& c : cols)
    if (!c.is_zero()) maxdeg = std::max(maxdeg, c.degree());

  ParametricSolution out;
  LinearSolution ls;
  if (ncols == 0) {
    ls.consistent = rsys.is_zero();
  } else {
    long rows = std::max(maxdeg + 1, 1L);
    RatMat m(rows, ncols);
    for (long j = 0; j < ncols; ++j)
      for (long r = 0; r < rows; ++r) m.at(r, j) = detail::coeff_or(cols[static_cast<size_t>(j)], r);
    std::vector<Rat> rvec(static_cast<size_t>(rows), Rat(0));
    for (long r = 0; r < rows; ++r) rvec[static_cast<size_t>(r)] = detail::coeff_or(rsys, r);
    ls = linear_solve(m, rvec);
  }

  auto decode = [&](const std::vector<Rat>& vec) {
    std::vector<Rat> sc(vec.begin() + (an.dmax + 1), vec.end());
    std::vector<Rat> pc(vec.begin(), vec.begin() + (an.dmax + 1));
    return std::make_pair(RatFunc(Poly(std::move(pc)), an.den), std::move(sc));
  };
  auto combined = [&](const std::vector<Rat>& sc, const RatFunc& base) {
    RatFunc acc = base;
    for (size_t j = 0; j < terms.size(); ++j) acc = acc + RatFunc(sc[j]) * terms[j];
    return acc;
  };

  out.found = ls.consistent;
  if (ls.consistent) {
    auto [y, sc] = decode(ls.particular);
    check_internal(apply_operator(l, y) == combined(sc, eq.rhs),
                   "parametric solution failed re-substitution");
    out.y = y;
    out.scalars = std::move(sc);
  }
  for (const auto& kv : ls.kernel) {
    auto [y, sc] = decode(kv);
    check_internal(apply_operator(l, y) == combined(sc, RatFunc()),
                   "kernel element failed re-substitution");
    out.kernel.emplace_back(std::move(y), std::move(sc));
  }
  return out;
}

// The rational solutions of an operator (or an inhomogeneous equation). The
// basis spans the kernel inside Q(x); for a nonzero right-hand side the
// particular solution is reported when one exists. Shift and q-dilation
// results are complete; Mahler results are complete only up to the orbit
// bound recorded in the result.
struct RationalSolutionSpace {
  std::vector<RatFunc> basis;
  bool has_particular = false;
  RatFunc particular;
  bool complete = true;
  long orbit_bound = 0;
  long degree_cap = 0;
};

inline RationalSolutionSpace rational_solution_space(const AffineEquation& eq,
                                                     const RationalSolveOptions& opt = {}) {
  ParametricSolution ps = parametric_rational_solution(eq, {}, opt);
  RationalSolutionSpace out;
  out.degree_cap = opt.degree_cap;
  out.complete = eq.op.tag().kind != CaseKind::Mahler;
  out.orbit_bound = eq.op.tag().kind == CaseKind::Mahler ? std::max(1L, opt.mahler_orbit_bound) : 0;
  out.has_particular = ps.found;
  if (ps.found) out.particular = ps.y;
  for (auto& kv : ps.kernel)
    if (!kv.first.is_zero()) out.basis.push_back(std::move(kv.first));
  return out;
}

inline RationalSolutionSpace rational_solution_space(const DiffOperator& l,
                                                     const RationalSolveOptions& opt = {}) {
  return rational_solution_space(AffineEquation{l, RatFunc()}, opt);
}

// Exact Hankel determinant profile of a coefficient window. det_is_zero[s-1]
// holds one flag per contiguous s x s window of the sequence read off from
// the first stored exponent; rank is the largest window size with a nonzero
// determinant, zero for the zero series. The profile is exact; what it says
// about the function beyond the truncation is up to the caller.
struct HankelProfile {
  long max_size = 0;
  std::vector<std::vector<bool>> det_is_zero;
  long rank = 0;
};

inline HankelProfile hankel_profile(const TruncatedSeries& f, long max_size) {
  if (max_size < 1) fail(ErrorKind::SemanticError, "Hankel window size must be positive");
  if (f.ramification() != 1)
    fail(ErrorKind::SemanticError, "de-ramify before the Hankel profile");
  long avail = f.order() - f.val();
  if (max_size * max_size > avail)
    fail(ErrorKind::TruncationTooShort,
         "Hankel windows of size " + std::to_string(max_size) + " need " +
             std::to_string(max_size * max_size) + " coefficients, have " + std::to_string(avail));
  std::vector<Rat> a;
  for (long k = 0; k < avail; ++k) a.push_back(f.coeff_step(f.val() + k));
  HankelProfile out;
  out.max_size = max_size;
  for (long s = 1; s <= max_size; ++s) {
    std::vector<bool> flags;
    for (long k = 0; k + 2 * s - 1 <= avail; ++k) {
      RatMat m(s, s);
      for (long i = 0; i < s; ++i)
        for (long j = 0; j < s; ++j) m.at(i, j) = a[static_cast<size_t>(k + i + j)];
      bool zero = det(m) == 0;
      flags.push_back(zero);
      if (!zero) out.rank = s;
    }
    out.det_is_zero.push_back(std::move(flags));
  }
  return out;
}

// Reconstructs a rational function of numerator and denominator degree at
// most d (plus the pole order forced by a negative valuation) whose
// expansion reproduces the whole stored prefix. Returns nothing unless the
// exact re-expansion matches; a returned witness is unconditionally correct.
inline std::optional<RatFunc> rational_match(const TruncatedSeries& f, long d) {
  if (d < 0) fail(ErrorKind::SemanticError, "degree bound must be nonnegative");
  if (f.ramification() != 1) fail(ErrorKind::SemanticError, "de-ramify before matching");
  if (f.order() < 2 * d + 2)
    fail(ErrorKind::TruncationTooShort,
         "matching degree " + std::to_string(d) + " needs truncation order " +
             std::to_string(2 * d + 2) + ", have " + std::to_string(f.order()));
  long s = std::min(f.val(), 0L);
  long m = f.order() - s;
  long dp = d - s, dq = d;
  std::vector<Rat> a;
  for (long k = 0; k < m; ++k) a.push_back(f.coeff_step(s + k));

  long rows = m - dp - 1;
  RatMat mat(std::max(rows, 1L), dq + 1);
  for (long r = 0; r < rows; ++r) {
    long k = dp + 1 + r;
    for (long j = 0; j <= dq; ++j) mat.at(r, j) = a[static_cast<size_t>(k - j)];
  }
  auto ns = nullspace(mat);
  if (ns.empty()) return std::nullopt;
  Poly qp(std::move(ns.front()));
  std::vector<Rat> pc(static_cast<size_t>(dp + 1), Rat(0));
  for (long k = 0; k <= dp; ++k)
    for (long j = 0; j <= std::min(k, dq); ++j)
      pc[static_cast<size_t>(k)] += detail::coeff_or(qp, j) * a[static_cast<size_t>(k - j)];
  Poly pp(std::move(pc));

  RatFunc cand;
  if (f.point() == ExpansionPoint::Zero) {
    cand = RatFunc(pp, qp * Poly::monomial(-s, Rat(1)));
  } else {
    long dd = std::max(pp.degree(), qp.degree());
    auto rev = [&](const Poly& p) {
      std::vector<Rat> c(static_cast<size_t>(dd + 1), Rat(0));
      for (long j = 0; j <= p.degree() && !p.is_zero(); ++j) c[static_cast<size_t>(dd - j)] = p[j];
      return Poly(std::move(c));
    };
    cand = RatFunc(rev(pp) * Poly::monomial(-s, Rat(1)), rev(qp));
  }
  if (!(expand_ratfunc(cand, f.tag(), f.point(), f.order(), 1) == f)) return std::nullopt;
  return cand;
}

inline std::optional<RatFunc> rational_match(const TruncatedSeries& f, long d,
                                             const DiffOperator& l) {
  auto cand = rational_match(f, d);
  if (!cand || !apply_operator(l, *cand).is_zero()) return std::nullopt;
  return cand;
}

inline std::optional<RatFunc> rational_match(const TruncatedSeries& f, long d,
                                             const AffineEquation& eq) {
  auto cand = rational_match(f, d);
  if (!cand || !(apply_operator(eq.op, *cand) == eq.rhs)) return std::nullopt;
  return cand;
}

}  // namespace hypertrans
