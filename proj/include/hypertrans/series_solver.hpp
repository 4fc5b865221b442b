#pragma once

// Extends a coefficient prefix to a truncated series solution of L(f) = rhs.
//
// Writing f = sum f_m t^m over the exponent lattice, the image L(t^m) has a
// case-specific lowest reachable offset c* (q-case: the common coefficient
// valuation; Mahler: the valuation of the trailing coefficient; shift at
// infinity: the first offset whose indicial polynomial is not identically
// zero).  Scanning output exponents e upward, the equation at e either pins
// the new coefficient f_{e-c*} through the pivot value, or is a consistency
// constraint when that coefficient is already known.  A vanishing pivot makes
// the exponent resonant: the equation degenerates to a constraint and the
// coefficient is a degree of freedom that must come from the prefix.
//
// The Mahler case additionally couples a finite low-exponent window where
// rho^i terms with i >= 1 can reach below the trailing pivot line; that block
// is solved as one dense linear system before the scan takes over.

#include <algorithm>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "hypertrans/linalg.hpp"
#include "hypertrans/ore.hpp"

namespace hypertrans {

struct SolveOptions {
  // Kernel enumeration pins resonant coefficients beyond the prefix to zero;
  // the default refuses to invent values and reports AmbiguousPrefix.
  bool pin_free_to_zero = false;
};

namespace detail {

struct Window {
  long lo = 0;  // exponent step of c[0]
  std::vector<Rat> c;

  const Rat& at(long e) const {
    static const Rat kZero(0);
    long i = e - lo;
    if (i < 0 || i >= static_cast<long>(c.size())) return kZero;
    return c[static_cast<size_t>(i)];
  }
};

// Coefficient expansions of an operator at the chosen point, with the
// exponent bookkeeping needed to read L(t^m) column by column.
class OperatorWindow {
 public:
  OperatorWindow(const DiffOperator& l, ExpansionPoint pt, long ell, long len)
      : l_(l), tag_(l.tag()), pt_(pt), ell_(ell) {
    if (l_.is_zero()) fail(ErrorKind::SemanticError, "cannot solve against the zero operator");
    if (l_.trailing_index() > 0)
      fail(ErrorKind::ZeroTrailingCoefficient,
           "solver needs a nonzero trailing coefficient; strip rho powers first");
    if (tag_.kind == CaseKind::QDiff) {
      auto root = rat_root(tag_.q, ell_);
      if (!root)
        fail(ErrorKind::NonRationalRamifiedParameter,
             "q has no rational root matching the exponent lattice");
      s_ = *root;
    }
    a_.resize(static_cast<size_t>(l_.order()) + 1);
    for (long i = 0; i <= l_.order(); ++i) {
      RatFunc ai = l_.coeff(i);
      if (ai.is_zero()) continue;
      long va = pt_ == ExpansionPoint::Zero ? *ai.valuation_at_zero() * ell_
                                            : -ai.degree_at_infinity();
      TruncatedSeries w = expand_ratfunc(ai, tag_, pt_, va + len, ell_);
      a_[static_cast<size_t>(i)] = {w.val(), w.stored()};
    }
    compute_cstar();
  }

  const CaseTag& tag() const { return tag_; }
  long order() const { return l_.order(); }
  long cstar() const { return cstar_; }
  bool has_coeff(long i) const { return !a_[static_cast<size_t>(i)].c.empty(); }

  long coeff_val(long i) const {
    check_internal(has_coeff(i), "missing coefficient expansion");
    return a_[static_cast<size_t>(i)].lo;
  }

  long sigma_stretch(long i) const {
    if (tag_.kind != CaseKind::Mahler) return 1;
    long s = 1;
    for (long k = 0; k < i; ++k) {
      check_internal(s <= (1L << 50), "Mahler exponent stretch overflow");
      s *= tag_.p;
    }
    return s;
  }

  // Lowest output exponent any solution coefficient at step >= fl can touch.
  // Offsets below c* contribute identically zero outside the Mahler case.
  long lowest_equation(long fl) const {
    long lo = fl + cstar_;
    if (tag_.kind != CaseKind::Mahler) return lo;
    for (long i = 1; i <= order(); ++i) {
      if (!has_coeff(i)) continue;
      lo = std::min(lo, fl * sigma_stretch(i) + coeff_val(i));
    }
    return lo;
  }

  // Lowest output exponent reachable by a coefficient at step >= n; equations
  // there say nothing about a series truncated below n.
  long equation_ceiling(long n) const {
    long cut = n + cstar_;
    if (tag_.kind != CaseKind::Mahler) return cut;
    for (long i = 1; i <= order(); ++i) {
      if (!has_coeff(i)) continue;
      cut = std::min(cut, n * sigma_stretch(i) + coeff_val(i));
    }
    return cut;
  }

  // Expansion of L(t^m) clipped to [emin, emax).
  Window column(long m, long emin, long emax) const {
    Window out;
    out.lo = emin;
    out.c.assign(static_cast<size_t>(std::max<long>(emax - emin, 0)), Rat(0));
    for (long i = 0; i <= order(); ++i) {
      if (!has_coeff(i)) continue;
      const Window& ai = a_[static_cast<size_t>(i)];
      long shift = m;
      Rat scale(1);
      std::vector<Rat> conv;
      const std::vector<Rat>* src = &ai.c;
      switch (tag_.kind) {
        case CaseKind::QDiff:
          scale = rat_pow(s_, m * i);
          break;
        case CaseKind::Mahler: {
          long st = sigma_stretch(i);
          if (m > 0 && m > (emax - coeff_val(i)) / st + 1) continue;
          shift = m * st;
          break;
        }
        case CaseKind::Shift: {
          if (i > 0) {
            std::vector<Rat> bin =
                binomial_series(Rat(i) * tag_.h, -m, static_cast<long>(ai.c.size()));
            conv.assign(ai.c.size(), Rat(0));
            for (size_t x = 0; x < ai.c.size(); ++x) {
              if (ai.c[x] == 0) continue;
              for (size_t y = 0; x + y < conv.size(); ++y) conv[x + y] += ai.c[x] * bin[y];
            }
            src = &conv;
          }
          break;
        }
      }
      long base = ai.lo + shift;
      for (size_t k = 0; k < src->size(); ++k) {
        long e = base + static_cast<long>(k);
        if (e < emin || e >= emax) continue;
        Rat v = (*src)[k];
        if (scale != 1) v *= scale;
        out.c[static_cast<size_t>(e - emin)] += v;
      }
    }
    return out;
  }

  // Highest exponent where rho^i terms with i >= 1 reach at or below the
  // trailing pivot line; equations there form one coupled linear block.
  long dense_ceiling(long fl) const {
    long m_hi = fl - 1;
    if (tag_.kind != CaseKind::Mahler) return m_hi;
    long v0 = coeff_val(0);
    for (long i = 1; i <= order(); ++i) {
      if (!has_coeff(i)) continue;
      long gap = v0 - coeff_val(i);
      long step = sigma_stretch(i) - 1;
      long cand = gap >= 0 ? gap / step : -((-gap + step - 1) / step);
      m_hi = std::max(m_hi, cand);
    }
    return m_hi;
  }

 private:
  DiffOperator l_;
  CaseTag tag_;
  ExpansionPoint pt_;
  long ell_;
  Rat s_;
  long cstar_ = 0;
  std::vector<Window> a_;

  void compute_cstar() {
    switch (tag_.kind) {
      case CaseKind::QDiff: {
        cstar_ = coeff_val(0);
        for (long i = 1; i <= order(); ++i)
          if (has_coeff(i)) cstar_ = std::min(cstar_, coeff_val(i));
        return;
      }
      case CaseKind::Mahler: {
        cstar_ = coeff_val(0);
        return;
      }
      case CaseKind::Shift: {
        long w0 = coeff_val(0);
        for (long i = 1; i <= order(); ++i)
          if (has_coeff(i)) w0 = std::min(w0, coeff_val(i));
        long cap = w0 + 128 + 8 * (order() + 1);
        for (long c = w0; c <= cap; ++c) {
          if (!indicial_poly(c, w0).is_zero()) {
            cstar_ = c;
            return;
          }
        }
        fail(ErrorKind::AmbiguousPrefix, "indicial offset scan exhausted");
      }
    }
  }

  // Coefficient of u^(m+c) in L(u^m) as a polynomial in m: the sum over i, j
  // of a_i[c-j] * binom(-m, j) * (i h)^j.
  Poly indicial_poly(long c, long w0) const {
    Poly acc;
    Poly bj = Poly::one();
    for (long j = 0; j <= c - w0; ++j) {
      if (j > 0) bj = bj * (-Poly::x() - Poly(Rat(j - 1))) * Poly(rat(1, j));
      for (long i = 0; i <= order(); ++i) {
        if (!has_coeff(i)) continue;
        if (i == 0 && j > 0) continue;
        const Rat& ak = a_[static_cast<size_t>(i)].at(c - j);
        if (ak == 0) continue;
        acc += (ak * rat_pow(Rat(i) * tag_.h, j)) * bj;
      }
    }
    return acc;
  }
};

class PrefixSolver {
 public:
  PrefixSolver(const AffineEquation& eq, const TruncatedSeries& prefix, long n,
               const SolveOptions& opt)
      : rhs_(eq.rhs), pt_(prefix.point()), ell_(prefix.ramification()), opt_(opt),
        fl_(prefix.val()), np_(prefix.order()), neff_(std::max(n, prefix.order())),
        ntarget_(n),
        w_(eq.op, prefix.point(), prefix.ramification(),
           std::max(n, prefix.order()) - prefix.val() + 8) {
    if (!(w_.tag() == prefix.tag())) fail(ErrorKind::CaseMismatch, "prefix case differs");
    emin_ = w_.lowest_equation(fl_);
    emax_ = neff_ + w_.cstar();
    eceil_ = w_.equation_ceiling(neff_);
    if (!rhs_.is_zero()) {
      long vr = pt_ == ExpansionPoint::Zero ? *rhs_.valuation_at_zero() * ell_
                                            : -rhs_.degree_at_infinity();
      emin_ = std::min(emin_, vr);
    }
    residual_.assign(static_cast<size_t>(std::max<long>(emax_ - emin_, 0)), Rat(0));
    if (!rhs_.is_zero()) {
      TruncatedSeries r = expand_ratfunc(rhs_, w_.tag(), pt_, emax_, ell_);
      for (long e = std::max(emin_, r.val()); e < emax_; ++e) res(e) = r.coeff_step(e);
    }
    f_.assign(static_cast<size_t>(neff_ - fl_), Rat(0));
    determined_.assign(f_.size(), false);
    for (long m = fl_; m < np_; ++m) set_coeff(m, prefix.coeff_step(m));
  }

  TruncatedSeries run() {
    long scan_from = emin_;
    if (w_.tag().kind == CaseKind::Mahler) scan_from = solve_dense_block();
    for (long e = scan_from; e < std::min(emax_, eceil_); ++e) {
      long m = e - w_.cstar();
      if (m >= np_ && m < neff_ && !determined_[static_cast<size_t>(m - fl_)]) {
        Window col = w_.column(m, emin_, emax_);
        const Rat& pivot = col.at(e);
        if (pivot != 0) {
          Rat value = res(e) / pivot;
          f_[static_cast<size_t>(m - fl_)] = value;
          determined_[static_cast<size_t>(m - fl_)] = true;
          subtract(col, value);
          continue;
        }
        if (res(e) != 0) obstruction(m);
        mark_free(m);
        continue;
      }
      if (res(e) != 0) obstruction(m);
    }
    finish_frees();
    for (long m = np_; m < neff_; ++m)
      if (!determined_[static_cast<size_t>(m - fl_)])
        fail(ErrorKind::TruncationTooShort,
             "equations pinning step " + std::to_string(m) +
                 " reach past the truncation; increase the order");
    std::vector<Rat> out(f_.begin(), f_.end());
    TruncatedSeries result(w_.tag(), pt_, ell_, fl_, std::move(out));
    return result.truncated(ntarget_);
  }

 private:
  RatFunc rhs_;
  ExpansionPoint pt_;
  long ell_;
  SolveOptions opt_;
  long fl_, np_, neff_, ntarget_;
  OperatorWindow w_;
  long emin_ = 0, emax_ = 0, eceil_ = 0;
  std::vector<Rat> residual_;
  std::vector<Rat> f_;
  std::vector<bool> determined_;
  std::vector<long> frees_;

  Rat& res(long e) { return residual_[static_cast<size_t>(e - emin_)]; }

  void subtract(const Window& col, const Rat& value) {
    if (value == 0) return;
    for (long e = std::max(emin_, col.lo); e < emax_; ++e) {
      const Rat& cv = col.at(e);
      if (cv != 0) res(e) -= value * cv;
    }
  }

  void set_coeff(long m, const Rat& value) {
    f_[static_cast<size_t>(m - fl_)] = value;
    determined_[static_cast<size_t>(m - fl_)] = true;
    if (value != 0) subtract(w_.column(m, emin_, emax_), value);
  }

  void obstruction(long m) {
    if (!frees_.empty()) return;  // values were invented, blame the ambiguity
    fail(ErrorKind::InconsistentPrefix,
         "no extension exists: obstruction at exponent step " + std::to_string(m));
  }

  void mark_free(long m) {
    determined_[static_cast<size_t>(m - fl_)] = true;
    if (!opt_.pin_free_to_zero) frees_.push_back(m);
  }

  void finish_frees() {
    if (frees_.empty()) return;
    if (eceil_ < emax_)
      fail(ErrorKind::TruncationTooShort,
           "coefficients are undetermined because equations reach past the truncation");
    std::string list;
    for (size_t i = 0; i < frees_.size(); ++i)
      list += (i ? ", " : "") + std::to_string(frees_[i]);
    fail(ErrorKind::AmbiguousPrefix,
         "free coefficients beyond the prefix at exponent steps " + list);
  }

  long solve_dense_block() {
    long w_hi = std::min(w_.dense_ceiling(fl_), neff_ - 1);
    if (w_hi < np_) return emin_;
    long e_hi = std::min(w_hi + w_.cstar(), eceil_ - 1);
    if (e_hi < emin_) return emin_;
    std::vector<long> unknowns;
    for (long m = np_; m <= w_hi; ++m) unknowns.push_back(m);
    long rows = e_hi - emin_ + 1;
    RatMat mat(rows, static_cast<long>(unknowns.size()));
    std::vector<Rat> b(static_cast<size_t>(rows));
    std::vector<Window> cols;
    cols.reserve(unknowns.size());
    for (long m : unknowns) cols.push_back(w_.column(m, emin_, emax_));
    for (long e = emin_; e <= e_hi; ++e) {
      long r = e - emin_;
      for (size_t j = 0; j < unknowns.size(); ++j)
        mat.at(r, static_cast<long>(j)) = cols[j].at(e);
      b[static_cast<size_t>(r)] = res(e);
    }
    LinearSolution sol = linear_solve(mat, b);
    if (!sol.consistent) {
      long bad = first_inconsistent_row(mat, b) + emin_;
      obstruction(bad - w_.cstar());
    }
    std::set<size_t> free_cols;
    for (const auto& k : sol.kernel) {
      size_t lead = 0;
      while (lead < k.size() && k[lead] == 0) ++lead;
      if (lead < k.size()) free_cols.insert(lead);
    }
    for (size_t j = 0; j < unknowns.size(); ++j) {
      set_coeff(unknowns[j], sol.particular[j]);
      if (free_cols.count(j)) mark_free(unknowns[j]);
    }
    for (long e = emin_; e <= e_hi; ++e)
      check_internal(res(e) == 0, "dense Mahler block left a nonzero residual");
    return e_hi + 1;
  }

  long first_inconsistent_row(const RatMat& mat, const std::vector<Rat>& b) const {
    long lo = 0, hi = static_cast<long>(b.size()) - 1;
    auto consistent_upto = [&](long r) {
      RatMat m(r + 1, mat.cols());
      std::vector<Rat> rb(static_cast<size_t>(r) + 1);
      for (long i = 0; i <= r; ++i) {
        for (long j = 0; j < mat.cols(); ++j) m.at(i, j) = mat.at(i, j);
        rb[static_cast<size_t>(i)] = b[static_cast<size_t>(i)];
      }
      return linear_solve(m, rb).consistent;
    };
    while (lo < hi) {
      long mid = (lo + hi) / 2;
      if (consistent_upto(mid))
        lo = mid + 1;
      else
        hi = mid;
    }
    return lo;
  }
};

}  // namespace detail

inline TruncatedSeries extend_prefix(const AffineEquation& eq, const TruncatedSeries& prefix,
                                     long n, const SolveOptions& opt = {}) {
  detail::PrefixSolver solver(eq, prefix, n, opt);
  TruncatedSeries out = solver.run();
  TruncatedSeries image = apply_operator(eq.op, out);
  TruncatedSeries want =
      expand_ratfunc(eq.rhs, eq.op.tag(), out.point(), image.order(), out.ramification());
  long common = std::min(image.order(), want.order());
  check_internal(image.truncated(common) == want.truncated(common),
                 "extended series fails to satisfy its equation");
  return out;
}

inline TruncatedSeries extend_prefix(const DiffOperator& l, const TruncatedSeries& prefix, long n,
                                     const SolveOptions& opt = {}) {
  return extend_prefix(AffineEquation{l, RatFunc()}, prefix, n, opt);
}

// Basis of the truncated solutions of L(f) = 0 whose valuation lies in
// [lo, hi], each extended to order n.  One dense nullspace computation keeps
// coupled resonances intact; the basis is in echelon form by valuation.
inline std::vector<TruncatedSeries> truncated_kernel_basis(const DiffOperator& l,
                                                           ExpansionPoint pt, long ell, long lo,
                                                           long hi, long n,
                                                           long window_cap = 512) {
  if (hi < lo) return {};
  if (hi - lo + 1 > window_cap)
    fail(ErrorKind::WindowTooLarge, "valuation window exceeds the configured bound");
  long nn = std::max(n, hi + 1);
  detail::OperatorWindow w(l, pt, ell, nn - lo + 8);
  long emin = w.lowest_equation(lo);
  long emax = w.equation_ceiling(nn);
  long cols = nn - lo;
  RatMat mat(std::max<long>(emax - emin, 0), cols);
  for (long m = lo; m < nn; ++m) {
    detail::Window col = w.column(m, emin, emax);
    for (long e = emin; e < emax; ++e) mat.at(e - emin, m - lo) = col.at(e);
  }
  std::vector<std::vector<Rat>> kernel = nullspace(mat);
  if (kernel.empty()) return {};
  // Echelonize by leading exponent so each basis element has a distinct
  // valuation; elements led beyond the window belong to higher-valuation
  // solutions and are dropped.
  RatMat ech(static_cast<long>(kernel.size()), cols);
  for (size_t i = 0; i < kernel.size(); ++i)
    for (long j = 0; j < cols; ++j) ech.at(static_cast<long>(i), j) = kernel[i][static_cast<size_t>(j)];
  std::vector<long> pivots = rref(ech);
  std::vector<TruncatedSeries> out;
  for (size_t r = 0; r < pivots.size(); ++r) {
    long lead = pivots[r];
    if (lead + lo > hi) continue;
    std::vector<Rat> c;
    c.reserve(static_cast<size_t>(cols - lead));
    for (long j = lead; j < cols; ++j) c.push_back(ech.at(static_cast<long>(r), j));
    out.push_back(TruncatedSeries(l.tag(), pt, ell, lo + lead, std::move(c)).truncated(n));
  }
  return out;
}

// Steps in [lo, hi] that lead truncated solutions of L(f) = 0: candidate
// valuations and degrees of freedom over the window.
inline std::vector<long> resonant_exponents(const DiffOperator& l, ExpansionPoint pt, long ell,
                                            long lo, long hi) {
  std::vector<long> out;
  for (const auto& s : truncated_kernel_basis(l, pt, ell, lo, hi, hi + 2)) out.push_back(s.val());
  return out;
}

// Smallest order such that a prefix of that order pins every degree of
// freedom the window scan can see; advisory for building prefixes.
inline long minimal_prefix_order(const DiffOperator& l, ExpansionPoint pt, long ell,
                                 long scan_lo = -48, long scan_hi = 48) {
  long m = scan_lo;
  for (long r : resonant_exponents(l, pt, ell, scan_lo, scan_hi)) m = std::max(m, r + 1);
  return m;
}

}  // namespace hypertrans
