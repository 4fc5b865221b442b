#pragma once

#include <string>

#include "ratfunc.hpp"

namespace hypertrans {

enum class CaseKind { Shift, QDiff, Mahler };

enum class ExpansionPoint { None, Zero, Infinity };

inline const char* case_kind_name(CaseKind k) {
  switch (k) {
    case CaseKind::Shift: return "shift";
    case CaseKind::QDiff: return "q";
    case CaseKind::Mahler: return "mahler";
  }
  return "?";
}

// The difference field (Q(x), sigma) under study. sigma is x -> x+h,
// x -> q*x, or x -> x^p; the matching derivation is d/dx for the shift case
// and x*d/dx otherwise.
struct CaseTag {
  CaseKind kind = CaseKind::Shift;
  Rat h;       // Shift
  Rat q;       // QDiff
  long p = 0;  // Mahler
  ExpansionPoint point = ExpansionPoint::None;

  static CaseTag shift(const Rat& h, bool at_infinity = true) {
    if (h == 0) fail(ErrorKind::SemanticError, "shift step h must be nonzero");
    CaseTag t;
    t.kind = CaseKind::Shift;
    t.h = h;
    t.point = at_infinity ? ExpansionPoint::Infinity : ExpansionPoint::None;
    return t;
  }
  static CaseTag qdiff(const Rat& q) {
    // The rational roots of unity are exactly 1 and -1.
    if (q == 0 || q == 1 || q == -1)
      fail(ErrorKind::SemanticError, "q must be nonzero and not a root of unity");
    CaseTag t;
    t.kind = CaseKind::QDiff;
    t.q = q;
    t.point = ExpansionPoint::Zero;
    return t;
  }
  static CaseTag mahler(long p) {
    if (p < 2) fail(ErrorKind::SemanticError, "Mahler exponent p must be >= 2");
    CaseTag t;
    t.kind = CaseKind::Mahler;
    t.p = p;
    t.point = ExpansionPoint::Zero;
    return t;
  }

  bool operator==(const CaseTag& o) const {
    return kind == o.kind && h == o.h && q == o.q && p == o.p && point == o.point;
  }

  // Constant c in the commutation rule (d o sigma) = c * (sigma o d).
  Rat commutation_factor() const { return kind == CaseKind::Mahler ? Rat(p) : Rat(1); }

  // Case tag for the iterated operator sigma^r.
  CaseTag iterate(long r) const {
    check_internal(r >= 1, "iteration order must be >= 1");
    CaseTag t = *this;
    switch (kind) {
      case CaseKind::Shift: t.h = Rat(r) * h; break;
      case CaseKind::QDiff: t.q = rat_pow(q, r); break;
      case CaseKind::Mahler: {
        long pr = 1;
        for (long i = 0; i < r; ++i) {
          pr *= p;
          if (pr > (1L << 40)) fail(ErrorKind::SemanticError, "iterated Mahler exponent overflow");
        }
        t.p = pr;
        break;
      }
    }
    return t;
  }

  std::string str() const {
    switch (kind) {
      case CaseKind::Shift:
        return std::string("shift h=") + h.get_str() +
               (point == ExpansionPoint::Infinity ? " (at infinity)" : " (no expansion point)");
      case CaseKind::QDiff: return std::string("q-difference q=") + q.get_str();
      case CaseKind::Mahler: return std::string("mahler p=") + std::to_string(p);
    }
    return "?";
  }
};

// sigma^k on polynomials. Mahler with k < 0 is partial; see try_sigma below.
inline Poly apply_sigma(const Poly& f, const CaseTag& tag, long k = 1) {
  if (k == 0 || f.is_constant()) return f;
  switch (tag.kind) {
    case CaseKind::Shift: return f.shift_x(Rat(k) * tag.h);
    case CaseKind::QDiff: return f.scale_x(rat_pow(tag.q, k));
    case CaseKind::Mahler: {
      if (k > 0) {
        long pk = 1;
        for (long i = 0; i < k; ++i) pk *= tag.p;
        return f.stretch_x(pk);
      }
      Poly g = f;
      for (long i = 0; i < -k; ++i) {
        auto u = g.unstretch_x(tag.p);
        if (!u) fail(ErrorKind::SemanticError, "polynomial has no Mahler sigma-preimage");
        g = *u;
      }
      return g;
    }
  }
  return f;
}

inline RatFunc apply_sigma(const RatFunc& f, const CaseTag& tag, long k = 1) {
  if (k == 0 || f.is_constant()) return f;
  return RatFunc(apply_sigma(f.num(), tag, k), apply_sigma(f.den(), tag, k));
}

// sigma^-1 on rational functions; for the Mahler case this exists only when
// f is a rational function of x^p.
inline std::optional<RatFunc> try_sigma_inverse(const RatFunc& f, const CaseTag& tag) {
  if (f.is_constant()) return f;
  switch (tag.kind) {
    case CaseKind::Shift: return apply_sigma(f, tag, -1);
    case CaseKind::QDiff: return apply_sigma(f, tag, -1);
    case CaseKind::Mahler: {
      // Normalize f = x^r * n/d with n(0), d(0) != 0; then f = g(x^p)
      // requires p | r and n, d supported on multiples of p.
      const Poly n = f.num().strip_x();
      const Poly d = f.den().strip_x();
      long r = f.num().valuation() - f.den().valuation();
      if (r % tag.p != 0) return std::nullopt;
      auto un = n.unstretch_x(tag.p);
      auto ud = d.unstretch_x(tag.p);
      if (!un || !ud) return std::nullopt;
      return RatFunc::monomial(r / tag.p, Rat(1)) * RatFunc(*un, *ud);
    }
  }
  return std::nullopt;
}

// The derivation paired with the case: d/dx (shift) or x*d/dx (q, Mahler).
inline RatFunc derive(const RatFunc& f, const CaseTag& tag) {
  RatFunc d = f.derivative();
  if (tag.kind == CaseKind::Shift) return d;
  return RatFunc::x() * d;
}

// Exponent lattice denominator for ramified (Puiseux-style) data. ell = 1 is
// the plain integer lattice.
struct RamificationContext {
  long ell = 1;
};

// Rewrites case parameters in the ramified variable z = x^(1/ell). The shift
// case admits no ramification; a q-difference case needs an exact rational
// ell-th root of q; the Mahler exponent is unchanged.
inline CaseTag deramify(const CaseTag& tag, long ell) {
  if (ell < 1) fail(ErrorKind::SemanticError, "ramification index must be >= 1");
  if (ell == 1) return tag;
  switch (tag.kind) {
    case CaseKind::Shift:
      fail(ErrorKind::UnsupportedCase, "shift case does not support ramified expansions");
    case CaseKind::QDiff: {
      auto root = rat_root(tag.q, ell);
      if (!root || *root == 1 || *root == -1)
        fail(ErrorKind::NonRationalRamifiedParameter,
             "q^(1/" + std::to_string(ell) + ") is not rational for q = " + tag.q.get_str());
      return CaseTag::qdiff(*root);
    }
    case CaseKind::Mahler: return tag;
  }
  return tag;
}

}  // namespace hypertrans
