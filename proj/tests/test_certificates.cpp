#include <catch2/catch_amalgamated.hpp>

#include "hypertrans/classifier.hpp"

#include <functional>
#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

#include "gen.hpp"

using namespace hypertrans;

namespace {

RatFunc rf(long v) { return RatFunc(Poly(Rat(v))); }
RatFunc rfx() { return RatFunc(Poly::x()); }

Poly poly(std::initializer_list<long> coeffs) {
  std::vector<Rat> c;
  for (long v : coeffs) c.emplace_back(v);
  return Poly(std::move(c));
}

ExpansionPoint natural_point(const CaseTag& tag) {
  return tag.kind == CaseKind::Shift ? ExpansionPoint::Infinity : ExpansionPoint::Zero;
}

bool proportional(const RatFunc& f, const RatFunc& g) {
  return !f.is_zero() && !g.is_zero() && (f / g).is_constant();
}

bool decomposition_holds(const RatFunc& a, const StandardDecomposition& sd, const CaseTag& tag) {
  return a * sd.e == sd.a_star * apply_sigma(sd.e, tag);
}

// No numerator or denominator root of f may lie on the forward orbit of
// another one; that is what makes the collapsed multiplier standard. Powers
// of x are fixed by a q dilation, so they stay in the standard form and are
// dropped before the orbit test.
bool is_standard(const RatFunc& f, const CaseTag& tag) {
  Poly parts[2] = {f.num(), f.den()};
  if (tag.kind == CaseKind::QDiff)
    for (Poly& p : parts) {
      std::vector<Rat> c(p.coeffs().begin() + p.valuation(), p.coeffs().end());
      p = Poly(std::move(c));
    }
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (long ell = 1; ell <= 8; ++ell)
        if (Poly::gcd(parts[i], apply_sigma(parts[j], tag, ell)).degree() > 0) return false;
  return true;
}

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::Internal;
}

TruncatedSeries prefix_of(const RatFunc& w, const CaseTag& tag, long order) {
  return expand_ratfunc(w, tag, natural_point(tag), order);
}

// A short prefix can leave the free coefficient of a solution family outside
// the window; retry with longer expansions before giving up.
Verdict classify_planted(const RatFunc& a, const RatFunc& b, const CaseTag& tag, const RatFunc& w,
                         const ClassifyConfig& cfg) {
  for (long ord : {16L, 48L, 96L}) {
    try {
      return classify_order_one(a, b, tag, prefix_of(w, tag, ord), cfg);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::AmbiguousPrefix) throw;
    }
  }
  FAIL("no prefix length pinned the solution family");
  return {};
}

}  // namespace

TEST_CASE("standard decomposition collapses shift orbits") {
  CaseTag sh = CaseTag::shift(rat(1));

  SECTION("a full numerator denominator orbit cancels") {
    RatFunc a(Poly::x(), poly({2, 1}));
    StandardDecomposition sd = standard_decompose(a, sh);
    CHECK(sd.a_star == rf(1));
    CHECK(sd.e == RatFunc(Poly::one(), poly({0, 1, 1})));
    CHECK(decomposition_holds(a, sd, sh));
  }

  SECTION("adjacent numerator roots merge into a square") {
    RatFunc a(poly({0, 1, 1}), Poly::one());
    StandardDecomposition sd = standard_decompose(a, sh);
    CHECK(sd.a_star == RatFunc(Poly::monomial(2, Rat(1))));
    CHECK(sd.e == rfx());
    CHECK(decomposition_holds(a, sd, sh));
  }

  SECTION("constants pass through untouched") {
    StandardDecomposition sd = standard_decompose(rf(7), sh);
    CHECK(sd.a_star == rf(7));
    CHECK(sd.e == rf(1));
  }
}

TEST_CASE("standard decomposition collapses q dilation orbits") {
  CaseTag q2 = CaseTag::qdiff(rat(2));

  SECTION("roots linked by a square of q cancel to a constant") {
    RatFunc a(poly({-2, 1}), poly({-2, 4}));
    StandardDecomposition sd = standard_decompose(a, q2);
    CHECK(sd.a_star == rf(1));
    CHECK(sd.e * RatFunc(poly({2, -3, 1})) == rf(8));
    CHECK(decomposition_holds(a, sd, q2));
  }

  SECTION("an unlinked multiplier is already standard") {
    RatFunc a(poly({-3, 1}), Poly::one());
    StandardDecomposition sd = standard_decompose(a, q2);
    CHECK(sd.a_star == a);
    CHECK(sd.e == rf(1));
  }
}

TEST_CASE("standard decomposition is standard on random inputs") {
  gen::Rng rng(0x5eed001);
  for (int it = 0; it < 30; ++it) {
    CaseTag tag = rng.uniform(0, 1) ? CaseTag::shift(rng.shift_step())
                                    : CaseTag::qdiff(rng.q_value());
    RatFunc a = rng.nonzero_ratfunc(3, 4);
    StandardDecomposition sd = standard_decompose(a, tag);
    CHECK(decomposition_holds(a, sd, tag));
    CHECK(is_standard(sd.a_star, tag));
  }
}

TEST_CASE("telescoper solves and refuses over the shift field") {
  CaseTag sh = CaseTag::shift(rat(1));

  SECTION("a constant right hand side telescopes to x") {
    Telescoper tl = telescope_solve(rf(1), rf(1), sh);
    CHECK(tl.solvable);
    CHECK(apply_sigma(tl.h, sh) - tl.h == rf(1));
  }

  SECTION("a linear right hand side telescopes to a quadratic") {
    Telescoper tl = telescope_solve(rf(1), rfx(), sh);
    CHECK(tl.solvable);
    CHECK(apply_sigma(tl.h, sh) - tl.h == rfx());
  }

  SECTION("the harmonic right hand side has no telescoper") {
    Telescoper tl = telescope_solve(rf(1), RatFunc(Poly::one(), Poly::x()), sh);
    CHECK_FALSE(tl.solvable);
    CHECK_FALSE(tl.family_found);
  }

  SECTION("a nonunit constant multiplier still solves") {
    Telescoper tl = telescope_solve(rf(3), rfx(), sh);
    CHECK(tl.solvable);
    CHECK(apply_sigma(tl.h, sh) - rf(3) * tl.h == rfx());
  }
}

TEST_CASE("q dilation telescoper normal form pins the forced residual") {
  CaseTag q2 = CaseTag::qdiff(rat(2));

  SECTION("a resonant exponent forces a nonzero residual") {
    Telescoper tl = telescope_solve(rf(2), rfx(), q2);
    CHECK(tl.normal_form);
    CHECK(tl.r == 1);
    CHECK(tl.family_found);
    CHECK_FALSE(tl.solvable);
    CHECK(tl.d == Rat(1));
    CHECK(apply_sigma(tl.h, q2) - rf(2) * tl.h + RatFunc(Rat(tl.d)) * rfx() == rfx());
  }

  SECTION("a unit multiplier absorbs the right hand side") {
    Telescoper tl = telescope_solve(rf(1), rfx(), q2);
    CHECK(tl.normal_form);
    CHECK(tl.r == 0);
    CHECK(tl.solvable);
    CHECK(tl.d == Rat(0));
    CHECK(apply_sigma(tl.h, q2) - tl.h == rfx());
  }

  SECTION("a non resonant constant multiplier uses the plain path") {
    Telescoper tl = telescope_solve(rf(3), rfx(), q2);
    CHECK_FALSE(tl.normal_form);
    CHECK(tl.solvable);
    CHECK(apply_sigma(tl.h, q2) - rf(3) * tl.h == rfx());
  }
}

TEST_CASE("telescoper recovers planted data") {
  gen::Rng rng(0x5eed002);
  for (int it = 0; it < 20; ++it) {
    CaseTag tag = rng.uniform(0, 1) ? CaseTag::shift(rng.shift_step())
                                    : CaseTag::qdiff(rng.q_value());
    RatFunc astar(Poly(rng.nonzero_rat(4, 2)));
    RatFunc h = rng.ratfunc(2, 4);
    RatFunc b = apply_sigma(h, tag) - astar * h;
    Telescoper tl = telescope_solve(astar, b, tag);
    REQUIRE(tl.solvable);
    CHECK(apply_sigma(tl.h, tag) - astar * tl.h == b);
  }
}

TEST_CASE("mahler multiplicative criterion on pinned inputs") {
  CaseTag m2 = CaseTag::mahler(2);

  SECTION("a power of x has the trivial witness") {
    auto mw = mahler_mult_criterion(rfx(), m2);
    REQUIRE(mw.has_value());
    CHECK(mw->c == Rat(1));
    CHECK(mw->alpha == 1);
    CHECK(mw->g == rf(1));
  }

  SECTION("x plus one is witnessed by one minus x") {
    auto mw = mahler_mult_criterion(RatFunc(poly({1, 1})), m2);
    REQUIRE(mw.has_value());
    CHECK(mw->c == Rat(1));
    CHECK(mw->alpha == 0);
    CHECK(proportional(mw->g, RatFunc(poly({1, -1}))));
    CHECK(RatFunc(poly({1, 1})) * mw->g ==
          RatFunc(mw->c) * apply_sigma(mw->g, m2));
  }

  SECTION("x minus three has no rational witness") {
    CHECK_FALSE(mahler_mult_criterion(RatFunc(poly({-3, 1})), m2).has_value());
  }
}

TEST_CASE("order one mahler classification is exact") {
  CaseTag m2 = CaseTag::mahler(2);

  SECTION("the power tower series is hypertranscendental") {
    TruncatedSeries pre(m2, ExpansionPoint::Zero, 1, 1, {Rat(1), Rat(1), Rat(0), Rat(1)});
    Verdict v = classify_order_one(rf(1), RatFunc(-Poly::x()), m2, pre);
    CHECK(v.kind == VerdictKind::Hypertranscendental);
    CHECK(v.exactness == Exactness::Exact);
    REQUIRE(v.certificate.has_value());
    CHECK(v.certificate->kind == CertificateKind::OrderOneExact);
    CHECK(v.certificate->height_bound == 1);
    CHECK_FALSE(v.witness.has_value());
  }

  SECTION("a constant prefix of the identity equation is rational") {
    TruncatedSeries pre(m2, ExpansionPoint::Zero, 1, 0, {Rat(1), Rat(0)});
    Verdict v = classify_order_one(rf(1), RatFunc(), m2, pre);
    CHECK(v.kind == VerdictKind::Rational);
    CHECK(v.exactness == Exactness::Exact);
    REQUIRE(v.witness.has_value());
    CHECK(*v.witness == rf(1));
  }

  SECTION("a homogeneous equation without multiplicative witness is hypertranscendental") {
    TruncatedSeries pre(m2, ExpansionPoint::Zero, 1, 0, {Rat(1)});
    Verdict v = classify_order_one(RatFunc(poly({1, 1, 1})), RatFunc(), m2, pre);
    CHECK(v.kind == VerdictKind::Hypertranscendental);
    CHECK(v.exactness == Exactness::Exact);
    REQUIRE(v.certificate.has_value());
    CHECK(v.certificate->kind == CertificateKind::MahlerMultFail);
    CHECK_FALSE(mahler_mult_criterion(RatFunc(poly({1, 1, 1})), m2).has_value());
  }
}

TEST_CASE("order one shift classification pins and refuses") {
  CaseTag sh = CaseTag::shift(rat(1));

  SECTION("the unit multiplier family is pinned by the prefix") {
    TruncatedSeries pre(sh, ExpansionPoint::Infinity, 1, -1, {Rat(1), Rat(0), Rat(0), Rat(0)});
    Verdict v = classify_order_one(rf(1), rf(1), sh, pre);
    CHECK(v.kind == VerdictKind::Rational);
    CHECK(v.exactness == Exactness::Exact);
    REQUIRE(v.witness.has_value());
    CHECK(*v.witness == rfx());
  }

  SECTION("the harmonic equation carries an absent telescoper certificate") {
    Verdict v = classify_order_one(rf(1), RatFunc(Poly::one(), Poly::x()), sh, std::nullopt);
    CHECK(v.kind == VerdictKind::Hypertranscendental);
    CHECK(v.exactness == Exactness::Exact);
    REQUIRE(v.certificate.has_value());
    CHECK(v.certificate->kind == CertificateKind::TelescoperAbsent);
    REQUIRE(v.certificate->decomposition.has_value());
    CHECK(v.certificate->decomposition->a_star == rf(1));
  }

  SECTION("a nonconstant collapsed multiplier is decisive without a prefix") {
    Verdict v = classify_order_one(rfx(), RatFunc(), sh, std::nullopt);
    CHECK(v.kind == VerdictKind::Hypertranscendental);
    CHECK(v.exactness == Exactness::Exact);
    REQUIRE(v.certificate.has_value());
    CHECK(v.certificate->kind == CertificateKind::OrderOneExact);
  }

  SECTION("without a prefix the rational verdict is conditional") {
    Verdict v = classify_order_one(rf(1), rf(1), sh, std::nullopt);
    CHECK(v.kind == VerdictKind::Rational);
    CHECK(v.exactness == Exactness::Conditional);
    REQUIRE(v.witness.has_value());
    CHECK(apply_sigma(*v.witness, sh) == *v.witness + rf(1));
  }
}

TEST_CASE("order one q dilation classification follows the residual normal form") {
  CaseTag q2 = CaseTag::qdiff(rat(2));

  SECTION("a forced residual means no series solution at all") {
    CHECK(kind_of([&] { classify_order_one(rf(2), rfx(), q2, std::nullopt); }) ==
          ErrorKind::InconsistentPrefix);
  }

  SECTION("the resonant free coefficient is pinned by the prefix") {
    TruncatedSeries pre(q2, ExpansionPoint::Zero, 1, 0, {Rat(5), Rat(1)});
    Verdict v = classify_order_one(rf(1), rfx(), q2, pre);
    CHECK(v.kind == VerdictKind::Rational);
    CHECK(v.exactness == Exactness::Exact);
    REQUIRE(v.witness.has_value());
    CHECK(*v.witness == rfx() + rf(5));
  }

  SECTION("a homogeneous equation with a monomial multiplier rejects nonzero prefixes") {
    TruncatedSeries pre(q2, ExpansionPoint::Zero, 1, 0, {Rat(1)});
    CHECK(kind_of([&] { classify_order_one(rfx(), RatFunc(), q2, pre); }) ==
          ErrorKind::InconsistentPrefix);
  }

  SECTION("a non monomial collapsed multiplier is decisive") {
    Verdict v = classify_order_one(RatFunc(poly({-3, 1})), RatFunc(), q2, std::nullopt);
    CHECK(v.kind == VerdictKind::Hypertranscendental);
    REQUIRE(v.certificate.has_value());
    CHECK(v.certificate->kind == CertificateKind::OrderOneExact);
  }
}

TEST_CASE("planted rational solutions are recovered") {
  gen::Rng rng(0x5eed003);
  ClassifyConfig cfg;
  cfg.degree_cap = 512;

  SECTION("shift and q dilation without a prefix") {
    for (int it = 0; it < 34; ++it) {
      CaseTag tag = rng.uniform(0, 1) ? CaseTag::shift(rng.shift_step())
                                      : CaseTag::qdiff(rng.q_value());
      RatFunc w = rng.ratfunc(2, 4);
      RatFunc a = rng.nonzero_ratfunc(2, 4);
      RatFunc b = apply_sigma(w, tag) - a * w;
      Verdict v = classify_order_one(a, b, tag, std::nullopt, cfg);
      REQUIRE(v.kind == VerdictKind::Rational);
      REQUIRE(v.witness.has_value());
      CHECK(apply_sigma(*v.witness, tag) == a * *v.witness + b);
    }
  }

  SECTION("shift and q dilation with a pinning prefix") {
    for (int it = 0; it < 33; ++it) {
      CaseTag tag = rng.uniform(0, 1) ? CaseTag::shift(rng.shift_step())
                                      : CaseTag::qdiff(rng.q_value());
      RatFunc w = rng.ratfunc(2, 4);
      RatFunc a = rng.nonzero_ratfunc(2, 4);
      RatFunc b = apply_sigma(w, tag) - a * w;
      Verdict v = classify_planted(a, b, tag, w, cfg);
      REQUIRE(v.kind == VerdictKind::Rational);
      CHECK(v.exactness == Exactness::Exact);
      REQUIRE(v.witness.has_value());
      CHECK(*v.witness == w);
    }
  }

  SECTION("mahler with a prefix") {
    for (int it = 0; it < 33; ++it) {
      CaseTag tag = CaseTag::mahler(rng.mahler_p());
      Poly den = rng.nonzero_poly(2, 4);
      while (den[0] == 0) den = rng.nonzero_poly(2, 4);
      RatFunc w(rng.poly(2, 4), den);
      RatFunc a = rng.nonzero_ratfunc(2, 4);
      RatFunc b = apply_sigma(w, tag) - a * w;
      Verdict v = classify_order_one(a, b, tag, prefix_of(w, tag, 12), cfg);
      REQUIRE(v.kind == VerdictKind::Rational);
      CHECK(v.exactness == Exactness::Exact);
      REQUIRE(v.witness.has_value());
      CHECK(*v.witness == w);
    }
  }
}

TEST_CASE("iterated operators keep their solutions") {
  gen::Rng rng(0x5eed004);
  for (int it = 0; it < 12; ++it) {
    CaseTag tag = rng.case_tag();
    RatFunc w = tag.kind == CaseKind::Mahler
                    ? RatFunc(rng.poly(2, 4), Poly::one())
                    : rng.ratfunc(2, 4);
    long order = rng.uniform(1, 2);
    std::vector<RatFunc> coeffs;
    for (long i = 0; i <= order; ++i) coeffs.push_back(rng.nonzero_ratfunc(1, 3));
    DiffOperator l(tag, coeffs);
    AffineEquation eq{l, apply_operator(l, w)};
    for (long r : {2L, 3L}) {
      if (tag.kind == CaseKind::Mahler && r == 3) continue;
      AffineEquation eqr = iterate_equation(eq, r);
      CHECK(eqr.op.tag() == tag.iterate(r));
      CHECK(apply_operator(eqr.op, w) == eqr.rhs);
    }
  }
}

TEST_CASE("higher order equations classify by solution space membership") {
  SECTION("a planted rational solution of an order two shift equation") {
    CaseTag sh = CaseTag::shift(rat(1));
    DiffOperator l1(sh, {-(apply_sigma(rfx(), sh) / rfx()), rf(1)});
    RatFunc w2(Poly::one(), Poly::x());
    DiffOperator l2(sh, {-(apply_sigma(w2, sh) / w2), rf(1)});
    DiffOperator l = ore_mul(l2, l1);
    TruncatedSeries pre = expand_ratfunc(rfx(), sh, ExpansionPoint::Infinity, 8);
    Verdict v = classify_equation(AffineEquation{l, RatFunc()}, pre);
    CHECK(v.kind == VerdictKind::Rational);
    CHECK(v.exactness == Exactness::Exact);
    REQUIRE(v.witness.has_value());
    CHECK(*v.witness == rfx());
  }

  SECTION("the power tower series fails membership at order two") {
    CaseTag m2 = CaseTag::mahler(2);
    DiffOperator l1(m2, {rf(-1), rf(1)});
    DiffOperator l2(m2, {-rfx(), rf(1)});
    DiffOperator l = ore_mul(l2, l1);
    TruncatedSeries pre(m2, ExpansionPoint::Zero, 1, 1, {Rat(1), Rat(1), Rat(0), Rat(1)});
    Verdict v = classify_equation(AffineEquation{l, RatFunc()}, pre);
    CHECK(v.kind == VerdictKind::Hypertranscendental);
    REQUIRE(v.certificate.has_value());
    CHECK(v.certificate->kind == CertificateKind::NoRationalMatch);
    CHECK(v.certificate->hankel_rank >= 2);
  }
}

TEST_CASE("operators touching only advanced copies reduce and map back") {
  CaseTag sh = CaseTag::shift(rat(1));
  DiffOperator l(sh, {RatFunc(), rf(-1), rf(1)});
  TruncatedSeries pre(sh, ExpansionPoint::Infinity, 1, 0, {Rat(7), Rat(0), Rat(0)});
  Verdict v = classify_equation(AffineEquation{l, RatFunc()}, pre);
  CHECK(v.kind == VerdictKind::Rational);
  CHECK(v.exactness == Exactness::Exact);
  REQUIRE(v.witness.has_value());
  CHECK(*v.witness == rf(7));
}

TEST_CASE("ramified prefixes classify in the stretched variable") {
  SECTION("a square ramified q dilation prefix deramifies") {
    CaseTag q4 = CaseTag::qdiff(rat(4));
    DiffOperator l(q4, {rf(-1), rf(1)});
    TruncatedSeries pre(q4, ExpansionPoint::Zero, 2, 0, {Rat(1), Rat(0)});
    Verdict v = classify_equation(AffineEquation{l, RatFunc()}, pre);
    CHECK(v.kind == VerdictKind::Rational);
    CHECK(v.ramification == 2);
    REQUIRE(v.witness.has_value());
    CHECK(*v.witness == rf(1));
  }

  SECTION("a ramified parameter with no rational root is rejected") {
    CaseTag q2 = CaseTag::qdiff(rat(2));
    DiffOperator l(q2, {rf(-1), rf(1)});
    TruncatedSeries pre(q2, ExpansionPoint::Zero, 2, 0, {Rat(1), Rat(0)});
    CHECK(kind_of([&] { classify_equation(AffineEquation{l, RatFunc()}, pre); }) ==
          ErrorKind::NonRationalRamifiedParameter);
  }
}

TEST_CASE("classification rejects malformed problems") {
  CaseTag sh = CaseTag::shift(rat(1));
  CaseTag m2 = CaseTag::mahler(2);

  SECTION("the zero operator") {
    CHECK(kind_of([&] {
            classify_equation(AffineEquation{DiffOperator::zero(sh), rf(1)});
          }) == ErrorKind::SemanticError);
  }

  SECTION("mahler without a prefix") {
    CHECK(kind_of([&] {
            classify_order_one(rf(1), RatFunc(-Poly::x()), m2, std::nullopt);
          }) == ErrorKind::SemanticError);
  }

  SECTION("order two without a prefix") {
    DiffOperator l(sh, {rf(1), rf(1), rf(1)});
    CHECK(kind_of([&] { classify_equation(AffineEquation{l, RatFunc()}); }) ==
          ErrorKind::SemanticError);
  }

  SECTION("a prefix from a different difference field") {
    TruncatedSeries pre(CaseTag::shift(rat(2)), ExpansionPoint::Infinity, 1, 0, {Rat(1)});
    CHECK(kind_of([&] { classify_order_one(rf(1), rf(1), sh, pre); }) ==
          ErrorKind::CaseMismatch);
  }

  SECTION("a mahler right hand side outside the image of the substitution") {
    TruncatedSeries pre(m2, ExpansionPoint::Zero, 1, 1, {Rat(1)});
    CHECK(kind_of([&] { classify_order_one(RatFunc(), rfx(), m2, pre); }) ==
          ErrorKind::InconsistentPrefix);
  }
}

TEST_CASE("hypertranscendence verdicts survive operator iteration") {
  CaseTag m2 = CaseTag::mahler(2);
  TruncatedSeries pre(m2, ExpansionPoint::Zero, 1, 1, {Rat(1), Rat(1), Rat(0), Rat(1)});
  Verdict v = classify_order_one(rf(1), RatFunc(-Poly::x()), m2, pre);
  CHECK(v.kind == VerdictKind::Hypertranscendental);

  AffineEquation eq{DiffOperator(m2, {rf(-1), rf(1)}), RatFunc(-Poly::x())};
  Verdict v2 = classify_equation(eq, pre);
  CHECK(v2.kind == VerdictKind::Hypertranscendental);
  bool checked = false;
  for (const auto& line : v2.trace)
    if (line.find("agreement check passed") != std::string::npos) checked = true;
  CHECK(checked);
}
