#include <catch2/catch_amalgamated.hpp>

#include "gen.hpp"
#include "hypertrans/series.hpp"

using namespace hypertrans;

namespace {

TruncatedSeries at_zero(const CaseTag& tag, long val, std::vector<Rat> c, long ell = 1) {
  return TruncatedSeries(tag, ExpansionPoint::Zero, ell, val, std::move(c));
}

TruncatedSeries at_inf(const CaseTag& tag, long val, std::vector<Rat> c) {
  return TruncatedSeries(tag, ExpansionPoint::Infinity, 1, val, std::move(c));
}

ExpansionPoint natural_point(const CaseTag& tag) {
  return tag.kind == CaseKind::Shift ? ExpansionPoint::Infinity : ExpansionPoint::Zero;
}

bool agree(const TruncatedSeries& a, const TruncatedSeries& b) {
  long n = std::min(a.order(), b.order());
  return a.truncated(n) == b.truncated(n);
}

}  // namespace

TEST_CASE("series construction and normalization") {
  CaseTag m2 = CaseTag::mahler(2);
  TruncatedSeries s = at_zero(m2, 0, {rat(0), rat(0), rat(5), rat(0)});
  CHECK(s.val() == 2);
  CHECK(s.order() == 4);
  CHECK(*s.true_val() == 2);
  CHECK(s.coeff_step(0) == 0);
  CHECK(s.coeff_step(2) == 5);
  CHECK(s.coeff_step(3) == 0);
  CHECK_THROWS_AS(s.coeff_step(4), Error);

  TruncatedSeries z = TruncatedSeries::zero_truncation(m2, ExpansionPoint::Zero, 1, 6);
  CHECK(z.is_zero());
  CHECK(z.order() == 6);
  CHECK(!z.true_val().has_value());

  CHECK_THROWS_AS(at_zero(CaseTag::shift(rat(1)), 0, {rat(1)}), Error);
  CHECK_THROWS_AS(
      TruncatedSeries(m2, ExpansionPoint::Infinity, 1, 0, std::vector<Rat>{rat(1)}), Error);
}

TEST_CASE("series ring operations on pinned inputs") {
  CaseTag q3 = CaseTag::qdiff(rat(3));
  TruncatedSeries one_plus = at_zero(q3, 0, {rat(1), rat(1)});
  TruncatedSeries one_minus = at_zero(q3, 0, {rat(1), rat(-1)});
  TruncatedSeries sum = one_plus + one_minus;
  CHECK(sum.coeff_step(0) == 2);
  CHECK(sum.coeff_step(1) == 0);
  CHECK(sum.order() == 2);

  long n = 8;
  std::vector<Rat> geo(static_cast<size_t>(n), Rat(1));
  TruncatedSeries g = at_zero(q3, 0, geo);
  std::vector<Rat> lin(static_cast<size_t>(n), Rat(0));
  lin[0] = 1;
  lin[1] = -1;
  TruncatedSeries one_minus_full = at_zero(q3, 0, lin);
  TruncatedSeries prod = g * one_minus_full;
  CHECK(prod.order() == n);
  CHECK(prod.coeff_step(0) == 1);
  for (long k = 1; k < prod.order(); ++k) CHECK(prod.coeff_step(k) == 0);

  CaseTag sh = CaseTag::shift(rat(1));
  TruncatedSeries u = at_inf(sh, 1, {rat(1)});
  TruncatedSeries u2 = u * u;
  CHECK(u2.val() == 2);
  CHECK(u2.coeff_step(2) == 1);

  TruncatedSeries quot = div(g, one_minus_full);
  CHECK(quot.coeff_step(0) == 1);
  CHECK(quot.coeff_step(1) == 2);
  CHECK(quot.coeff_step(2) == 3);

  CHECK_THROWS_AS(div(g, TruncatedSeries::zero_truncation(q3, ExpansionPoint::Zero, 1, 4)),
                  Error);
  try {
    div(g, TruncatedSeries::zero_truncation(q3, ExpansionPoint::Zero, 1, 4));
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ZeroDivisor);
  }
  CHECK_THROWS_AS(g + u, Error);
}

TEST_CASE("sigma acts on series as the case dictates") {
  CaseTag m2 = CaseTag::mahler(2);
  TruncatedSeries f = at_zero(m2, 1, {rat(1), rat(1)});
  TruncatedSeries sf = apply_sigma_series(f);
  CHECK(sf.coeff_step(2) == 1);
  CHECK(sf.coeff_step(4) == 1);
  CHECK(sf.coeff_step(3) == 0);
  CHECK(sf.order() == 6);

  CaseTag q3 = CaseTag::qdiff(rat(3));
  TruncatedSeries h = at_zero(q3, 0, {rat(1), rat(1)});
  TruncatedSeries sh = apply_sigma_series(h);
  CHECK(sh.coeff_step(0) == 1);
  CHECK(sh.coeff_step(1) == 3);

  CaseTag s1 = CaseTag::shift(rat(1));
  TruncatedSeries u = at_inf(s1, 1, {rat(1), rat(0), rat(0), rat(0), rat(0)});
  TruncatedSeries su = apply_sigma_series(u);
  for (long k = 1; k < su.order(); ++k)
    CHECK(su.coeff_step(k) == (k % 2 == 1 ? rat(1) : rat(-1)));
}

TEST_CASE("sigma on ramified q-series") {
  CaseTag q4 = CaseTag::qdiff(rat(4));
  TruncatedSeries f = at_zero(q4, 1, {rat(1), rat(1)}, 2);
  TruncatedSeries sf = apply_sigma_series(f);
  CHECK(sf.coeff_step(1) == 2);
  CHECK(sf.coeff_step(2) == 4);

  CaseTag q2 = CaseTag::qdiff(rat(2));
  TruncatedSeries g = at_zero(q2, 1, {rat(1)}, 2);
  CHECK_THROWS_AS(apply_sigma_series(g), Error);
  try {
    apply_sigma_series(g);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonRationalRamifiedParameter);
  }
}

TEST_CASE("derivation acts termwise per case") {
  CaseTag m2 = CaseTag::mahler(2);
  TruncatedSeries f = at_zero(m2, 1, {rat(1), rat(0), rat(0), rat(1)});
  TruncatedSeries df = derive_series(f);
  CHECK(df.coeff_step(1) == 1);
  CHECK(df.coeff_step(4) == 4);

  CaseTag s1 = CaseTag::shift(rat(1));
  TruncatedSeries u = at_inf(s1, 1, {rat(1)});
  TruncatedSeries du = derive_series(u);
  CHECK(du.val() == 2);
  CHECK(du.coeff_step(2) == -1);

  CaseTag q3 = CaseTag::qdiff(rat(3));
  TruncatedSeries c = at_zero(q3, 0, {rat(5), rat(0)});
  CHECK(derive_series(c).is_zero());
}

TEST_CASE("rational function expansion at zero and infinity") {
  CaseTag q3 = CaseTag::qdiff(rat(3));
  Poly x = Poly::x();
  RatFunc f(Poly::one(), Poly::one() - x);
  TruncatedSeries s = expand_ratfunc(f, q3, ExpansionPoint::Zero, 4);
  CHECK(s.order() == 4);
  for (long k = 0; k < 4; ++k) CHECK(s.coeff_step(k) == 1);

  CaseTag s1 = CaseTag::shift(rat(1));
  RatFunc g(x, x - Poly::one());
  TruncatedSeries t = expand_ratfunc(g, s1, ExpansionPoint::Infinity, 3);
  CHECK(t.val() == 0);
  CHECK(t.coeff_step(0) == 1);
  CHECK(t.coeff_step(1) == 1);
  CHECK(t.coeff_step(2) == 1);

  TruncatedSeries x2 = expand_ratfunc(RatFunc(x * x), q3, ExpansionPoint::Zero, 5);
  CHECK(*x2.true_val() == 2);
  CHECK(x2.coeff_step(2) == 1);
  CHECK(x2.coeff_step(3) == 0);
  CHECK(x2.coeff_step(4) == 0);

  TruncatedSeries lau = expand_ratfunc(RatFunc(Poly::one(), x * x), q3, ExpansionPoint::Zero, 3);
  CHECK(lau.val() == -2);
  CHECK(lau.coeff_step(-2) == 1);
  CHECK(lau.coeff_step(0) == 0);
}

TEST_CASE("series sigma matches exact sigma on expansions") {
  gen::Rng rng(4242);
  for (int i = 0; i < 200; ++i) {
    CaseTag tag = rng.case_tag();
    ExpansionPoint pt = natural_point(tag);
    RatFunc f = rng.ratfunc(3);
    long order = 14;
    TruncatedSeries lhs = apply_sigma_series(expand_ratfunc(f, tag, pt, order));
    TruncatedSeries rhs = expand_ratfunc(apply_sigma(f, tag), tag, pt, lhs.order());
    CHECK(agree(lhs, rhs));
  }
}

TEST_CASE("series commutation between derivation and sigma") {
  gen::Rng rng(555);
  for (int i = 0; i < 200; ++i) {
    CaseTag tag = rng.case_tag();
    ExpansionPoint pt = natural_point(tag);
    RatFunc f = rng.ratfunc(3);
    TruncatedSeries s = expand_ratfunc(f, tag, pt, 12);
    TruncatedSeries lhs = derive_series(apply_sigma_series(s));
    TruncatedSeries rhs = tag.commutation_factor() * apply_sigma_series(derive_series(s));
    CHECK(agree(lhs, rhs));
  }
}

TEST_CASE("series ring axioms hold on truncations") {
  gen::Rng rng(777);
  for (int i = 0; i < 120; ++i) {
    CaseTag tag = rng.case_tag();
    ExpansionPoint pt = natural_point(tag);
    TruncatedSeries a = expand_ratfunc(rng.ratfunc(3), tag, pt, 10);
    TruncatedSeries b = expand_ratfunc(rng.ratfunc(3), tag, pt, 10);
    TruncatedSeries c = expand_ratfunc(rng.ratfunc(3), tag, pt, 10);
    CHECK(a + b == b + a);
    CHECK(agree((a + b) + c, a + (b + c)));
    CHECK(agree(a * b, b * a));
    CHECK(agree(a * (b + c), a * b + a * c));
    CHECK(agree((a * b) * c, a * (b * c)));
  }
}

TEST_CASE("series division inverts multiplication") {
  gen::Rng rng(912);
  for (int i = 0; i < 100; ++i) {
    CaseTag tag = rng.case_tag();
    ExpansionPoint pt = natural_point(tag);
    TruncatedSeries a = expand_ratfunc(rng.ratfunc(3), tag, pt, 10);
    TruncatedSeries b = expand_ratfunc(rng.nonzero_ratfunc(3), tag, pt, 10);
    CHECK(agree(div(a * b, b), a));
  }
}

TEST_CASE("expansion valuation matches the rational function") {
  gen::Rng rng(133);
  for (int i = 0; i < 100; ++i) {
    CaseTag tag = rng.case_tag();
    ExpansionPoint pt = natural_point(tag);
    RatFunc f = rng.nonzero_ratfunc(3);
    TruncatedSeries s = expand_ratfunc(f, tag, pt, 12);
    REQUIRE(s.true_val().has_value());
    long expect = pt == ExpansionPoint::Zero ? *f.valuation_at_zero() : -f.degree_at_infinity();
    CHECK(*s.true_val() == expect);
  }
}

TEST_CASE("ramification refinement preserves content") {
  CaseTag m2 = CaseTag::mahler(2);
  TruncatedSeries f = at_zero(m2, 1, {rat(3), rat(0), rat(7)});
  TruncatedSeries g = f.with_ramification(3);
  CHECK(g.ramification() == 3);
  CHECK(g.coeff_step(3) == 3);
  CHECK(g.coeff_step(4) == 0);
  CHECK(g.coeff_step(9) == 7);
  CHECK(g.order() == 12);
  CHECK(f == g);
  CHECK_THROWS_AS(g.with_ramification(2), Error);
}
