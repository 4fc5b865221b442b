#include <catch2/catch_amalgamated.hpp>

#include "hypertrans/series_solver.hpp"

#include "gen.hpp"

using namespace hypertrans;

namespace {

RatFunc rf(long v) { return RatFunc(Poly(Rat(v))); }

DiffOperator first_order(const CaseTag& tag, const RatFunc& a0, const RatFunc& a1) {
  return DiffOperator(tag, {a0, a1});
}

ExpansionPoint natural_point(const CaseTag& tag) {
  return tag.kind == CaseKind::Shift ? ExpansionPoint::Infinity : ExpansionPoint::Zero;
}

}  // namespace

TEST_CASE("mahler prefix extends to the lacunary series") {
  CaseTag tag = CaseTag::mahler(2);
  AffineEquation eq{first_order(tag, rf(-1), rf(1)), RatFunc(-Poly::x())};
  TruncatedSeries prefix(tag, ExpansionPoint::Zero, 1, 1, {Rat(1)});

  TruncatedSeries f = extend_prefix(eq, prefix, 20);
  for (long m = 1; m < 20; ++m) {
    bool lacunary = m == 1 || m == 2 || m == 4 || m == 8 || m == 16;
    CHECK(f.coeff_step(m) == (lacunary ? Rat(1) : Rat(0)));
  }

  SECTION("idempotence") {
    CHECK(extend_prefix(eq, f, 20) == f);
    CHECK(extend_prefix(eq, f, 12) == f.truncated(12));
  }

  SECTION("a wrong forced coefficient is an obstruction") {
    TruncatedSeries bad(tag, ExpansionPoint::Zero, 1, 1, {Rat(2)});
    try {
      extend_prefix(eq, bad, 8);
      FAIL("expected InconsistentPrefix");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::InconsistentPrefix);
    }
  }
}

TEST_CASE("q-hypergeometric operator confirms and extends its prefix") {
  // f(q^2 x) - (2ax-2)/(a^2 x - 1) f(qx) + (x-1)/(a^2 x - 1) f(x) = 0
  // with q = 4, a = 2.
  CaseTag tag = CaseTag::qdiff(rat(4));
  Poly den({rat(-1), rat(4)});
  RatFunc a0(Poly({rat(-1), rat(1)}), den);
  RatFunc a1(Poly({rat(2), rat(-4)}), den);
  DiffOperator l(tag, {a0, a1, RatFunc(Poly::one())});

  std::vector<Rat> expect(10);
  expect[0] = 1;
  Rat a = rat(2), q = rat(4);
  for (size_t n = 1; n < expect.size(); ++n) {
    Rat top = 1 - a * rat_pow(q, static_cast<long>(n) - 1);
    Rat bot = 1 - rat_pow(q, static_cast<long>(n));
    expect[n] = expect[n - 1] * top * top / (bot * bot);
  }
  CHECK(expect[1] == rat(1, 9));

  TruncatedSeries seed(tag, ExpansionPoint::Zero, 1, 0, {Rat(1)});
  TruncatedSeries f = extend_prefix(l, seed, 10);
  for (long m = 0; m < 10; ++m) CHECK(f.coeff_step(m) == expect[static_cast<size_t>(m)]);

  TruncatedSeries two(tag, ExpansionPoint::Zero, 1, 0, {Rat(1), rat(1, 9)});
  CHECK(extend_prefix(l, two, 10) == f);

  TruncatedSeries bad(tag, ExpansionPoint::Zero, 1, 0, {Rat(1), Rat(2)});
  try {
    extend_prefix(l, bad, 10);
    FAIL("expected InconsistentPrefix");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InconsistentPrefix);
  }
}

TEST_CASE("shift constant prefix stays constant") {
  CaseTag tag = CaseTag::shift(rat(1));
  DiffOperator l = first_order(tag, rf(-1), rf(1));
  TruncatedSeries prefix(tag, ExpansionPoint::Infinity, 1, 0, {Rat(1)});
  TruncatedSeries f = extend_prefix(l, prefix, 8);
  CHECK(f.coeff_step(0) == 1);
  for (long m = 1; m < 8; ++m) CHECK(f.coeff_step(m) == 0);
}

TEST_CASE("telescoping against an inverse square matches the Bernoulli tail") {
  // f(x+1) - f(x) = 1/x^2 has the asymptotic solution
  // -1/x - 1/(2x^2) - B_2/x^3 - B_3/x^4 - ... at infinity.
  CaseTag tag = CaseTag::shift(rat(1));
  AffineEquation eq{first_order(tag, rf(-1), rf(1)),
                    RatFunc(Poly::one(), Poly::monomial(2, rat(1)))};
  TruncatedSeries prefix(tag, ExpansionPoint::Infinity, 1, 1, {rat(-1)});
  TruncatedSeries f = extend_prefix(eq, prefix, 6);
  CHECK(f.coeff_step(1) == rat(-1));
  CHECK(f.coeff_step(2) == rat(-1, 2));
  CHECK(f.coeff_step(3) == rat(-1, 6));
  CHECK(f.coeff_step(4) == rat(0));
  CHECK(f.coeff_step(5) == rat(1, 30));

  SECTION("the additive constant is a free exponent when not pinned") {
    TruncatedSeries loose = TruncatedSeries::zero_truncation(tag, ExpansionPoint::Infinity, 1, 0);
    try {
      extend_prefix(eq, loose, 6);
      FAIL("expected AmbiguousPrefix");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::AmbiguousPrefix);
      CHECK(std::string(e.what()).find("0") != std::string::npos);
    }
  }
}

TEST_CASE("ambiguity reports the free exponents") {
  SECTION("q-dilation") {
    CaseTag tag = CaseTag::qdiff(rat(2));
    DiffOperator l = first_order(tag, rf(-2), rf(1));
    TruncatedSeries loose = TruncatedSeries::zero_truncation(tag, ExpansionPoint::Zero, 1, 1);
    try {
      extend_prefix(l, loose, 6);
      FAIL("expected AmbiguousPrefix");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::AmbiguousPrefix);
      CHECK(std::string(e.what()).find("1") != std::string::npos);
    }
  }
  SECTION("mahler fixed exponent stays free in the coupled window") {
    CaseTag tag = CaseTag::mahler(2);
    // x^(-20) f(x^2) = f(x): only the exponent 20 survives, and a zero prefix
    // below it says nothing about that slot.
    DiffOperator l(tag, {rf(-1), RatFunc(Poly::one(), Poly::monomial(20, rat(1)))});
    TruncatedSeries loose = TruncatedSeries::zero_truncation(tag, ExpansionPoint::Zero, 1, 5);
    try {
      extend_prefix(l, loose, 40);
      FAIL("expected AmbiguousPrefix");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::AmbiguousPrefix);
      CHECK(std::string(e.what()).find("20") != std::string::npos);
    }
    SolveOptions pin;
    pin.pin_free_to_zero = true;
    CHECK(extend_prefix(l, loose, 40, pin).is_zero());
  }
}

TEST_CASE("a short truncation hides the surviving exponent without inventing it") {
  CaseTag tag = CaseTag::mahler(2);
  DiffOperator l(tag, {rf(-1), RatFunc(Poly::one(), Poly::monomial(20, rat(1)))});
  TruncatedSeries loose = TruncatedSeries::zero_truncation(tag, ExpansionPoint::Zero, 1, 5);
  TruncatedSeries f = extend_prefix(l, loose, 10);
  CHECK(f.is_zero());
  CHECK(f.order() == 10);
}

TEST_CASE("kernel bases match the pinned examples") {
  SECTION("q-dilation eigenfunction") {
    CaseTag tag = CaseTag::qdiff(rat(2));
    DiffOperator l = first_order(tag, rf(-2), rf(1));
    auto basis = truncated_kernel_basis(l, ExpansionPoint::Zero, 1, 0, 3, 8);
    REQUIRE(basis.size() == 1);
    CHECK(basis[0] == expand_ratfunc(RatFunc(Poly::x()), tag, ExpansionPoint::Zero, 8));
    auto res = resonant_exponents(l, ExpansionPoint::Zero, 1, 0, 3);
    REQUIRE(res.size() == 1);
    CHECK(res[0] == 1);
  }
  SECTION("mahler constants") {
    CaseTag tag = CaseTag::mahler(2);
    DiffOperator l = first_order(tag, rf(-1), rf(1));
    auto basis = truncated_kernel_basis(l, ExpansionPoint::Zero, 1, -2, 3, 8);
    REQUIRE(basis.size() == 1);
    CHECK(basis[0] == expand_ratfunc(rf(1), tag, ExpansionPoint::Zero, 8));
  }
  SECTION("shift rational eigenfunction") {
    CaseTag tag = CaseTag::shift(rat(1));
    DiffOperator l = first_order(tag, RatFunc(Poly({rat(1), rat(1)}), Poly::x()) * rf(-1), rf(1));
    auto basis = truncated_kernel_basis(l, ExpansionPoint::Infinity, 1, -3, 3, 8);
    REQUIRE(basis.size() == 1);
    CHECK(basis[0] == expand_ratfunc(RatFunc(Poly::x()), tag, ExpansionPoint::Infinity, 8));
    auto res = resonant_exponents(l, ExpansionPoint::Infinity, 1, -3, 3);
    REQUIRE(res.size() == 1);
    CHECK(res[0] == -1);
  }
  SECTION("window guard") {
    CaseTag tag = CaseTag::qdiff(rat(2));
    DiffOperator l = first_order(tag, rf(-2), rf(1));
    try {
      truncated_kernel_basis(l, ExpansionPoint::Zero, 1, -600, 600, 8);
      FAIL("expected WindowTooLarge");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::WindowTooLarge);
    }
  }
}

TEST_CASE("laurent solutions couple through the low-exponent window") {
  CaseTag tag = CaseTag::mahler(2);
  RatFunc f(Poly({rat(1), rat(1)}), Poly::x());  // 1/x + 1
  RatFunc c = apply_sigma(f, tag) / f;
  DiffOperator l = first_order(tag, -c, rf(1));
  TruncatedSeries expect = expand_ratfunc(f, tag, ExpansionPoint::Zero, 10);

  TruncatedSeries prefix(tag, ExpansionPoint::Zero, 1, -1, {Rat(1)});
  CHECK(extend_prefix(l, prefix, 10) == expect);

  auto basis = truncated_kernel_basis(l, ExpansionPoint::Zero, 1, -3, 3, 10);
  REQUIRE(basis.size() == 1);
  CHECK(basis[0] == expect);
}

TEST_CASE("ramified lattices extend and solve") {
  CaseTag tag = CaseTag::qdiff(rat(4));
  DiffOperator l = first_order(tag, rf(-2), rf(1));
  // rho(f) = 2 f is solved by x^(1/2) on the half-integer lattice.
  auto basis = truncated_kernel_basis(l, ExpansionPoint::Zero, 2, 0, 3, 8);
  REQUIRE(basis.size() == 1);
  CHECK(basis[0].val() == 1);
  CHECK(basis[0].ramification() == 2);
  CHECK(basis[0].coeff_step(1) == 1);
  for (long m = 2; m < 8; ++m) CHECK(basis[0].coeff_step(m) == 0);

  SECTION("a lattice with no rational q-root is rejected") {
    CaseTag t2 = CaseTag::qdiff(rat(2));
    DiffOperator l2 = first_order(t2, rf(-2), rf(1));
    try {
      truncated_kernel_basis(l2, ExpansionPoint::Zero, 2, 0, 3, 8);
      FAIL("expected NonRationalRamifiedParameter");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::NonRationalRamifiedParameter);
    }
  }
}

TEST_CASE("solver input guards") {
  CaseTag tag = CaseTag::qdiff(rat(2));
  TruncatedSeries seed(tag, ExpansionPoint::Zero, 1, 0, {Rat(1)});
  try {
    extend_prefix(DiffOperator::zero(tag), seed, 4);
    FAIL("expected SemanticError");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SemanticError);
  }
  try {
    extend_prefix(ore_mul(first_order(tag, rf(-2), rf(1)), DiffOperator::rho_power(tag, 1)), seed,
                  4);
    FAIL("expected ZeroTrailingCoefficient");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ZeroTrailingCoefficient);
  }
  try {
    CaseTag other = CaseTag::qdiff(rat(3));
    extend_prefix(first_order(other, rf(-2), rf(1)), seed, 4);
    FAIL("expected CaseMismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::CaseMismatch);
  }
}

TEST_CASE("rational eigenfunctions are recovered from minimal prefixes") {
  gen::Rng rng(0xa5c3);
  for (int rep = 0; rep < 80; ++rep) {
    CaseTag tag = rng.case_tag(true);
    ExpansionPoint pt = natural_point(tag);
    RatFunc f;
    do {
      f = rng.nonzero_ratfunc(2, 2);
    } while (f.is_zero());
    RatFunc c = apply_sigma(f, tag) / f;
    DiffOperator l = first_order(tag, -c, rf(1));

    long v = pt == ExpansionPoint::Zero ? *f.valuation_at_zero() : -f.degree_at_infinity();
    long n = v + 10;
    TruncatedSeries expect = expand_ratfunc(f, tag, pt, n);

    long pin = std::max(minimal_prefix_order(l, pt, 1, v - 4, v + 6), v + 1);
    TruncatedSeries prefix = expect.truncated(pin);
    TruncatedSeries got = extend_prefix(l, prefix, n);
    CHECK(got == expect);

    TruncatedSeries again = extend_prefix(l, got, n);
    CHECK(again == got);
  }
}

TEST_CASE("kernel elements re-extend from their resonance-pinning prefixes") {
  gen::Rng rng(0x77e1);
  int done = 0;
  for (int rep = 0; rep < 40; ++rep) {
    CaseTag tag = rng.case_tag(true);
    ExpansionPoint pt = natural_point(tag);
    RatFunc g = rng.nonzero_ratfunc(2, 2);
    RatFunc h = rng.nonzero_ratfunc(2, 2);
    DiffOperator lg = first_order(tag, -(apply_sigma(g, tag) / g), rf(1));
    DiffOperator l = ore_mul(first_order(tag, -(apply_sigma(h, tag) / h), rf(1)), lg);
    long n = 8;
    auto basis = truncated_kernel_basis(l, pt, 1, -6, 6, n);
    REQUIRE(!basis.empty());
    auto res = resonant_exponents(l, pt, 1, -6, 6);
    long pin_to = -6;
    for (long r : res) pin_to = std::max(pin_to, r + 1);
    for (const auto& s : basis) {
      TruncatedSeries prefix = s.truncated(std::max(pin_to, s.val() + 1));
      CHECK(extend_prefix(l, prefix, n) == s);
      ++done;
    }
  }
  CHECK(done >= 40);
}
