#pragma once

// Small seeded generators for property-style tests.

#include <random>

#include "hypertrans/cases.hpp"

namespace gen {

using hypertrans::CaseKind;
using hypertrans::CaseTag;
using hypertrans::Poly;
using hypertrans::Rat;
using hypertrans::RatFunc;

class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}


  long uniform(long lo, long hi) {
    std::uniform_int_distribution<long> d(lo, hi);
    return d(eng_);
  }

  Rat rat(long max_abs = 5, long max_den = 3) {
    return hypertrans::rat(uniform(-max_abs, max_abs), uniform(1, max_den));
  }

  Rat nonzero_rat(long max_abs = 5, long max_den = 3) {
    while (true) {
      Rat r = rat(max_abs, max_den);
      if (r != 0) return r;
    }
  }

  Poly poly(long max_deg, long max_abs = 5) {
    long d = uniform(0, max_deg);
    std::vector<Rat> c(static_cast<size_t>(d) + 1);
    for (auto& x : c) x = Rat(uniform(-max_abs, max_abs));
    return Poly(std::move(c));
  }

  Poly nonzero_poly(long max_deg, long max_abs = 5) {
    while (true) {
      Poly p = poly(max_deg, max_abs);
      if (!p.is_zero()) return p;
    }
  }

  Poly nonconstant_poly(long max_deg, long max_abs = 5) {
    while (true) {
      Poly p = poly(max_deg, max_abs);
      if (p.degree() >= 1) return p;
    }
  }

  RatFunc ratfunc(long max_deg = 3, long max_abs = 5) {
    return RatFunc(poly(max_deg, max_abs), nonzero_poly(max_deg, max_abs));
  }

  RatFunc nonzero_ratfunc(long max_deg = 3, long max_abs = 5) {
    while (true) {
      RatFunc f = ratfunc(max_deg, max_abs);
      if (!f.is_zero()) return f;
    }
  }

  Rat shift_step() {
    static const long num[] = {1, 2, -1, 1};
    static const long den[] = {1, 1, 1, 2};
    long i = uniform(0, 3);
    return hypertrans::rat(num[i], den[i]);
  }

  Rat q_value() {
    static const long num[] = {2, 3, -2, 1, 4};
    static const long den[] = {1, 1, 1, 2, 1};
    long i = uniform(0, 4);
    return hypertrans::rat(num[i], den[i]);
  }

  long mahler_p() { return uniform(0, 1) ? 2 : 3; }

  CaseTag case_tag(bool include_mahler = true) {
    switch (uniform(0, include_mahler ? 2 : 1)) {
      case 0: return CaseTag::shift(shift_step());
      case 1: return CaseTag::qdiff(q_value());
      default: return CaseTag::mahler(mahler_p());
    }
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace gen
