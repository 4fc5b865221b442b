#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace hypertrans {

// Exact rational scalar used everywhere in the library.
using Rat = mpq_class;
using Int = mpz_class;

enum class ErrorKind {
  ParseError,
  SemanticError,
  NonRationalRamifiedParameter,
  NoncommensurableRamification,
  UnsupportedCase,
  CaseMismatch,
  AmbiguousPrefix,
  InconsistentPrefix,
  TruncationTooShort,
  ZeroDivisor,
  ZeroTrailingCoefficient,
  NotASolution,
  SingularGauge,
  WindowTooLarge,
  SingularLeadingCoefficient,
  CyclicSearchExhausted,
  DegreeBoundExceeded,
  OutsideDisc,
  PrecisionUnreachable,
  Internal,
};

inline const char* error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::SemanticError: return "SemanticError";
    case ErrorKind::NonRationalRamifiedParameter: return "NonRationalRamifiedParameter";
    case ErrorKind::NoncommensurableRamification: return "NoncommensurableRamification";
    case ErrorKind::UnsupportedCase: return "UnsupportedCase";
    case ErrorKind::CaseMismatch: return "CaseMismatch";
    case ErrorKind::AmbiguousPrefix: return "AmbiguousPrefix";
    case ErrorKind::InconsistentPrefix: return "InconsistentPrefix";
    case ErrorKind::TruncationTooShort: return "TruncationTooShort";
    case ErrorKind::ZeroDivisor: return "ZeroDivisor";
    case ErrorKind::ZeroTrailingCoefficient: return "ZeroTrailingCoefficient";
    case ErrorKind::NotASolution: return "NotASolution";
    case ErrorKind::SingularGauge: return "SingularGauge";
    case ErrorKind::WindowTooLarge: return "WindowTooLarge";
    case ErrorKind::SingularLeadingCoefficient: return "SingularLeadingCoefficient";
    case ErrorKind::CyclicSearchExhausted: return "CyclicSearchExhausted";
    case ErrorKind::DegreeBoundExceeded: return "DegreeBoundExceeded";
    case ErrorKind::OutsideDisc: return "OutsideDisc";
    case ErrorKind::PrecisionUnreachable: return "PrecisionUnreachable";
    case ErrorKind::Internal: return "Internal";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + msg), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& msg) { throw Error(kind, msg); }

inline void check_internal(bool cond, const std::string& msg) {
  if (!cond) fail(ErrorKind::Internal, msg);
}

inline Rat rat(long num, long den = 1) {
  if (den == 0) fail(ErrorKind::SemanticError, "zero denominator");
  Rat r(num, den);
  r.canonicalize();
  return r;
}

inline Rat rat(const Int& num, const Int& den) {
  if (den == 0) fail(ErrorKind::SemanticError, "zero denominator");
  Rat r(num, den);
  r.canonicalize();
  return r;
}

inline bool is_integer(const Rat& r) { return r.get_den() == 1; }

inline long to_long(const Rat& r) {
  if (!is_integer(r) || !r.get_num().fits_slong_p())
    fail(ErrorKind::SemanticError, "rational does not fit a machine integer: " + r.get_str());
  return r.get_num().get_si();
}

inline Rat rat_abs(const Rat& r) { return r < 0 ? Rat(-r) : r; }

// r^e for e of either sign; 0^negative is an error.
inline Rat rat_pow(const Rat& r, long e) {
  if (e == 0) return Rat(1);
  if (r == 0) {
    if (e < 0) fail(ErrorKind::SemanticError, "zero to a negative power");
    return Rat(0);
  }
  Int num, den;
  unsigned long ae = static_cast<unsigned long>(e < 0 ? -e : e);
  mpz_pow_ui(num.get_mpz_t(), r.get_num().get_mpz_t(), ae);
  mpz_pow_ui(den.get_mpz_t(), r.get_den().get_mpz_t(), ae);
  return e > 0 ? rat(num, den) : rat(den, num);
}

// Exact n-th root of a rational if it exists in Q.
inline std::optional<Rat> rat_root(const Rat& r, long n) {
  if (n <= 0) fail(ErrorKind::SemanticError, "root index must be positive");
  if (n == 1) return r;
  if (r == 0) return Rat(0);
  if (r < 0 && n % 2 == 0) return std::nullopt;
  Int num = r.get_num(), den = r.get_den();
  bool neg = num < 0;
  if (neg) num = -num;
  Int rn, rd;
  bool exact_n = mpz_root(rn.get_mpz_t(), num.get_mpz_t(), static_cast<unsigned long>(n)) != 0;
  bool exact_d = mpz_root(rd.get_mpz_t(), den.get_mpz_t(), static_cast<unsigned long>(n)) != 0;
  if (!exact_n || !exact_d) return std::nullopt;
  if (neg) rn = -rn;
  return rat(rn, rd);
}

// Smallest k >= 0 with |q|^k >= bound, for |q| > 1 and bound > 0.
inline long growth_exponent(const Rat& q, const Rat& bound) {
  Rat aq = rat_abs(q);
  check_internal(aq > 1, "growth_exponent needs |q| > 1");
  Rat pow(1);
  long k = 0;
  while (pow < bound) {
    pow *= aq;
    ++k;
    if (k > 100000) fail(ErrorKind::Internal, "growth_exponent runaway");
  }
  return k;
}

// Solves c == q^k over the integers, if such k exists (q not 0 or +-1).
inline std::optional<long> q_power_exponent(const Rat& c, const Rat& q) {
  if (c == 0) return std::nullopt;
  if (c == 1) return 0;
  Rat aq = rat_abs(q), ac = rat_abs(c);
  if (aq == 1) return std::nullopt;
  bool invert = aq < 1;
  Rat base = invert ? Rat(1 / aq) : aq;
  Rat target = ac;
  long sign_flip = 1;
  if (ac < 1) {
    target = 1 / ac;
    sign_flip = -1;
  }
  if (target == 1) return std::nullopt;  // |c| == 1, c != 1 handled above; c = -1 has no q^k
  long k = growth_exponent(base, target);
  if (rat_pow(base, k) != target) return std::nullopt;
  long e = sign_flip * (invert ? -k : k);
  if (rat_pow(q, e) != c) return std::nullopt;  // sign check
  return e;
}

// Finds the smallest t >= 1 with c^t == q^s for some integer s and returns
// (s, t). The pair is deliberately not reduced: c^t == q^s is the exact
// relation that holds (reduction can be wrong in sign, e.g. c = -q).
inline std::optional<std::pair<long, long>> q_power_ratio(const Rat& c, const Rat& q,
                                                          long t_max = 64) {
  for (long t = 1; t <= t_max; ++t) {
    auto s = q_power_exponent(rat_pow(c, t), q);
    if (s) return std::make_pair(*s, t);
  }
  return std::nullopt;
}

inline Rat parse_rat(const std::string& s) {
  Rat r;
  if (r.set_str(s, 10) != 0) fail(ErrorKind::ParseError, "bad rational literal: " + s);
  r.canonicalize();
  return r;
}

inline std::string rat_str(const Rat& r) { return r.get_str(); }

}  // namespace hypertrans
