#pragma once

// Linear difference systems rho(Y) = A Y over the rational function field:
// iteration, gauge transformations, the determinant subsystem, solution
// verification on truncations, and cyclic-vector conversion to an operator.

#include <random>
#include <utility>
#include <vector>

#include "hypertrans/ore.hpp"

namespace hypertrans {

class FuncMat {
 public:
  FuncMat() : rows_(0), cols_(0) {}
  FuncMat(size_t rows, size_t cols)
      : rows_(rows), cols_(cols), a_(rows * cols) {}

  static FuncMat identity(size_t n) {
    FuncMat m(n, n);
    for (size_t i = 0; i < n; ++i) m.at(i, i) = RatFunc(Rat(1));
    return m;
  }

  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }

  RatFunc& at(size_t i, size_t j) { return a_[i * cols_ + j]; }
  const RatFunc& at(size_t i, size_t j) const { return a_[i * cols_ + j]; }

  friend FuncMat operator*(const FuncMat& x, const FuncMat& y) {
    check_internal(x.cols_ == y.rows_, "matrix dimension mismatch");
    FuncMat z(x.rows_, y.cols_);
    for (size_t i = 0; i < x.rows_; ++i)
      for (size_t k = 0; k < x.cols_; ++k) {
        if (x.at(i, k).is_zero()) continue;
        for (size_t j = 0; j < y.cols_; ++j) {
          if (y.at(k, j).is_zero()) continue;
          z.at(i, j) = z.at(i, j) + x.at(i, k) * y.at(k, j);
        }
      }
    return z;
  }

  friend bool operator==(const FuncMat& x, const FuncMat& y) {
    if (x.rows_ != y.rows_ || x.cols_ != y.cols_) return false;
    for (size_t i = 0; i < x.a_.size(); ++i)
      if (!(x.a_[i] == y.a_[i])) return false;
    return true;
  }

  RatFunc det() const {
    check_internal(rows_ == cols_, "determinant of a nonsquare matrix");
    FuncMat m = *this;
    RatFunc d(Rat(1));
    for (size_t c = 0; c < cols_; ++c) {
      size_t pivot = c;
      while (pivot < rows_ && m.at(pivot, c).is_zero()) ++pivot;
      if (pivot == rows_) return RatFunc();
      if (pivot != c) {
        for (size_t j = 0; j < cols_; ++j) std::swap(m.at(pivot, j), m.at(c, j));
        d = RatFunc(Rat(-1)) * d;
      }
      d = d * m.at(c, c);
      RatFunc inv = RatFunc(Rat(1)) / m.at(c, c);
      for (size_t r = c + 1; r < rows_; ++r) {
        if (m.at(r, c).is_zero()) continue;
        RatFunc f = m.at(r, c) * inv;
        for (size_t j = c; j < cols_; ++j) m.at(r, j) = m.at(r, j) - f * m.at(c, j);
      }
    }
    return d;
  }

  std::optional<FuncMat> inverse() const {
    check_internal(rows_ == cols_, "inverse of a nonsquare matrix");
    FuncMat m = *this;
    FuncMat inv = identity(rows_);
    for (size_t c = 0; c < cols_; ++c) {
      size_t pivot = c;
      while (pivot < rows_ && m.at(pivot, c).is_zero()) ++pivot;
      if (pivot == rows_) return std::nullopt;
      if (pivot != c)
        for (size_t j = 0; j < cols_; ++j) {
          std::swap(m.at(pivot, j), m.at(c, j));
          std::swap(inv.at(pivot, j), inv.at(c, j));
        }
      RatFunc pinv = RatFunc(Rat(1)) / m.at(c, c);
      for (size_t j = 0; j < cols_; ++j) {
        m.at(c, j) = pinv * m.at(c, j);
        inv.at(c, j) = pinv * inv.at(c, j);
      }
      for (size_t r = 0; r < rows_; ++r) {
        if (r == c || m.at(r, c).is_zero()) continue;
        RatFunc f = m.at(r, c);
        for (size_t j = 0; j < cols_; ++j) {
          m.at(r, j) = m.at(r, j) - f * m.at(c, j);
          inv.at(r, j) = inv.at(r, j) - f * inv.at(c, j);
        }
      }
    }
    return inv;
  }

 private:
  size_t rows_, cols_;
  std::vector<RatFunc> a_;
};

inline FuncMat apply_sigma(const FuncMat& m, const CaseTag& tag, long k = 1) {
  FuncMat out(m.rows(), m.cols());
  for (size_t i = 0; i < m.rows(); ++i)
    for (size_t j = 0; j < m.cols(); ++j) out.at(i, j) = apply_sigma(m.at(i, j), tag, k);
  return out;
}

class DiffSystem {
 public:
  DiffSystem(const CaseTag& tag, FuncMat a) : tag_(tag), a_(std::move(a)) {
    check_internal(a_.rows() == a_.cols(), "system matrix must be square");
    if (a_.det().is_zero())
      fail(ErrorKind::SemanticError, "system matrix must be invertible over the function field");
  }

  const CaseTag& tag() const { return tag_; }
  const FuncMat& matrix() const { return a_; }
  size_t dim() const { return a_.rows(); }

 private:
  CaseTag tag_;
  FuncMat a_;
};

inline DiffSystem iterate_system(const DiffSystem& s, long ell) {
  check_internal(ell >= 1, "iteration length must be positive");
  FuncMat acc = s.matrix();
  for (long k = 1; k < ell; ++k) acc = apply_sigma(s.matrix(), s.tag(), k) * acc;
  return DiffSystem(s.tag().iterate(ell), acc);
}

inline DiffSystem gauge_transform(const DiffSystem& s, const FuncMat& t) {
  check_internal(t.rows() == s.dim() && t.cols() == s.dim(), "gauge dimension mismatch");
  auto tinv = t.inverse();
  if (!tinv) fail(ErrorKind::SingularGauge, "gauge matrix is singular");
  return DiffSystem(s.tag(), apply_sigma(t, s.tag()) * s.matrix() * *tinv);
}

inline DiffOperator det_subsystem(const DiffSystem& s) {
  return DiffOperator(s.tag(), {-s.matrix().det(), RatFunc(Rat(1))});
}

inline DiffSystem companion_matrix(const DiffOperator& l) {
  if (l.is_zero() || l.order() < 1)
    fail(ErrorKind::SemanticError, "companion form needs an operator of positive order");
  if (l.trailing_index() > 0)
    fail(ErrorKind::ZeroTrailingCoefficient,
         "companion form needs a nonzero trailing coefficient");
  size_t n = static_cast<size_t>(l.order());
  const std::vector<RatFunc>& c = l.monic_coeffs();
  FuncMat a(n, n);
  for (size_t i = 0; i + 1 < n; ++i) a.at(i, i + 1) = RatFunc(Rat(1));
  for (size_t j = 0; j < n; ++j) a.at(n - 1, j) = -c[j];
  return DiffSystem(l.tag(), std::move(a));
}

struct SolutionCheck {
  bool ok;
  long verified_order;
  std::optional<long> first_failure;
};

inline SolutionCheck verify_vector_solution(const DiffSystem& s,
                                            const std::vector<TruncatedSeries>& y) {
  check_internal(y.size() == s.dim(), "solution vector dimension mismatch");
  bool ok = true;
  long order = 0;
  std::optional<long> first_fail;
  for (size_t i = 0; i < y.size(); ++i) {
    TruncatedSeries resid = apply_sigma_series(y[i]);
    for (size_t j = 0; j < y.size(); ++j) {
      if (s.matrix().at(i, j).is_zero()) continue;
      resid = resid - mul_ratfunc_series(s.matrix().at(i, j), y[j]);
    }
    long got = resid.order();
    order = i == 0 ? got : std::min(order, got);
    if (!resid.is_zero()) {
      ok = false;
      long bad = *resid.true_val();
      if (!first_fail || bad < *first_fail) first_fail = bad;
    }
  }
  return {ok, order, first_fail};
}

struct CyclicVectorResult {
  DiffOperator op;
  std::vector<RatFunc> vector;
};

// Row covector evolution: z = v.Y satisfies rho^k(z) = v_k.Y with
// v_0 = v and v_{k+1} = sigma(v_k) A.
inline std::vector<RatFunc> cyclic_next(const std::vector<RatFunc>& v, const DiffSystem& s) {
  size_t n = s.dim();
  std::vector<RatFunc> w(n);
  for (size_t j = 0; j < n; ++j)
    for (size_t i = 0; i < n; ++i) {
      if (v[i].is_zero() || s.matrix().at(i, j).is_zero()) continue;
      w[j] = w[j] + apply_sigma(v[i], s.tag()) * s.matrix().at(i, j);
    }
  return w;
}

inline CyclicVectorResult system_to_operator(const DiffSystem& s, uint64_t seed = 0) {
  size_t n = s.dim();
  std::mt19937_64 eng(seed);
  std::uniform_int_distribution<long> small(-3, 3);
  long budget = 64;
  for (long attempt = 0; attempt < budget; ++attempt) {
    std::vector<RatFunc> v(n);
    if (attempt < static_cast<long>(n)) {
      v[static_cast<size_t>(attempt)] = RatFunc(Rat(1));
    } else {
      long deg = std::min<long>(attempt / static_cast<long>(n), static_cast<long>(n));
      for (auto& e : v) {
        std::vector<Rat> c(static_cast<size_t>(deg) + 1);
        for (auto& x : c) x = Rat(small(eng));
        e = RatFunc(Poly(std::move(c)));
      }
    }
    std::vector<std::vector<RatFunc>> rows;
    rows.push_back(v);
    for (size_t k = 1; k < n; ++k) rows.push_back(cyclic_next(rows.back(), s));
    FuncMat m(n, n);
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j) m.at(i, j) = rows[i][j];
    auto minv = m.inverse();
    if (!minv) continue;
    std::vector<RatFunc> vn = cyclic_next(rows.back(), s);
    // Solve c . M = v_n, that is c = v_n . M^{-1}.
    std::vector<RatFunc> c(n);
    for (size_t j = 0; j < n; ++j)
      for (size_t i = 0; i < n; ++i) {
        if (vn[i].is_zero()) continue;
        c[j] = c[j] + vn[i] * minv->at(i, j);
      }
    std::vector<RatFunc> coeffs(n + 1);
    for (size_t i = 0; i < n; ++i) coeffs[i] = -c[i];
    coeffs[n] = RatFunc(Rat(1));
    return {DiffOperator(s.tag(), std::move(coeffs)), v};
  }
  fail(ErrorKind::CyclicSearchExhausted, "no cyclic vector found within the attempt budget");
}

// Value of L along the one dimensional system rho(y) = a y: substituting
// rho^i(y) = a_[i] y turns L(y) into (sum_i coeff_i a_[i]) y.
inline RatFunc operator_eval_on_rank1(const DiffOperator& l, const RatFunc& a) {
  RatFunc acc;
  RatFunc cocycle(Rat(1));
  for (long i = 0; i <= l.order(); ++i) {
    if (i > 0) cocycle = apply_sigma(a, l.tag(), i - 1) * cocycle;
    acc = acc + l.coeff(i) * cocycle;
  }
  return acc;
}

}  // namespace hypertrans
