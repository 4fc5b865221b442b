#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "rational.hpp"

namespace hypertrans {

// Dense matrix over Q, row-major.
class RatMat {
 public:
  RatMat() : rows_(0), cols_(0) {}
  RatMat(long rows, long cols) : rows_(rows), cols_(cols), a_(size_t(rows) * cols, Rat(0)) {}

  long rows() const { return rows_; }
  long cols() const { return cols_; }
  Rat& at(long i, long j) { return a_[size_t(i) * cols_ + j]; }
  const Rat& at(long i, long j) const { return a_[size_t(i) * cols_ + j]; }

  static RatMat identity(long n) {
    RatMat m(n, n);
    for (long i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
  }

  friend RatMat operator*(const RatMat& a, const RatMat& b) {
    check_internal(a.cols_ == b.rows_, "matrix shape mismatch");
    RatMat r(a.rows_, b.cols_);
    for (long i = 0; i < a.rows_; ++i)
      for (long k = 0; k < a.cols_; ++k) {
        const Rat& aik = a.at(i, k);
        if (aik == 0) continue;
        for (long j = 0; j < b.cols_; ++j) r.at(i, j) += aik * b.at(k, j);
      }
    return r;
  }

  friend bool operator==(const RatMat& a, const RatMat& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.a_ == b.a_;
  }

 private:
  long rows_, cols_;
  std::vector<Rat> a_;
};

// Reduced row echelon form in place; returns the pivot column of each pivot
// row (so the rank is the size of the returned vector).
inline std::vector<long> rref(RatMat& m) {
  std::vector<long> pivots;
  long row = 0;
  for (long col = 0; col < m.cols() && row < m.rows(); ++col) {
    long p = -1;
    for (long i = row; i < m.rows(); ++i)
      if (m.at(i, col) != 0) {
        p = i;
        break;
      }
    if (p < 0) continue;
    if (p != row)
      for (long j = col; j < m.cols(); ++j) std::swap(m.at(p, j), m.at(row, j));
    Rat inv = 1 / m.at(row, col);
    for (long j = col; j < m.cols(); ++j) m.at(row, j) *= inv;
    for (long i = 0; i < m.rows(); ++i) {
      if (i == row || m.at(i, col) == 0) continue;
      Rat f = m.at(i, col);
      for (long j = col; j < m.cols(); ++j) m.at(i, j) -= f * m.at(row, j);
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

inline long rank(RatMat m) { return static_cast<long>(rref(m).size()); }

inline Rat det(RatMat m) {
  check_internal(m.rows() == m.cols(), "determinant of non-square matrix");
  Rat d(1);
  long n = m.rows();
  for (long col = 0; col < n; ++col) {
    long p = -1;
    for (long i = col; i < n; ++i)
      if (m.at(i, col) != 0) {
        p = i;
        break;
      }
    if (p < 0) return Rat(0);
    if (p != col) {
      for (long j = col; j < n; ++j) std::swap(m.at(p, j), m.at(col, j));
      d = -d;
    }
    d *= m.at(col, col);
    Rat inv = 1 / m.at(col, col);
    for (long i = col + 1; i < n; ++i) {
      if (m.at(i, col) == 0) continue;
      Rat f = m.at(i, col) * inv;
      for (long j = col; j < n; ++j) m.at(i, j) -= f * m.at(col, j);
    }
  }
  return d;
}

// Basis of the right kernel of m.
inline std::vector<std::vector<Rat>> nullspace(RatMat m) {
  std::vector<long> pivots = rref(m);
  std::vector<bool> is_pivot(m.cols(), false);
  for (long c : pivots) is_pivot[size_t(c)] = true;
  std::vector<std::vector<Rat>> basis;
  for (long free_col = 0; free_col < m.cols(); ++free_col) {
    if (is_pivot[size_t(free_col)]) continue;
    std::vector<Rat> v(m.cols(), Rat(0));
    v[size_t(free_col)] = 1;
    for (size_t r = 0; r < pivots.size(); ++r) v[size_t(pivots[r])] = -m.at(long(r), free_col);
    basis.push_back(std::move(v));
  }
  return basis;
}

struct LinearSolution {
  bool consistent = false;
  std::vector<Rat> particular;             // one solution (free variables set to 0)
  std::vector<std::vector<Rat>> kernel;    // basis of homogeneous solutions
};

// Solves A x = b, reporting a particular solution and the kernel of A.
inline LinearSolution linear_solve(const RatMat& a, const std::vector<Rat>& b) {
  check_internal(static_cast<long>(b.size()) == a.rows(), "rhs size mismatch");
  RatMat aug(a.rows(), a.cols() + 1);
  for (long i = 0; i < a.rows(); ++i) {
    for (long j = 0; j < a.cols(); ++j) aug.at(i, j) = a.at(i, j);
    aug.at(i, a.cols()) = b[size_t(i)];
  }
  std::vector<long> pivots = rref(aug);
  LinearSolution sol;
  sol.consistent = pivots.empty() || pivots.back() != a.cols();
  if (!sol.consistent) pivots.pop_back();  // drop the 0 = 1 row
  if (sol.consistent) {
    sol.particular.assign(size_t(a.cols()), Rat(0));
    for (size_t r = 0; r < pivots.size(); ++r) sol.particular[size_t(pivots[r])] = aug.at(long(r), a.cols());
  }
  std::vector<bool> is_pivot(a.cols(), false);
  for (long c : pivots) is_pivot[size_t(c)] = true;
  for (long free_col = 0; free_col < a.cols(); ++free_col) {
    if (is_pivot[size_t(free_col)]) continue;
    std::vector<Rat> v(size_t(a.cols()), Rat(0));
    v[size_t(free_col)] = 1;
    for (size_t r = 0; r < pivots.size(); ++r) v[size_t(pivots[r])] = -aug.at(long(r), free_col);
    sol.kernel.push_back(std::move(v));
  }
  return sol;
}

}  // namespace hypertrans
