// Minimal dense vector/matrix layer over the dispatched kernels.
// Matrices are row-major; rows are the unit the kernels operate on.

#pragma once

#include <cassert>
#include <cstddef>
#include <vector>

#include "nnequiv/kernels.hpp"

namespace nnequiv {

using Vec = std::vector<double>;

class Mat {
 public:
  Mat() = default;
  Mat(int rows, int cols) : rows_(rows), cols_(cols), d_(static_cast<std::size_t>(rows) * cols, 0.0) {}

  static Mat identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static Mat diag(const Vec& v) {
    Mat m(static_cast<int>(v.size()), static_cast<int>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) m(static_cast<int>(i), static_cast<int>(i)) = v[i];
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double& operator()(int i, int j) { return d_[static_cast<std::size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return d_[static_cast<std::size_t>(i) * cols_ + j]; }

  double* row(int i) { return d_.data() + static_cast<std::size_t>(i) * cols_; }
  const double* row(int i) const { return d_.data() + static_cast<std::size_t>(i) * cols_; }

  Vec row_vec(int i) const { return Vec(row(i), row(i) + cols_); }

  void set_row(int i, const Vec& v) {
    assert(static_cast<int>(v.size()) == cols_);
    std::copy(v.begin(), v.end(), row(i));
  }

  void zero_row(int i) { std::fill(row(i), row(i) + cols_, 0.0); }

  // Append a zero column to every row.
  void append_zero_col() {
    Mat next(rows_, cols_ + 1);
    for (int i = 0; i < rows_; ++i)
      std::copy(row(i), row(i) + cols_, next.row(i));
    *this = std::move(next);
  }

  void append_row(const Vec& v) {
    assert(rows_ == 0 || static_cast<int>(v.size()) == cols_);
    if (rows_ == 0 && cols_ == 0) cols_ = static_cast<int>(v.size());
    d_.insert(d_.end(), v.begin(), v.end());
    ++rows_;
  }

  const std::vector<double>& data() const { return d_; }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> d_;
};

// out = m x  (+ bias when given).
inline Vec matvec(const Mat& m, const Vec& x, const Vec* bias = nullptr) {
  assert(static_cast<int>(x.size()) == m.cols());
  Vec out(m.rows());
  kern::matvec(m.data().data(), x.data(), bias ? bias->data() : nullptr, out.data(),
               m.rows(), m.cols());
  return out;
}

// a * b  via row-wise axpy accumulation: row i of the result is
// sum_j a(i,j) * row_j(b), which vectorizes over b's columns.
inline Mat matmul(const Mat& a, const Mat& b) {
  assert(a.cols() == b.rows());
  Mat out(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i) {
    double* dst = out.row(i);
    for (int j = 0; j < a.cols(); ++j) {
      double w = a(i, j);
      if (w != 0.0) kern::axpy(dst, w, b.row(j), static_cast<std::size_t>(b.cols()));
    }
  }
  return out;
}

inline double dot(const Vec& a, const Vec& b) {
  assert(a.size() == b.size());
  return kern::dot(a.data(), b.data(), a.size());
}

}  // namespace nnequiv
