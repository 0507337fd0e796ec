#pragma once

#include <cstddef>
#include <vector>

namespace bm {

// Minimal dense row-major matrix. Correlation and gradient matrices are
// (L+1) x (L+1): row/column 0 is the always-on bias unit, node i maps to
// index i+1.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols, fill) {}

  static Matrix zeros(int rows, int cols) { return Matrix(rows, cols, 0.0); }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double& operator()(int r, int c) { return a_[static_cast<std::size_t>(r) * cols_ + c]; }
  double operator()(int r, int c) const { return a_[static_cast<std::size_t>(r) * cols_ + c]; }

  const std::vector<double>& data() const { return a_; }
  std::vector<double>& data() { return a_; }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> a_;
};

}  // namespace bm
