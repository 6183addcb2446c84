/**
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "xbarsim/common.hpp"

namespace xbarsim {

/// Dense row-major matrix of doubles.
class Matrix {
public:
  Matrix() = default;
  Matrix(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, fill) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  size_t size() const { return data_.size(); }

  double &operator()(int i, int j) { return data_[static_cast<size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return data_[static_cast<size_t>(i) * cols_ + j]; }

  double *data() { return data_.data(); }
  const double *data() const { return data_.data(); }

  std::span<const double> row(int i) const {
    return {data_.data() + static_cast<size_t>(i) * cols_, static_cast<size_t>(cols_)};
  }

  bool same_shape(const Matrix &other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  bool operator==(const Matrix &other) const {
    return rows_ == other.rows_ && cols_ == other.cols_ && data_ == other.data_;
  }

private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

inline std::vector<double> matvec(const Matrix &w, std::span<const double> x) {
  std::vector<double> y(w.rows(), 0.0);
  for (int i = 0; i < w.rows(); ++i) {
    double acc = 0.0;
    for (int j = 0; j < w.cols(); ++j) {
      acc += w(i, j) * x[j];
    }
    y[i] = acc;
  }
  return y;
}

inline std::vector<double> matvec_transposed(const Matrix &w, std::span<const double> d) {
  std::vector<double> y(w.cols(), 0.0);
  for (int i = 0; i < w.rows(); ++i) {
    for (int j = 0; j < w.cols(); ++j) {
      y[j] += w(i, j) * d[i];
    }
  }
  return y;
}

inline double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) {
    m = std::max(m, std::fabs(x));
  }
  return m;
}

inline double frobenius_distance(const Matrix &a, const Matrix &b) {
  double acc = 0.0;
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) {
      double d = a(i, j) - b(i, j);
      acc += d * d;
    }
  }
  return std::sqrt(acc);
}

} // namespace xbarsim
