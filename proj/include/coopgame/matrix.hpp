#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace coopgame {

/// Small dense row-major matrix. Sizes here are players x players or
/// constraints x constraints, so no blocking or expression templates.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> data() const { return data_; }

  Matrix transposed() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// LU factorization with partial pivoting.
class LuDecomposition {
 public:
  /// Throws SingularSystemError when a pivot magnitude falls below
  /// `pivot_threshold`; the message names the column.
  explicit LuDecomposition(Matrix a, double pivot_threshold = 1e-12);

  std::vector<double> solve(std::span<const double> rhs) const;

 private:
  Matrix lu_;
  std::vector<std::size_t> perm_;
};

}  // namespace coopgame
