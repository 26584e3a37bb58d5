#include "coopgame/matrix.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "coopgame/errors.hpp"

namespace coopgame {

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

LuDecomposition::LuDecomposition(Matrix a, double pivot_threshold) : lu_(std::move(a)) {
  const std::size_t n = lu_.rows();
  if (lu_.cols() != n) throw SchemaError("LU decomposition needs a square matrix");
  perm_.resize(n);
  for (std::size_t i = 0; i < n; ++i) perm_[i] = i;

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t r = k + 1; r < n; ++r)
      if (std::abs(lu_(r, k)) > std::abs(lu_(piv, k))) piv = r;
    if (std::abs(lu_(piv, k)) < pivot_threshold)
      throw SingularSystemError("matrix is singular: pivot in column " + std::to_string(k) +
                                " is below " + std::to_string(pivot_threshold));
    if (piv != k) {
      for (std::size_t c = 0; c < n; ++c) std::swap(lu_(k, c), lu_(piv, c));
      std::swap(perm_[k], perm_[piv]);
    }
    for (std::size_t r = k + 1; r < n; ++r) {
      double f = lu_(r, k) / lu_(k, k);
      lu_(r, k) = f;
      for (std::size_t c = k + 1; c < n; ++c) lu_(r, c) -= f * lu_(k, c);
    }
  }
}

std::vector<double> LuDecomposition::solve(std::span<const double> rhs) const {
  const std::size_t n = lu_.rows();
  if (rhs.size() != n) throw SchemaError("right-hand side has wrong length");
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = rhs[perm_[i]];
    for (std::size_t c = 0; c < i; ++c) s -= lu_(i, c) * x[c];
    x[i] = s;
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = x[i];
    for (std::size_t c = i + 1; c < n; ++c) s -= lu_(i, c) * x[c];
    x[i] = s / lu_(i, i);
  }
  return x;
}

}  // namespace coopgame
