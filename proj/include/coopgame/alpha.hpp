#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <json.hpp>

#include "coopgame/matrix.hpp"

namespace coopgame {

/// Row-stochastic coupling matrix of the game. Entry (i, j) is the fraction of
/// player i's training batch that comes from source j (own data when i == j).
class AlphaMatrix {
 public:
  AlphaMatrix() = default;
  /// Validates: entries in [0, 1], each row sums to 1 within 1e-12, and every
  /// diagonal entry is positive unless `allow_zero_diagonal`.
  explicit AlphaMatrix(Matrix entries, bool allow_zero_diagonal = false);
  AlphaMatrix(std::vector<std::vector<double>> rows, bool allow_zero_diagonal = false);

  static AlphaMatrix identity(std::size_t n);
  /// Own weight `diag` on the diagonal, (1 - diag) split evenly among peers.
  static AlphaMatrix symmetric(std::size_t n, double diag);

  std::size_t n_players() const { return entries_.rows(); }
  double operator()(std::size_t i, std::size_t j) const { return entries_(i, j); }
  std::span<const double> row(std::size_t i) const { return entries_.row(i); }
  const Matrix& matrix() const { return entries_; }
  bool allow_zero_diagonal() const { return allow_zero_diagonal_; }

  nlohmann::json to_json() const;
  static AlphaMatrix from_json(const nlohmann::json& j, bool allow_zero_diagonal = false);

  friend bool operator==(const AlphaMatrix&, const AlphaMatrix&) = default;

 private:
  Matrix entries_;
  bool allow_zero_diagonal_ = false;
};

struct AlphaSplit {
  Matrix own;    // diagonal part
  Matrix peers;  // off-diagonal part, zero diagonal
};

AlphaSplit alpha_split(const AlphaMatrix& alpha);

}  // namespace coopgame
