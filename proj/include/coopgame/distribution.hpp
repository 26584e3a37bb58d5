#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "coopgame/space.hpp"

namespace coopgame {

/// Probability vector over a FiniteSpace. Construction renormalizes exactly.
class TabularDistribution {
 public:
  TabularDistribution() = default;
  /// `weights` must be nonnegative, finite and not all zero.
  TabularDistribution(FiniteSpace space, std::vector<double> weights);

  static TabularDistribution uniform(const FiniteSpace& space);
  static TabularDistribution point_mass(const FiniteSpace& space, std::size_t outcome);
  /// Accepts already-normalized values without rescaling. Used for solver
  /// output where a second normalization would perturb the last bits.
  static TabularDistribution from_normalized(FiniteSpace space, std::vector<double> probs);

  const FiniteSpace& space() const { return space_; }
  std::span<const double> probs() const { return probs_; }
  double operator[](std::size_t outcome) const { return probs_[outcome]; }
  std::size_t size() const { return probs_.size(); }

  /// Throws NumericError when entries do not sum to one within `tol`.
  void check_normalized(double tol = 1e-9) const;

  double entropy() const;

  friend bool operator==(const TabularDistribution&, const TabularDistribution&) = default;

 private:
  FiniteSpace space_;
  std::vector<double> probs_;
};

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double l1_distance(const TabularDistribution& a, const TabularDistribution& b);
double l1_distance(std::span<const double> a, std::span<const double> b);

/// KL(p || q) in nats; +infinity when p has mass where q has none.
double kl_divergence(const TabularDistribution& p, const TabularDistribution& q);

/// sum_x target(x) log model(x); kNegInf when the model misses target support.
double cross_log_likelihood(const TabularDistribution& target, const TabularDistribution& model);

/// Convex combination sum_k w_k d_k over a shared space.
TabularDistribution mixture(std::span<const TabularDistribution> parts, std::span<const double> weights);

}  // namespace coopgame
