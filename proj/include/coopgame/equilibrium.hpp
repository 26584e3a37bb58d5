#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <json.hpp>

#include "coopgame/alpha.hpp"
#include "coopgame/distribution.hpp"
#include "coopgame/matrix.hpp"

namespace coopgame {

enum class SolveMethod { Exact, Iterative };

/// Order in which the fixed-point iteration refreshes players.
///   Jacobi: every player reads the previous sweep (p' = pi A + p B).
///   GaussSeidel: players update in index order and read already-updated
///   peers, which is what a round-robin learning schedule does.
enum class SweepOrder { Jacobi, GaussSeidel };

struct EquilibriumResult {
  std::vector<TabularDistribution> distributions;
  /// mixture_matrix(j, i) is the weight of pi_j inside p_i. Each column is a
  /// convex combination. Empty for iterative runs started away from pi.
  Matrix mixture_matrix;
  SolveMethod method = SolveMethod::Exact;
  std::size_t iterations_used = 0;
  double residual = 0.0;
  bool converged = true;
  /// Iterative only: max over players of L1(p^(t+1), p^(t)) at each step.
  std::vector<double> trajectory;

  nlohmann::json to_json() const;
};

/// Closed-form equilibrium p_i = sum_j W(i, j) pi_j with W = (I - B)^-1 A,
/// obtained by LU-solving (I - B) w_j = alpha_jj e_j for each column.
/// Throws SingularSystemError (naming the data-free players responsible) when
/// (I - B) is singular, which can only happen with allow_zero_diagonal.
EquilibriumResult solve_exact(std::span<const TabularDistribution> pi, const AlphaMatrix& alpha);

struct IterateOptions {
  std::size_t max_steps = 100000;
  double tol = 1e-12;
  SweepOrder order = SweepOrder::Jacobi;
};

/// Fixed-point iteration starting from `p0` (pi when empty). Stops once the
/// largest per-player L1 change drops below `tol`; running out of steps
/// returns a result with converged == false instead of throwing.
EquilibriumResult iterate(std::span<const TabularDistribution> pi, const AlphaMatrix& alpha,
                          std::span<const TabularDistribution> p0 = {}, IterateOptions options = {});

/// Gershgorin bound max_i (1 - alpha_ii) on the spectral radius of B.
double spectral_radius_bound(const AlphaMatrix& alpha);

/// max_i L1(p_i, alpha_ii pi_i + sum_{j != i} alpha_ij p_j). Zero exactly at
/// the equilibrium.
double best_response_residual(std::span<const TabularDistribution> p,
                              std::span<const TabularDistribution> pi, const AlphaMatrix& alpha);

}  // namespace coopgame
