#pragma once

#include <cstdint>

#include "coopgame/distribution.hpp"
#include "coopgame/features.hpp"
#include "coopgame/model.hpp"

namespace coopgame {

struct MaxEntropyReport {
  bool passed = false;
  double entropy = 0.0;         // H of the checked distribution
  double best_entropy = 0.0;    // best H found on the same moment constraints
  double constraint_error = 0.0;  // max |E_best[phi] - E_p[phi]|
  std::size_t iterations = 0;
  TabularDistribution witness;  // best distribution found; violates on failure
};

/// Checks that `p` has maximal entropy among all distributions on its support
/// that share its feature moments. Starts from a random feasible perturbation
/// of `p`, climbs the entropy by Newton steps restricted to the moment-preserving
/// subspace, and fails if it finds entropy more than `slack` above H(p).
MaxEntropyReport check_max_entropy(const TabularDistribution& p, const FeatureMap& features,
                                   double slack = 1e-6, std::uint64_t seed = 0x5eed);

/// Dual-game check for a log-linear model; requires total_size <= 4096.
MaxEntropyReport max_entropy_check(const ExpFamilyModel& model, double slack = 1e-6);

}  // namespace coopgame
