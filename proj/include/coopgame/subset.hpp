#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "coopgame/distribution.hpp"
#include "coopgame/model.hpp"
#include "coopgame/rng.hpp"
#include "coopgame/sample_batch.hpp"

namespace coopgame {

/// Variables of a full collection that one player models. Members are kept in
/// the parent's declaration order.
class VariableSubset {
 public:
  VariableSubset() = default;
  VariableSubset(FiniteSpace parent, const std::vector<std::string>& names);
  static VariableSubset all(const FiniteSpace& parent);

  const FiniteSpace& parent() const { return parent_; }
  const std::vector<std::string>& names() const { return names_; }
  bool empty() const { return names_.empty(); }
  /// Induced sub-space; throws SchemaError when the subset is empty.
  const FiniteSpace& space() const;

  /// Intersection by name, in parent order. May be empty.
  VariableSubset overlap(const VariableSubset& other) const;

  friend bool operator==(const VariableSubset& a, const VariableSubset& b) {
    return a.parent_ == b.parent_ && a.names_ == b.names_;
  }

 private:
  FiniteSpace parent_;
  std::vector<std::string> names_;
  std::optional<FiniteSpace> space_;
};

/// Observed values for some variables of a space.
struct PartialObservation {
  std::map<std::string, std::size_t> values;
};

/// Variables shared by two spaces, in the order of `a`; nullopt when disjoint.
std::optional<FiniteSpace> overlap_space(const FiniteSpace& a, const FiniteSpace& b);

/// For each outcome of `from`, the index of its projection onto `to`. Every
/// variable of `to` must exist in `from` with the same cardinality.
std::vector<std::uint32_t> projection_map(const FiniteSpace& from, const FiniteSpace& to);

/// Exact marginal of `dist` on the variables of `target`.
TabularDistribution marginalize(const TabularDistribution& dist, const FiniteSpace& target);
TabularDistribution marginalize(const TabularDistribution& dist, const VariableSubset& target);

/// Average over the batch of log p_model(projection of the outcome onto the
/// overlap). Components outside the model's space are ignored. Throws
/// NoOverlapError when the spaces share no variable.
double marginal_log_likelihood(const GenerativeModel& model, const SampleBatch& batch,
                               const FiniteSpace& batch_space);

/// Unnormalized mass over the outcomes of an observed sub-space.
struct PartialMass {
  FiniteSpace observed;
  std::vector<double> mass;
};

struct CompletedTarget {
  TabularDistribution target;
  /// Observed configurations with zero model probability that were spread
  /// uniformly over their completions instead.
  std::size_t fallbacks = 0;
};

/// Expected complete-data distribution: full observations count as they are,
/// each partial observation v contributes mass(v) * p(x | v) under `model`.
/// An empty `full_mass` means no full observations.
CompletedTarget complete_expected(const TabularDistribution& model, std::span<const double> full_mass,
                                  std::span<const PartialMass> partials);

/// One ascent step on the weighted sum of full and marginal log-likelihoods:
/// the EM completion of the data under the current model followed by
/// model.fit_step. Returns the number of uniform fallbacks.
std::size_t fit_step_marginal(GenerativeModel& model, std::span<const double> full_mass,
                              std::span<const PartialMass> partials, double step_size);

/// Samples the unobserved variables from the exact conditional given `obs`.
/// Throws ZeroSupportError when the observed configuration has probability 0.
Outcome complete(const GenerativeModel& model, const PartialObservation& obs, Rng& rng);

}  // namespace coopgame
