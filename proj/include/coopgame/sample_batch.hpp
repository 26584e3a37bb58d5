#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "coopgame/distribution.hpp"
#include "coopgame/rng.hpp"

namespace coopgame {

/// Synthetic outcomes produced by one player. This is the only payload that
/// crosses a node boundary: it carries flat outcome indices and nothing else.
struct SampleBatch {
  std::string space_id;
  std::vector<Outcome> outcomes;
  std::int64_t source_player = -1;
  std::uint64_t seed_tag = 0;

  /// Throws RangeError when an outcome is outside [0, total_size).
  void validate(const FiniteSpace& space) const;

  friend bool operator==(const SampleBatch&, const SampleBatch&) = default;
};

/// Inverse-CDF sampler over a fixed distribution.
class CategoricalSampler {
 public:
  explicit CategoricalSampler(const TabularDistribution& dist);
  Outcome draw(Rng& rng) const;
  std::vector<Outcome> draw(std::size_t n, Rng& rng) const;

 private:
  std::vector<double> cdf_;
  std::vector<Outcome> support_;
};

/// Empirical distribution of a set of outcomes.
TabularDistribution empirical(const FiniteSpace& space, std::span<const Outcome> outcomes);

}  // namespace coopgame
