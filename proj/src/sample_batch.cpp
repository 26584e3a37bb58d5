#include "coopgame/sample_batch.hpp"

#include <algorithm>

#include "coopgame/errors.hpp"

namespace coopgame {

void SampleBatch::validate(const FiniteSpace& space) const {
  for (Outcome o : outcomes)
    if (o >= space.total_size())
      throw RangeError("sample outcome " + std::to_string(o) + " outside space of size " +
                       std::to_string(space.total_size()));
}

CategoricalSampler::CategoricalSampler(const TabularDistribution& dist) {
  double acc = 0.0;
  for (std::size_t k = 0; k < dist.size(); ++k) {
    if (dist[k] <= 0.0) continue;
    acc += dist[k];
    cdf_.push_back(acc);
    support_.push_back(static_cast<Outcome>(k));
  }
  if (support_.empty()) throw NumericError("cannot sample from an all-zero distribution");
  for (double& c : cdf_) c /= acc;
  cdf_.back() = 1.0;
}

Outcome CategoricalSampler::draw(Rng& rng) const {
  double u = rng.uniform();
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.end()) --it;
  return support_[static_cast<std::size_t>(it - cdf_.begin())];
}

std::vector<Outcome> CategoricalSampler::draw(std::size_t n, Rng& rng) const {
  std::vector<Outcome> out(n);
  for (auto& o : out) o = draw(rng);
  return out;
}

TabularDistribution empirical(const FiniteSpace& space, std::span<const Outcome> outcomes) {
  if (outcomes.empty()) throw NumericError("empirical distribution of an empty sample is undefined");
  std::vector<double> counts(space.total_size(), 0.0);
  for (Outcome o : outcomes) {
    if (o >= counts.size()) throw RangeError("outcome out of range");
    counts[o] += 1.0;
  }
  return TabularDistribution(space, std::move(counts));
}

}  // namespace coopgame
