#include "coopgame/distribution.hpp"

#include <numeric>

#include "coopgame/errors.hpp"

namespace coopgame {

TabularDistribution::TabularDistribution(FiniteSpace space, std::vector<double> weights)
    : space_(std::move(space)), probs_(std::move(weights)) {
  if (probs_.size() != space_.total_size())
    throw SchemaError("distribution has " + std::to_string(probs_.size()) +
                      " entries, space has " + std::to_string(space_.total_size()));
  double total = 0.0;
  for (double w : probs_) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw NumericError("distribution weight is negative or non-finite");
    total += w;
  }
  if (total <= 0.0) throw NumericError("distribution weights sum to zero");
  for (double& w : probs_) w /= total;
}

TabularDistribution TabularDistribution::uniform(const FiniteSpace& space) {
  return TabularDistribution(space, std::vector<double>(space.total_size(), 1.0));
}

TabularDistribution TabularDistribution::point_mass(const FiniteSpace& space, std::size_t outcome) {
  if (outcome >= space.total_size()) throw RangeError("point mass outcome out of range");
  std::vector<double> w(space.total_size(), 0.0);
  w[outcome] = 1.0;
  return TabularDistribution(space, std::move(w));
}

TabularDistribution TabularDistribution::from_normalized(FiniteSpace space, std::vector<double> probs) {
  TabularDistribution d;
  if (probs.size() != space.total_size()) throw SchemaError("distribution size does not match space");
  for (double& p : probs) {
    if (!std::isfinite(p)) throw NumericError("distribution entry is non-finite");
    if (p < 0.0) {
      if (p < -1e-12) throw NumericError("distribution entry is negative");
      p = 0.0;
    }
  }
  d.space_ = std::move(space);
  d.probs_ = std::move(probs);
  d.check_normalized();
  return d;
}

void TabularDistribution::check_normalized(double tol) const {
  double total = std::accumulate(probs_.begin(), probs_.end(), 0.0);
  if (std::abs(total - 1.0) > tol)
    throw NumericError("distribution sums to " + std::to_string(total));
}

double TabularDistribution::entropy() const {
  double h = 0.0;
  for (double p : probs_)
    if (p > 0.0) h -= p * std::log(p);
  return h;
}

double l1_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw SchemaError("L1 distance between vectors of different length");
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += std::abs(a[k] - b[k]);
  return s;
}

double l1_distance(const TabularDistribution& a, const TabularDistribution& b) {
  return l1_distance(a.probs(), b.probs());
}

double kl_divergence(const TabularDistribution& p, const TabularDistribution& q) {
  if (p.size() != q.size()) throw SchemaError("KL divergence between different spaces");
  double kl = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (p[k] <= 0.0) continue;
    if (q[k] <= 0.0) return std::numeric_limits<double>::infinity();
    kl += p[k] * std::log(p[k] / q[k]);
  }
  return kl;
}

double cross_log_likelihood(const TabularDistribution& target, const TabularDistribution& model) {
  if (target.size() != model.size()) throw SchemaError("likelihood between different spaces");
  double s = 0.0;
  for (std::size_t k = 0; k < target.size(); ++k) {
    if (target[k] <= 0.0) continue;
    if (model[k] <= 0.0) return kNegInf;
    s += target[k] * std::log(model[k]);
  }
  return s;
}

TabularDistribution mixture(std::span<const TabularDistribution> parts, std::span<const double> weights) {
  if (parts.empty() || parts.size() != weights.size())
    throw SchemaError("mixture needs one weight per component");
  std::vector<double> out(parts.front().size(), 0.0);
  for (std::size_t j = 0; j < parts.size(); ++j) {
    if (weights[j] == 0.0) continue;
    if (parts[j].size() != out.size()) throw SchemaError("mixture components on different spaces");
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += weights[j] * parts[j][k];
  }
  return TabularDistribution(parts.front().space(), std::move(out));
}

}  // namespace coopgame
