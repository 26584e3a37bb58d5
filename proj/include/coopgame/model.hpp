#pragma once

#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "coopgame/distribution.hpp"
#include "coopgame/features.hpp"
#include "coopgame/rng.hpp"
#include "coopgame/sample_batch.hpp"

namespace coopgame {

/// Black-box local model: it can learn from a (weighted empirical) target and
/// generate samples. Nothing else about it is visible to peers.
///
/// fit_step mutates; the const members may run concurrently with each other
/// but not with fit_step. Callers that share a model across threads work on a
/// clone and publish it as a new snapshot.
class GenerativeModel {
 public:
  virtual ~GenerativeModel() = default;

  virtual const FiniteSpace& space() const = 0;
  virtual TabularDistribution distribution() const = 0;
  /// kNegInf for outcomes the model cannot produce.
  virtual double log_prob(Outcome outcome) const = 0;
  /// One learning step toward `target`. step_size must be positive.
  virtual void fit_step(const TabularDistribution& target, double step_size) = 0;
  virtual std::unique_ptr<GenerativeModel> clone() const = 0;
  virtual std::string family() const = 0;

  /// n i.i.d. outcomes from distribution(); deterministic given the rng state.
  SampleBatch sample(std::size_t n, Rng& rng) const;
};

/// Directly parameterized probability table (the saturated family). fit_step
/// moves toward the target by convex combination, min(step, 1) of the way;
/// a step of 1 is the exact maximum-likelihood fit.
class TabularModel final : public GenerativeModel {
 public:
  explicit TabularModel(TabularDistribution init);
  static TabularModel uniform(const FiniteSpace& space);

  const FiniteSpace& space() const override { return probs_.space(); }
  TabularDistribution distribution() const override { return probs_; }
  double log_prob(Outcome outcome) const override;
  void fit_step(const TabularDistribution& target, double step_size) override;
  std::unique_ptr<GenerativeModel> clone() const override;
  std::string family() const override { return "tabular"; }

 private:
  TabularDistribution probs_;
};

/// Log-linear model p(x) = exp(<phi(x), theta> - cumulant(theta)).
class ExpFamilyModel final : public GenerativeModel {
 public:
  ExpFamilyModel(FeatureMap features, const FiniteSpace& space, std::vector<double> theta = {});

  const FiniteSpace& space() const override { return space_; }
  TabularDistribution distribution() const override;
  double log_prob(Outcome outcome) const override;
  /// theta += step_size * (E_target[phi] - E_model[phi]).
  void fit_step(const TabularDistribution& target, double step_size) override;
  std::unique_ptr<GenerativeModel> clone() const override;
  std::string family() const override { return "loglinear"; }

  const FeatureMap& features() const { return features_; }
  std::span<const double> theta() const { return theta_; }
  void set_theta(std::vector<double> theta);
  /// log sum_x exp <phi(x), theta>, computed with max subtraction.
  double cumulant() const { return cumulant_; }
  std::span<const double> probs() const { return probs_; }

  /// E_model[phi].
  std::vector<double> expected_features() const;

 private:
  void refresh();

  FiniteSpace space_;
  FeatureMap features_;
  std::vector<double> theta_;
  std::vector<double> logits_;
  std::vector<double> probs_;
  double cumulant_ = 0.0;
};

/// Published model state. Readers take an immutable snapshot; the single
/// writer swaps in a new one when a round completes.
class ModelHandle {
 public:
  explicit ModelHandle(std::unique_ptr<GenerativeModel> initial) { publish(std::move(initial)); }

  std::shared_ptr<const GenerativeModel> snapshot() const {
    std::lock_guard lock(mutex_);
    return current_;
  }
  void publish(std::unique_ptr<GenerativeModel> next) {
    std::shared_ptr<const GenerativeModel> shared(std::move(next));
    std::lock_guard lock(mutex_);
    current_.swap(shared);
  }

 private:
  mutable std::mutex mutex_;
  std::shared_ptr<const GenerativeModel> current_;
};

/// sum_x target(x) log p(x); kNegInf when the model misses target support.
double log_likelihood(const GenerativeModel& model, const TabularDistribution& target);

/// E_target[phi] - E_model[phi], the gradient of log_likelihood in theta.
std::vector<double> grad_log_likelihood(const ExpFamilyModel& model, const TabularDistribution& target);

/// Builds a model from its config description:
///   {"family": "tabular", "init": [...]?}
///   {"family": "loglinear", "features": <FeatureMap json>, "theta": [...]?}
std::unique_ptr<GenerativeModel> make_model(const FiniteSpace& space, const nlohmann::json& spec);

}  // namespace coopgame
