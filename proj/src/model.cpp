#include "coopgame/model.hpp"

#include <cmath>

#include "coopgame/errors.hpp"
#include "coopgame/kernels.hpp"

namespace coopgame {

namespace {

void check_target(const FiniteSpace& space, const TabularDistribution& target) {
  if (!(target.space() == space)) throw SchemaError("fit target lives on a different space than the model");
}

void check_step(double step_size) {
  if (!(step_size > 0.0) || !std::isfinite(step_size))
    throw ValidationError("step size must be positive and finite");
}

}  // namespace

SampleBatch GenerativeModel::sample(std::size_t n, Rng& rng) const {
  SampleBatch batch;
  batch.space_id = space().id();
  if (n == 0) return batch;
  batch.outcomes = CategoricalSampler(distribution()).draw(n, rng);
  return batch;
}

// --- TabularModel ---------------------------------------------------------

TabularModel::TabularModel(TabularDistribution init) : probs_(std::move(init)) {}

TabularModel TabularModel::uniform(const FiniteSpace& space) {
  return TabularModel(TabularDistribution::uniform(space));
}

double TabularModel::log_prob(Outcome outcome) const {
  const double p = probs_[outcome];
  return p > 0.0 ? std::log(p) : kNegInf;
}

void TabularModel::fit_step(const TabularDistribution& target, double step_size) {
  check_target(space(), target);
  check_step(step_size);
  const double eta = std::min(step_size, 1.0);
  std::vector<double> next(probs_.size());
  for (std::size_t k = 0; k < next.size(); ++k) {
    next[k] = (1.0 - eta) * probs_[k] + eta * target[k];
    if (!std::isfinite(next[k])) throw NumericError("non-finite probability in tabular update");
  }
  probs_ = TabularDistribution(probs_.space(), std::move(next));
}

std::unique_ptr<GenerativeModel> TabularModel::clone() const { return std::make_unique<TabularModel>(*this); }

// --- ExpFamilyModel -------------------------------------------------------

ExpFamilyModel::ExpFamilyModel(FeatureMap features, const FiniteSpace& space, std::vector<double> theta)
    : space_(space), features_(std::move(features)), theta_(std::move(theta)) {
  if (features_.outcomes() != space_.total_size())
    throw SchemaError("feature map covers " + std::to_string(features_.outcomes()) +
                      " outcomes, space has " + std::to_string(space_.total_size()));
  if (theta_.empty()) theta_.assign(features_.dim(), 0.0);
  if (theta_.size() != features_.dim())
    throw SchemaError("theta has dimension " + std::to_string(theta_.size()) + ", features have " +
                      std::to_string(features_.dim()));
  refresh();
}

void ExpFamilyModel::set_theta(std::vector<double> theta) {
  if (theta.size() != features_.dim()) throw SchemaError("theta has the wrong dimension");
  theta_ = std::move(theta);
  refresh();
}

void ExpFamilyModel::refresh() {
  for (double t : theta_)
    if (!std::isfinite(t)) throw NumericError("natural parameter is not finite");
  logits_.resize(space_.total_size());
  kernels::parallel::logits(features_.rows(), theta_, logits_);
  cumulant_ = kernels::parallel::log_sum_exp(logits_);
  if (!std::isfinite(cumulant_)) throw NumericError("cumulant is not finite");
  probs_.resize(logits_.size());
  for (std::size_t k = 0; k < logits_.size(); ++k) probs_[k] = std::exp(logits_[k] - cumulant_);
}

TabularDistribution ExpFamilyModel::distribution() const {
  return TabularDistribution::from_normalized(space_, probs_);
}

double ExpFamilyModel::log_prob(Outcome outcome) const { return logits_[outcome] - cumulant_; }

std::vector<double> ExpFamilyModel::expected_features() const {
  std::vector<double> m(features_.dim());
  kernels::parallel::moments(features_.rows(), probs_, m);
  return m;
}

void ExpFamilyModel::fit_step(const TabularDistribution& target, double step_size) {
  check_step(step_size);
  auto grad = grad_log_likelihood(*this, target);
  for (double g : grad)
    if (!std::isfinite(g)) throw NumericError("non-finite gradient in log-linear update");
  std::vector<double> next = theta_;
  for (std::size_t f = 0; f < next.size(); ++f) next[f] += step_size * grad[f];
  set_theta(std::move(next));
}

std::unique_ptr<GenerativeModel> ExpFamilyModel::clone() const { return std::make_unique<ExpFamilyModel>(*this); }

// --- free functions -------------------------------------------------------

double log_likelihood(const GenerativeModel& model, const TabularDistribution& target) {
  check_target(model.space(), target);
  double s = 0.0;
  for (std::size_t k = 0; k < target.size(); ++k) {
    if (target[k] <= 0.0) continue;
    const double lp = model.log_prob(static_cast<Outcome>(k));
    if (!std::isfinite(lp)) return kNegInf;
    s += target[k] * lp;
  }
  return s;
}

std::vector<double> grad_log_likelihood(const ExpFamilyModel& model, const TabularDistribution& target) {
  check_target(model.space(), target);
  std::vector<double> g(model.features().dim());
  kernels::parallel::moments(model.features().rows(), target.probs(), g);
  const auto m = model.expected_features();
  for (std::size_t f = 0; f < g.size(); ++f) g[f] -= m[f];
  return g;
}

std::unique_ptr<GenerativeModel> make_model(const FiniteSpace& space, const nlohmann::json& spec) {
  const std::string family = spec.is_object() ? spec.value("family", "tabular") : "tabular";
  if (family == "tabular") {
    if (spec.is_object() && spec.contains("init"))
      return std::make_unique<TabularModel>(
          TabularDistribution(space, spec["init"].get<std::vector<double>>()));
    return std::make_unique<TabularModel>(TabularModel::uniform(space));
  }
  if (family == "loglinear") {
    auto features = FeatureMap::from_json(space, spec.value("features", nlohmann::json("saturated")));
    std::vector<double> theta;
    if (spec.contains("theta")) theta = spec["theta"].get<std::vector<double>>();
    return std::make_unique<ExpFamilyModel>(std::move(features), space, std::move(theta));
  }
  throw SchemaError("unknown model family '" + family + "'");
}

}  // namespace coopgame
