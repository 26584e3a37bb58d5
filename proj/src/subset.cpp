#include "coopgame/subset.hpp"

#include <algorithm>
#include <cmath>

#include "coopgame/errors.hpp"
#include "coopgame/kernels.hpp"

namespace coopgame {

VariableSubset::VariableSubset(FiniteSpace parent, const std::vector<std::string>& names)
    : parent_(std::move(parent)) {
  std::vector<std::size_t> positions;
  for (const auto& n : names) {
    if (!parent_.contains(n)) throw SchemaError("variable '" + n + "' is not part of the collection");
    positions.push_back(parent_.position(n));
  }
  std::sort(positions.begin(), positions.end());
  if (std::adjacent_find(positions.begin(), positions.end()) != positions.end())
    throw SchemaError("variable subset lists a variable twice");
  std::vector<Variable> vars;
  for (std::size_t p : positions) {
    names_.push_back(parent_.variables()[p].name);
    vars.push_back(parent_.variables()[p]);
  }
  if (!vars.empty()) space_ = FiniteSpace(std::move(vars));
}

VariableSubset VariableSubset::all(const FiniteSpace& parent) {
  std::vector<std::string> names;
  for (const auto& v : parent.variables()) names.push_back(v.name);
  return VariableSubset(parent, names);
}

const FiniteSpace& VariableSubset::space() const {
  if (!space_) throw SchemaError("empty variable subset has no space");
  return *space_;
}

VariableSubset VariableSubset::overlap(const VariableSubset& other) const {
  if (!(parent_ == other.parent_)) throw SchemaError("subsets of different collections");
  std::vector<std::string> shared;
  for (const auto& n : names_)
    if (std::find(other.names_.begin(), other.names_.end(), n) != other.names_.end()) shared.push_back(n);
  return VariableSubset(parent_, shared);
}

std::optional<FiniteSpace> overlap_space(const FiniteSpace& a, const FiniteSpace& b) {
  std::vector<Variable> shared;
  for (const auto& v : a.variables()) {
    if (!b.contains(v.name)) continue;
    if (b.variables()[b.position(v.name)].card != v.card)
      throw SchemaError("variable '" + v.name + "' has different cardinalities in the two spaces");
    shared.push_back(v);
  }
  if (shared.empty()) return std::nullopt;
  return FiniteSpace(std::move(shared));
}

std::vector<std::uint32_t> projection_map(const FiniteSpace& from, const FiniteSpace& to) {
  std::vector<std::size_t> pos;
  for (const auto& v : to.variables()) {
    if (!from.contains(v.name))
      throw SchemaError("variable '" + v.name + "' is not part of the source space");
    const std::size_t p = from.position(v.name);
    if (from.variables()[p].card != v.card)
      throw SchemaError("variable '" + v.name + "' has different cardinalities in the two spaces");
    pos.push_back(p);
  }
  std::vector<std::uint32_t> map(from.total_size());
  std::vector<std::size_t> sub(pos.size());
  for (std::size_t k = 0; k < from.total_size(); ++k) {
    const auto t = from.index_to_tuple(k);
    for (std::size_t v = 0; v < pos.size(); ++v) sub[v] = t[pos[v]];
    map[k] = static_cast<std::uint32_t>(to.tuple_to_index(sub));
  }
  return map;
}

TabularDistribution marginalize(const TabularDistribution& dist, const FiniteSpace& target) {
  if (target == dist.space()) return dist;
  const auto map = projection_map(dist.space(), target);
  std::vector<double> out(target.total_size(), 0.0);
  kernels::parallel::scatter_add(dist.probs(), map, out);
  return TabularDistribution(target, std::move(out));
}

TabularDistribution marginalize(const TabularDistribution& dist, const VariableSubset& target) {
  return marginalize(dist, target.space());
}

double marginal_log_likelihood(const GenerativeModel& model, const SampleBatch& batch,
                               const FiniteSpace& batch_space) {
  const auto shared = overlap_space(model.space(), batch_space);
  if (!shared) throw NoOverlapError("model and batch spaces share no variable");
  if (batch.outcomes.empty()) throw NumericError("marginal likelihood of an empty batch is undefined");
  batch.validate(batch_space);

  const auto marginal = marginalize(model.distribution(), *shared);
  const auto to_overlap = projection_map(batch_space, *shared);
  double s = 0.0;
  for (Outcome o : batch.outcomes) {
    const double p = marginal[to_overlap[o]];
    if (p <= 0.0) return kNegInf;
    s += std::log(p);
  }
  return s / static_cast<double>(batch.outcomes.size());
}

CompletedTarget complete_expected(const TabularDistribution& model, std::span<const double> full_mass,
                                  std::span<const PartialMass> partials) {
  const FiniteSpace& space = model.space();
  if (!full_mass.empty() && full_mass.size() != space.total_size())
    throw SchemaError("full-observation mass has the wrong size");
  std::vector<double> acc(space.total_size(), 0.0);
  std::copy(full_mass.begin(), full_mass.end(), acc.begin());
  std::size_t fallbacks = 0;

  for (const auto& part : partials) {
    if (part.mass.size() != part.observed.total_size()) throw SchemaError("partial mass has the wrong size");
    const auto map = projection_map(space, part.observed);
    std::vector<double> marginal(part.observed.total_size(), 0.0);
    std::vector<double> completions(part.observed.total_size(), 0.0);
    for (std::size_t k = 0; k < map.size(); ++k) {
      marginal[map[k]] += model[k];
      completions[map[k]] += 1.0;
    }
    for (std::size_t v = 0; v < marginal.size(); ++v)
      if (part.mass[v] > 0.0 && marginal[v] <= 0.0) ++fallbacks;
    for (std::size_t k = 0; k < map.size(); ++k) {
      const std::size_t v = map[k];
      if (part.mass[v] == 0.0) continue;
      acc[k] += marginal[v] > 0.0 ? part.mass[v] * (model[k] / marginal[v]) : part.mass[v] / completions[v];
    }
  }
  return {TabularDistribution(space, std::move(acc)), fallbacks};
}

std::size_t fit_step_marginal(GenerativeModel& model, std::span<const double> full_mass,
                              std::span<const PartialMass> partials, double step_size) {
  auto completed = complete_expected(model.distribution(), full_mass, partials);
  model.fit_step(completed.target, step_size);
  return completed.fallbacks;
}

Outcome complete(const GenerativeModel& model, const PartialObservation& obs, Rng& rng) {
  const FiniteSpace& space = model.space();
  std::vector<std::pair<std::size_t, std::size_t>> fixed;
  for (const auto& [name, value] : obs.values) {
    if (!space.contains(name)) throw SchemaError("observed variable '" + name + "' is not in the model space");
    const std::size_t p = space.position(name);
    if (value >= space.variables()[p].card)
      throw RangeError("observed value " + std::to_string(value) + " out of range for '" + name + "'");
    fixed.emplace_back(p, value);
  }
  const auto dist = model.distribution();
  std::vector<double> w(space.total_size(), 0.0);
  double total = 0.0;
  for (std::size_t k = 0; k < space.total_size(); ++k) {
    const auto t = space.index_to_tuple(k);
    bool consistent = true;
    for (const auto& [p, v] : fixed) consistent = consistent && t[p] == v;
    if (consistent) total += (w[k] = dist[k]);
  }
  if (total <= 0.0) throw ZeroSupportError("observed configuration has probability zero under the model");
  return CategoricalSampler(TabularDistribution(space, std::move(w))).draw(rng);
}

}  // namespace coopgame
