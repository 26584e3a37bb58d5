#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "coopgame/kernels.hpp"
#include "coopgame/space.hpp"

namespace coopgame {

/// Sufficient statistic phi: outcome -> R^d, stored as sparse rows.
class FeatureMap {
 public:
  FeatureMap() = default;

  /// One indicator per outcome (d = total_size). The saturated family.
  static FeatureMap saturated(const FiniteSpace& space);
  /// One indicator per (variable, value).
  static FeatureMap singleton_marginals(const FiniteSpace& space);
  /// Singleton indicators plus one indicator per (variable pair, value pair).
  static FeatureMap pairwise(const FiniteSpace& space);
  /// Dense table with one row of length d per outcome.
  static FeatureMap from_table(const FiniteSpace& space, const std::vector<std::vector<double>>& table);
  /// "saturated" | "singleton-marginals" | "pairwise" | {"table": [[...], ...]}
  static FeatureMap from_json(const FiniteSpace& space, const nlohmann::json& spec);

  const std::string& kind() const { return kind_; }
  std::size_t dim() const { return dim_; }
  std::size_t outcomes() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  kernels::SparseRows rows() const { return {offsets_, cols_, values_, dim_}; }
  /// Dense copy of phi(x).
  std::vector<double> dense_row(std::size_t outcome) const;

 private:
  std::string kind_;
  std::size_t dim_ = 0;
  std::vector<std::size_t> offsets_{0};
  std::vector<std::uint32_t> cols_;
  std::vector<double> values_;
};

}  // namespace coopgame
