#include "coopgame/features.hpp"

#include <cmath>

#include "coopgame/errors.hpp"

namespace coopgame {

FeatureMap FeatureMap::saturated(const FiniteSpace& space) {
  FeatureMap f;
  f.kind_ = "saturated";
  f.dim_ = space.total_size();
  for (std::size_t k = 0; k < space.total_size(); ++k) {
    f.cols_.push_back(static_cast<std::uint32_t>(k));
    f.values_.push_back(1.0);
    f.offsets_.push_back(f.cols_.size());
  }
  return f;
}

FeatureMap FeatureMap::singleton_marginals(const FiniteSpace& space) {
  FeatureMap f;
  f.kind_ = "singleton-marginals";
  const auto& vars = space.variables();
  std::vector<std::size_t> base(vars.size());
  for (std::size_t v = 0; v < vars.size(); ++v) {
    base[v] = f.dim_;
    f.dim_ += vars[v].card;
  }
  for (std::size_t k = 0; k < space.total_size(); ++k) {
    auto t = space.index_to_tuple(k);
    for (std::size_t v = 0; v < vars.size(); ++v) {
      f.cols_.push_back(static_cast<std::uint32_t>(base[v] + t[v]));
      f.values_.push_back(1.0);
    }
    f.offsets_.push_back(f.cols_.size());
  }
  return f;
}

FeatureMap FeatureMap::pairwise(const FiniteSpace& space) {
  FeatureMap f = singleton_marginals(space);
  f.kind_ = "pairwise";
  const auto& vars = space.variables();
  const std::size_t m = vars.size();
  std::vector<std::size_t> pair_base;
  for (std::size_t u = 0; u < m; ++u)
    for (std::size_t v = u + 1; v < m; ++v) {
      pair_base.push_back(f.dim_);
      f.dim_ += vars[u].card * vars[v].card;
    }

  std::vector<std::size_t> offsets{0};
  std::vector<std::uint32_t> cols;
  std::vector<double> values;
  for (std::size_t k = 0; k < space.total_size(); ++k) {
    for (std::size_t e = f.offsets_[k]; e < f.offsets_[k + 1]; ++e) {
      cols.push_back(f.cols_[e]);
      values.push_back(1.0);
    }
    auto t = space.index_to_tuple(k);
    std::size_t p = 0;
    for (std::size_t u = 0; u < m; ++u)
      for (std::size_t v = u + 1; v < m; ++v, ++p) {
        cols.push_back(static_cast<std::uint32_t>(pair_base[p] + t[u] * vars[v].card + t[v]));
        values.push_back(1.0);
      }
    offsets.push_back(cols.size());
  }
  f.offsets_ = std::move(offsets);
  f.cols_ = std::move(cols);
  f.values_ = std::move(values);
  return f;
}

FeatureMap FeatureMap::from_table(const FiniteSpace& space, const std::vector<std::vector<double>>& table) {
  if (table.size() != space.total_size())
    throw SchemaError("feature table has " + std::to_string(table.size()) + " rows, space has " +
                      std::to_string(space.total_size()) + " outcomes");
  FeatureMap f;
  f.kind_ = "table";
  f.dim_ = table.empty() ? 0 : table.front().size();
  if (f.dim_ == 0) throw SchemaError("feature table rows must be non-empty");
  for (const auto& row : table) {
    if (row.size() != f.dim_) throw SchemaError("feature table rows differ in length");
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (!std::isfinite(row[c])) throw SchemaError("feature table entry is not finite");
      if (row[c] == 0.0) continue;
      f.cols_.push_back(static_cast<std::uint32_t>(c));
      f.values_.push_back(row[c]);
    }
    f.offsets_.push_back(f.cols_.size());
  }
  return f;
}

FeatureMap FeatureMap::from_json(const FiniteSpace& space, const nlohmann::json& spec) {
  if (spec.is_string()) {
    const auto name = spec.get<std::string>();
    if (name == "saturated") return saturated(space);
    if (name == "singleton-marginals") return singleton_marginals(space);
    if (name == "pairwise") return pairwise(space);
    throw SchemaError("unknown feature map '" + name + "'");
  }
  if (spec.is_object() && spec.contains("table") && spec["table"].is_array()) {
    std::vector<std::vector<double>> table;
    for (const auto& row : spec["table"]) {
      if (!row.is_array()) throw SchemaError("feature table rows must be arrays");
      std::vector<double> r;
      for (const auto& v : row) {
        if (!v.is_number()) throw SchemaError("feature table entries must be numbers");
        r.push_back(v.get<double>());
      }
      table.push_back(std::move(r));
    }
    return from_table(space, table);
  }
  throw SchemaError("features must be a preset name or {\"table\": [[...], ...]}");
}

std::vector<double> FeatureMap::dense_row(std::size_t outcome) const {
  std::vector<double> row(dim_, 0.0);
  for (std::size_t e = offsets_[outcome]; e < offsets_[outcome + 1]; ++e) row[cols_[e]] += values_[e];
  return row;
}

}  // namespace coopgame
