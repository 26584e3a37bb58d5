#include <algorithm>
#include <cmath>
#include <limits>

#include "coopgame/errors.hpp"
#include "coopgame/kernels.hpp"

namespace coopgame::kernels::serial {

void mix_rows(const Matrix& weights, std::span<const double> rows, std::size_t width,
              std::span<double> out) {
  const std::size_t n_out = weights.rows();
  const std::size_t n_in = weights.cols();
  for (std::size_t i = 0; i < n_out; ++i)
    for (std::size_t k = 0; k < width; ++k) {
      double s = 0.0;
      for (std::size_t j = 0; j < n_in; ++j) s += weights(i, j) * rows[j * width + k];
      out[i * width + k] = s;
    }
}

void fixed_point_step(std::span<const double> own, const Matrix& peers, std::span<const double> pi,
                      std::span<const double> p, std::size_t width, std::span<double> out) {
  const std::size_t n = own.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < width; ++k) {
      double s = own[i] * pi[i * width + k];
      for (std::size_t j = 0; j < n; ++j) s += peers(i, j) * p[j * width + k];
      out[i * width + k] = s;
    }
}

void logits(const SparseRows& features, std::span<const double> theta, std::span<double> out) {
  for (std::size_t k = 0; k < out.size(); ++k) {
    double s = 0.0;
    for (std::size_t e = features.offsets[k]; e < features.offsets[k + 1]; ++e)
      s += features.values[e] * theta[features.cols[e]];
    out[k] = s;
  }
}

void moments(const SparseRows& features, std::span<const double> probs, std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t k = 0; k < probs.size(); ++k) {
    if (probs[k] == 0.0) continue;
    for (std::size_t e = features.offsets[k]; e < features.offsets[k + 1]; ++e)
      out[features.cols[e]] += probs[k] * features.values[e];
  }
}

double log_sum_exp(std::span<const double> v) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

void scatter_add(std::span<const double> values, std::span<const std::uint32_t> index,
                 std::span<double> out) {
  for (std::size_t k = 0; k < values.size(); ++k) out[index[k]] += values[k];
}

}  // namespace coopgame::kernels::serial
