#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "coopgame/kernels.hpp"

namespace coopgame::kernels {

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

namespace parallel {

namespace {

std::ptrdiff_t chunk_count(std::size_t n) { return static_cast<std::ptrdiff_t>((n + kChunk - 1) / kChunk); }

}  // namespace

void mix_rows(const Matrix& weights, std::span<const double> rows, std::size_t width,
              std::span<double> out) {
  const std::size_t n_out = weights.rows();
  const std::size_t n_in = weights.cols();
  const auto w = static_cast<std::ptrdiff_t>(width);
#pragma omp parallel for schedule(static) if (width >= kParallelThreshold)
  for (std::ptrdiff_t k = 0; k < w; ++k)
    for (std::size_t i = 0; i < n_out; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n_in; ++j) s += weights(i, j) * rows[j * width + k];
      out[i * width + k] = s;
    }
}

void fixed_point_step(std::span<const double> own, const Matrix& peers, std::span<const double> pi,
                      std::span<const double> p, std::size_t width, std::span<double> out) {
  const std::size_t n = own.size();
  const auto w = static_cast<std::ptrdiff_t>(width);
#pragma omp parallel for schedule(static) if (width >= kParallelThreshold)
  for (std::ptrdiff_t k = 0; k < w; ++k)
    for (std::size_t i = 0; i < n; ++i) {
      double s = own[i] * pi[i * width + k];
      for (std::size_t j = 0; j < n; ++j) s += peers(i, j) * p[j * width + k];
      out[i * width + k] = s;
    }
}

void logits(const SparseRows& features, std::span<const double> theta, std::span<double> out) {
  const auto n = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static) if (out.size() >= kParallelThreshold)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    double s = 0.0;
    for (std::size_t e = features.offsets[k]; e < features.offsets[k + 1]; ++e)
      s += features.values[e] * theta[features.cols[e]];
    out[k] = s;
  }
}

void moments(const SparseRows& features, std::span<const double> probs, std::span<double> out) {
  const std::size_t n = probs.size();
  const std::size_t dim = out.size();
  // Each chunk keeps a dense partial of length dim, so chunks span at least
  // dim rows to keep the buffer and the final reduction O(n).
  const std::size_t rows = std::max(kChunk, dim);
  const auto chunks = static_cast<std::ptrdiff_t>((n + rows - 1) / rows);
  std::vector<double> partial(static_cast<std::size_t>(chunks) * dim, 0.0);
#pragma omp parallel for schedule(static) if (n >= kParallelThreshold && chunks > 1)
  for (std::ptrdiff_t c = 0; c < chunks; ++c) {
    double* acc = partial.data() + c * dim;
    const std::size_t end = std::min(n, (c + 1) * rows);
    for (std::size_t k = c * rows; k < end; ++k) {
      if (probs[k] == 0.0) continue;
      for (std::size_t e = features.offsets[k]; e < features.offsets[k + 1]; ++e)
        acc[features.cols[e]] += probs[k] * features.values[e];
    }
  }
  std::fill(out.begin(), out.end(), 0.0);
  for (std::ptrdiff_t c = 0; c < chunks; ++c)
    for (std::size_t f = 0; f < dim; ++f) out[f] += partial[c * dim + f];
}

double log_sum_exp(std::span<const double> v) {
  const std::size_t n = v.size();
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  const std::ptrdiff_t chunks = chunk_count(n);
  std::vector<double> partial(static_cast<std::size_t>(chunks), 0.0);
#pragma omp parallel for schedule(static) if (n >= kParallelThreshold)
  for (std::ptrdiff_t c = 0; c < chunks; ++c) {
    double s = 0.0;
    const std::size_t end = std::min(n, (c + 1) * kChunk);
    for (std::size_t k = c * kChunk; k < end; ++k) s += std::exp(v[k] - m);
    partial[c] = s;
  }
  double s = 0.0;
  for (double x : partial) s += x;
  return m + std::log(s);
}

void scatter_add(std::span<const double> values, std::span<const std::uint32_t> index,
                 std::span<double> out) {
  const std::size_t n = values.size();
  if (n < kParallelThreshold) {
    serial::scatter_add(values, index, out);
    return;
  }
  const std::size_t m = out.size();
  const std::size_t rows = std::max(kChunk, m);  // see moments()
  const auto chunks = static_cast<std::ptrdiff_t>((n + rows - 1) / rows);
  std::vector<double> partial(static_cast<std::size_t>(chunks) * m, 0.0);
#pragma omp parallel for schedule(static) if (chunks > 1)
  for (std::ptrdiff_t c = 0; c < chunks; ++c) {
    double* acc = partial.data() + c * m;
    const std::size_t end = std::min(n, (c + 1) * rows);
    for (std::size_t k = c * rows; k < end; ++k) acc[index[k]] += values[k];
  }
  for (std::ptrdiff_t c = 0; c < chunks; ++c)
    for (std::size_t t = 0; t < m; ++t) out[t] += partial[c * m + t];
}

}  // namespace parallel
}  // namespace coopgame::kernels
