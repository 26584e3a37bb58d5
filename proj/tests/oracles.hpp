#pragma once

// Test-side reference computations. None of these call into the library
// routine they are used to check.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "coopgame/alpha.hpp"
#include "coopgame/distribution.hpp"

namespace oracle {

using Vec = std::vector<double>;

inline Vec random_simplex(std::mt19937_64& gen, std::size_t k, double zero_prob = 0.0) {
  std::exponential_distribution<double> e(1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vec v(k);
  double s = 0.0;
  for (auto& x : v) {
    x = u(gen) < zero_prob ? 0.0 : e(gen);
    s += x;
  }
  if (s == 0.0) {
    v[0] = 1.0;
    s = 1.0;
  }
  for (auto& x : v) x /= s;
  return v;
}

/// Row-stochastic matrix with every diagonal entry at least `min_diag`.
inline std::vector<Vec> random_alpha_rows(std::mt19937_64& gen, std::size_t n, double min_diag = 0.05) {
  std::uniform_real_distribution<double> u(min_diag, 1.0);
  std::vector<Vec> rows(n, Vec(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    const double d = n == 1 ? 1.0 : u(gen);
    Vec rest = random_simplex(gen, n - 1 == 0 ? 1 : n - 1);
    rows[i][i] = d;
    double used = d;
    for (std::size_t j = 0, k = 0; j < n; ++j) {
      if (j == i) continue;
      rows[i][j] = (1.0 - d) * rest[k++];
      used += rows[i][j];
    }
    rows[i][i] += 1.0 - used;  // absorb rounding so the row sums to 1
  }
  return rows;
}

/// Plain Jacobi sweeps p <- diag(a) pi + offdiag(a) p, written out longhand.
inline std::vector<Vec> jacobi_fixed_point(const std::vector<Vec>& pi, const coopgame::AlphaMatrix& a,
                                           std::size_t sweeps) {
  const std::size_t n = pi.size(), k = pi[0].size();
  std::vector<Vec> p = pi;
  for (std::size_t t = 0; t < sweeps; ++t) {
    std::vector<Vec> next(n, Vec(k, 0.0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t x = 0; x < k; ++x) {
        double v = a(i, i) * pi[i][x];
        for (std::size_t j = 0; j < n; ++j)
          if (j != i) v += a(i, j) * p[j][x];
        next[i][x] = v;
      }
    p = std::move(next);
  }
  return p;
}

inline double l1(const Vec& a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += std::abs(a[k] - b[k]);
  return s;
}

/// Pearson chi-square p-value of observed counts against probabilities.
/// Cells with zero probability must have zero counts; they are dropped.
inline double chi_square_p(const std::vector<std::size_t>& counts, std::span<const double> probs) {
  std::size_t n = 0;
  for (auto c : counts) n += c;
  double stat = 0.0;
  std::size_t cells = 0;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (probs[k] <= 0.0) {
      if (counts[k] > 0) return 0.0;
      continue;
    }
    const double expected = static_cast<double>(n) * probs[k];
    const double d = static_cast<double>(counts[k]) - expected;
    stat += d * d / expected;
    ++cells;
  }
  if (cells <= 1) return 1.0;
  boost::math::chi_squared dist(static_cast<double>(cells - 1));
  return boost::math::cdf(boost::math::complement(dist, stat));
}

}  // namespace oracle
