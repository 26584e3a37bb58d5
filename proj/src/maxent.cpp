#include "coopgame/maxent.hpp"

#include <algorithm>
#include <cmath>

#include "coopgame/errors.hpp"
#include "coopgame/matrix.hpp"
#include "coopgame/rng.hpp"

namespace coopgame {

namespace {

using Vec = std::vector<double>;

double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

// Orthonormal basis of span{phi_f restricted to support} + {1}, by modified
// Gram-Schmidt with re-orthogonalization. Dependent rows are dropped.
std::vector<Vec> constraint_basis(const FeatureMap& features, const std::vector<std::size_t>& support) {
  const std::size_t m = support.size();
  std::vector<Vec> rows(features.dim() + 1, Vec(m, 0.0));
  for (std::size_t s = 0; s < m; ++s) {
    auto phi = features.dense_row(support[s]);
    for (std::size_t f = 0; f < phi.size(); ++f) rows[f][s] = phi[f];
    rows.back()[s] = 1.0;
  }
  std::rotate(rows.rbegin(), rows.rbegin() + 1, rows.rend());

  std::vector<Vec> basis;
  for (auto& r : rows) {
    const double norm0 = std::sqrt(dot(r, r));
    if (norm0 == 0.0) continue;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& q : basis) {
        const double c = dot(r, q);
        for (std::size_t k = 0; k < m; ++k) r[k] -= c * q[k];
      }
    const double norm = std::sqrt(dot(r, r));
    if (norm <= 1e-10 * norm0) continue;
    for (double& x : r) x /= norm;
    basis.push_back(std::move(r));
    if (basis.size() == m) break;
  }
  return basis;
}

void project_out(Vec& v, const std::vector<Vec>& basis) {
  for (int pass = 0; pass < 2; ++pass)
    for (const auto& q : basis) {
      const double c = dot(v, q);
      for (std::size_t k = 0; k < v.size(); ++k) v[k] -= c * q[k];
    }
}

double entropy_of(const Vec& q) {
  double h = 0.0;
  for (double x : q)
    if (x > 0.0) h -= x * std::log(x);
  return h;
}

}  // namespace

MaxEntropyReport check_max_entropy(const TabularDistribution& p, const FeatureMap& features, double slack,
                                   std::uint64_t seed) {
  if (features.outcomes() != p.size()) throw SchemaError("feature map and distribution disagree on space");

  MaxEntropyReport report;
  report.entropy = p.entropy();
  report.best_entropy = report.entropy;
  report.witness = p;

  std::vector<std::size_t> support;
  for (std::size_t k = 0; k < p.size(); ++k)
    if (p[k] > 0.0) support.push_back(k);
  const std::size_t m = support.size();

  const auto basis = constraint_basis(features, support);
  if (basis.size() >= m) {
    // The moment constraints pin the distribution on its support.
    report.passed = true;
    return report;
  }

  Vec base(m);
  for (std::size_t s = 0; s < m; ++s) base[s] = p[support[s]];

  // Random feasible start: p + t v with v in the null space, q >= p / 2.
  Rng rng(seed);
  Vec v(m);
  for (std::size_t s = 0; s < m; ++s) v[s] = (2.0 * rng.uniform() - 1.0) * base[s];
  project_out(v, basis);
  double worst = 0.0;
  for (std::size_t s = 0; s < m; ++s) worst = std::max(worst, std::abs(v[s]) / base[s]);
  Vec q = base;
  if (worst > 0.0)
    for (std::size_t s = 0; s < m; ++s) q[s] += 0.5 / worst * v[s];

  // Newton ascent on H restricted to {d : C d = 0}: d = D (g - C^T lambda),
  // (C D C^T) lambda = C D g, with D = diag(q) and g = -(log q + 1).
  const std::size_t r = basis.size();
  for (std::size_t it = 0; it < 200; ++it) {
    report.iterations = it + 1;
    Vec g(m);
    for (std::size_t s = 0; s < m; ++s) g[s] = -(std::log(q[s]) + 1.0);

    Matrix gram(r, r);
    Vec rhs(r, 0.0);
    for (std::size_t a = 0; a < r; ++a) {
      for (std::size_t s = 0; s < m; ++s) rhs[a] += basis[a][s] * q[s] * g[s];
      for (std::size_t b = a; b < r; ++b) {
        double acc = 0.0;
        for (std::size_t s = 0; s < m; ++s) acc += basis[a][s] * q[s] * basis[b][s];
        gram(a, b) = gram(b, a) = acc;
      }
    }
    const auto lambda = LuDecomposition(gram, 1e-300).solve(rhs);
    Vec d(m);
    for (std::size_t s = 0; s < m; ++s) {
      double ct = 0.0;
      for (std::size_t a = 0; a < r; ++a) ct += basis[a][s] * lambda[a];
      d[s] = q[s] * (g[s] - ct);
    }
    project_out(d, basis);

    double decrement = 0.0;
    for (std::size_t s = 0; s < m; ++s) decrement += d[s] * d[s] / q[s];
    if (decrement < 1e-22) break;

    const double h0 = entropy_of(q);
    double t = 1.0;
    for (std::size_t s = 0; s < m; ++s)
      if (d[s] < 0.0) t = std::min(t, -0.99 * q[s] / d[s]);
    Vec trial(m);
    for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
      for (std::size_t s = 0; s < m; ++s) trial[s] = q[s] + t * d[s];
      if (entropy_of(trial) >= h0 + 0.25 * t * decrement) break;
    }
    if (entropy_of(trial) <= h0) break;
    q = trial;
  }

  const double best = entropy_of(q);
  double cerr = 0.0;
  Vec diff(m);
  for (std::size_t s = 0; s < m; ++s) diff[s] = q[s] - base[s];
  for (const auto& b : basis) cerr = std::max(cerr, std::abs(dot(b, diff)));

  std::vector<double> full(p.size(), 0.0);
  for (std::size_t s = 0; s < m; ++s) full[support[s]] = std::max(q[s], 0.0);
  report.best_entropy = std::max(best, report.entropy);
  report.constraint_error = cerr;
  report.passed = best - report.entropy <= slack;
  if (best > report.entropy) report.witness = TabularDistribution(p.space(), std::move(full));
  return report;
}

MaxEntropyReport max_entropy_check(const ExpFamilyModel& model, double slack) {
  if (model.space().total_size() > 4096)
    throw ValidationError("max-entropy check is limited to spaces of at most 4096 outcomes");
  if (model.features().kind() == "saturated") {
    // One indicator per outcome: the moments are the distribution itself.
    MaxEntropyReport report;
    report.passed = true;
    report.witness = model.distribution();
    report.entropy = report.best_entropy = report.witness.entropy();
    return report;
  }
  return check_max_entropy(model.distribution(), model.features(), slack);
}

}  // namespace coopgame
