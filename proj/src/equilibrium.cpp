#include "coopgame/equilibrium.hpp"

#include <algorithm>
#include <optional>
#include <string>

#include "coopgame/errors.hpp"
#include "coopgame/kernels.hpp"

namespace coopgame {

namespace {

void check_inputs(std::span<const TabularDistribution> pi, const AlphaMatrix& alpha) {
  if (pi.empty()) throw SchemaError("equilibrium needs at least one player");
  if (pi.size() != alpha.n_players())
    throw SchemaError("alpha is " + std::to_string(alpha.n_players()) + "x" +
                      std::to_string(alpha.n_players()) + " but " + std::to_string(pi.size()) +
                      " target distributions were given");
  for (const auto& d : pi)
    if (!(d.space() == pi.front().space())) throw SchemaError("all targets must share one space");
}

std::vector<double> stack(std::span<const TabularDistribution> ds) {
  const std::size_t width = ds.front().size();
  std::vector<double> out(ds.size() * width);
  for (std::size_t i = 0; i < ds.size(); ++i)
    std::copy(ds[i].probs().begin(), ds[i].probs().end(), out.begin() + i * width);
  return out;
}

std::vector<TabularDistribution> unstack(const FiniteSpace& space, std::span<const double> rows, std::size_t n) {
  const std::size_t width = space.total_size();
  std::vector<TabularDistribution> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto r = rows.subspan(i * width, width);
    out.push_back(TabularDistribution::from_normalized(space, std::vector<double>(r.begin(), r.end())));
  }
  return out;
}

// Players that cannot reach any own-data player through positive alpha
// entries. These make (I - B) singular.
std::vector<std::size_t> stranded_players(const AlphaMatrix& alpha) {
  const std::size_t n = alpha.n_players();
  std::vector<bool> grounded(n, false);
  for (std::size_t i = 0; i < n; ++i) grounded[i] = alpha(i, i) > 0.0;
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (grounded[i]) continue;
      for (std::size_t j = 0; j < n; ++j)
        if (j != i && alpha(i, j) > 0.0 && grounded[j]) {
          grounded[i] = changed = true;
          break;
        }
    }
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n; ++i)
    if (!grounded[i]) out.push_back(i);
  return out;
}

std::vector<double> diagonal(const AlphaMatrix& alpha) {
  std::vector<double> d(alpha.n_players());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = alpha(i, i);
  return d;
}

double max_row_l1(std::span<const double> a, std::span<const double> b, std::size_t n, std::size_t width) {
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    worst = std::max(worst, l1_distance(a.subspan(i * width, width), b.subspan(i * width, width)));
  return worst;
}

}  // namespace

EquilibriumResult solve_exact(std::span<const TabularDistribution> pi, const AlphaMatrix& alpha) {
  check_inputs(pi, alpha);
  const std::size_t n = alpha.n_players();
  const auto [own, peers] = alpha_split(alpha);

  Matrix system = Matrix::identity(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) system(i, j) -= peers(i, j);

  std::optional<LuDecomposition> lu;
  try {
    lu.emplace(system);
  } catch (const SingularSystemError& e) {
    std::string who;
    for (std::size_t p : stranded_players(alpha)) who += (who.empty() ? "" : ", ") + std::to_string(p);
    if (who.empty()) throw;
    throw SingularSystemError("I - B is singular: players {" + who +
                              "} have no own data and no alpha path to a player that does");
  }

  // weights(i, j): weight of pi_j in p_i.
  Matrix weights(n, n);
  std::vector<double> rhs(n);
  for (std::size_t j = 0; j < n; ++j) {
    std::fill(rhs.begin(), rhs.end(), 0.0);
    rhs[j] = own(j, j);
    auto col = lu->solve(rhs);
    for (std::size_t i = 0; i < n; ++i) weights(i, j) = std::max(col[i], 0.0);
  }

  const FiniteSpace& space = pi.front().space();
  const std::size_t width = space.total_size();
  auto targets = stack(pi);
  std::vector<double> mixed(n * width);
  kernels::parallel::mix_rows(weights, targets, width, mixed);

  EquilibriumResult result;
  result.distributions = unstack(space, mixed, n);
  result.mixture_matrix = weights.transposed();
  result.method = SolveMethod::Exact;
  result.residual = best_response_residual(result.distributions, pi, alpha);
  return result;
}

EquilibriumResult iterate(std::span<const TabularDistribution> pi, const AlphaMatrix& alpha,
                          std::span<const TabularDistribution> p0, IterateOptions options) {
  check_inputs(pi, alpha);
  const bool from_pi = p0.empty();
  if (!from_pi) {
    if (p0.size() != pi.size()) throw SchemaError("initial profile has the wrong number of players");
    for (const auto& d : p0)
      if (!(d.space() == pi.front().space())) throw SchemaError("initial profile on a different space");
  }
  const std::size_t n = alpha.n_players();
  const FiniteSpace& space = pi.front().space();
  const std::size_t width = space.total_size();
  const auto own = diagonal(alpha);
  const Matrix& peers = alpha_split(alpha).peers;

  auto targets = stack(pi);
  auto current = from_pi ? targets : stack(p0);
  std::vector<double> next(current.size());

  // Track the mixture weights alongside when starting from pi: W' = A + B W.
  Matrix weights = Matrix::identity(n);
  Matrix next_weights(n, n);

  EquilibriumResult result;
  result.method = SolveMethod::Iterative;
  result.converged = false;

  for (std::size_t step = 0; step < options.max_steps; ++step) {
    if (options.order == SweepOrder::Jacobi) {
      kernels::parallel::fixed_point_step(own, peers, targets, current, width, next);
      if (from_pi) {
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j) {
            double s = (i == j) ? own[i] : 0.0;
            for (std::size_t m = 0; m < n; ++m) s += peers(i, m) * weights(m, j);
            next_weights(i, j) = s;
          }
        std::swap(weights, next_weights);
      }
    } else {
      next = current;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < width; ++k) {
          double s = own[i] * targets[i * width + k];
          for (std::size_t j = 0; j < n; ++j) s += peers(i, j) * next[j * width + k];
          next[i * width + k] = s;
        }
        if (from_pi)
          for (std::size_t j = 0; j < n; ++j) {
            double s = (i == j) ? own[i] : 0.0;
            for (std::size_t m = 0; m < n; ++m) s += peers(i, m) * weights(m, j);
            weights(i, j) = s;
          }
      }
    }
    const double change = max_row_l1(next, current, n, width);
    std::swap(current, next);
    result.trajectory.push_back(change);
    result.iterations_used = step + 1;
    if (change < options.tol) {
      result.converged = true;
      break;
    }
  }

  result.distributions = from_pi || result.iterations_used > 0
                             ? unstack(space, current, n)
                             : std::vector<TabularDistribution>(p0.begin(), p0.end());
  if (from_pi) result.mixture_matrix = weights.transposed();
  result.residual = best_response_residual(result.distributions, pi, alpha);
  return result;
}

double spectral_radius_bound(const AlphaMatrix& alpha) {
  double bound = 0.0;
  for (std::size_t i = 0; i < alpha.n_players(); ++i) bound = std::max(bound, 1.0 - alpha(i, i));
  return bound;
}

double best_response_residual(std::span<const TabularDistribution> p,
                              std::span<const TabularDistribution> pi, const AlphaMatrix& alpha) {
  check_inputs(pi, alpha);
  if (p.size() != pi.size()) throw SchemaError("profile has the wrong number of players");
  const std::size_t n = alpha.n_players();
  const std::size_t width = pi.front().size();
  double worst = 0.0;
  std::vector<double> rhs(width);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < width; ++k) {
      double s = alpha(i, i) * pi[i][k];
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) s += alpha(i, j) * p[j][k];
      rhs[k] = s;
    }
    worst = std::max(worst, l1_distance(p[i].probs(), rhs));
  }
  return worst;
}

nlohmann::json EquilibriumResult::to_json() const {
  nlohmann::json j;
  j["method"] = method == SolveMethod::Exact ? "exact" : "iterative";
  j["iterations_used"] = iterations_used;
  j["residual"] = residual;
  j["converged"] = converged;
  auto dists = nlohmann::json::array();
  for (const auto& d : distributions) dists.push_back(std::vector<double>(d.probs().begin(), d.probs().end()));
  j["distributions"] = dists;
  auto mix = nlohmann::json::array();
  for (std::size_t r = 0; r < mixture_matrix.rows(); ++r) {
    auto row = mixture_matrix.row(r);
    mix.push_back(std::vector<double>(row.begin(), row.end()));
  }
  j["mixture_matrix"] = mix;
  j["trajectory"] = trajectory;
  return j;
}

}  // namespace coopgame
