#include <doctest.h>

#include <random>

#include "coopgame/equilibrium.hpp"
#include "coopgame/errors.hpp"
#include "oracles.hpp"

using namespace coopgame;

namespace {

std::vector<TabularDistribution> deltas(std::size_t n) {
  const FiniteSpace s({{"x", n}});
  std::vector<TabularDistribution> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(TabularDistribution::point_mass(s, i));
  return out;
}

struct Instance {
  std::vector<TabularDistribution> pi;
  AlphaMatrix alpha;
};

Instance random_instance(std::mt19937_64& gen) {
  const std::size_t n = 1 + gen() % 6;
  const std::size_t k = 1 + gen() % 64;
  const FiniteSpace s({{"x", k}});
  Instance inst;
  for (std::size_t i = 0; i < n; ++i) inst.pi.emplace_back(s, oracle::random_simplex(gen, k, 0.3));
  inst.alpha = AlphaMatrix(oracle::random_alpha_rows(gen, n, 0.02));
  return inst;
}

}  // namespace

TEST_SUITE("equilibrium") {
  TEST_CASE("identity alpha returns pi") {
    std::mt19937_64 gen(5);
    const FiniteSpace s({{"x", 5}});
    std::vector<TabularDistribution> pi;
    for (int i = 0; i < 3; ++i) pi.emplace_back(s, oracle::random_simplex(gen, 5));
    const EquilibriumResult r = solve_exact(pi, AlphaMatrix::identity(3));
    for (std::size_t i = 0; i < 3; ++i) CHECK(r.distributions[i] == pi[i]);
    CHECK(r.mixture_matrix == Matrix::identity(3));
    CHECK(best_response_residual(pi, pi, AlphaMatrix::identity(3)) == 0.0);
  }

  TEST_CASE("two players at one half") {
    const auto pi = deltas(2);
    const AlphaMatrix a({{0.5, 0.5}, {0.5, 0.5}});
    const EquilibriumResult r = solve_exact(pi, a);
    CHECK(r.distributions[0][0] == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(r.distributions[0][1] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(r.distributions[1][0] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(best_response_residual(r.distributions, pi, a) < 1e-10);
    CHECK(best_response_residual(pi, pi, a) == doctest::Approx(1.0));
    const auto naive = oracle::jacobi_fixed_point({{1, 0}, {0, 1}}, a, 200);
    CHECK(oracle::l1(naive[0], r.distributions[0].probs()) < 1e-12);
  }

  TEST_CASE("three players at 0.4 share 7/13") {
    const auto pi = deltas(3);
    const AlphaMatrix a = AlphaMatrix::symmetric(3, 0.4);
    const EquilibriumResult r = solve_exact(pi, a);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t x = 0; x < 3; ++x)
        CHECK(std::abs(r.distributions[i][x] - (x == i ? 7.0 / 13.0 : 3.0 / 13.0)) < 1e-12);
  }

  TEST_CASE("solver agrees with fixed point oracle on random instances") {
    std::mt19937_64 gen(2024);
    for (int rep = 0; rep < 200; ++rep) {
      const Instance inst = random_instance(gen);
      const EquilibriumResult exact = solve_exact(inst.pi, inst.alpha);
      const EquilibriumResult it = iterate(inst.pi, inst.alpha);
      REQUIRE(it.converged);
      const Matrix& w = exact.mixture_matrix;
      for (std::size_t i = 0; i < inst.pi.size(); ++i) {
        CHECK(l1_distance(exact.distributions[i], it.distributions[i]) < 1e-9);
        double col = 0.0;
        for (std::size_t j = 0; j < inst.pi.size(); ++j) {
          CHECK(w(j, i) >= -1e-15);
          col += w(j, i);
        }
        CHECK(std::abs(col - 1.0) < 1e-9);
      }
      CHECK(best_response_residual(exact.distributions, inst.pi, inst.alpha) < 1e-10);
    }
  }

  TEST_CASE("iterate: identity stops after the first step") {
    const auto pi = deltas(3);
    const EquilibriumResult r = iterate(pi, AlphaMatrix::identity(3));
    CHECK(r.converged);
    CHECK(r.iterations_used == 1);
    for (std::size_t i = 0; i < 3; ++i) CHECK(r.distributions[i] == pi[i]);
  }

  TEST_CASE("iterate: zero budget returns p0 unconverged") {
    const auto pi = deltas(2);
    const EquilibriumResult r = iterate(pi, AlphaMatrix({{0.5, 0.5}, {0.5, 0.5}}), {}, {0, 0.0});
    CHECK_FALSE(r.converged);
    CHECK(r.iterations_used == 0);
    CHECK(r.distributions[0] == pi[0]);
  }

  TEST_CASE("iterate: error contracts by the Gershgorin bound") {
    const auto pi = deltas(2);
    const AlphaMatrix a({{0.5, 0.5}, {0.5, 0.5}});
    const auto exact = solve_exact(pi, a).distributions;
    const std::vector<oracle::Vec> raw{{1, 0}, {0, 1}};
    double prev = 0.0;
    for (std::size_t i = 0; i < 2; ++i) prev = std::max(prev, oracle::l1(raw[i], exact[i].probs()));
    for (std::size_t t = 1; t < 40; ++t) {
      const auto p = oracle::jacobi_fixed_point(raw, a, t);
      double err = 0.0;
      for (std::size_t i = 0; i < 2; ++i) err = std::max(err, oracle::l1(p[i], exact[i].probs()));
      CHECK(err <= 0.5 * prev + 1e-15);
      prev = err;
    }
  }

  TEST_CASE("Gauss-Seidel order reaches the same point") {
    std::mt19937_64 gen(9);
    for (int rep = 0; rep < 20; ++rep) {
      const Instance inst = random_instance(gen);
      const auto exact = solve_exact(inst.pi, inst.alpha);
      const auto gs = iterate(inst.pi, inst.alpha, {}, {100000, 1e-13, SweepOrder::GaussSeidel});
      for (std::size_t i = 0; i < inst.pi.size(); ++i)
        CHECK(l1_distance(exact.distributions[i], gs.distributions[i]) < 1e-9);
    }
  }

  TEST_CASE("spectral radius bound examples") {
    CHECK(spectral_radius_bound(AlphaMatrix::symmetric(4, 0.9)) == doctest::Approx(0.1));
    CHECK(spectral_radius_bound(AlphaMatrix::identity(3)) == 0.0);
    CHECK(spectral_radius_bound(AlphaMatrix({{0.5, 0.5}, {0.5, 0.5}})) == 0.5);
  }

  TEST_CASE("data-free player cycle is singular") {
    const auto pi = deltas(2);
    const AlphaMatrix a({{0.0, 1.0}, {1.0, 0.0}}, true);
    CHECK_THROWS_AS(solve_exact(pi, a), SingularSystemError);
  }

  TEST_CASE("data-free player follows its peers") {
    const auto pi = deltas(2);
    const AlphaMatrix a({{1.0, 0.0}, {0.0, 1.0}});
    const AlphaMatrix free_rider({{1.0, 0.0}, {1.0, 0.0}}, true);
    const auto r = solve_exact(pi, free_rider);
    CHECK(r.distributions[1][0] == doctest::Approx(1.0));
    (void)a;
  }

  TEST_CASE("json form") {
    const auto r = solve_exact(deltas(2), AlphaMatrix({{0.5, 0.5}, {0.5, 0.5}}));
    const auto j = r.to_json();
    CHECK(j.at("method") == "exact");
    CHECK(j.at("distributions").size() == 2);
    CHECK(j.contains("mixture_matrix"));
  }
}
