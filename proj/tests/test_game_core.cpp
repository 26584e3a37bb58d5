#include <doctest.h>

#include <random>

#include "coopgame/alpha.hpp"
#include "coopgame/distribution.hpp"
#include "coopgame/errors.hpp"
#include "coopgame/space.hpp"
#include "oracles.hpp"

using namespace coopgame;

namespace {
FiniteSpace space_ab() { return FiniteSpace({{"a", 2}, {"b", 3}}); }
}  // namespace

TEST_SUITE("game_core") {
  TEST_CASE("flat index and tuple addressing") {
    const FiniteSpace s = space_ab();
    CHECK(s.total_size() == 6);
    CHECK(s.index_to_tuple(0) == std::vector<std::size_t>{0, 0});
    CHECK(s.index_to_tuple(5) == std::vector<std::size_t>{1, 2});
    const std::vector<std::size_t> t{1, 0};
    CHECK(s.tuple_to_index(t) == 3);
  }

  TEST_CASE("tuple round trip is exhaustive up to 10^4 outcomes") {
    const FiniteSpace s({{"a", 10}, {"b", 7}, {"c", 11}, {"d", 13}});
    REQUIRE(s.total_size() == 10010);
    for (std::size_t k = 0; k < s.total_size(); ++k) REQUIRE(s.tuple_to_index(s.index_to_tuple(k)) == k);
  }

  TEST_CASE("invalid spaces are rejected") {
    CHECK_THROWS_AS(FiniteSpace({{"a", 0}}), Error);
    CHECK_THROWS_AS(FiniteSpace({{"a", 2}, {"a", 3}}), Error);
    CHECK_THROWS_AS(FiniteSpace({{"theta=0.25", 2}}), SchemaError);
    CHECK_THROWS_AS(FiniteSpace({{"", 2}}), SchemaError);
    CHECK_THROWS_AS(FiniteSpace({{std::string(65, 'v'), 2}}), SchemaError);
    const FiniteSpace s = space_ab();
    const std::vector<std::size_t> bad{2, 0};
    CHECK_THROWS_AS(s.tuple_to_index(bad), RangeError);
    CHECK_THROWS_AS(s.index_to_tuple(6), RangeError);
    CHECK_THROWS_AS(s.position("z"), SchemaError);
  }

  TEST_CASE("space json round trip and id") {
    const FiniteSpace s = space_ab();
    const FiniteSpace back = FiniteSpace::from_json(s.to_json());
    CHECK(back == s);
    CHECK(back.id() == s.id());
    CHECK(s.id().size() == 16);
    CHECK(FiniteSpace({{"a", 2}, {"b", 4}}).id() != s.id());
  }

  TEST_CASE("construction normalizes within 1e-12") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> u(0.0, 1e6);
    const FiniteSpace s({{"x", 37}});
    for (int rep = 0; rep < 100; ++rep) {
      std::vector<double> w(37);
      for (auto& x : w) x = u(gen);
      TabularDistribution d(s, w);
      double sum = 0.0;
      for (double p : d.probs()) sum += p;
      CHECK(std::abs(sum - 1.0) < 1e-12);
    }
  }

  TEST_CASE("bad weights are rejected") {
    const FiniteSpace s({{"x", 2}});
    CHECK_THROWS_AS(TabularDistribution(s, {0.0, 0.0}), Error);
    CHECK_THROWS_AS(TabularDistribution(s, {-1.0, 2.0}), Error);
    CHECK_THROWS_AS(TabularDistribution(s, {1.0}), Error);
  }

  TEST_CASE("kl and cross likelihood") {
    const FiniteSpace s({{"x", 2}});
    const TabularDistribution p(s, {0.5, 0.5});
    const TabularDistribution q(s, {0.9, 0.1});
    CHECK(kl_divergence(p, p) == doctest::Approx(0.0));
    // 0.5 ln(0.5/0.9) + 0.5 ln(0.5/0.1)
    CHECK(kl_divergence(p, q) == doctest::Approx(0.5108256237659907).epsilon(1e-12));
    CHECK(std::isinf(kl_divergence(p, TabularDistribution::point_mass(s, 0))));
    CHECK(cross_log_likelihood(p, TabularDistribution::point_mass(s, 0)) == kNegInf);
    CHECK(l1_distance(p, q) == doctest::Approx(0.8));
  }

  TEST_CASE("alpha split examples") {
    const AlphaSplit id = alpha_split(AlphaMatrix::identity(2));
    CHECK(id.own == Matrix::identity(2));
    CHECK(id.peers == Matrix(2, 2, 0.0));

    const AlphaSplit half = alpha_split(AlphaMatrix({{0.5, 0.5}, {0.5, 0.5}}));
    CHECK(half.own(0, 0) == 0.5);
    CHECK(half.own(0, 1) == 0.0);
    CHECK(half.peers(0, 0) == 0.0);
    CHECK(half.peers(1, 0) == 0.5);

    const AlphaMatrix a3({{0.4, 0.3, 0.3}, {0.3, 0.4, 0.3}, {0.3, 0.3, 0.4}});
    const AlphaSplit s3 = alpha_split(a3);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) {
        CHECK(s3.own(i, j) + s3.peers(i, j) == a3(i, j));
        CHECK(s3.own(i, j) == (i == j ? 0.4 : 0.0));
      }
  }

  TEST_CASE("alpha validation") {
    CHECK_THROWS_AS(AlphaMatrix({{0.5, 0.49}, {0.5, 0.5}}), ValidationError);
    CHECK_THROWS_AS(AlphaMatrix({{0.0, 1.0}, {0.5, 0.5}}), ValidationError);
    CHECK_NOTHROW(AlphaMatrix({{0.0, 1.0}, {0.5, 0.5}}, true));
    CHECK_THROWS_AS(AlphaMatrix({{1.5, -0.5}, {0.5, 0.5}}), ValidationError);
    CHECK_THROWS_AS(AlphaMatrix(std::vector<std::vector<double>>{{1.0, 0.0}}), ValidationError);
  }

  TEST_CASE("valid alpha has Gershgorin bound below one") {
    std::mt19937_64 gen(3);
    for (int rep = 0; rep < 200; ++rep) {
      const std::size_t n = 1 + rep % 6;
      const AlphaMatrix a(oracle::random_alpha_rows(gen, n, 1e-3));
      double worst = 0.0;
      for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, 1.0 - a(i, i));
      CHECK(worst < 1.0);
    }
  }

  TEST_CASE("symmetric alpha") {
    const AlphaMatrix a = AlphaMatrix::symmetric(3, 0.4);
    CHECK(a(0, 0) == 0.4);
    CHECK(a(0, 1) == doctest::Approx(0.3));
    CHECK(AlphaMatrix::from_json(a.to_json()) == a);
  }
}
