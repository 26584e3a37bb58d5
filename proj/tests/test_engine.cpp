#include <doctest.h>

#include <random>

#include "coopgame/engine.hpp"
#include "coopgame/equilibrium.hpp"
#include "coopgame/errors.hpp"
#include "oracles.hpp"

using namespace coopgame;

namespace {

GameSpec delta_game(std::size_t batch, std::size_t rounds, std::uint64_t seed, double step = 0.1) {
  const FiniteSpace s({{"x", 2}});
  GameSpec spec;
  spec.space = s;
  for (std::size_t i = 0; i < 2; ++i) {
    PlayerSpec p;
    p.subset = VariableSubset::all(s);
    p.target = TabularDistribution::point_mass(s, i);
    p.batch_size = batch;
    p.step_size = step;
    spec.players.push_back(p);
  }
  spec.schedule = AlphaSchedule(AlphaMatrix({{0.5, 0.5}, {0.5, 0.5}}));
  spec.rounds = rounds;
  spec.master_seed = seed;
  return spec;
}

GameSpec random_game(std::mt19937_64& gen, std::size_t n, std::size_t k) {
  const FiniteSpace s({{"x", k}});
  GameSpec spec;
  spec.space = s;
  for (std::size_t i = 0; i < n; ++i) {
    PlayerSpec p;
    p.subset = VariableSubset::all(s);
    p.target = TabularDistribution(s, oracle::random_simplex(gen, k));
    spec.players.push_back(p);
  }
  spec.schedule = AlphaSchedule(AlphaMatrix(oracle::random_alpha_rows(gen, n, 0.1)));
  return spec;
}

}  // namespace

TEST_SUITE("engine") {
  TEST_CASE("largest remainder allocation") {
    const std::vector<double> own{1.0, 0.0, 0.0};
    CHECK(allocate(own, 100) == std::vector<std::size_t>{100, 0, 0});
    const std::vector<double> half{0.5, 0.5};
    CHECK(allocate(half, 101) == std::vector<std::size_t>{51, 50});
    const std::vector<double> w{0.4, 0.3, 0.3};
    CHECK(allocate(w, 10) == std::vector<std::size_t>{4, 3, 3});
    const std::vector<double> thirds{1.0 / 3, 1.0 / 3, 1.0 / 3};
    CHECK(allocate(thirds, 100) == std::vector<std::size_t>{34, 33, 33});
  }

  TEST_CASE("mix_batch with an identity row uses only own samples") {
    const FiniteSpace s({{"x", 3}});
    const auto own = TabularDistribution::point_mass(s, 1);
    Rng rng(1);
    std::vector<SampleBatch> peers(3);
    const std::vector<double> row{1.0, 0.0, 0.0};
    const MixedBatch m = mix_batch(own, 0, peers, row, 100, rng);
    CHECK(m.allocation == std::vector<std::size_t>{100, 0, 0});
    CHECK(m.distribution == own);
  }

  TEST_CASE("mix_batch names a short peer") {
    const FiniteSpace s({{"x", 2}});
    Rng rng(1);
    std::vector<SampleBatch> peers(2);
    peers[1].outcomes = {0, 1};
    const std::vector<double> row{0.5, 0.5};
    try {
      mix_batch(TabularDistribution::uniform(s), 0, peers, row, 100, rng);
      FAIL("expected InsufficientSamplesError");
    } catch (const InsufficientSamplesError& e) {
      CHECK(std::string(e.what()).find("1") != std::string::npos);
    }
  }

  TEST_CASE("schedule boundaries") {
    const AlphaMatrix half({{0.5, 0.5}, {0.5, 0.5}});
    const AlphaSchedule single(half);
    CHECK(single.alpha_at(0) == half);
    CHECK(single.alpha_at(12345) == half);

    const AlphaSchedule two({{0, AlphaMatrix::identity(2)}, {100, half}});
    CHECK(two.alpha_at(99) == AlphaMatrix::identity(2));
    CHECK(two.alpha_at(100) == half);

    const AlphaMatrix third({{0.9, 0.1}, {0.2, 0.8}});
    const AlphaSchedule three({{0, AlphaMatrix::identity(2)}, {10, half}, {20, third}});
    CHECK(three.segment_index(0) == 0);
    CHECK(three.segment_index(9) == 0);
    CHECK(three.segment_index(10) == 1);
    CHECK(three.segment_index(19) == 1);
    CHECK(three.segment_index(20) == 2);
    CHECK(three.alpha_at(1000) == third);

    CHECK_THROWS_AS(AlphaSchedule({{5, half}}), ValidationError);
    CHECK_THROWS_AS(AlphaSchedule({{0, half}, {0, half}}), ValidationError);
  }

  TEST_CASE("game validation lists problems") {
    GameSpec spec = delta_game(0, 1, 0);
    spec.players[1].inner_steps = 0;
    try {
      spec.validate();
      FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("batch_size") != std::string::npos);
      CHECK(msg.find("inner_steps") != std::string::npos);
    }
  }

  TEST_CASE("utility examples") {
    std::mt19937_64 gen(1);
    const FiniteSpace s({{"x", 5}});
    std::vector<TabularDistribution> uni(3, TabularDistribution::uniform(s));
    std::vector<std::optional<TabularDistribution>> pi;
    for (int i = 0; i < 3; ++i) pi.emplace_back(TabularDistribution(s, oracle::random_simplex(gen, 5)));
    const AlphaMatrix a(oracle::random_alpha_rows(gen, 3));
    for (std::size_t i = 0; i < 3; ++i) CHECK(utility(i, uni, pi, a) == doctest::Approx(-std::log(5.0)));

    std::vector<TabularDistribution> plain;
    for (auto& p : pi) plain.push_back(*p);
    const auto eq = solve_exact(plain, a).distributions;
    for (std::size_t i = 0; i < 3; ++i) CHECK(utility(i, eq, pi, a) == doctest::Approx(-eq[i].entropy()).epsilon(1e-12));

    std::vector<TabularDistribution> q;
    for (int i = 0; i < 3; ++i) q.emplace_back(s, oracle::random_simplex(gen, 5));
    for (std::size_t i = 0; i < 3; ++i) {
      double want = 0.0;
      for (std::size_t j = 0; j < 3; ++j) {
        const auto& src = j == i ? plain[i] : q[j];
        for (std::size_t x = 0; x < 5; ++x) want += a(i, j) * src[x] * std::log(q[i][x]);
      }
      CHECK(std::abs(utility(i, q, pi, a) - want) < 1e-12);
    }
  }

  TEST_CASE("identity alpha sends no messages") {
    GameSpec spec = delta_game(100, 1, 5);
    spec.schedule = AlphaSchedule(AlphaMatrix::identity(2));
    InProcessPool pool(spec);
    const auto stats = pool.run_round({0, 0, 0, {1.0, 0.0}});
    CHECK(stats.messages == 0);
    CHECK(pool.transport().round_trips() == 0);
  }

  TEST_CASE("single player equals an identity game") {
    GameSpec one = delta_game(64, 10, 8, 0.3);
    one.players.resize(1);
    one.players[0].target = TabularDistribution(one.space, {0.3, 0.7});
    one.schedule = AlphaSchedule(AlphaMatrix::identity(1));
    GameSpec two = delta_game(64, 10, 8, 0.3);
    two.players[0].target = one.players[0].target;
    two.schedule = AlphaSchedule(AlphaMatrix::identity(2));
    two.selection = Selection::RoundRobin;

    InProcessPool p1(one), p2(two);
    for (std::size_t r = 0; r < 10; ++r) {
      p1.run_round({r, 0, 0, {1.0}});
      p2.run_round({r, 0, 0, {1.0, 0.0}});
      CHECK(p1.distribution(0) == p2.distribution(0));
    }
  }

  TEST_CASE("exact mixtures follow the Gauss-Seidel iteration") {
    std::mt19937_64 gen(3);
    GameSpec spec = random_game(gen, 3, 6);
    for (auto& p : spec.players) {
      p.step_size = 1.0;
      p.inner_steps = 1;
    }
    spec.exact_mixtures = true;
    const std::vector<TabularDistribution> start(3, TabularDistribution::uniform(spec.space));
    std::vector<TabularDistribution> pi;
    for (auto& p : spec.players) pi.push_back(*p.target);
    for (std::size_t t = 1; t <= 8; ++t) {
      spec.rounds = t;
      const GameResult g = run_game(spec);
      const EquilibriumResult it =
          iterate(pi, spec.schedule.alpha_at(0), start, {t, 0.0, SweepOrder::GaussSeidel});
      for (std::size_t i = 0; i < 3; ++i) CHECK(l1_distance(g.final_distributions[i], it.distributions[i]) < 1e-12);
    }
  }

  TEST_CASE("identity alpha with large batches recovers own data") {
    std::mt19937_64 gen(4);
    GameSpec spec = random_game(gen, 3, 8);
    spec.schedule = AlphaSchedule(AlphaMatrix::identity(3));
    for (auto& p : spec.players) {
      p.batch_size = 20000;
      p.step_size = 1.0;
    }
    spec.rounds = 3;
    const GameResult g = run_game(spec);
    for (std::size_t i = 0; i < 3; ++i) CHECK(kl_divergence(*spec.players[i].target, g.final_distributions[i]) < 1e-2);
  }

  TEST_CASE("delta game reaches the equilibrium") {
    const GameSpec spec = delta_game(512, 500, 1);
    const GameResult g = run_game(spec);
    CHECK(std::abs(g.final_distributions[0][0] - 2.0 / 3.0) * 2 < 0.05);
    CHECK(std::abs(g.final_distributions[1][1] - 2.0 / 3.0) * 2 < 0.05);
    CHECK(g.history.back().l1_to_eq < 0.05);
  }

  TEST_CASE("history layout") {
    const GameSpec spec = delta_game(32, 4, 1);
    const GameResult g = run_game(spec);
    CHECK(g.history.size() == 2 * 5);
    CHECK(g.history.front().round == 0);
    CHECK(g.history.back().round == 4);
    CHECK(g.references.size() == 1);
    CHECK(g.references[0].method == "closed_form");

    GameSpec none = spec;
    none.rounds = 0;
    CHECK(run_game(none).history.size() == 2);
  }

  TEST_CASE("runs are reproducible") {
    GameSpec spec = delta_game(128, 50, 99);
    spec.selection = Selection::UniformRandom;
    const GameResult a = run_game(spec), b = run_game(spec);
    REQUIRE(a.history.size() == b.history.size());
    for (std::size_t k = 0; k < a.history.size(); ++k) {
      CHECK(a.history[k].kl_to_eq == b.history[k].kl_to_eq);
      CHECK(a.history[k].utility == b.history[k].utility);
    }
    spec.master_seed = 100;
    const GameResult c = run_game(spec);
    CHECK(c.final_distributions[0] != a.final_distributions[0]);
  }

  TEST_CASE("player selection") {
    GameSpec spec = delta_game(8, 1, 7);
    spec.players.push_back(spec.players[0]);
    spec.schedule = AlphaSchedule(AlphaMatrix::symmetric(3, 0.5));
    CHECK(select_players(spec, 0) == std::vector<std::size_t>{0, 1, 2});
    spec.selection = Selection::UniformRandom;
    const auto sel = select_players(spec, 3);
    CHECK(sel.size() == 3);
    CHECK(sel == select_players(spec, 3));
    for (auto p : sel) CHECK(p < 3);
  }

  TEST_CASE("a round leaves other players untouched") {
    std::mt19937_64 gen(6);
    GameSpec spec = random_game(gen, 3, 5);
    InProcessPool pool(spec);
    pool.run_round({0, 0, 1, {0.1, 0.1, 0.8}});
    const auto before0 = pool.node(0).snapshot();
    const auto before2 = pool.node(2).snapshot();
    pool.run_round({0, 1, 1, std::vector<double>(spec.schedule.alpha_at(0).row(1).begin(),
                                                  spec.schedule.alpha_at(0).row(1).end())});
    CHECK(pool.node(0).snapshot() == before0);
    CHECK(pool.node(2).snapshot() == before2);
  }

  TEST_CASE("players started at the equilibrium stay there") {
    const FiniteSpace s({{"x", 4}});
    std::mt19937_64 gen(8);
    GameSpec spec;
    spec.space = s;
    std::vector<TabularDistribution> pi;
    for (int i = 0; i < 3; ++i) pi.emplace_back(s, oracle::random_simplex(gen, 4));
    const AlphaMatrix a = AlphaMatrix::symmetric(3, 0.5);
    const auto eq = solve_exact(pi, a).distributions;
    for (std::size_t i = 0; i < 3; ++i) {
      PlayerSpec p;
      p.subset = VariableSubset::all(s);
      p.target = pi[i];
      p.batch_size = 4096;
      p.step_size = 0.1;
      p.model = {{"family", "tabular"},
                 {"init", std::vector<double>(eq[i].probs().begin(), eq[i].probs().end())}};
      spec.players.push_back(p);
    }
    spec.schedule = AlphaSchedule(a);
    spec.rounds = 200;
    spec.master_seed = 5;
    double worst = 0.0;
    RunCallbacks cb;
    cb.on_row = [&](const HistoryRow& r) { worst = std::max(worst, r.l1_to_eq); };
    run_game(spec, cb);
    CHECK(worst < 0.02);
  }

  TEST_CASE("data-free player") {
    const FiniteSpace s({{"x", 2}});
    GameSpec spec = delta_game(256, 100, 2);
    spec.players[1].target.reset();
    spec.schedule = AlphaSchedule(AlphaMatrix({{1.0, 0.0}, {1.0, 0.0}}, true));
    const GameResult g = run_game(spec);
    CHECK(g.final_distributions[1][0] > 0.95);
    CHECK(std::isnan(g.history.back().own_loglik));

    spec.schedule = AlphaSchedule(AlphaMatrix({{1.0, 0.0}, {0.5, 0.5}}, true));
    CHECK_THROWS_AS(run_game(spec), ValidationError);
  }

  TEST_CASE("node config round trip") {
    const GameSpec spec = delta_game(77, 3, 9);
    const NodeConfig c = node_config(spec, 1);
    const NodeConfig back = NodeConfig::from_json(c.to_json());
    CHECK(back.index == 1);
    CHECK(back.batch_size == 77);
    CHECK(back.space == spec.space);
    CHECK(*back.target == *spec.players[1].target);
    CHECK(back.master_seed == 9);
  }
}
