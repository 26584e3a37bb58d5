#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

#include "coopgame/config.hpp"
#include "coopgame/errors.hpp"
#include "coopgame/runner.hpp"

using namespace coopgame;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("coopgame_test_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

json two_player(const std::string& mode, std::size_t rounds = 20) {
  return {{"mode", mode},
          {"space", {{"variables", {{{"name", "x"}, {"card", 2}}}}}},
          {"alpha", {{0.5, 0.5}, {0.5, 0.5}}},
          {"rounds", rounds},
          {"master_seed", 4},
          {"defaults", {{"batch_size", 64}, {"step_size", 0.2}}},
          {"players", {{{"target", {1, 0}}}, {{"target", {0, 1}}}}}};
}

std::vector<std::string> issue_pointers(const ConfigError& e) {
  std::vector<std::string> out;
  for (const auto& i : e.issues()) out.push_back(i.pointer);
  return out;
}

int run_cli(const std::string& args) {
  const int status = std::system((std::string(COOPGAME_CLI_PATH) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("minimal single player config") {
    const json doc = {{"space", {{"variables", {{{"name", "x"}, {"card", 3}}}}}},
                      {"players", {{{"target", {1, 1, 2}}}}}};
    const RunConfig c = parse_config(doc);
    CHECK(c.mode == Mode::Simulate);
    CHECK(c.game.schedule.alpha_at(0) == AlphaMatrix::identity(1));
    CHECK(c.game.rounds == 100);
  }

  TEST_CASE("row sum error names the row") {
    json doc = two_player("simulate");
    doc["alpha"] = {{0.5, 0.5}, {0.5, 0.49}};
    try {
      parse_config(doc);
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      REQUIRE(e.issues().size() == 1);
      CHECK(e.issues()[0].pointer == "/alpha/1");
      CHECK(e.issues()[0].message.find("row 1") != std::string::npos);
    }
  }

  TEST_CASE("every problem is reported") {
    json doc = two_player("simulate");
    doc["rounds"] = "many";
    doc["bogus"] = 1;
    doc["players"][1]["batch_size"] = 0;
    try {
      parse_config(doc);
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      const auto ptrs = issue_pointers(e);
      CHECK(std::find(ptrs.begin(), ptrs.end(), "/rounds") != ptrs.end());
      CHECK(std::find(ptrs.begin(), ptrs.end(), "/bogus") != ptrs.end());
      CHECK(std::find(ptrs.begin(), ptrs.end(), "/players/1/batch_size") != ptrs.end());
    }
  }

  TEST_CASE("size cap is enforced") {
    json doc = two_player("simulate");
    doc["space"] = {{"variables", {{{"name", "a"}, {"card", 100000}}, {{"name", "b"}, {"card", 100000}}}}};
    CHECK_THROWS_AS(parse_config(doc), ConfigError);
  }

  TEST_CASE("sweep specs") {
    json doc = two_player("alpha-sweep");
    doc.erase("alpha");
    doc["players"].push_back({{"target", {1, 1}}});
    doc["sweep"] = {{"grid", {0.1, 0.5, 1.0}}, {"seeds", 2}};
    const RunConfig c = parse_config(doc);
    const auto specs = sweep_specs(c);
    REQUIRE(specs.size() == 3);
    const double grid[] = {0.1, 0.5, 1.0};
    for (std::size_t g = 0; g < 3; ++g) {
      const AlphaMatrix& a = specs[g].schedule.alpha_at(0);
      for (std::size_t i = 0; i < 3; ++i) {
        CHECK(a(i, i) == grid[g]);
        double sum = 0.0;
        for (std::size_t j = 0; j < 3; ++j) sum += a(i, j);
        CHECK(std::abs(sum - 1.0) < 1e-12);
        if (i != 0) CHECK(a(i, 0) == doctest::Approx((1 - grid[g]) / 2));
      }
    }
    doc["sweep"]["grid"] = {0.0, 0.5};
    CHECK_THROWS_AS(parse_config(doc), ConfigError);
  }

  TEST_CASE("subsets only in heterogeneous mode") {
    json doc = two_player("simulate");
    doc["space"]["variables"].push_back({{"name", "y"}, {"card", 2}});
    doc["players"] = {{{"variables", {"x"}}, {"target", {1, 0}}}, {{"variables", {"x"}}, {"target", {0, 1}}}};
    CHECK_THROWS_AS(parse_config(doc), ConfigError);
  }

  TEST_CASE("shipped configs validate") {
    for (const auto& entry : fs::directory_iterator(fs::path(COOPGAME_SOURCE_DIR) / "configs"))
      CHECK_NOTHROW(load_config(entry.path()));
  }
}

TEST_SUITE("ingest") {
  const FiniteSpace ab({{"a", 2}, {"b", 3}});

  TEST_CASE("repeated outcome is a point mass") {
    const fs::path f = scratch("ingest") / "s.txt";
    std::ofstream(f) << "# comment\n1,2\n1 2\n\n(1, 2)\n5\n";
    CHECK(ingest_samples(f, ab) == TabularDistribution::point_mass(ab, 5));
  }

  TEST_CASE("empty and malformed files") {
    const fs::path dir = scratch("ingest_bad");
    std::ofstream(dir / "empty.txt") << "# nothing\n";
    CHECK_THROWS_AS(ingest_samples(dir / "empty.txt", ab), ValidationError);
    std::ofstream(dir / "bad.txt") << "0\n1\nfoo\n";
    try {
      ingest_samples(dir / "bad.txt", ab);
      FAIL("expected error");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find(":3") != std::string::npos);
    }
    std::ofstream(dir / "range.txt") << "0,3\n";
    CHECK_THROWS_AS(ingest_samples(dir / "range.txt", ab), Error);
    std::ofstream(dir / "flat.txt") << "6\n";
    CHECK_THROWS_AS(ingest_samples(dir / "flat.txt", ab), Error);
    CHECK_THROWS_AS(ingest_samples(dir / "missing.txt", ab), Error);
  }

  TEST_CASE("large sample file concentrates") {
    const fs::path f = scratch("ingest_big") / "s.txt";
    const TabularDistribution truth(ab, {0.1, 0.2, 0.05, 0.3, 0.25, 0.1});
    const CategoricalSampler sampler(truth);
    Rng rng(3);
    {
      std::ofstream out(f);
      for (Outcome o : sampler.draw(100000, rng)) out << o << '\n';
    }
    CHECK(l1_distance(ingest_samples(f, ab), truth) < 0.02);
    const auto smooth = ingest_samples(f, ab, 1.0);
    CHECK(smooth[0] > 0.0);
  }
}

TEST_SUITE("runner") {
  TEST_CASE("exact mode summary") {
    const fs::path dir = scratch("exact");
    RunOptions opt;
    opt.out_dir = dir;
    run(parse_config(two_player("exact-equilibrium")), opt);
    const json s = json::parse(slurp(dir / "summary.json"));
    const auto p1 = s.at("equilibria").at(0).at("distributions").at(0).get<std::vector<double>>();
    CHECK(std::abs(p1[0] - 2.0 / 3.0) < 1e-10);
    CHECK(std::abs(p1[1] - 1.0 / 3.0) < 1e-10);
    CHECK(fs::exists(dir / "equilibrium.json"));
  }

  TEST_CASE("zero rounds writes the initial state only") {
    const fs::path dir = scratch("zero");
    RunOptions opt;
    opt.out_dir = dir;
    run(parse_config(two_player("simulate", 0)), opt);
    const std::string csv = slurp(dir / "history.csv");
    CHECK(csv.rfind(std::string(kHistoryHeader) + "\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
  }

  TEST_CASE("reruns and multiprocess runs are byte identical") {
    RunOptions a, b, m;
    a.out_dir = scratch("det_a");
    b.out_dir = scratch("det_b");
    m.out_dir = scratch("det_m");
    m.multiprocess = true;
    m.node_executable = COOPGAME_CLI_PATH;
    const RunConfig cfg = parse_config(two_player("simulate", 30));
    run(cfg, a);
    run(cfg, b);
    run(cfg, m);
    const std::string h = slurp(*a.out_dir / "history.csv");
    CHECK(h.size() > 100);
    CHECK(h == slurp(*b.out_dir / "history.csv"));
    CHECK(h == slurp(*m.out_dir / "history.csv"));
  }

  TEST_CASE("sweep outputs") {
    json doc = two_player("alpha-sweep", 10);
    doc.erase("alpha");
    doc["sweep"] = {{"grid", {0.2, 1.0}}, {"seeds", 2}};
    const fs::path dir = scratch("sweep");
    RunOptions opt;
    opt.out_dir = dir;
    run(parse_config(doc), opt);
    const std::string sweep = slurp(dir / "sweep.csv");
    CHECK(sweep.rfind(std::string(kSweepHeader) + "\n", 0) == 0);
    CHECK(std::count(sweep.begin(), sweep.end(), '\n') == 1 + 2 * 2);
    CHECK(fs::exists(dir / "sweep_runs.csv"));
    CHECK(fs::exists(dir / "runs" / "alpha_0.2" / "seed_4" / "history.csv"));
  }

  TEST_CASE("sweep metrics and medians") {
    const FiniteSpace s({{"x", 2}});
    const std::vector<TabularDistribution> pi{TabularDistribution(s, {0.9, 0.1}), TabularDistribution(s, {0.1, 0.9})};
    const auto pts = sweep_metrics(0.5, 1, pi, pi);
    CHECK(pts[0].kl_to_own == 0.0);
    CHECK(pts[0].kl_to_other == doctest::Approx(0.8 * std::log(9.0)));
    CHECK(pts[0].kl_to_pooled == doctest::Approx(0.5 * std::log(0.5 / 0.9) + 0.5 * std::log(0.5 / 0.1)));

    std::vector<SweepPoint> runs;
    for (double v : {3.0, 1.0, 2.0}) runs.push_back({0.5, 0, 0, v, v, v});
    const auto med = sweep_medians(runs);
    REQUIRE(med.size() == 1);
    CHECK(med[0].kl_to_own == 2.0);
    runs.push_back({0.5, 0, 0, std::nan(""), 1.0, 1.0});
    CHECK(std::isnan(sweep_medians(runs)[0].kl_to_own));
  }

  TEST_CASE("error reporting") {
    CHECK(exit_code_for(ValidationError("x")) == 2);
    CHECK(exit_code_for(ConfigError(std::vector<ConfigIssue>{{"/a", "b"}})) == 2);
    CHECK(exit_code_for(NoOverlapError("x")) == 2);
    CHECK(exit_code_for(TransportError("x")) == 4);
    CHECK(exit_code_for(NumericError("x")) == 3);
    CHECK(exit_code_for(std::runtime_error("x")) == 3);
    const json j = error_json(ConfigError(std::vector<ConfigIssue>{{"/alpha/0", "row 0 sums to 0.99"}}));
    CHECK(j.at("error").at("kind") == "validation");
    CHECK(j.at("error").at("exit_code") == 2);
    CHECK(j.at("error").at("issues").at(0).at("pointer") == "/alpha/0");
  }

  TEST_CASE("number formatting") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(2.0 / 3.0) == "0.6666666666666666");
    CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
    CHECK(format_double(std::nan("")) == "nan");
  }

  TEST_CASE("command line exit codes") {
    const fs::path dir = scratch("cli");
    std::ofstream(dir / "good.json") << two_player("exact-equilibrium").dump();
    json bad = two_player("simulate");
    bad["alpha"] = {{0.5, 0.49}, {0.5, 0.5}};
    std::ofstream(dir / "bad.json") << bad.dump();
    CHECK(run_cli("validate " + (dir / "good.json").string()) == 0);
    CHECK(run_cli("solve " + (dir / "good.json").string()) == 0);
    CHECK(run_cli("validate " + (dir / "bad.json").string()) == 2);
    CHECK(run_cli("run " + (dir / "bad.json").string() + " --out " + (dir / "out").string()) == 2);
    CHECK(fs::exists(dir / "out" / "error.json"));
    CHECK(run_cli("run " + (dir / "good.json").string() + " --out " + (dir / "ok").string()) == 0);
  }
}
