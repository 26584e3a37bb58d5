#include "coopgame/runner.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <future>
#include <limits>
#include <map>
#include <thread>

#include "coopgame/equilibrium.hpp"
#include "coopgame/errors.hpp"
#include "coopgame/process_pool.hpp"

namespace coopgame {

using nlohmann::json;
namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) return "nan";
  return std::string(buf, end);
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const TransportError*>(&e)) return 4;
  if (dynamic_cast<const ValidationError*>(&e) || dynamic_cast<const SchemaError*>(&e) ||
      dynamic_cast<const RangeError*>(&e) || dynamic_cast<const NoOverlapError*>(&e))
    return 2;
  return 3;
}

json error_json(const std::exception& e) {
  json err = {{"kind", "runtime"}, {"message", e.what()}, {"exit_code", exit_code_for(e)}};
  if (const auto* ce = dynamic_cast<const Error*>(&e)) err["kind"] = ce->kind();
  if (const auto* ce = dynamic_cast<const ConfigError*>(&e)) {
    json issues = json::array();
    for (const auto& i : ce->issues()) issues.push_back({{"pointer", i.pointer}, {"message", i.message}});
    err["issues"] = std::move(issues);
  }
  return {{"error", std::move(err)}};
}

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  return out;
}

void write_json(const fs::path& path, const json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

json probs_json(const TabularDistribution& d) { return std::vector<double>(d.probs().begin(), d.probs().end()); }

// JSON has no inf or NaN; those are written as null.
json number_json(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string history_line(const HistoryRow& r) {
  return std::to_string(r.round) + "," + std::to_string(r.player) + "," + format_double(r.kl_to_eq) + "," +
         format_double(r.l1_to_eq) + "," + format_double(r.own_loglik) + "," + format_double(r.utility) + "\n";
}

json schedule_json(const AlphaSchedule& schedule) {
  json out = json::array();
  for (const auto& [from, alpha] : schedule.segments()) out.push_back({{"from_round", from}, {"alpha", alpha.to_json()}});
  return out;
}

json game_summary(const GameSpec& spec, const GameResult& result, const char* mode) {
  json refs = json::array();
  for (const auto& r : result.references) {
    json dists = json::array();
    for (const auto& d : r.distributions) dists.push_back(probs_json(d));
    refs.push_back({{"from_round", r.start_round}, {"method", r.method}, {"alpha", r.alpha.to_json()},
                    {"distributions", std::move(dists)}});
  }
  json final_rows = json::array();
  const std::size_t n = spec.n_players();
  for (std::size_t i = 0; i < n; ++i) {
    const HistoryRow& row = result.history[result.history.size() - n + i];
    final_rows.push_back({{"player", i},
                          {"distribution", probs_json(result.final_distributions[i])},
                          {"kl_to_eq_nats", number_json(row.kl_to_eq)},
                          {"l1_to_eq", number_json(row.l1_to_eq)},
                          {"own_loglik_nats", number_json(row.own_loglik)},
                          {"utility_nats", number_json(row.utility)}});
  }
  return {{"mode", mode},
          {"master_seed", spec.master_seed},
          {"rounds", spec.rounds},
          {"player_selection", spec.selection == Selection::RoundRobin ? "round-robin" : "uniform-random"},
          {"alpha_schedule", schedule_json(spec.schedule)},
          {"references", std::move(refs)},
          {"final", std::move(final_rows)},
          {"peer_requests", result.messages},
          {"completion_fallbacks", result.fallbacks}};
}

std::unique_ptr<PlayerPool> make_pool(const GameSpec& spec, const RunOptions& options) {
  if (options.multiprocess) return std::make_unique<ProcessPool>(spec, options.node_executable);
  return std::make_unique<InProcessPool>(spec);
}

}  // namespace

GameResult run_to_files(const GameSpec& spec, bool heterogeneous, const RunOptions& options,
                        const fs::path& history_csv, const std::optional<fs::path>& overlap_csv) {
  auto history = open_out(history_csv);
  history << kHistoryHeader << '\n';
  std::optional<std::ofstream> overlap;
  if (overlap_csv) {
    overlap.emplace(open_out(*overlap_csv));
    *overlap << kOverlapHeader << '\n';
  }
  RunCallbacks callbacks;
  callbacks.on_row = [&](const HistoryRow& r) { history << history_line(r); };
  if (overlap)
    callbacks.on_overlap = [&](const OverlapRow& r) {
      *overlap << r.round << ',' << r.player_a << ',' << r.player_b << ',' << format_double(r.l1) << '\n';
    };
  spec.validate();
  auto pool = make_pool(spec, options);
  GameResult result = heterogeneous ? run_heterogeneous_game(spec, *pool, callbacks) : run_game(spec, *pool, callbacks);
  history.flush();
  if (!history) throw std::runtime_error("failed writing '" + history_csv.string() + "'");
  return result;
}

std::vector<SweepPoint> sweep_metrics(double alpha, std::uint64_t seed, std::span<const TabularDistribution> pi,
                                      std::span<const TabularDistribution> learned) {
  const std::size_t n = pi.size();
  if (learned.size() != n) throw SchemaError("sweep metrics need one learned distribution per player");
  const std::vector<double> all_w(n, 1.0 / static_cast<double>(n));
  const TabularDistribution pooled = mixture(pi, all_w);
  std::vector<SweepPoint> out;
  for (std::size_t i = 0; i < n; ++i) {
    SweepPoint p{alpha, seed, i, kl_divergence(pi[i], learned[i]), std::numeric_limits<double>::quiet_NaN(),
                 kl_divergence(pooled, learned[i])};
    if (n > 1) {
      std::vector<double> w(n, 1.0 / static_cast<double>(n - 1));
      w[i] = 0.0;
      p.kl_to_other = kl_divergence(mixture(pi, w), learned[i]);
    }
    out.push_back(p);
  }
  return out;
}

std::vector<SweepPoint> sweep_medians(std::span<const SweepPoint> runs) {
  std::map<std::pair<double, std::size_t>, std::vector<const SweepPoint*>> groups;
  std::vector<std::pair<double, std::size_t>> order;
  for (const auto& r : runs) {
    auto key = std::make_pair(r.alpha, r.player);
    if (!groups.count(key)) order.push_back(key);
    groups[key].push_back(&r);
  }
  auto median = [](std::vector<double> v) {
    if (std::any_of(v.begin(), v.end(), [](double x) { return std::isnan(x); }))
      return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    if (v.size() % 2 == 1) return v[m];
    if (std::isinf(v[m - 1]) || std::isinf(v[m])) return v[m - 1] == v[m] ? v[m] : (v[m - 1] + v[m]);
    return 0.5 * (v[m - 1] + v[m]);
  };
  std::vector<SweepPoint> out;
  for (const auto& key : order) {
    const auto& g = groups[key];
    std::vector<double> own, other, pooled;
    for (const auto* p : g) {
      own.push_back(p->kl_to_own);
      other.push_back(p->kl_to_other);
      pooled.push_back(p->kl_to_pooled);
    }
    out.push_back({key.first, 0, key.second, median(own), median(other), median(pooled)});
  }
  return out;
}

namespace {

void run_simulation(const RunConfig& config, const RunOptions& options, const fs::path& dir, bool heterogeneous) {
  const GameResult result =
      run_to_files(config.game, heterogeneous, options, dir / "history.csv",
                   heterogeneous ? std::optional<fs::path>(dir / "overlap.csv") : std::nullopt);
  write_json(dir / "summary.json", game_summary(config.game, result, to_string(config.mode)));
}

void run_exact(const RunConfig& config, const fs::path& dir) {
  const GameSpec& spec = config.game;
  std::vector<TabularDistribution> pi;
  for (const auto& p : spec.players) pi.push_back(*p.target);
  json segments = json::array();
  for (const auto& [from, alpha] : spec.schedule.segments()) {
    const EquilibriumResult eq = solve_exact(pi, alpha);
    json dists = json::array();
    for (const auto& d : eq.distributions) dists.push_back(probs_json(d));
    segments.push_back({{"from_round", from},
                        {"alpha", alpha.to_json()},
                        {"distributions", std::move(dists)},
                        {"mixture_matrix", eq.to_json().at("mixture_matrix")},
                        {"residual", eq.residual},
                        {"spectral_radius_bound", spectral_radius_bound(alpha)}});
    if (from == 0) write_json(dir / "equilibrium.json", eq.to_json());
  }
  write_json(dir / "summary.json", {{"mode", to_string(config.mode)}, {"equilibria", std::move(segments)}});
}

std::string alpha_label(double a) { return "alpha_" + format_double(a); }

void run_sweep(const RunConfig& config, const RunOptions& options, const fs::path& dir) {
  const auto specs = sweep_specs(config);
  const auto& sweep = *config.sweep;
  std::vector<TabularDistribution> pi;
  for (const auto& p : config.game.players) pi.push_back(*p.target);

  struct Task {
    std::size_t grid_index;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (std::size_t g = 0; g < specs.size(); ++g)
    for (std::uint64_t s : sweep.seeds) tasks.push_back({g, s});

  auto run_task = [&](const Task& t) {
    GameSpec spec = specs[t.grid_index];
    spec.master_seed = t.seed;
    const fs::path run_dir = dir / "runs" / alpha_label(sweep.grid[t.grid_index]) / ("seed_" + std::to_string(t.seed));
    fs::create_directories(run_dir);
    const GameResult result = run_to_files(spec, false, options, run_dir / "history.csv");
    write_json(run_dir / "summary.json", game_summary(spec, result, "simulate"));
    return sweep_metrics(sweep.grid[t.grid_index], t.seed, pi, result.final_distributions);
  };

  std::vector<std::vector<SweepPoint>> per_task(tasks.size());
  if (options.parallel_sweep) {
    const std::size_t width = std::max(1u, std::thread::hardware_concurrency());
    for (std::size_t start = 0; start < tasks.size(); start += width) {
      std::vector<std::future<std::vector<SweepPoint>>> running;
      for (std::size_t k = start; k < std::min(tasks.size(), start + width); ++k)
        running.push_back(std::async(std::launch::async, run_task, tasks[k]));
      for (std::size_t k = 0; k < running.size(); ++k) per_task[start + k] = running[k].get();
    }
  } else {
    for (std::size_t k = 0; k < tasks.size(); ++k) per_task[k] = run_task(tasks[k]);
  }

  std::vector<SweepPoint> runs;
  for (const auto& v : per_task) runs.insert(runs.end(), v.begin(), v.end());

  auto runs_csv = open_out(dir / "sweep_runs.csv");
  runs_csv << kSweepRunsHeader << '\n';
  for (const auto& p : runs)
    runs_csv << format_double(p.alpha) << ',' << p.seed << ',' << p.player << ',' << format_double(p.kl_to_own) << ','
             << format_double(p.kl_to_other) << ',' << format_double(p.kl_to_pooled) << '\n';

  const auto medians = sweep_medians(runs);
  auto sweep_csv = open_out(dir / "sweep.csv");
  sweep_csv << kSweepHeader << '\n';
  json median_rows = json::array();
  for (const auto& p : medians) {
    sweep_csv << format_double(p.alpha) << ',' << p.player << ',' << format_double(p.kl_to_own) << ','
              << format_double(p.kl_to_other) << ',' << format_double(p.kl_to_pooled) << '\n';
    median_rows.push_back({{"alpha", p.alpha},
                           {"player", p.player},
                           {"kl_to_own_nats", number_json(p.kl_to_own)},
                           {"kl_to_other_nats", number_json(p.kl_to_other)},
                           {"kl_to_pooled_nats", number_json(p.kl_to_pooled)}});
  }
  write_json(dir / "summary.json", {{"mode", to_string(config.mode)},
                                    {"grid", sweep.grid},
                                    {"seeds", sweep.seeds},
                                    {"rounds", config.game.rounds},
                                    {"medians", std::move(median_rows)}});
}

}  // namespace

fs::path run(const RunConfig& input, const RunOptions& options) {
  RunConfig config = input;
  if (options.seed) config.game.master_seed = *options.seed;
  if (options.seed && config.sweep) {
    for (std::size_t k = 0; k < config.sweep->seeds.size(); ++k) config.sweep->seeds[k] = *options.seed + k;
  }
  const fs::path dir = options.out_dir ? *options.out_dir : config.output_dir;
  fs::create_directories(dir);

  switch (config.mode) {
    case Mode::ExactEquilibrium:
      run_exact(config, dir);
      break;
    case Mode::Simulate:
      run_simulation(config, options, dir, false);
      break;
    case Mode::Heterogeneous:
      run_simulation(config, options, dir, true);
      break;
    case Mode::AlphaSweep:
      run_sweep(config, options, dir);
      break;
  }
  return dir;
}

}  // namespace coopgame
