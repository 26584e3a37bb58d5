#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "coopgame/config.hpp"
#include "coopgame/equilibrium.hpp"
#include "coopgame/process_pool.hpp"
#include "coopgame/runner.hpp"

namespace fs = std::filesystem;
using namespace coopgame;

namespace {

int report(const std::exception& e, const std::optional<fs::path>& dir) {
  const auto err = error_json(e);
  std::cerr << err.dump() << '\n';
  if (dir) {
    std::error_code ec;
    fs::create_directories(*dir, ec);
    std::ofstream out(*dir / "error.json");
    if (out) out << err.dump(2) << '\n';
  }
  return exit_code_for(e);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cooperative game learning of generative models"};
  app.require_subcommand(1);

  std::string config_path;
  RunOptions options;
  std::string out_dir;
  std::uint64_t seed = 0;

  auto* run_cmd = app.add_subcommand("run", "Run a config and write its artifacts");
  run_cmd->add_option("config", config_path, "Config JSON file")->required();
  auto* out_opt = run_cmd->add_option("--out", out_dir, "Output directory (overrides output_dir)");
  auto* seed_opt = run_cmd->add_option("--seed", seed, "Master seed (overrides master_seed)");
  run_cmd->add_flag("--multiprocess", options.multiprocess, "One process per player, samples over TCP");
  run_cmd->add_flag("--parallel-sweep", options.parallel_sweep, "Run sweep points concurrently");

  auto* solve_cmd = app.add_subcommand("solve", "Print the exact equilibrium of a config");
  solve_cmd->add_option("config", config_path, "Config JSON file")->required();

  auto* validate_cmd = app.add_subcommand("validate", "Check a config and list every problem");
  validate_cmd->add_option("config", config_path, "Config JSON file")->required();

  auto* node_cmd = app.add_subcommand("node", "Player process (started by run --multiprocess)");
  node_cmd->group("");

  CLI11_PARSE(app, argc, argv);

  if (*node_cmd) return run_node(std::cin, std::cout);

  std::optional<fs::path> error_dir;
  try {
    const RunConfig config = load_config(config_path);
    if (*validate_cmd) {
      std::cout << nlohmann::json{{"valid", true}, {"mode", to_string(config.mode)}}.dump() << '\n';
      return 0;
    }
    if (*solve_cmd) {
      std::vector<TabularDistribution> pi;
      for (std::size_t i = 0; i < config.game.n_players(); ++i) {
        const auto& p = config.game.players[i];
        if (!p.target) throw ValidationError("player " + std::to_string(i) + " has no data");
        if (!(p.subset.space() == config.game.space))
          throw ValidationError("the closed form needs every player on the full collection");
        pi.push_back(*p.target);
      }
      std::cout << solve_exact(pi, config.game.schedule.alpha_at(0)).to_json().dump(2) << '\n';
      return 0;
    }
    if (*out_opt) options.out_dir = out_dir;
    if (*seed_opt) options.seed = seed;
    error_dir = options.out_dir ? *options.out_dir : config.output_dir;
    const fs::path dir = run(config, options);
    std::cout << nlohmann::json{{"ok", true}, {"output_dir", dir.string()}}.dump() << '\n';
    return 0;
  } catch (const std::exception& e) {
    if (!error_dir && *out_opt) error_dir = out_dir;
    return report(e, error_dir);
  }
}
