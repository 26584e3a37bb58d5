#pragma once

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "coopgame/config.hpp"
#include "coopgame/engine.hpp"

namespace coopgame {

struct RunOptions {
  std::optional<std::filesystem::path> out_dir;
  std::optional<std::uint64_t> seed;
  bool multiprocess = false;
  bool parallel_sweep = false;
  /// Binary started for each player in multiprocess mode.
  std::filesystem::path node_executable = "/proc/self/exe";
};

struct SweepPoint {
  double alpha = 0.0;
  std::uint64_t seed = 0;
  std::size_t player = 0;
  double kl_to_own = 0.0;
  double kl_to_other = 0.0;
  double kl_to_pooled = 0.0;
};

/// Executes a validated config and writes its artifacts. Returns the output
/// directory. Throws on any failure.
std::filesystem::path run(const RunConfig& config, const RunOptions& options = {});

/// Runs one game of any in-process or multiprocess kind with history rows
/// streamed to `history_csv` (and `overlap_csv` when given).
GameResult run_to_files(const GameSpec& spec, bool heterogeneous, const RunOptions& options,
                        const std::filesystem::path& history_csv,
                        const std::optional<std::filesystem::path>& overlap_csv = std::nullopt);

/// Sweep metrics of the final models: KL(pi_i || q_i), KL(mean of the other
/// pi || q_i) and KL(mean of all pi || q_i), in nats.
std::vector<SweepPoint> sweep_metrics(double alpha, std::uint64_t seed, std::span<const TabularDistribution> pi,
                                      std::span<const TabularDistribution> learned);

/// Median per (alpha, player) over seeds; NaN when any input is NaN.
std::vector<SweepPoint> sweep_medians(std::span<const SweepPoint> runs);

/// 0 success, 2 validation, 3 runtime, 4 transport.
int exit_code_for(const std::exception& e);
nlohmann::json error_json(const std::exception& e);

/// Shortest round-trip decimal form; "inf", "-inf" and "nan" for non-finite.
std::string format_double(double v);

inline constexpr const char* kHistoryHeader = "round,player,kl_to_eq,l1_to_eq,own_loglik,utility";
inline constexpr const char* kOverlapHeader = "round,player_a,player_b,l1_overlap";
inline constexpr const char* kSweepHeader = "alpha,player,kl_to_own,kl_to_other,kl_to_pooled";
inline constexpr const char* kSweepRunsHeader = "alpha,seed,player,kl_to_own,kl_to_other,kl_to_pooled";

}  // namespace coopgame
