#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "coopgame/engine.hpp"
#include "coopgame/errors.hpp"

namespace coopgame {

enum class Mode { ExactEquilibrium, Simulate, Heterogeneous, AlphaSweep };

const char* to_string(Mode mode);

struct ConfigIssue {
  std::string pointer;  // JSON pointer into the config document
  std::string message;
};

/// Every problem found in a config, not just the first.
class ConfigError : public ValidationError {
 public:
  explicit ConfigError(std::vector<ConfigIssue> issues);
  const std::vector<ConfigIssue>& issues() const { return issues_; }

 private:
  std::vector<ConfigIssue> issues_;
};

struct SweepSettings {
  std::vector<double> grid;
  std::vector<std::uint64_t> seeds;
};

struct RunConfig {
  Mode mode = Mode::Simulate;
  GameSpec game;
  std::size_t size_cap = 4096;
  std::filesystem::path output_dir = "out";
  std::optional<SweepSettings> sweep;
};

/// Parses and validates a config document. Relative sample-file paths and
/// output_dir resolve against `base_dir`. Throws ConfigError.
RunConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = ".");
RunConfig load_config(const std::filesystem::path& path);

/// One game per sweep grid value: own weight a, (1 - a) split evenly among
/// the peers.
std::vector<GameSpec> sweep_specs(const RunConfig& config);

/// Empirical distribution of a sample file: one outcome per line, either a
/// flat index or a tuple of per-variable values separated by commas or
/// spaces. Blank lines and '#' comments are skipped. `smoothing` is added to
/// every count. Errors name the offending line.
TabularDistribution ingest_samples(const std::filesystem::path& path, const FiniteSpace& space,
                                   double smoothing = 0.0);

}  // namespace coopgame
