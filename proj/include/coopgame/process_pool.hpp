#pragma once

#include <cstdio>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <sys/types.h>

#include "coopgame/engine.hpp"

namespace coopgame {

/// Environment variable holding the first listening port of a multi-process
/// run; player i listens on base + i. Unset means ephemeral ports.
inline constexpr const char* kPortBaseEnv = "COOPGAME_PORT_BASE";

/// One child process per player, started as `<executable> node`. Each child
/// serves its model over TCP and fetches peer samples over TCP; the parent
/// only sends control commands and reads back distributions for metrics.
class ProcessPool final : public PlayerPool {
 public:
  ProcessPool(const GameSpec& spec, const std::filesystem::path& executable);
  ~ProcessPool() override;
  ProcessPool(const ProcessPool&) = delete;
  ProcessPool& operator=(const ProcessPool&) = delete;

  std::size_t size() const override { return children_.size(); }
  RoundStats run_round(const RoundRequest& request) override;
  TabularDistribution distribution(std::size_t player) override;

 private:
  struct Child {
    pid_t pid = -1;
    std::FILE* to = nullptr;
    std::FILE* from = nullptr;
    FiniteSpace space;
  };
  void send(std::size_t player, const nlohmann::json& command);
  nlohmann::json receive(std::size_t player);
  nlohmann::json call(std::size_t player, const nlohmann::json& command);
  void shutdown();

  std::vector<Child> children_;
};

/// Control loop of a player process: line-delimited JSON commands on `in`,
/// one JSON reply line per command on `out`. Returns the process exit code.
int run_node(std::istream& in, std::ostream& out);

}  // namespace coopgame
