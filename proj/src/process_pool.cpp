#include "coopgame/process_pool.hpp"

#include <fcntl.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <iostream>
#include <memory>

#include "coopgame/errors.hpp"

extern char** environ;

namespace coopgame {

using nlohmann::json;

namespace {

[[noreturn]] void rethrow_remote(const std::string& kind, const std::string& message) {
  if (kind == "transport") throw TransportError(message);
  if (kind == "validation") throw ValidationError(message);
  if (kind == "schema") throw SchemaError(message);
  if (kind == "range") throw RangeError(message);
  if (kind == "numeric") throw NumericError(message);
  if (kind == "singular_system") throw SingularSystemError(message);
  if (kind == "insufficient_samples") throw InsufficientSamplesError(message);
  if (kind == "no_overlap") throw NoOverlapError(message);
  if (kind == "zero_support") throw ZeroSupportError(message);
  throw std::runtime_error(message);
}

std::optional<std::uint16_t> port_base() {
  const char* env = std::getenv(kPortBaseEnv);
  if (!env || !*env) return std::nullopt;
  char* end = nullptr;
  const unsigned long v = std::strtoul(env, &end, 10);
  if (*end != '\0' || v == 0 || v > 65535) throw ValidationError(std::string(kPortBaseEnv) + " is not a port number");
  return static_cast<std::uint16_t>(v);
}

}  // namespace

// --- parent side ----------------------------------------------------------

ProcessPool::ProcessPool(const GameSpec& spec, const std::filesystem::path& executable) {
  if (spec.exact_mixtures) throw ValidationError("exact mixtures are not available in multiprocess mode");
  ::signal(SIGPIPE, SIG_IGN);
  std::error_code ec;
  std::filesystem::path exe = std::filesystem::read_symlink(executable, ec);
  if (ec) exe = executable;
  const std::string exe_str = exe.string();
  const auto base = port_base();
  const std::size_t n = spec.n_players();

  try {
    for (std::size_t i = 0; i < n; ++i) {
      int to_child[2], from_child[2];
      if (::pipe2(to_child, O_CLOEXEC) != 0 || ::pipe2(from_child, O_CLOEXEC) != 0)
        throw TransportError(std::string("pipe: ") + std::strerror(errno));
      posix_spawn_file_actions_t actions;
      posix_spawn_file_actions_init(&actions);
      posix_spawn_file_actions_adddup2(&actions, to_child[0], STDIN_FILENO);
      posix_spawn_file_actions_adddup2(&actions, from_child[1], STDOUT_FILENO);
      for (int fd : {to_child[0], to_child[1], from_child[0], from_child[1]})
        posix_spawn_file_actions_addclose(&actions, fd);
      std::string arg0 = exe_str, arg1 = "node";
      char* argv[] = {arg0.data(), arg1.data(), nullptr};
      pid_t pid = -1;
      const int rc = ::posix_spawn(&pid, exe_str.c_str(), &actions, nullptr, argv, environ);
      posix_spawn_file_actions_destroy(&actions);
      ::close(to_child[0]);
      ::close(from_child[1]);
      if (rc != 0) {
        ::close(to_child[1]);
        ::close(from_child[0]);
        throw TransportError("cannot start player process '" + exe_str + "': " + std::strerror(rc));
      }
      Child child;
      child.pid = pid;
      child.to = ::fdopen(to_child[1], "w");
      child.from = ::fdopen(from_child[0], "r");
      children_.push_back(child);
    }

    for (std::size_t i = 0; i < n; ++i) {
      const NodeConfig cfg = node_config(spec, i);
      children_[i].space = cfg.space;
      send(i, {{"cmd", "init"}, {"config", cfg.to_json()}, {"port", base ? *base + i : 0}});
    }
    json endpoints = json::array();
    for (std::size_t i = 0; i < n; ++i) {
      const json reply = receive(i);
      endpoints.push_back({{"player", i}, {"host", "127.0.0.1"}, {"port", reply.at("port")}});
    }
    for (std::size_t i = 0; i < n; ++i) send(i, {{"cmd", "peers"}, {"endpoints", endpoints}});
    for (std::size_t i = 0; i < n; ++i) receive(i);
  } catch (...) {
    shutdown();
    throw;
  }
}

ProcessPool::~ProcessPool() { shutdown(); }

void ProcessPool::shutdown() {
  for (auto& c : children_) {
    if (c.to) {
      std::fputs("{\"cmd\":\"exit\"}\n", c.to);
      std::fclose(c.to);
      c.to = nullptr;
    }
  }
  for (auto& c : children_) {
    if (c.from) {
      std::fclose(c.from);
      c.from = nullptr;
    }
    if (c.pid > 0) {
      int status = 0;
      ::waitpid(c.pid, &status, 0);
      c.pid = -1;
    }
  }
}

void ProcessPool::send(std::size_t player, const json& command) {
  Child& c = children_.at(player);
  const std::string line = command.dump() + "\n";
  if (!c.to || std::fputs(line.c_str(), c.to) < 0 || std::fflush(c.to) != 0)
    throw TransportError("player " + std::to_string(player) + " process is gone");
}

json ProcessPool::receive(std::size_t player) {
  Child& c = children_.at(player);
  std::string line;
  for (int ch; c.from && (ch = std::fgetc(c.from)) != EOF;) {
    if (ch == '\n') break;
    line.push_back(static_cast<char>(ch));
  }
  if (line.empty()) throw TransportError("player " + std::to_string(player) + " process exited unexpectedly");
  json reply = json::parse(line, nullptr, false);
  if (reply.is_discarded() || !reply.is_object() || !reply.contains("ok"))
    throw TransportError("player " + std::to_string(player) + " process sent a malformed reply");
  if (!reply.at("ok").get<bool>())
    rethrow_remote(reply.value("kind", "runtime"), reply.value("message", "player process failed"));
  return reply;
}

json ProcessPool::call(std::size_t player, const json& command) {
  send(player, command);
  return receive(player);
}

RoundStats ProcessPool::run_round(const RoundRequest& request) {
  const json reply = call(request.player, {{"cmd", "round"},
                                           {"round", request.round},
                                           {"slot", request.slot},
                                           {"alpha_row", request.alpha_row}});
  return {reply.at("messages").get<std::size_t>(), reply.at("fallbacks").get<std::size_t>()};
}

TabularDistribution ProcessPool::distribution(std::size_t player) {
  const json reply = call(player, {{"cmd", "distribution"}});
  return TabularDistribution::from_normalized(children_.at(player).space,
                                              reply.at("probs").get<std::vector<double>>());
}

// --- child side -----------------------------------------------------------

int run_node(std::istream& in, std::ostream& out) {
  // A parent that dies mid-write must not kill us with SIGPIPE.
  ::signal(SIGPIPE, SIG_IGN);

  std::unique_ptr<PlayerNode> node;
  auto directory = std::make_shared<ServiceDirectory>();
  std::unique_ptr<SocketServer> server;
  std::unique_ptr<SocketTransport> transport;

  auto reply = [&](json j) { out << j.dump() << '\n' << std::flush; };

  std::string line;
  while (std::getline(in, line)) {
    try {
      const json cmd = json::parse(line);
      const std::string what = cmd.at("cmd").get<std::string>();
      if (what == "init") {
        node = std::make_unique<PlayerNode>(NodeConfig::from_json(cmd.at("config")), nullptr);
        const auto& cfg = node->config();
        directory->add(std::make_shared<NodeService>(cfg.index, cfg.space, node->handle()));
        server = std::make_unique<SocketServer>(directory, "127.0.0.1", cmd.at("port").get<std::uint16_t>());
        reply({{"ok", true}, {"port", server->port()}});
      } else if (what == "peers") {
        if (!node) throw ValidationError("peers before init");
        std::vector<NodeEndpoint> endpoints;
        for (const auto& e : cmd.at("endpoints")) {
          NodeEndpoint ep;
          ep.player = e.at("player").get<std::uint64_t>();
          ep.kind = NodeEndpoint::Kind::Socket;
          ep.host = e.at("host").get<std::string>();
          ep.port = e.at("port").get<std::uint16_t>();
          if (ep.player != node->config().index) endpoints.push_back(std::move(ep));
        }
        transport = std::make_unique<SocketTransport>(std::move(endpoints));
        node->set_transport(transport.get());
        node->discover_peers();
        reply({{"ok", true}});
      } else if (what == "round") {
        if (!node) throw ValidationError("round before init");
        const auto row = cmd.at("alpha_row").get<std::vector<double>>();
        const RoundStats stats =
            node->run_round(cmd.at("round").get<std::size_t>(), cmd.at("slot").get<std::size_t>(), row);
        reply({{"ok", true}, {"messages", stats.messages}, {"fallbacks", stats.fallbacks}});
      } else if (what == "distribution") {
        if (!node) throw ValidationError("distribution before init");
        const auto d = node->snapshot()->distribution();
        reply({{"ok", true}, {"probs", std::vector<double>(d.probs().begin(), d.probs().end())}});
      } else if (what == "exit") {
        break;
      } else {
        throw SchemaError("unknown command '" + what + "'");
      }
    } catch (const Error& e) {
      reply({{"ok", false}, {"kind", e.kind()}, {"message", e.what()}});
    } catch (const std::exception& e) {
      reply({{"ok", false}, {"kind", "runtime"}, {"message", e.what()}});
    }
  }
  if (server) server->stop();
  return 0;
}

}  // namespace coopgame
