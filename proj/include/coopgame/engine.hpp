#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "coopgame/alpha.hpp"
#include "coopgame/distribution.hpp"
#include "coopgame/model.hpp"
#include "coopgame/subset.hpp"
#include "coopgame/transport.hpp"

namespace coopgame {

enum class Decay { Constant, InvSqrt };
enum class Selection { RoundRobin, UniformRandom };

struct PlayerSpec {
  /// Variables this player models; all of them for a homogeneous game.
  VariableSubset subset;
  /// Private data pi_i over subset.space(). May be absent only for a player
  /// whose own weight is zero in every schedule segment.
  std::optional<TabularDistribution> target;
  nlohmann::json model = {{"family", "tabular"}};
  std::size_t batch_size = 256;
  std::size_t inner_steps = 8;
  double step_size = 1.0;
  Decay decay = Decay::Constant;
};

/// Piecewise-constant alpha over rounds. Thresholds start at 0 and strictly
/// increase; the matrix of the last threshold <= round applies.
class AlphaSchedule {
 public:
  AlphaSchedule() = default;
  explicit AlphaSchedule(AlphaMatrix constant);
  explicit AlphaSchedule(std::vector<std::pair<std::size_t, AlphaMatrix>> segments);

  const AlphaMatrix& alpha_at(std::size_t round) const;
  std::size_t segment_index(std::size_t round) const;
  const std::vector<std::pair<std::size_t, AlphaMatrix>>& segments() const { return segments_; }

 private:
  std::vector<std::pair<std::size_t, AlphaMatrix>> segments_;
};

struct GameSpec {
  FiniteSpace space;
  std::vector<PlayerSpec> players;
  AlphaSchedule schedule;
  std::size_t rounds = 1;
  Selection selection = Selection::RoundRobin;
  std::uint64_t master_seed = 0;
  /// Replace sampled batches by the exact alpha-mixtures of pi and the peer
  /// distributions. Removes sampling noise; used to compare against iterate().
  bool exact_mixtures = false;

  std::size_t n_players() const { return players.size(); }
  /// Throws ValidationError listing every problem found.
  void validate() const;
};

/// Counts per source by largest-remainder rounding of weights * total. Ties
/// in the fractional part go to the lower index.
std::vector<std::size_t> allocate(std::span<const double> weights, std::size_t total);

struct MixedBatch {
  TabularDistribution distribution;
  std::vector<std::size_t> allocation;
};

/// Pooled empirical distribution of round(alpha_row * batch_size) samples:
/// own draws from `own`, peer j's share taken from the front of peers[j].
/// peers[own_index] is ignored. Throws InsufficientSamplesError naming the
/// peer whose batch is too short.
MixedBatch mix_batch(const TabularDistribution& own, std::size_t own_index, std::span<const SampleBatch> peers,
                     std::span<const double> alpha_row, std::size_t batch_size, Rng& rng);

/// L(theta_i) = alpha_ii sum pi_i log p_i + sum_{j != i} alpha_ij sum p_j log p_i,
/// with each peer term evaluated on the variables the two players share.
/// Terms with zero weight are skipped; kNegInf on support mismatch.
double utility(std::size_t player, std::span<const TabularDistribution> dists,
               std::span<const std::optional<TabularDistribution>> pi, const AlphaMatrix& alpha);

// ---------------------------------------------------------------------------
// Per-player execution

/// Everything one player knows: its own data and settings, never a peer's.
struct NodeConfig {
  std::size_t index = 0;
  std::size_t n_players = 1;
  FiniteSpace space;
  std::optional<TabularDistribution> target;
  nlohmann::json model;
  std::size_t batch_size = 256;
  std::size_t inner_steps = 8;
  double step_size = 1.0;
  Decay decay = Decay::Constant;
  std::uint64_t master_seed = 0;

  nlohmann::json to_json() const;
  static NodeConfig from_json(const nlohmann::json& j);
};

NodeConfig node_config(const GameSpec& spec, std::size_t player);

struct RoundStats {
  std::size_t messages = 0;
  std::size_t fallbacks = 0;
};

/// One learning player. Owns its model handle; reaches peers only through a
/// Transport.
class PlayerNode {
 public:
  PlayerNode(NodeConfig config, Transport* transport);

  const NodeConfig& config() const { return config_; }
  std::shared_ptr<ModelHandle> handle() const { return handle_; }
  void set_transport(Transport* transport) { transport_ = transport; }
  std::shared_ptr<const GenerativeModel> snapshot() const { return handle_->snapshot(); }

  /// Spaces of the peers (from SCHEMA_REQUEST), index = player.
  void set_peer_spaces(std::vector<FiniteSpace> spaces);
  /// Asks every peer for its space over the transport.
  void discover_peers();

  /// Observer of the working model after each inner step.
  using InnerStepHook = std::function<void(std::size_t step, const GenerativeModel& model)>;

  /// Algorithm round for this player: fetch one batch per peer sized for all
  /// inner steps, then inner_steps of mix + fit on a private copy, published
  /// at the end. On any error the published model is left untouched.
  /// `exact_peers` switches to exact mixtures of the given distributions.
  RoundStats run_round(std::size_t round, std::size_t slot, std::span<const double> alpha_row,
                       std::span<const TabularDistribution> exact_peers = {}, const InnerStepHook& hook = {});

 private:
  NodeConfig config_;
  Transport* transport_;
  std::shared_ptr<ModelHandle> handle_;
  std::vector<FiniteSpace> peer_spaces_;
};

// ---------------------------------------------------------------------------
// Game execution

struct RoundRequest {
  std::size_t round = 0;
  std::size_t slot = 0;
  std::size_t player = 0;
  std::vector<double> alpha_row;
};

/// The set of players a game drives. Implementations may live in-process or
/// in separate processes.
class PlayerPool {
 public:
  virtual ~PlayerPool() = default;
  virtual std::size_t size() const = 0;
  virtual RoundStats run_round(const RoundRequest& request) = 0;
  /// Current learned distribution of a player, for metrics only.
  virtual TabularDistribution distribution(std::size_t player) = 0;
};

class InProcessPool final : public PlayerPool {
 public:
  explicit InProcessPool(const GameSpec& spec);

  std::size_t size() const override { return nodes_.size(); }
  RoundStats run_round(const RoundRequest& request) override;
  TabularDistribution distribution(std::size_t player) override;

  PlayerNode& node(std::size_t player) { return *nodes_[player]; }
  const Transport& transport() const { return *transport_; }
  void set_inner_step_hook(PlayerNode::InnerStepHook hook) { hook_ = std::move(hook); }

 private:
  bool exact_;
  std::shared_ptr<ServiceDirectory> directory_;
  std::unique_ptr<InProcessTransport> transport_;
  std::vector<std::unique_ptr<PlayerNode>> nodes_;
  PlayerNode::InnerStepHook hook_;
};

struct HistoryRow {
  std::size_t round = 0;
  std::size_t player = 0;
  double kl_to_eq = 0.0;
  double l1_to_eq = 0.0;
  double own_loglik = 0.0;
  double utility = 0.0;
};

struct OverlapRow {
  std::size_t round = 0;
  std::size_t player_a = 0;
  std::size_t player_b = 0;
  double l1 = 0.0;
};

struct ReferenceSegment {
  std::size_t start_round = 0;
  AlphaMatrix alpha;
  std::vector<TabularDistribution> distributions;
  /// "closed_form" or "fixed_point".
  std::string method;
};

struct GameResult {
  std::vector<HistoryRow> history;
  std::vector<OverlapRow> overlaps;
  std::vector<ReferenceSegment> references;
  std::vector<TabularDistribution> final_distributions;
  std::size_t messages = 0;
  std::size_t fallbacks = 0;
};

struct RunCallbacks {
  std::function<void(const HistoryRow&)> on_row;
  std::function<void(const OverlapRow&)> on_overlap;
};

/// Equilibrium reference for one alpha. Homogeneous games use the closed
/// form. Otherwise every player is iterated on exact mixtures (tabular
/// completion, full step) from `start` until the largest change is below
/// 1e-12.
ReferenceSegment reference_for(const GameSpec& spec, const AlphaMatrix& alpha,
                               std::span<const TabularDistribution> start);

/// Outer loop: each round selects n_players slots (every player once in index
/// order, or n uniform draws) and runs them in sequence. History row 0 holds
/// the initial state; row r the state after round r.
GameResult run_game(const GameSpec& spec, PlayerPool& pool, const RunCallbacks& callbacks = {});
GameResult run_game(const GameSpec& spec, const RunCallbacks& callbacks = {});

/// run_game for players on different variable subsets. Validates up front that
/// every pair with positive weight shares a variable, and records pairwise
/// overlap-marginal agreement.
GameResult run_heterogeneous_game(const GameSpec& spec, PlayerPool& pool, const RunCallbacks& callbacks = {});
GameResult run_heterogeneous_game(const GameSpec& spec, const RunCallbacks& callbacks = {});

/// Players selected in one round.
std::vector<std::size_t> select_players(const GameSpec& spec, std::size_t round);

}  // namespace coopgame
