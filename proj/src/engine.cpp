#include "coopgame/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "coopgame/equilibrium.hpp"
#include "coopgame/errors.hpp"

namespace coopgame {

using nlohmann::json;

// --- AlphaSchedule --------------------------------------------------------

AlphaSchedule::AlphaSchedule(AlphaMatrix constant) { segments_.emplace_back(0, std::move(constant)); }

AlphaSchedule::AlphaSchedule(std::vector<std::pair<std::size_t, AlphaMatrix>> segments)
    : segments_(std::move(segments)) {
  if (segments_.empty()) throw ValidationError("alpha schedule has no segments");
  if (segments_.front().first != 0) throw ValidationError("alpha schedule must start at round 0");
  for (std::size_t k = 1; k < segments_.size(); ++k) {
    if (segments_[k].first <= segments_[k - 1].first)
      throw ValidationError("alpha schedule thresholds must strictly increase (segment " + std::to_string(k) + ")");
    if (segments_[k].second.n_players() != segments_[0].second.n_players())
      throw ValidationError("alpha schedule segment " + std::to_string(k) + " has a different player count");
  }
}

std::size_t AlphaSchedule::segment_index(std::size_t round) const {
  if (segments_.empty()) throw ValidationError("alpha schedule has no segments");
  auto it = std::upper_bound(segments_.begin(), segments_.end(), round,
                             [](std::size_t r, const auto& seg) { return r < seg.first; });
  return static_cast<std::size_t>(it - segments_.begin()) - 1;
}

const AlphaMatrix& AlphaSchedule::alpha_at(std::size_t round) const { return segments_[segment_index(round)].second; }

// --- GameSpec -------------------------------------------------------------

void GameSpec::validate() const {
  std::vector<std::string> issues;
  const std::size_t n = players.size();
  if (n == 0) issues.push_back("game has no players");
  if (schedule.segments().empty()) issues.push_back("alpha schedule has no segments");
  for (std::size_t s = 0; s < schedule.segments().size(); ++s)
    if (schedule.segments()[s].second.n_players() != n)
      issues.push_back("alpha segment " + std::to_string(s) + " is " +
                       std::to_string(schedule.segments()[s].second.n_players()) + "x" +
                       std::to_string(schedule.segments()[s].second.n_players()) + " for " + std::to_string(n) +
                       " players");
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = players[i];
    const std::string who = "player " + std::to_string(i) + ": ";
    if (p.batch_size < 1) issues.push_back(who + "batch_size must be at least 1");
    if (p.inner_steps < 1) issues.push_back(who + "inner_steps must be at least 1");
    if (!(p.step_size > 0.0) || !std::isfinite(p.step_size)) issues.push_back(who + "step_size must be positive");
    if (p.subset.empty()) {
      issues.push_back(who + "models no variables");
      continue;
    }
    if (!(p.subset.parent() == space)) issues.push_back(who + "subset belongs to a different collection");
    if (p.target && !(p.target->space() == p.subset.space()))
      issues.push_back(who + "target is not over the player's variables");
    if (!p.target)
      for (std::size_t s = 0; s < schedule.segments().size(); ++s) {
        const auto& a = schedule.segments()[s].second;
        if (a.n_players() == n && a(i, i) > 0.0) {
          issues.push_back(who + "has no data but positive own weight in alpha segment " + std::to_string(s));
          break;
        }
      }
  }
  if (!issues.empty()) {
    std::string msg = "invalid game:";
    for (const auto& s : issues) msg += "\n  " + s;
    throw ValidationError(msg);
  }
}

// --- allocation and mixing ------------------------------------------------

std::vector<std::size_t> allocate(std::span<const double> weights, std::size_t total) {
  const std::size_t n = weights.size();
  std::vector<std::size_t> counts(n, 0);
  std::vector<long long> frac_key(n, 0);
  std::size_t assigned = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (!(weights[k] >= 0.0) || !std::isfinite(weights[k])) throw ValidationError("allocation weights must be nonnegative");
    const double raw = weights[k] * static_cast<double>(total);
    // Values within rounding noise of an integer count as that integer.
    const double near = std::round(raw);
    const double base = std::abs(raw - near) < 1e-9 ? near : std::floor(raw);
    counts[k] = static_cast<std::size_t>(base);
    frac_key[k] = std::llround((raw - base) * 1e9);
    assigned += counts[k];
  }
  if (assigned > total) {
    // Only reachable when weights sum above one by more than rounding.
    throw ValidationError("allocation weights sum above one");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return frac_key[a] > frac_key[b]; });
  std::size_t remainder = total - assigned;
  if (remainder > n) throw ValidationError("allocation weights sum below one");
  for (std::size_t k = 0; k < remainder; ++k) ++counts[order[k]];
  return counts;
}

MixedBatch mix_batch(const TabularDistribution& own, std::size_t own_index, std::span<const SampleBatch> peers,
                     std::span<const double> alpha_row, std::size_t batch_size, Rng& rng) {
  if (peers.size() != alpha_row.size()) throw SchemaError("one peer batch slot per alpha entry is required");
  if (own_index >= alpha_row.size()) throw RangeError("own index outside the alpha row");
  if (batch_size == 0) throw ValidationError("batch_size must be at least 1");
  MixedBatch out;
  out.allocation = allocate(alpha_row, batch_size);
  const FiniteSpace& space = own.space();
  std::vector<double> counts(space.total_size(), 0.0);

  if (out.allocation[own_index] > 0) {
    const CategoricalSampler sampler(own);
    for (std::size_t k = 0; k < out.allocation[own_index]; ++k) counts[sampler.draw(rng)] += 1.0;
  }
  for (std::size_t j = 0; j < peers.size(); ++j) {
    if (j == own_index || out.allocation[j] == 0) continue;
    if (peers[j].outcomes.size() < out.allocation[j])
      throw InsufficientSamplesError("peer " + std::to_string(j) + " supplied " +
                                     std::to_string(peers[j].outcomes.size()) + " samples, " +
                                     std::to_string(out.allocation[j]) + " needed");
    for (std::size_t k = 0; k < out.allocation[j]; ++k) {
      const Outcome o = peers[j].outcomes[k];
      if (o >= counts.size()) throw RangeError("peer " + std::to_string(j) + " sent an outcome outside the space");
      counts[o] += 1.0;
    }
  }
  out.distribution = TabularDistribution(space, std::move(counts));
  return out;
}

// --- links between player spaces ------------------------------------------

namespace {

// How samples from a peer's space enter a player's data.
struct PeerLink {
  enum class Kind { None, Full, Partial } kind = Kind::None;
  FiniteSpace overlap;
  // Peer outcome -> own outcome (Full) or overlap outcome (Partial).
  std::vector<std::uint32_t> map;
};

PeerLink make_link(const FiniteSpace& own, const FiniteSpace& peer) {
  PeerLink link;
  auto shared = overlap_space(own, peer);
  if (!shared) return link;
  link.overlap = std::move(*shared);
  link.kind = link.overlap == own ? PeerLink::Kind::Full : PeerLink::Kind::Partial;
  link.map = projection_map(peer, link.kind == PeerLink::Kind::Full ? own : link.overlap);
  return link;
}

// Adds weighted peer mass, either given per peer outcome (exact) or as
// sampled outcomes, to the player's full or partial data.
struct MassBuilder {
  std::vector<double> full;
  std::vector<PartialMass> partials;

  explicit MassBuilder(std::size_t size) : full(size, 0.0) {}

  std::vector<double>& slot(const PeerLink& link) {
    if (link.kind == PeerLink::Kind::Full) return full;
    partials.push_back(PartialMass{link.overlap, std::vector<double>(link.overlap.total_size(), 0.0)});
    return partials.back().mass;
  }
  void add_exact(const PeerLink& link, std::span<const double> peer_probs, double weight) {
    auto& out = slot(link);
    for (std::size_t k = 0; k < peer_probs.size(); ++k) out[link.map[k]] += weight * peer_probs[k];
  }
  void add_samples(const PeerLink& link, std::span<const Outcome> outcomes) {
    auto& out = slot(link);
    for (Outcome o : outcomes) out[link.map[o]] += 1.0;
  }
};

std::string context(std::size_t round, std::size_t player) {
  return "round " + std::to_string(round) + ", player " + std::to_string(player) + ": ";
}

bool homogeneous(const GameSpec& spec) {
  for (const auto& p : spec.players)
    if (!(p.subset.space() == spec.space)) return false;
  return true;
}

}  // namespace

double utility(std::size_t player, std::span<const TabularDistribution> dists,
               std::span<const std::optional<TabularDistribution>> pi, const AlphaMatrix& alpha) {
  const std::size_t n = dists.size();
  if (alpha.n_players() != n || pi.size() != n) throw SchemaError("utility: player counts disagree");
  if (player >= n) throw RangeError("utility: player index out of range");
  const TabularDistribution& own = dists[player];
  double total = 0.0;
  const double a_ii = alpha(player, player);
  if (a_ii > 0.0) {
    if (!pi[player]) throw ValidationError("utility: player " + std::to_string(player) + " has own weight but no data");
    const double ll = cross_log_likelihood(*pi[player], own);
    if (ll == kNegInf) return kNegInf;
    total += a_ii * ll;
  }
  for (std::size_t j = 0; j < n; ++j) {
    const double a = alpha(player, j);
    if (j == player || a == 0.0) continue;
    const auto shared = overlap_space(own.space(), dists[j].space());
    if (!shared) throw NoOverlapError("players " + std::to_string(player) + " and " + std::to_string(j) +
                                      " share no variable");
    const double ll = cross_log_likelihood(marginalize(dists[j], *shared), marginalize(own, *shared));
    if (ll == kNegInf) return kNegInf;
    total += a * ll;
  }
  return total;
}

// --- NodeConfig -----------------------------------------------------------

json NodeConfig::to_json() const {
  json j = {{"index", index},
            {"n_players", n_players},
            {"space", space.to_json()},
            {"model", model},
            {"batch_size", batch_size},
            {"inner_steps", inner_steps},
            {"step_size", step_size},
            {"decay", decay == Decay::InvSqrt ? "inv_sqrt" : "constant"},
            {"master_seed", master_seed}};
  j["target"] = target ? json(std::vector<double>(target->probs().begin(), target->probs().end())) : json(nullptr);
  return j;
}

NodeConfig NodeConfig::from_json(const json& j) {
  try {
    NodeConfig c;
    c.index = j.at("index").get<std::size_t>();
    c.n_players = j.at("n_players").get<std::size_t>();
    c.space = FiniteSpace::from_json(j.at("space"));
    c.model = j.at("model");
    c.batch_size = j.at("batch_size").get<std::size_t>();
    c.inner_steps = j.at("inner_steps").get<std::size_t>();
    c.step_size = j.at("step_size").get<double>();
    c.decay = j.at("decay").get<std::string>() == "inv_sqrt" ? Decay::InvSqrt : Decay::Constant;
    c.master_seed = j.at("master_seed").get<std::uint64_t>();
    if (!j.at("target").is_null())
      c.target = TabularDistribution::from_normalized(c.space, j.at("target").get<std::vector<double>>());
    return c;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("node config: ") + e.what());
  }
}

NodeConfig node_config(const GameSpec& spec, std::size_t player) {
  const PlayerSpec& p = spec.players.at(player);
  NodeConfig c;
  c.index = player;
  c.n_players = spec.n_players();
  c.space = p.subset.space();
  c.target = p.target;
  c.model = p.model;
  c.batch_size = p.batch_size;
  c.inner_steps = p.inner_steps;
  c.step_size = p.step_size;
  c.decay = p.decay;
  c.master_seed = spec.master_seed;
  return c;
}

// --- PlayerNode -----------------------------------------------------------

PlayerNode::PlayerNode(NodeConfig config, Transport* transport)
    : config_(std::move(config)),
      transport_(transport),
      handle_(std::make_shared<ModelHandle>(make_model(config_.space, config_.model))) {}

void PlayerNode::set_peer_spaces(std::vector<FiniteSpace> spaces) {
  if (spaces.size() != config_.n_players) throw SchemaError("one space per player is required");
  peer_spaces_ = std::move(spaces);
}

void PlayerNode::discover_peers() {
  if (!transport_) throw TransportError("no transport to reach peers");
  std::vector<FiniteSpace> spaces(config_.n_players);
  for (std::size_t j = 0; j < config_.n_players; ++j)
    spaces[j] = j == config_.index ? config_.space : transport_->request_schema(j);
  peer_spaces_ = std::move(spaces);
}

RoundStats PlayerNode::run_round(std::size_t round, std::size_t slot, std::span<const double> alpha_row,
                                 std::span<const TabularDistribution> exact_peers, const InnerStepHook& hook) {
  const std::size_t n = config_.n_players, me = config_.index;
  const std::string where = context(round, me);
  if (alpha_row.size() != n) throw SchemaError(where + "alpha row has the wrong length");
  if (peer_spaces_.size() != n) throw SchemaError(where + "peer spaces are unknown");
  const bool exact = !exact_peers.empty();
  if (exact && exact_peers.size() != n) throw SchemaError(where + "one exact peer distribution per player is required");
  if (alpha_row[me] > 0.0 && !config_.target) throw ValidationError(where + "positive own weight but no data");

  const auto alloc = allocate(alpha_row, config_.batch_size);
  const std::size_t steps = config_.inner_steps;
  const FiniteSpace& own = config_.space;

  std::vector<PeerLink> links(n);
  for (std::size_t j = 0; j < n; ++j) {
    if (j == me || alpha_row[j] == 0.0) continue;
    links[j] = make_link(own, peer_spaces_[j]);
    if (links[j].kind == PeerLink::Kind::None)
      throw ValidationError(where + "positive weight on peer " + std::to_string(j) + " which shares no variable");
  }

  RoundStats stats;
  std::vector<SampleBatch> batches(n);
  if (!exact) {
    if (!transport_) throw TransportError(where + "no transport to reach peers");
    for (std::size_t j = 0; j < n; ++j) {
      if (j == me || alloc[j] == 0) continue;
      const std::uint64_t tag = derive_seed(config_.master_seed, {static_cast<std::uint64_t>(Stream::PeerRequest),
                                                                  round, slot, j});
      const std::uint64_t count = static_cast<std::uint64_t>(alloc[j]) * steps;
      try {
        batches[j] = transport_->request_samples(j, count, tag);
        ++stats.messages;
        if (batches[j].space_id != peer_spaces_[j].id())
          throw TransportError("batch is not over the peer's declared space");
        batches[j].validate(peer_spaces_[j]);
      } catch (const TransportError& e) {
        throw TransportError(where + "request to peer " + std::to_string(j) + " failed: " + e.what());
      } catch (const RangeError& e) {
        throw TransportError(where + "peer " + std::to_string(j) + " sent invalid outcomes: " + e.what());
      }
    }
  }

  auto model = handle_->snapshot()->clone();
  Rng rng(derive_seed(config_.master_seed, {static_cast<std::uint64_t>(Stream::OwnData), round, slot}));
  std::optional<CategoricalSampler> own_sampler;
  if (!exact && alloc[me] > 0) own_sampler.emplace(*config_.target);
  const double eta = config_.decay == Decay::InvSqrt ? config_.step_size / std::sqrt(static_cast<double>(round + 1))
                                                     : config_.step_size;

  for (std::size_t s = 0; s < steps; ++s) {
    MassBuilder mass(own.total_size());
    if (exact) {
      if (alpha_row[me] > 0.0)
        for (std::size_t k = 0; k < own.total_size(); ++k) mass.full[k] += alpha_row[me] * (*config_.target)[k];
      for (std::size_t j = 0; j < n; ++j)
        if (j != me && alpha_row[j] > 0.0) mass.add_exact(links[j], exact_peers[j].probs(), alpha_row[j]);
    } else {
      if (own_sampler)
        for (std::size_t k = 0; k < alloc[me]; ++k) mass.full[own_sampler->draw(rng)] += 1.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == me || alloc[j] == 0) continue;
        const auto first = batches[j].outcomes.begin() + static_cast<std::ptrdiff_t>(s * alloc[j]);
        mass.add_samples(links[j], std::span<const Outcome>(&*first, alloc[j]));
      }
    }
    try {
      auto completed = complete_expected(model->distribution(), mass.full, mass.partials);
      stats.fallbacks += completed.fallbacks;
      model->fit_step(completed.target, eta);
    } catch (const NumericError& e) {
      throw NumericError(where + "inner step " + std::to_string(s) + ": " + e.what());
    }
    if (hook) hook(s, *model);
  }
  handle_->publish(std::move(model));
  return stats;
}

// --- InProcessPool --------------------------------------------------------

InProcessPool::InProcessPool(const GameSpec& spec)
    : exact_(spec.exact_mixtures), directory_(std::make_shared<ServiceDirectory>()) {
  transport_ = std::make_unique<InProcessTransport>(directory_);
  std::vector<FiniteSpace> spaces;
  for (std::size_t i = 0; i < spec.n_players(); ++i) {
    nodes_.push_back(std::make_unique<PlayerNode>(node_config(spec, i), transport_.get()));
    spaces.push_back(nodes_.back()->config().space);
    directory_->add(std::make_shared<NodeService>(i, spaces.back(), nodes_.back()->handle()));
  }
  for (auto& node : nodes_) node->set_peer_spaces(spaces);
}

RoundStats InProcessPool::run_round(const RoundRequest& request) {
  PlayerNode& node = *nodes_.at(request.player);
  if (!exact_) return node.run_round(request.round, request.slot, request.alpha_row, {}, hook_);
  std::vector<TabularDistribution> peers;
  for (const auto& n : nodes_) peers.push_back(n->snapshot()->distribution());
  return node.run_round(request.round, request.slot, request.alpha_row, peers, hook_);
}

TabularDistribution InProcessPool::distribution(std::size_t player) {
  return nodes_.at(player)->snapshot()->distribution();
}

// --- references -----------------------------------------------------------

ReferenceSegment reference_for(const GameSpec& spec, const AlphaMatrix& alpha,
                               std::span<const TabularDistribution> start) {
  const std::size_t n = spec.n_players();
  ReferenceSegment ref;
  ref.alpha = alpha;

  if (homogeneous(spec)) {
    std::vector<TabularDistribution> pi;
    for (const auto& p : spec.players) pi.push_back(p.target ? *p.target : TabularDistribution::uniform(spec.space));
    ref.distributions = solve_exact(pi, alpha).distributions;
    ref.method = "closed_form";
    return ref;
  }

  if (start.size() != n) throw SchemaError("reference iteration needs one start distribution per player");
  std::vector<TabularDistribution> p(start.begin(), start.end());
  std::vector<std::vector<PeerLink>> links(n, std::vector<PeerLink>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && alpha(i, j) > 0.0) links[i][j] = make_link(p[i].space(), p[j].space());

  constexpr std::size_t kMaxSweeps = 100000;
  for (std::size_t sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      MassBuilder mass(p[i].size());
      if (alpha(i, i) > 0.0)
        for (std::size_t k = 0; k < p[i].size(); ++k) mass.full[k] += alpha(i, i) * (*spec.players[i].target)[k];
      for (std::size_t j = 0; j < n; ++j)
        if (j != i && alpha(i, j) > 0.0) mass.add_exact(links[i][j], p[j].probs(), alpha(i, j));
      auto next = complete_expected(p[i], mass.full, mass.partials).target;
      change = std::max(change, l1_distance(next, p[i]));
      p[i] = std::move(next);
    }
    if (change < 1e-12) break;
  }
  ref.distributions = std::move(p);
  ref.method = "fixed_point";
  return ref;
}

// --- outer loop -----------------------------------------------------------

std::vector<std::size_t> select_players(const GameSpec& spec, std::size_t round) {
  const std::size_t n = spec.n_players();
  std::vector<std::size_t> out(n);
  if (spec.selection == Selection::RoundRobin) {
    std::iota(out.begin(), out.end(), 0);
  } else {
    Rng rng(derive_seed(spec.master_seed, {static_cast<std::uint64_t>(Stream::Selection), round}));
    for (auto& p : out) p = static_cast<std::size_t>(rng.below(n));
  }
  return out;
}

namespace {

void check_overlaps(const GameSpec& spec) {
  const std::size_t n = spec.n_players();
  for (std::size_t s = 0; s < spec.schedule.segments().size(); ++s) {
    const auto& alpha = spec.schedule.segments()[s].second;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j || alpha(i, j) == 0.0) continue;
        if (spec.players[i].subset.overlap(spec.players[j].subset).empty())
          throw NoOverlapError("players " + std::to_string(i) + " and " + std::to_string(j) +
                                " share no variable but alpha[" + std::to_string(i) + "][" + std::to_string(j) +
                                "] = " + std::to_string(alpha(i, j)) + " in segment " + std::to_string(s));
      }
  }
}

GameResult run_impl(const GameSpec& spec, PlayerPool& pool, const RunCallbacks& callbacks, bool with_overlaps) {
  spec.validate();
  const std::size_t n = spec.n_players();
  if (pool.size() != n) throw SchemaError("player pool size does not match the game");

  GameResult result;
  std::vector<std::optional<TabularDistribution>> pi;
  for (const auto& p : spec.players) pi.push_back(p.target);

  std::vector<TabularDistribution> current(n);
  auto refresh = [&] {
    for (std::size_t i = 0; i < n; ++i) current[i] = pool.distribution(i);
  };
  refresh();
  const std::vector<TabularDistribution> initial = current;

  std::vector<std::optional<std::size_t>> ref_of_segment(spec.schedule.segments().size());
  auto reference = [&](std::size_t round) -> const ReferenceSegment& {
    const std::size_t seg = spec.schedule.segment_index(round);
    if (!ref_of_segment[seg]) {
      auto ref = reference_for(spec, spec.schedule.segments()[seg].second, initial);
      ref.start_round = spec.schedule.segments()[seg].first;
      ref_of_segment[seg] = result.references.size();
      result.references.push_back(std::move(ref));
    }
    return result.references[*ref_of_segment[seg]];
  };

  auto record = [&](std::size_t row_round, std::size_t alpha_round) {
    const ReferenceSegment& ref = reference(alpha_round);
    for (std::size_t i = 0; i < n; ++i) {
      HistoryRow row;
      row.round = row_round;
      row.player = i;
      row.kl_to_eq = kl_divergence(current[i], ref.distributions[i]);
      row.l1_to_eq = l1_distance(current[i], ref.distributions[i]);
      row.own_loglik = pi[i] ? cross_log_likelihood(*pi[i], current[i]) : std::numeric_limits<double>::quiet_NaN();
      row.utility = utility(i, current, pi, ref.alpha);
      result.history.push_back(row);
      if (callbacks.on_row) callbacks.on_row(row);
    }
    if (!with_overlaps) return;
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b) {
        const auto shared = overlap_space(current[a].space(), current[b].space());
        if (!shared) continue;
        OverlapRow row{row_round, a, b, l1_distance(marginalize(current[a], *shared), marginalize(current[b], *shared))};
        result.overlaps.push_back(row);
        if (callbacks.on_overlap) callbacks.on_overlap(row);
      }
  };

  record(0, 0);
  for (std::size_t t = 0; t < spec.rounds; ++t) {
    const AlphaMatrix& alpha = spec.schedule.alpha_at(t);
    const auto chosen = select_players(spec, t);
    for (std::size_t slot = 0; slot < chosen.size(); ++slot) {
      const std::size_t i = chosen[slot];
      const auto row = alpha.row(i);
      RoundRequest request{t, slot, i, std::vector<double>(row.begin(), row.end())};
      const RoundStats stats = pool.run_round(request);
      result.messages += stats.messages;
      result.fallbacks += stats.fallbacks;
    }
    refresh();
    record(t + 1, t);
  }
  result.final_distributions = current;
  return result;
}

}  // namespace

GameResult run_game(const GameSpec& spec, PlayerPool& pool, const RunCallbacks& callbacks) {
  spec.validate();
  if (!homogeneous(spec))
    throw ValidationError("players model different variables; run the heterogeneous game instead");
  return run_impl(spec, pool, callbacks, false);
}

GameResult run_game(const GameSpec& spec, const RunCallbacks& callbacks) {
  spec.validate();
  InProcessPool pool(spec);
  return run_game(spec, pool, callbacks);
}

GameResult run_heterogeneous_game(const GameSpec& spec, PlayerPool& pool, const RunCallbacks& callbacks) {
  spec.validate();
  check_overlaps(spec);
  return run_impl(spec, pool, callbacks, true);
}

GameResult run_heterogeneous_game(const GameSpec& spec, const RunCallbacks& callbacks) {
  spec.validate();
  check_overlaps(spec);
  InProcessPool pool(spec);
  return run_heterogeneous_game(spec, pool, callbacks);
}

}  // namespace coopgame
