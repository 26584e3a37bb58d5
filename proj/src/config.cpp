#include "coopgame/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace coopgame {

using nlohmann::json;
namespace fs = std::filesystem;

const char* to_string(Mode mode) {
  switch (mode) {
    case Mode::ExactEquilibrium: return "exact-equilibrium";
    case Mode::Simulate: return "simulate";
    case Mode::Heterogeneous: return "heterogeneous";
    case Mode::AlphaSweep: return "alpha-sweep";
  }
  return "?";
}

namespace {

// Nonnegative integer, whether the parser stored it signed or unsigned.
bool is_nonneg_integer(const json& v) {
  return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}


std::string join_issues(const std::vector<ConfigIssue>& issues) {
  std::string msg = "invalid config:";
  for (const auto& i : issues) msg += "\n  " + (i.pointer.empty() ? std::string("/") : i.pointer) + ": " + i.message;
  return msg;
}

}  // namespace

ConfigError::ConfigError(std::vector<ConfigIssue> issues)
    : ValidationError(join_issues(issues)), issues_(std::move(issues)) {}

namespace {

// Field access that records problems instead of throwing.
class Reader {
 public:
  std::vector<ConfigIssue> issues;

  void fail(const std::string& pointer, const std::string& message) { issues.push_back({pointer, message}); }

  void reject_unknown(const json& obj, const std::string& pointer, std::initializer_list<const char*> known) {
    if (!obj.is_object()) return;
    for (const auto& [key, _] : obj.items()) {
      if (key == "description" || (!key.empty() && key[0] == '_')) continue;
      if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; }))
        fail(pointer + "/" + key, "unknown field");
    }
  }

  std::optional<std::uint64_t> u64(const json& obj, const std::string& pointer, const char* key) {
    if (!obj.contains(key)) return std::nullopt;
    const json& v = obj.at(key);
    if (!is_nonneg_integer(v)) {
      fail(pointer + "/" + key, "expected a nonnegative integer");
      return std::nullopt;
    }
    return v.get<std::uint64_t>();
  }

  std::optional<double> real(const json& obj, const std::string& pointer, const char* key) {
    if (!obj.contains(key)) return std::nullopt;
    const json& v = obj.at(key);
    if (!v.is_number() || !std::isfinite(v.get<double>())) {
      fail(pointer + "/" + key, "expected a finite number");
      return std::nullopt;
    }
    return v.get<double>();
  }

  std::optional<std::string> string(const json& obj, const std::string& pointer, const char* key) {
    if (!obj.contains(key)) return std::nullopt;
    const json& v = obj.at(key);
    if (!v.is_string()) {
      fail(pointer + "/" + key, "expected a string");
      return std::nullopt;
    }
    return v.get<std::string>();
  }

  std::optional<bool> boolean(const json& obj, const std::string& pointer, const char* key) {
    if (!obj.contains(key)) return std::nullopt;
    const json& v = obj.at(key);
    if (!v.is_boolean()) {
      fail(pointer + "/" + key, "expected true or false");
      return std::nullopt;
    }
    return v.get<bool>();
  }

  std::optional<std::vector<double>> reals(const json& v, const std::string& pointer) {
    if (!v.is_array()) {
      fail(pointer, "expected an array of numbers");
      return std::nullopt;
    }
    std::vector<double> out;
    for (std::size_t k = 0; k < v.size(); ++k) {
      if (!v[k].is_number() || !std::isfinite(v[k].get<double>())) {
        fail(pointer + "/" + std::to_string(k), "expected a finite number");
        return std::nullopt;
      }
      out.push_back(v[k].get<double>());
    }
    return out;
  }
};

struct PlayerDefaults {
  std::size_t batch_size = 256;
  std::size_t inner_steps = 8;
  double step_size = 1.0;
  Decay decay = Decay::Constant;
  json model = {{"family", "tabular"}};
};

std::optional<Decay> parse_decay(Reader& r, const json& obj, const std::string& pointer) {
  auto s = r.string(obj, pointer, "decay");
  if (!s) return std::nullopt;
  if (*s == "constant") return Decay::Constant;
  if (*s == "inv_sqrt") return Decay::InvSqrt;
  r.fail(pointer + "/decay", "expected \"constant\" or \"inv_sqrt\"");
  return std::nullopt;
}

void read_player_settings(Reader& r, const json& obj, const std::string& pointer, PlayerDefaults& into) {
  if (auto v = r.u64(obj, pointer, "batch_size")) {
    if (*v < 1) r.fail(pointer + "/batch_size", "must be at least 1");
    into.batch_size = *v;
  }
  if (auto v = r.u64(obj, pointer, "inner_steps")) {
    if (*v < 1) r.fail(pointer + "/inner_steps", "must be at least 1");
    into.inner_steps = *v;
  }
  if (auto v = r.real(obj, pointer, "step_size")) {
    if (!(*v > 0.0)) r.fail(pointer + "/step_size", "must be positive");
    into.step_size = *v;
  }
  if (auto d = parse_decay(r, obj, pointer)) into.decay = *d;
  if (obj.contains("model")) {
    if (obj.at("model").is_object())
      into.model = obj.at("model");
    else
      r.fail(pointer + "/model", "expected an object");
  }
}

std::optional<AlphaMatrix> parse_alpha(Reader& r, const json& v, const std::string& pointer, std::size_t n,
                                       bool allow_zero_diagonal) {
  if (!v.is_array() || v.size() != n) {
    r.fail(pointer, "expected " + std::to_string(n) + " rows");
    return std::nullopt;
  }
  bool ok = true;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string row_ptr = pointer + "/" + std::to_string(i);
    auto row = r.reals(v[i], row_ptr);
    if (!row) {
      ok = false;
      continue;
    }
    if (row->size() != n) {
      r.fail(row_ptr, "row " + std::to_string(i) + " has " + std::to_string(row->size()) + " entries, expected " +
                          std::to_string(n));
      ok = false;
      continue;
    }
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      sum += (*row)[j];
      if ((*row)[j] < 0.0 || (*row)[j] > 1.0) {
        r.fail(row_ptr + "/" + std::to_string(j), "entry outside [0, 1]");
        ok = false;
      }
    }
    if (std::abs(sum - 1.0) > 1e-12) {
      std::ostringstream s;
      s.precision(17);
      s << "row " << i << " sums to " << sum << ", expected 1";
      r.fail(row_ptr, s.str());
      ok = false;
    }
    if (!allow_zero_diagonal && !((*row)[i] > 0.0)) {
      r.fail(row_ptr + "/" + std::to_string(i), "row " + std::to_string(i) +
                                                    " has zero own weight; set allow_zero_diagonal for data-free players");
      ok = false;
    }
  }
  if (!ok) return std::nullopt;
  try {
    return AlphaMatrix::from_json(v, allow_zero_diagonal);
  } catch (const Error& e) {
    r.fail(pointer, e.what());
    return std::nullopt;
  }
}

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return (path.is_absolute() ? path : base / path).lexically_normal();
}

}  // namespace

RunConfig parse_config(const json& doc, const fs::path& base_dir) {
  Reader r;
  RunConfig cfg;
  if (!doc.is_object()) throw ConfigError(std::vector<ConfigIssue>{{"", "config must be a JSON object"}});
  r.reject_unknown(doc, "", {"mode", "space", "alpha", "alpha_schedule", "allow_zero_diagonal", "rounds",
                             "player_selection", "master_seed", "size_cap", "exact_mixtures", "output_dir",
                             "defaults", "players", "sweep"});

  if (auto m = r.string(doc, "", "mode")) {
    if (*m == "exact-equilibrium")
      cfg.mode = Mode::ExactEquilibrium;
    else if (*m == "simulate")
      cfg.mode = Mode::Simulate;
    else if (*m == "heterogeneous")
      cfg.mode = Mode::Heterogeneous;
    else if (*m == "alpha-sweep")
      cfg.mode = Mode::AlphaSweep;
    else
      r.fail("/mode", "expected one of exact-equilibrium, simulate, heterogeneous, alpha-sweep");
  }
  if (auto v = r.u64(doc, "", "size_cap")) {
    if (*v < 1) r.fail("/size_cap", "must be at least 1");
    cfg.size_cap = *v;
  }

  GameSpec& game = cfg.game;
  bool have_space = false;
  if (!doc.contains("space")) {
    r.fail("/space", "required");
  } else {
    try {
      // Check the size before anything sized by it is built.
      const json& vars = doc.at("space").at("variables");
      std::uint64_t total = 1;
      bool overflow = false;
      for (const auto& v : vars) {
        const auto c = v.at("card").get<std::uint64_t>();
        if (c != 0 && total > (std::uint64_t{1} << 40) / c) overflow = true;
        total *= c == 0 ? 1 : c;
      }
      if (overflow || total > cfg.size_cap) {
        r.fail("/space", "space has " + (overflow ? std::string("too many") : std::to_string(total)) +
                             " outcomes, above the size cap of " + std::to_string(cfg.size_cap));
      } else {
        game.space = FiniteSpace::from_json(doc.at("space"));
        have_space = true;
      }
    } catch (const json::exception& e) {
      r.fail("/space", std::string("malformed space: ") + e.what());
    } catch (const Error& e) {
      r.fail("/space", e.what());
    }
  }

  if (auto v = r.u64(doc, "", "rounds")) game.rounds = *v;
  else game.rounds = 100;
  if (auto v = r.u64(doc, "", "master_seed")) game.master_seed = *v;
  if (auto v = r.boolean(doc, "", "exact_mixtures")) game.exact_mixtures = *v;
  if (auto s = r.string(doc, "", "player_selection")) {
    if (*s == "round-robin")
      game.selection = Selection::RoundRobin;
    else if (*s == "uniform-random")
      game.selection = Selection::UniformRandom;
    else
      r.fail("/player_selection", "expected \"round-robin\" or \"uniform-random\"");
  }
  if (auto s = r.string(doc, "", "output_dir")) cfg.output_dir = resolve(base_dir, *s);
  const bool allow_zero = r.boolean(doc, "", "allow_zero_diagonal").value_or(false);

  PlayerDefaults defaults;
  if (doc.contains("defaults")) {
    const json& d = doc.at("defaults");
    if (!d.is_object()) r.fail("/defaults", "expected an object");
    r.reject_unknown(d, "/defaults", {"batch_size", "inner_steps", "step_size", "decay", "model"});
    read_player_settings(r, d, "/defaults", defaults);
  }

  // Players.
  std::size_t n = 0;
  if (!doc.contains("players") || !doc.at("players").is_array() || doc.at("players").empty()) {
    r.fail("/players", "required: a non-empty array");
  } else {
    const json& players = doc.at("players");
    n = players.size();
    for (std::size_t i = 0; i < n; ++i) {
      const json& p = players[i];
      const std::string ptr = "/players/" + std::to_string(i);
      if (!p.is_object()) {
        r.fail(ptr, "expected an object");
        continue;
      }
      r.reject_unknown(p, ptr, {"variables", "target", "samples", "smoothing", "model", "batch_size",
                                "inner_steps", "step_size", "decay"});
      PlayerDefaults settings = defaults;
      read_player_settings(r, p, ptr, settings);
      PlayerSpec spec;
      spec.batch_size = settings.batch_size;
      spec.inner_steps = settings.inner_steps;
      spec.step_size = settings.step_size;
      spec.decay = settings.decay;
      spec.model = settings.model;
      if (have_space) {
        try {
          if (p.contains("variables")) {
            if (!p.at("variables").is_array()) throw SchemaError("expected an array of variable names");
            spec.subset = VariableSubset(game.space, p.at("variables").get<std::vector<std::string>>());
            if (spec.subset.empty()) throw SchemaError("a player must model at least one variable");
          } else {
            spec.subset = VariableSubset::all(game.space);
          }
        } catch (const json::exception&) {
          r.fail(ptr + "/variables", "expected an array of variable names");
        } catch (const Error& e) {
          r.fail(ptr + "/variables", e.what());
        }
      }
      const bool have_subset = !spec.subset.empty();

      if (p.contains("target") && p.contains("samples")) r.fail(ptr, "give either target or samples, not both");
      if (have_subset && p.contains("target")) {
        if (auto w = r.reals(p.at("target"), ptr + "/target")) {
          try {
            if (w->size() != spec.subset.space().total_size())
              throw SchemaError("has " + std::to_string(w->size()) + " entries, the player's space has " +
                                std::to_string(spec.subset.space().total_size()));
            spec.target = TabularDistribution(spec.subset.space(), std::move(*w));
          } catch (const Error& e) {
            r.fail(ptr + "/target", e.what());
          }
        }
      }
      if (have_subset && p.contains("samples")) {
        const double smoothing = r.real(p, ptr, "smoothing").value_or(0.0);
        if (smoothing < 0.0) r.fail(ptr + "/smoothing", "must be nonnegative");
        if (auto file = r.string(p, ptr, "samples")) {
          try {
            spec.target = ingest_samples(resolve(base_dir, *file), spec.subset.space(), std::max(0.0, smoothing));
          } catch (const Error& e) {
            r.fail(ptr + "/samples", e.what());
          }
        }
      }
      if (have_subset) {
        try {
          make_model(spec.subset.space(), spec.model);
        } catch (const Error& e) {
          r.fail(ptr + "/model", e.what());
        } catch (const json::exception& e) {
          r.fail(ptr + "/model", e.what());
        }
      }
      if (have_subset && cfg.mode != Mode::Heterogeneous && !(spec.subset.space() == game.space))
        r.fail(ptr + "/variables", "only heterogeneous mode allows players on a subset of the variables");
      game.players.push_back(std::move(spec));
    }
  }

  // Alpha.
  if (n > 0 && cfg.mode != Mode::AlphaSweep) {
    const bool has_alpha = doc.contains("alpha"), has_schedule = doc.contains("alpha_schedule");
    if (has_alpha && has_schedule) {
      r.fail("/alpha_schedule", "give either alpha or alpha_schedule, not both");
    } else if (has_alpha) {
      if (auto a = parse_alpha(r, doc.at("alpha"), "/alpha", n, allow_zero)) game.schedule = AlphaSchedule(*a);
    } else if (has_schedule) {
      const json& s = doc.at("alpha_schedule");
      if (!s.is_array() || s.empty()) {
        r.fail("/alpha_schedule", "expected a non-empty array of {from_round, alpha}");
      } else {
        std::vector<std::pair<std::size_t, AlphaMatrix>> segments;
        bool ok = true;
        for (std::size_t k = 0; k < s.size(); ++k) {
          const std::string ptr = "/alpha_schedule/" + std::to_string(k);
          r.reject_unknown(s[k], ptr, {"from_round", "alpha"});
          auto from = s[k].is_object() ? r.u64(s[k], ptr, "from_round") : std::nullopt;
          if (!from) {
            r.fail(ptr + "/from_round", "required");
            ok = false;
          }
          if (!s[k].is_object() || !s[k].contains("alpha")) {
            r.fail(ptr + "/alpha", "required");
            ok = false;
            continue;
          }
          auto a = parse_alpha(r, s[k].at("alpha"), ptr + "/alpha", n, allow_zero);
          if (!a || !from) {
            ok = false;
            continue;
          }
          if (k == 0 && *from != 0) {
            r.fail(ptr + "/from_round", "the first segment must start at round 0");
            ok = false;
          }
          if (k > 0 && !segments.empty() && *from <= segments.back().first) {
            r.fail(ptr + "/from_round", "thresholds must strictly increase");
            ok = false;
          }
          segments.emplace_back(*from, std::move(*a));
        }
        if (ok) game.schedule = AlphaSchedule(std::move(segments));
      }
    } else if (n == 1) {
      game.schedule = AlphaSchedule(AlphaMatrix::identity(1));
    } else {
      r.fail("/alpha", "required: alpha or alpha_schedule");
    }
  }

  // Sweep.
  if (cfg.mode == Mode::AlphaSweep) {
    if (doc.contains("alpha") || doc.contains("alpha_schedule"))
      r.fail("/alpha", "alpha-sweep derives alpha from the sweep grid");
    if (!doc.contains("sweep") || !doc.at("sweep").is_object()) {
      r.fail("/sweep", "required in alpha-sweep mode");
    } else {
      const json& s = doc.at("sweep");
      r.reject_unknown(s, "/sweep", {"grid", "seeds"});
      SweepSettings sweep;
      if (!s.contains("grid")) {
        r.fail("/sweep/grid", "required");
      } else if (auto grid = r.reals(s.at("grid"), "/sweep/grid")) {
        if (grid->empty()) r.fail("/sweep/grid", "must not be empty");
        for (std::size_t k = 0; k < grid->size(); ++k)
          if (!((*grid)[k] > 0.0 && (*grid)[k] <= 1.0))
            r.fail("/sweep/grid/" + std::to_string(k), "grid values must lie in (0, 1]");
        if (n == 1)
          for (std::size_t k = 0; k < grid->size(); ++k)
            if ((*grid)[k] != 1.0) r.fail("/sweep/grid/" + std::to_string(k), "a single player can only use 1.0");
        sweep.grid = std::move(*grid);
      }
      if (s.contains("seeds")) {
        const json& seeds = s.at("seeds");
        if (is_nonneg_integer(seeds)) {
          const auto count = seeds.get<std::uint64_t>();
          if (count < 1) r.fail("/sweep/seeds", "must be at least 1");
          for (std::uint64_t k = 0; k < count; ++k) sweep.seeds.push_back(game.master_seed + k);
        } else if (seeds.is_array() && !seeds.empty() &&
                   std::all_of(seeds.begin(), seeds.end(), [](const json& v) { return is_nonneg_integer(v); })) {
          for (const auto& v : seeds) sweep.seeds.push_back(v.get<std::uint64_t>());
        } else {
          r.fail("/sweep/seeds", "expected a seed count or a non-empty array of seeds");
        }
      } else {
        for (std::uint64_t k = 0; k < 5; ++k) sweep.seeds.push_back(game.master_seed + k);
      }
      cfg.sweep = std::move(sweep);
    }
    if (n > 0) game.schedule = AlphaSchedule(AlphaMatrix::identity(n));
  }

  if (!r.issues.empty()) throw ConfigError(std::move(r.issues));

  if (cfg.mode == Mode::Heterogeneous) {
    // Pairs with positive weight must share a variable.
    for (std::size_t s = 0; s < game.schedule.segments().size(); ++s) {
      const auto& a = game.schedule.segments()[s].second;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          if (i != j && a(i, j) > 0.0 && game.players[i].subset.overlap(game.players[j].subset).empty())
            r.fail((doc.contains("alpha") ? "/alpha/" : "/alpha_schedule/" + std::to_string(s) + "/alpha/") +
                       std::to_string(i) + "/" + std::to_string(j),
                   "players " + std::to_string(i) + " and " + std::to_string(j) +
                       " share no variable, so their weight must be 0");
    }
  }
  if (cfg.mode == Mode::ExactEquilibrium || cfg.mode == Mode::AlphaSweep) {
    for (std::size_t i = 0; i < n; ++i)
      if (!game.players[i].target) r.fail("/players/" + std::to_string(i), "needs target or samples in this mode");
  }
  if (r.issues.empty()) {
    try {
      game.validate();
    } catch (const ValidationError& e) {
      r.fail("/players", e.what());
    }
  }
  if (!r.issues.empty()) throw ConfigError(std::move(r.issues));
  return cfg;
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(std::vector<ConfigIssue>{{"", "cannot open config file '" + path.string() + "'"}});
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw ConfigError(std::vector<ConfigIssue>{{"", "config file '" + path.string() + "' is not valid JSON"}});
  return parse_config(doc, path.parent_path().empty() ? fs::path(".") : path.parent_path());
}

std::vector<GameSpec> sweep_specs(const RunConfig& config) {
  if (!config.sweep) throw ValidationError("config has no sweep settings");
  std::vector<GameSpec> out;
  const std::size_t n = config.game.n_players();
  for (double a : config.sweep->grid) {
    GameSpec spec = config.game;
    spec.schedule = AlphaSchedule(AlphaMatrix::symmetric(n, a));
    out.push_back(std::move(spec));
  }
  return out;
}

TabularDistribution ingest_samples(const fs::path& path, const FiniteSpace& space, double smoothing) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open sample file '" + path.string() + "'");
  if (!(smoothing >= 0.0) || !std::isfinite(smoothing)) throw ValidationError("smoothing must be nonnegative");
  std::vector<double> counts(space.total_size(), 0.0);
  std::size_t seen = 0, lineno = 0;
  std::string line;
  const std::string where = path.filename().string() + ":";

  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    for (char& c : line)
      if (c == ',' || c == '(' || c == ')' || c == '\t' || c == '\r') c = ' ';
    std::vector<std::size_t> values;
    const char* p = line.data();
    const char* end = p + line.size();
    while (p < end) {
      if (*p == ' ') {
        ++p;
        continue;
      }
      std::size_t v = 0;
      auto [next, ec] = std::from_chars(p, end, v);
      if (ec != std::errc() || (next < end && *next != ' '))
        throw SchemaError(where + std::to_string(lineno) + ": malformed outcome '" + line + "'");
      values.push_back(v);
      p = next;
    }
    if (values.empty()) continue;

    std::size_t flat = 0;
    if (values.size() == 1) {
      flat = values[0];
      if (flat >= space.total_size())
        throw RangeError(where + std::to_string(lineno) + ": outcome " + std::to_string(flat) +
                         " outside a space of size " + std::to_string(space.total_size()));
    } else if (values.size() == space.num_variables()) {
      for (std::size_t k = 0; k < values.size(); ++k)
        if (values[k] >= space.variables()[k].card)
          throw RangeError(where + std::to_string(lineno) + ": value " + std::to_string(values[k]) +
                           " out of range for variable '" + space.variables()[k].name + "'");
      flat = space.tuple_to_index(values);
    } else {
      throw SchemaError(where + std::to_string(lineno) + ": expected a flat index or " +
                        std::to_string(space.num_variables()) + " values, got " + std::to_string(values.size()));
    }
    counts[flat] += 1.0;
    ++seen;
  }
  if (seen == 0) throw ValidationError("sample file '" + path.string() + "' holds no samples");
  if (smoothing > 0.0)
    for (double& c : counts) c += smoothing;
  return TabularDistribution(space, std::move(counts));
}

}  // namespace coopgame
