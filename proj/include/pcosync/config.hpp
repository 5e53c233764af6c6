#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "pcosync/adversary.hpp"
#include "pcosync/core.hpp"
#include "pcosync/topology.hpp"

namespace pcosync {

/// Malformed or inconsistent scenario file.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MechanismSpec {
  MechanismKind kind = MechanismKind::Mechanism1;
  double coupling = 1.0;
  std::optional<std::int64_t> n_known;

  friend bool operator==(const MechanismSpec&, const MechanismSpec&) = default;
};

struct InitialPhaseSpec {
  /// Empty means uniform random per legitimate oscillator under the run seed.
  std::vector<double> radians;
  bool random_uniform() const { return radians.empty(); }

  friend bool operator==(const InitialPhaseSpec&, const InitialPhaseSpec&) = default;
};

struct ScenarioConfig {
  TickClock clock;
  TopologyDescription topology = CircleDescription{24, 40.0, 39.0};
  MechanismSpec mechanism;
  AttackSpec attacks;
  InitialPhaseSpec initial_phases;
  Tick horizon = 20 * TickClock::kDefaultTicksPerPeriod;
  std::uint64_t seed = 0;
  Tick snapshot_interval = TickClock::kDefaultTicksPerPeriod / 100;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

struct SweepConfig {
  ScenarioConfig base;
  std::size_t runs = 1;
  std::uint64_t seed_base = 0;
  /// 0 picks the hardware concurrency.
  std::size_t workers = 1;
  /// Include per-run entries in the aggregate.
  bool per_run = true;
};

namespace detail {

using nlohmann::json;

inline const json& require(const json& j, const char* key, const char* where) {
  if (!j.is_object() || !j.contains(key)) {
    throw ConfigError(std::string(where) + ": missing field '" + key + "'");
  }
  return j.at(key);
}

template <typename T>
T get_as(const json& j, const char* key, const char* where) {
  try {
    return require(j, key, where).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string(where) + "." + key + ": " + e.what());
  }
}

/// Reads `<name>_ticks` or `<name>_periods`; nullopt if neither is present.
inline std::optional<Tick> read_duration(const json& j, const std::string& name,
                                         const TickClock& clock, const char* where) {
  const std::string ticks_key = name + "_ticks";
  const std::string periods_key = name + "_periods";
  if (j.contains(ticks_key)) return get_as<Tick>(j, ticks_key.c_str(), where);
  if (j.contains(periods_key)) {
    try {
      return clock.periods_to_ticks(get_as<double>(j, periods_key.c_str(), where));
    } catch (const std::out_of_range& e) {
      throw ConfigError(std::string(where) + "." + periods_key + ": " + e.what());
    }
  }
  return std::nullopt;
}

inline Tick require_duration(const json& j, const std::string& name, const TickClock& clock,
                             const char* where) {
  auto value = read_duration(j, name, clock, where);
  if (!value) {
    throw ConfigError(std::string(where) + ": missing '" + name + "_ticks' or '" + name +
                      "_periods'");
  }
  return *value;
}

inline MechanismKind parse_mechanism_kind(const std::string& name) {
  if (name == "conventional") return MechanismKind::Conventional;
  if (name == "mechanism1") return MechanismKind::Mechanism1;
  if (name == "mechanism2") return MechanismKind::Mechanism2;
  throw ConfigError("mechanism.kind: unknown mechanism '" + name + "'");
}

}  // namespace detail

/**
 * Parses a scenario object. Layout (all durations accept `_ticks` or
 * `_periods`):
 *
 *   clock:          {ticks_per_period, epsilon_ticks}           optional
 *   topology:       {kind: "circle", n, diameter, range}
 *                   {kind: "explicit", adjacency: [[...], ...]}
 *   mechanism:      {kind: "mechanism1", n_known} | {kind: "mechanism2"}
 *                   | {kind: "conventional", coupling}
 *   attackers:      {ids: [...], kind: random_budget|periodic|stealthy|scripted, ...}
 *   initial_phases: "random_uniform" | [radians per legitimate oscillator]
 *   horizon:        default 20 periods
 *   seed:           unsigned 64-bit
 *   output:         {snapshot_interval}                           optional
 */
inline ScenarioConfig parse_scenario(const nlohmann::json& j) {
  using detail::get_as;
  if (!j.is_object()) throw ConfigError("scenario must be a JSON object");
  ScenarioConfig c;

  if (j.contains("clock")) {
    const auto& cj = j.at("clock");
    const Tick tpp = cj.contains("ticks_per_period") ? get_as<Tick>(cj, "ticks_per_period", "clock")
                                                     : TickClock::kDefaultTicksPerPeriod;
    const Tick eps = cj.contains("epsilon_ticks") ? get_as<Tick>(cj, "epsilon_ticks", "clock")
                                                  : TickClock::kDefaultEpsilonTicks;
    try {
      c.clock = TickClock(tpp, eps);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("clock: ") + e.what());
    }
  }

  const auto& tj = detail::require(j, "topology", "scenario");
  const auto topo_kind = get_as<std::string>(tj, "kind", "topology");
  if (topo_kind == "circle") {
    c.topology = CircleDescription{get_as<std::size_t>(tj, "n", "topology"),
                                   get_as<double>(tj, "diameter", "topology"),
                                   get_as<double>(tj, "range", "topology")};
  } else if (topo_kind == "explicit") {
    c.topology =
        ExplicitDescription{get_as<std::vector<std::vector<NodeId>>>(tj, "adjacency", "topology")};
  } else {
    throw ConfigError("topology.kind: unknown kind '" + topo_kind + "'");
  }
  Topology topology;
  try {
    topology = load_topology(c.topology);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("topology: ") + e.what());
  }
  const std::size_t n = topology.size();

  const auto& mj = detail::require(j, "mechanism", "scenario");
  c.mechanism.kind = detail::parse_mechanism_kind(get_as<std::string>(mj, "kind", "mechanism"));
  switch (c.mechanism.kind) {
    case MechanismKind::Conventional:
      c.mechanism.coupling = get_as<double>(mj, "coupling", "mechanism");
      if (!(c.mechanism.coupling > 0.0 && c.mechanism.coupling <= 1.0)) {
        throw ConfigError("mechanism.coupling must lie in (0, 1]");
      }
      break;
    case MechanismKind::Mechanism1:
      if (!mj.contains("n_known")) throw ConfigError("mechanism1 requires 'n_known'");
      c.mechanism.n_known = get_as<std::int64_t>(mj, "n_known", "mechanism");
      if (*c.mechanism.n_known < 1) throw ConfigError("mechanism.n_known must be positive");
      break;
    case MechanismKind::Mechanism2:
      break;
  }

  if (j.contains("attackers")) {
    const auto& aj = j.at("attackers");
    c.attacks.attacker_ids = get_as<std::vector<NodeId>>(aj, "ids", "attackers");
    std::vector<NodeId> sorted = c.attacks.attacker_ids;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw ConfigError("attackers.ids contains duplicates");
    }
    for (NodeId id : sorted) {
      if (id >= n) throw ConfigError("attackers.ids: id " + std::to_string(id) + " out of range");
    }
    if (!sorted.empty() && sorted.size() >= n) {
      throw ConfigError("attackers.ids: at least one oscillator must be legitimate");
    }
    const auto kind = aj.contains("kind") ? get_as<std::string>(aj, "kind", "attackers")
                                          : std::string("scripted");
    if (kind == "random_budget") {
      c.attacks.kind = attack::RandomBudget{
          get_as<std::int64_t>(aj, "total_pulses", "attackers"),
          detail::require_duration(aj, "horizon", c.clock, "attackers")};
    } else if (kind == "periodic") {
      c.attacks.kind = attack::Periodic{detail::require_duration(aj, "period", c.clock, "attackers"),
                                        detail::require_duration(aj, "horizon", c.clock, "attackers")};
    } else if (kind == "stealthy") {
      c.attacks.kind = attack::Stealthy{detail::require_duration(aj, "horizon", c.clock, "attackers")};
    } else if (kind == "scripted") {
      attack::Scripted scripted;
      if (aj.contains("schedules")) {
        scripted.ticks = get_as<std::vector<std::vector<Tick>>>(aj, "schedules", "attackers");
      } else {
        scripted.ticks.assign(c.attacks.attacker_ids.size(), {});
      }
      if (scripted.ticks.size() != c.attacks.attacker_ids.size()) {
        throw ConfigError("attackers.schedules needs one tick list per attacker id");
      }
      for (std::size_t a = 0; a < scripted.ticks.size(); ++a) {
        if (!validate_schedule({c.attacks.attacker_ids[a], scripted.ticks[a]}, c.clock)) {
          throw ConfigError("attackers.schedules: attacker " +
                            std::to_string(c.attacks.attacker_ids[a]) +
                            " pulses must be increasing and more than epsilon apart");
        }
      }
      c.attacks.kind = std::move(scripted);
    } else {
      throw ConfigError("attackers.kind: unknown kind '" + kind + "'");
    }
  }

  if (j.contains("initial_phases")) {
    const auto& pj = j.at("initial_phases");
    const bool random = (pj.is_string() && pj.get<std::string>() == "random_uniform") ||
                        (pj.is_object() && pj.contains("random_uniform"));
    if (!random) {
      if (!pj.is_array()) throw ConfigError("initial_phases must be \"random_uniform\" or an array");
      try {
        c.initial_phases.radians = pj.get<std::vector<double>>();
      } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("initial_phases: ") + e.what());
      }
      const std::size_t legit = n - c.attacks.attacker_ids.size();
      if (c.initial_phases.radians.size() != legit) {
        throw ConfigError("initial_phases: expected " + std::to_string(legit) +
                          " values (one per legitimate oscillator)");
      }
      for (double p : c.initial_phases.radians) {
        if (!(p >= 0.0 && p <= kTwoPi)) throw ConfigError("initial_phases: value outside [0, 2*pi]");
      }
    }
  }

  if (auto h = detail::read_duration(j, "horizon", c.clock, "scenario")) {
    c.horizon = *h;
  } else {
    c.horizon = 20 * c.clock.period();
  }
  if (c.horizon < 0) throw ConfigError("horizon must be non-negative");

  if (j.contains("seed")) c.seed = get_as<std::uint64_t>(j, "seed", "scenario");

  c.snapshot_interval = c.clock.period() / 100;
  if (j.contains("output")) {
    if (auto s = detail::read_duration(j.at("output"), "snapshot_interval", c.clock, "output")) {
      c.snapshot_interval = *s;
    }
  }
  if (c.snapshot_interval < 0) throw ConfigError("output.snapshot_interval must be non-negative");
  return c;
}

/// Canonical form: every field explicit, durations in ticks.
inline nlohmann::ordered_json to_json(const ScenarioConfig& c) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["clock"] = {{"ticks_per_period", c.clock.period()}, {"epsilon_ticks", c.clock.epsilon()}};
  if (const auto* circle = std::get_if<CircleDescription>(&c.topology)) {
    j["topology"] = {{"kind", "circle"},
                     {"n", circle->n},
                     {"diameter", circle->diameter},
                     {"range", circle->range}};
  } else {
    j["topology"] = {{"kind", "explicit"},
                     {"adjacency", std::get<ExplicitDescription>(c.topology).adjacency}};
  }
  ordered_json mech;
  mech["kind"] = to_string(c.mechanism.kind);
  if (c.mechanism.kind == MechanismKind::Conventional) mech["coupling"] = c.mechanism.coupling;
  if (c.mechanism.kind == MechanismKind::Mechanism1) mech["n_known"] = *c.mechanism.n_known;
  j["mechanism"] = mech;

  ordered_json att;
  att["ids"] = c.attacks.attacker_ids;
  std::visit(
      [&](const auto& kind) {
        using K = std::decay_t<decltype(kind)>;
        if constexpr (std::is_same_v<K, attack::RandomBudget>) {
          att["kind"] = "random_budget";
          att["total_pulses"] = kind.total_pulses;
          att["horizon_ticks"] = kind.horizon;
        } else if constexpr (std::is_same_v<K, attack::Periodic>) {
          att["kind"] = "periodic";
          att["period_ticks"] = kind.period;
          att["horizon_ticks"] = kind.horizon;
        } else if constexpr (std::is_same_v<K, attack::Stealthy>) {
          att["kind"] = "stealthy";
          att["horizon_ticks"] = kind.horizon;
        } else {
          att["kind"] = "scripted";
          att["schedules"] = kind.ticks;
        }
      },
      c.attacks.kind);
  j["attackers"] = att;

  if (c.initial_phases.random_uniform()) {
    j["initial_phases"] = "random_uniform";
  } else {
    j["initial_phases"] = c.initial_phases.radians;
  }
  j["horizon_ticks"] = c.horizon;
  j["seed"] = c.seed;
  j["output"] = {{"snapshot_interval_ticks", c.snapshot_interval}};
  return j;
}

/**
 * Sweep file: {"base": <scenario>, "runs", "seed_base", "workers", "per_run"}.
 * A plain scenario object is accepted as the base of a single-run sweep.
 */
inline SweepConfig parse_sweep(const nlohmann::json& j) {
  using detail::get_as;
  SweepConfig s;
  if (j.is_object() && j.contains("base")) {
    s.base = parse_scenario(j.at("base"));
    if (j.contains("runs")) s.runs = get_as<std::size_t>(j, "runs", "sweep");
    s.seed_base = j.contains("seed_base") ? get_as<std::uint64_t>(j, "seed_base", "sweep") : s.base.seed;
    if (j.contains("workers")) s.workers = get_as<std::size_t>(j, "workers", "sweep");
    if (j.contains("per_run")) s.per_run = get_as<bool>(j, "per_run", "sweep");
  } else {
    s.base = parse_scenario(j);
    s.seed_base = s.base.seed;
  }
  return s;
}

inline nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("'" + path + "': " + e.what());
  }
}

/// FNV-1a over the canonical form with the seed left out, so every run of a
/// sweep shares one digest.
inline std::string config_digest(const ScenarioConfig& c) {
  auto j = to_json(c);
  j.erase("seed");
  const std::string text = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream out;
  out << std::hex;
  out.width(16);
  out.fill('0');
  out << h;
  return out.str();
}

}  // namespace pcosync
