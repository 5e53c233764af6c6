#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "pcosync/core.hpp"
#include "pcosync/rng.hpp"

namespace pcosync {

/// Emission instants of one Byzantine attacker.
struct AttackSchedule {
  NodeId attacker = 0;
  std::vector<Tick> ticks;

  friend bool operator==(const AttackSchedule&, const AttackSchedule&) = default;
};

/// Sorted, strictly increasing, and every gap strictly larger than epsilon.
inline bool validate_schedule(const AttackSchedule& schedule, const TickClock& clock) {
  for (std::size_t k = 1; k < schedule.ticks.size(); ++k) {
    if (schedule.ticks[k] - schedule.ticks[k - 1] <= clock.epsilon()) return false;
  }
  return true;
}

/// Largest pulse count that fits in [0, horizon] with gaps above epsilon.
inline std::int64_t schedule_capacity(Tick horizon, const TickClock& clock) {
  return horizon / (clock.epsilon() + 1) + 1;
}

namespace attack {

/// `total_pulses` instants uniform over [0, horizon], each handed to a
/// uniformly chosen attacker.
struct RandomBudget {
  std::int64_t total_pulses = 0;
  Tick horizon = 0;
  friend bool operator==(const RandomBudget&, const RandomBudget&) = default;
};

/// 0, p, 2p, ... up to the horizon, for every attacker.
struct Periodic {
  Tick period = 0;
  Tick horizon = 0;
  friend bool operator==(const Periodic&, const Periodic&) = default;
};

/// One uniformly placed pulse per half-period window.
struct Stealthy {
  Tick horizon = 0;
  friend bool operator==(const Stealthy&, const Stealthy&) = default;
};

/// Explicit instants, one list per entry of attacker_ids.
struct Scripted {
  std::vector<std::vector<Tick>> ticks;
  friend bool operator==(const Scripted&, const Scripted&) = default;
};

}  // namespace attack

struct AttackSpec {
  std::vector<NodeId> attacker_ids;
  std::variant<attack::RandomBudget, attack::Periodic, attack::Stealthy, attack::Scripted> kind =
      attack::Scripted{};

  friend bool operator==(const AttackSpec&, const AttackSpec&) = default;
};

namespace detail {

inline constexpr int kResampleAttempts = 1000;

inline bool clashes(const std::vector<Tick>& accepted, Tick candidate, Tick epsilon) {
  auto it = std::lower_bound(accepted.begin(), accepted.end(), candidate);
  if (it != accepted.end() && *it - candidate <= epsilon) return true;
  if (it != accepted.begin() && candidate - *std::prev(it) <= epsilon) return true;
  return false;
}

inline void insert_sorted(std::vector<Tick>& accepted, Tick value) {
  accepted.insert(std::upper_bound(accepted.begin(), accepted.end(), value), value);
}

/// Accepts `draws` in order, redrawing each clashing one from [lo, hi].
inline std::vector<Tick> separate(const std::vector<Tick>& draws, Tick lo, Tick hi,
                                  const TickClock& clock, Rng& rng, NodeId attacker) {
  std::vector<Tick> accepted;
  accepted.reserve(draws.size());
  for (Tick candidate : draws) {
    int attempts = 0;
    while (clashes(accepted, candidate, clock.epsilon())) {
      if (++attempts > kResampleAttempts) {
        throw std::runtime_error("could not space the pulses of attacker " +
                                 std::to_string(attacker) + " more than epsilon apart");
      }
      candidate = uniform_int(rng, lo, hi);
    }
    insert_sorted(accepted, candidate);
  }
  return accepted;
}

}  // namespace detail

/**
 * Builds one schedule per attacker id, in the order of `spec.attacker_ids`.
 * Randomized kinds draw only from `rng`, so equal seeds give equal schedules.
 */
inline std::vector<AttackSchedule> generate(const AttackSpec& spec, const TickClock& clock,
                                            Rng& rng) {
  const auto& ids = spec.attacker_ids;
  std::vector<AttackSchedule> schedules;
  schedules.reserve(ids.size());
  for (NodeId id : ids) schedules.push_back({id, {}});

  auto check_capacity = [&](Tick horizon) {
    for (const auto& s : schedules) {
      if (static_cast<std::int64_t>(s.ticks.size()) > schedule_capacity(horizon, clock)) {
        throw std::invalid_argument("attacker " + std::to_string(s.attacker) + " is assigned " +
                                    std::to_string(s.ticks.size()) +
                                    " pulses, more than fit in the horizon");
      }
    }
  };

  std::visit(
      [&](const auto& kind) {
        using K = std::decay_t<decltype(kind)>;
        if constexpr (std::is_same_v<K, attack::RandomBudget>) {
          if (kind.total_pulses < 0 || kind.horizon < 0) {
            throw std::invalid_argument("random budget needs non-negative pulses and horizon");
          }
          if (kind.total_pulses > 0 && ids.empty()) {
            throw std::invalid_argument("random budget without attackers");
          }
          std::vector<std::vector<Tick>> draws(ids.size());
          for (std::int64_t k = 0; k < kind.total_pulses; ++k) {
            const Tick at = uniform_int(rng, 0, kind.horizon);
            const auto who = static_cast<std::size_t>(
                uniform_int(rng, 0, static_cast<std::int64_t>(ids.size()) - 1));
            draws[who].push_back(at);
          }
          for (std::size_t a = 0; a < ids.size(); ++a) schedules[a].ticks = draws[a];
          check_capacity(kind.horizon);
          for (std::size_t a = 0; a < ids.size(); ++a) {
            schedules[a].ticks = detail::separate(draws[a], 0, kind.horizon, clock, rng, ids[a]);
          }
        } else if constexpr (std::is_same_v<K, attack::Periodic>) {
          if (kind.period <= clock.epsilon()) {
            throw std::invalid_argument("periodic attack period must exceed epsilon");
          }
          for (auto& s : schedules)
            for (Tick t = 0; t <= kind.horizon; t += kind.period) s.ticks.push_back(t);
        } else if constexpr (std::is_same_v<K, attack::Stealthy>) {
          const Tick half = clock.half_period();
          for (auto& s : schedules) {
            for (Tick start = 0; start <= kind.horizon; start += half) {
              const Tick end = std::min(start + half - 1, kind.horizon);
              Tick candidate = uniform_int(rng, start, end);
              int attempts = 0;
              while (!s.ticks.empty() && candidate - s.ticks.back() <= clock.epsilon()) {
                if (++attempts > detail::kResampleAttempts) {
                  throw std::runtime_error("could not place stealthy pulse for attacker " +
                                           std::to_string(s.attacker));
                }
                candidate = uniform_int(rng, start, end);
              }
              s.ticks.push_back(candidate);
            }
          }
        } else {
          if (kind.ticks.size() != ids.size()) {
            throw std::invalid_argument("scripted attack needs one tick list per attacker");
          }
          for (std::size_t a = 0; a < ids.size(); ++a) {
            schedules[a].ticks = kind.ticks[a];
            if (!validate_schedule(schedules[a], clock)) {
              throw std::invalid_argument("scripted schedule of attacker " +
                                          std::to_string(ids[a]) +
                                          " violates the epsilon separation");
            }
          }
        }
      },
      spec.kind);
  return schedules;
}

}  // namespace pcosync
