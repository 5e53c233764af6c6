#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "pcosync/core.hpp"
#include "pcosync/engine.hpp"

namespace pcosync {

/**
 * Length of the shortest arc holding every phase, for phases in [0, period).
 * It is the circumference minus the widest gap between circularly adjacent
 * phases. Exact on the tick grid.
 */
inline Tick containing_arc_ticks(std::span<const Tick> phases, Tick period) {
  if (phases.empty()) throw std::invalid_argument("containing_arc of an empty phase set");
  std::vector<Tick> sorted(phases.begin(), phases.end());
  std::sort(sorted.begin(), sorted.end());
  Tick widest = sorted.front() + period - sorted.back();
  for (std::size_t k = 1; k < sorted.size(); ++k) widest = std::max(widest, sorted[k] - sorted[k - 1]);
  return period - widest;
}

/// Same construction for phases given in radians (reduced mod 2*pi).
inline double containing_arc(std::span<const double> phases) {
  if (phases.empty()) throw std::invalid_argument("containing_arc of an empty phase set");
  std::vector<double> sorted;
  sorted.reserve(phases.size());
  for (double p : phases) {
    double r = std::fmod(p, kTwoPi);
    if (r < 0) r += kTwoPi;
    sorted.push_back(r);
  }
  std::sort(sorted.begin(), sorted.end());
  double widest = sorted.front() + kTwoPi - sorted.back();
  for (std::size_t k = 1; k < sorted.size(); ++k) widest = std::max(widest, sorted[k] - sorted[k - 1]);
  return kTwoPi - widest;
}

inline Tick containing_arc_ticks(const PhaseSnapshot& snapshot, Tick period) {
  std::vector<Tick> values;
  values.reserve(snapshot.phases.size());
  for (const auto& [id, phase] : snapshot.phases) values.push_back(phase);
  return containing_arc_ticks(values, period);
}

struct ArcPoint {
  Tick tick = 0;
  Tick arc_ticks = 0;
  double arc_rad = 0.0;
};

inline std::vector<ArcPoint> arc_trace(const std::vector<PhaseSnapshot>& snapshots,
                                       const TickClock& clock) {
  std::vector<ArcPoint> trace;
  trace.reserve(snapshots.size());
  for (const auto& s : snapshots) {
    if (s.phases.empty()) continue;
    const Tick arc = containing_arc_ticks(s, clock.period());
    trace.push_back({s.tick, arc, clock.ticks_to_rad(arc)});
  }
  return trace;
}

/**
 * Earliest tick t* at which
 *   - every legitimate oscillator resets to 0,
 *   - every snapshot from t* on has a zero containing arc,
 *   - legitimate firings after t* happen exactly at t* + kT (k >= 1, up to
 *     the horizon) with every legitimate oscillator firing once each time,
 *   - at least one such period fits before the horizon.
 */
inline std::optional<Tick> detect_sync(const EventLog& log,
                                       const std::vector<PhaseSnapshot>& snapshots,
                                       const std::vector<NodeId>& legitimate, Tick period,
                                       Tick horizon) {
  if (legitimate.empty()) return std::nullopt;
  std::size_t max_id = 0;
  for (NodeId i : legitimate) max_id = std::max(max_id, i);
  std::vector<bool> is_legit(max_id + 1, false);
  for (NodeId i : legitimate) is_legit[i] = true;
  auto legit = [&](NodeId i) { return i < is_legit.size() && is_legit[i]; };

  std::map<Tick, std::vector<NodeId>> zero_resets;
  std::vector<std::pair<Tick, NodeId>> fires;
  for (const auto& r : log) {
    if (!legit(r.id)) continue;
    if (r.type == RecordType::ResetToZero) zero_resets[r.tick].push_back(r.id);
    if (r.type == RecordType::Fired) fires.emplace_back(r.tick, r.id);
  }

  std::optional<Tick> last_unsynced;
  for (const auto& s : snapshots) {
    if (!s.phases.empty() && containing_arc_ticks(s, period) != 0) last_unsynced = s.tick;
  }

  const std::size_t population = legitimate.size();
  for (auto& [tick, ids] : zero_resets) {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    if (ids.size() != population) continue;
    if (last_unsynced && *last_unsynced >= tick) continue;
    if (tick + period > horizon) continue;

    auto it = std::upper_bound(fires.begin(), fires.end(), std::make_pair(tick, max_id));
    bool ok = true;
    Tick expected = tick + period;
    while (ok && expected <= horizon) {
      std::vector<NodeId> group;
      while (it != fires.end() && it->first == expected) group.push_back((it++)->second);
      std::sort(group.begin(), group.end());
      ok = group.size() == population && std::adjacent_find(group.begin(), group.end()) == group.end();
      expected += period;
    }
    if (ok && it == fires.end()) return tick;
  }
  return std::nullopt;
}

/// Gaps between consecutive distinct ticks at which legitimate oscillators fire, from `from` on.
inline std::vector<Tick> firing_gaps(const EventLog& log, const std::vector<NodeId>& legitimate,
                                     Tick from) {
  std::vector<bool> is_legit;
  for (NodeId i : legitimate) {
    if (i >= is_legit.size()) is_legit.resize(i + 1, false);
    is_legit[i] = true;
  }
  std::vector<Tick> instants;
  for (const auto& r : log) {
    if (r.type != RecordType::Fired || r.tick < from) continue;
    if (r.id >= is_legit.size() || !is_legit[r.id]) continue;
    if (instants.empty() || instants.back() != r.tick) instants.push_back(r.tick);
  }
  std::vector<Tick> gaps;
  for (std::size_t k = 1; k < instants.size(); ++k) gaps.push_back(instants[k] - instants[k - 1]);
  return gaps;
}

/// Collective oscillation period samples after synchronization at `sync_tick`.
inline std::vector<Tick> collective_period(const EventLog& log, const std::vector<NodeId>& legitimate,
                                           std::optional<Tick> sync_tick) {
  if (!sync_tick) throw std::logic_error("collective_period requires a synchronized run");
  return firing_gaps(log, legitimate, *sync_tick);
}

}  // namespace pcosync
