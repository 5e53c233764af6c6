#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pcosync/config.hpp"
#include "pcosync/engine.hpp"
#include "pcosync/scenario.hpp"

namespace pcosync {

/// Radians and seconds are written with 9 significant digits.
inline std::string format_real(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", value);
  return buf;
}

/// The value nlohmann::json will print as its 9-significant-digit form.
inline double round_real(double value) { return std::stod(format_real(value)); }

/**
 * One JSON object per line, fields in this fixed order:
 *   {"tick":T,"type":"received","receiver":R,"sender":S,"seq":Q}
 *   {"tick":T,"type":"fired"|"shifted_to_2pi"|"reset_to_zero"|"reset_to_pi","id":I}
 */
inline void write_events_jsonl(std::ostream& out, const EventLog& log) {
  for (const auto& r : log) {
    out << "{\"tick\":" << r.tick << ",\"type\":\"" << to_string(r.type) << '"';
    if (r.type == RecordType::Received) {
      out << ",\"receiver\":" << r.id << ",\"sender\":" << r.sender << ",\"seq\":" << r.seq;
    } else {
      out << ",\"id\":" << r.id;
    }
    out << "}\n";
  }
}

/// Columns: tick, seconds, arc_rad, then phase_<id> (radians) per legitimate oscillator.
inline void write_phases_csv(std::ostream& out, const std::vector<PhaseSnapshot>& snapshots,
                             const TickClock& clock) {
  out << "tick,seconds,arc_rad";
  if (!snapshots.empty()) {
    for (const auto& [id, phase] : snapshots.front().phases) out << ",phase_" << id;
  }
  out << '\n';
  for (const auto& s : snapshots) {
    const Tick arc = s.phases.empty() ? 0 : containing_arc_ticks(s, clock.period());
    out << s.tick << ',' << format_real(clock.ticks_to_seconds(s.tick)) << ','
        << format_real(clock.ticks_to_rad(arc));
    for (const auto& [id, phase] : s.phases) out << ',' << format_real(clock.ticks_to_rad(phase));
    out << '\n';
  }
}

/// Columns: tick, seconds, arc_rad.
inline void write_arc_csv(std::ostream& out, const std::vector<ArcPoint>& trace,
                          const TickClock& clock) {
  out << "tick,seconds,arc_rad\n";
  for (const auto& p : trace) {
    out << p.tick << ',' << format_real(clock.ticks_to_seconds(p.tick)) << ','
        << format_real(p.arc_rad) << '\n';
  }
}

inline nlohmann::ordered_json to_json(const ConditionReport& r) {
  nlohmann::ordered_json j;
  j["mechanism"] = to_string(r.mechanism);
  j["n"] = r.n;
  j["d"] = r.d;
  j["m"] = r.m;
  j["degree_bound"] = r.degree_bound;
  j["degree_ok"] = r.degree_ok;
  j["attacker_bound_ok"] = r.attacker_bound_ok;
  j["max_allowed_attackers"] = r.max_allowed_attackers;
  j["conditions_met"] = r.ok();
  return j;
}

template <typename T>
nlohmann::ordered_json optional_json(const std::optional<T>& value) {
  return value ? nlohmann::ordered_json(*value) : nlohmann::ordered_json(nullptr);
}

/// The arc trace is left out; it goes to the CSV outputs.
inline nlohmann::ordered_json to_json(const RunSummary& s, const TickClock& clock) {
  nlohmann::ordered_json j;
  j["seed"] = s.seed;
  j["config_digest"] = s.config_digest;
  j["mechanism"] = to_string(s.mechanism);
  j["horizon_ticks"] = s.horizon;
  j["legitimate_count"] = s.legitimate_count;
  j["synced"] = s.sync_tick.has_value();
  j["sync_tick"] = optional_json(s.sync_tick);
  j["sync_seconds"] = s.sync_tick ? nlohmann::ordered_json(round_real(clock.ticks_to_seconds(*s.sync_tick)))
                                  : nlohmann::ordered_json(nullptr);
  j["final_arc_rad"] = round_real(s.final_arc_rad);
  j["collective_periods"] = s.collective_periods;
  j["firing_gaps"] = s.firing_gaps;
  j["conditions"] = s.conditions ? to_json(*s.conditions) : nlohmann::ordered_json(nullptr);
  nlohmann::ordered_json division = nlohmann::ordered_json::array();
  for (const auto& [id, count] : s.attack_division) {
    division.push_back({{"attacker", id}, {"pulses", count}});
  }
  j["attack_division"] = division;
  j["legitimate_fired"] = s.legitimate_fired;
  j["shifts"] = s.shifts;
  return j;
}

inline nlohmann::ordered_json to_json(const SweepAggregate& a) {
  nlohmann::ordered_json j;
  j["config_digest"] = a.config_digest;
  j["mechanism"] = to_string(a.mechanism);
  j["runs"] = a.runs;
  j["seed_base"] = a.seed_base;
  j["synced"] = a.synced;
  j["synced_fraction"] = round_real(a.synced_fraction());
  j["sync_tick_min"] = optional_json(a.sync_tick_min);
  j["sync_tick_median"] = optional_json(a.sync_tick_median);
  j["sync_tick_max"] = optional_json(a.sync_tick_max);
  j["unsynced_seeds"] = a.unsynced_seeds;
  j["conditions"] = a.conditions ? to_json(*a.conditions) : nlohmann::ordered_json(nullptr);
  j["condition_violation"] = a.conditions ? !a.conditions->ok() : false;
  if (a.per_run_included) {
    nlohmann::ordered_json runs = nlohmann::ordered_json::array();
    for (const auto& s : a.per_run) {
      nlohmann::ordered_json r;
      r["seed"] = s.seed;
      r["synced"] = s.sync_tick.has_value();
      r["sync_tick"] = optional_json(s.sync_tick);
      r["final_arc_rad"] = round_real(s.final_arc_rad);
      r["collective_periods"] = s.collective_periods;
      r["firing_gaps"] = s.firing_gaps;
      runs.push_back(std::move(r));
    }
    j["per_run"] = std::move(runs);
  }
  return j;
}

/// {"<attacker id>": [ticks...], ...}; each array is a plain list of ticks.
inline nlohmann::ordered_json schedules_to_json(const std::vector<AttackSchedule>& schedules) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& s : schedules) j[std::to_string(s.attacker)] = s.ticks;
  return j;
}

}  // namespace pcosync
