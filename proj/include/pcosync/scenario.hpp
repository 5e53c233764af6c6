#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "pcosync/adversary.hpp"
#include "pcosync/config.hpp"
#include "pcosync/engine.hpp"
#include "pcosync/metrics.hpp"
#include "pcosync/rng.hpp"
#include "pcosync/topology.hpp"

namespace pcosync {

struct RunSummary {
  std::uint64_t seed = 0;
  std::string config_digest;
  MechanismKind mechanism = MechanismKind::Mechanism1;
  Tick horizon = 0;
  std::size_t legitimate_count = 0;
  std::optional<Tick> sync_tick;
  std::vector<ArcPoint> arc_trace;
  /// Post-synchronization firing gaps; empty without synchronization.
  std::vector<Tick> collective_periods;
  /// Gaps between all distinct legitimate firing instants of the run.
  std::vector<Tick> firing_gaps;
  std::optional<ConditionReport> conditions;
  /// Pulses emitted per attacker, in attacker-id order of the config.
  std::vector<std::pair<NodeId, std::size_t>> attack_division;
  double final_arc_rad = 0.0;
  std::size_t legitimate_fired = 0;
  std::size_t shifts = 0;
};

struct ScenarioOutcome {
  RunResult run;
  RunSummary summary;
  std::vector<AttackSchedule> schedules;
};

/// Conditions of the configured mechanism; nullopt for the conventional one.
inline std::optional<ConditionReport> scenario_conditions(const ScenarioConfig& config,
                                                          const Topology& topology) {
  if (config.mechanism.kind == MechanismKind::Conventional) return std::nullopt;
  return validate_conditions(topology, config.mechanism.kind, config.attacks.attacker_ids.size());
}

/// Draws initial phases and attack schedules for `seed` from independent streams.
inline SimulationSetup make_setup(const ScenarioConfig& config, std::uint64_t seed,
                                  std::vector<AttackSchedule>* schedules_out = nullptr) {
  SimulationSetup setup;
  setup.clock = config.clock;
  setup.topology = load_topology(config.topology);
  setup.mechanism.kind = config.mechanism.kind;
  setup.mechanism.coupling = config.mechanism.coupling;
  setup.mechanism.n_total = config.mechanism.n_known.value_or(0);
  setup.horizon = config.horizon;
  setup.snapshot_interval = config.snapshot_interval;

  std::vector<bool> attacker(setup.topology.size(), false);
  for (NodeId id : config.attacks.attacker_ids) attacker.at(id) = true;
  const std::size_t legit = setup.topology.size() - config.attacks.attacker_ids.size();

  if (config.initial_phases.random_uniform()) {
    Rng rng = make_rng(seed, Stream::InitialPhases);
    for (std::size_t k = 0; k < legit; ++k) {
      setup.initial_phases.push_back(uniform_int(rng, 0, config.clock.period()));
    }
  } else {
    for (double p : config.initial_phases.radians) {
      setup.initial_phases.push_back(config.clock.rad_to_ticks(p));
    }
  }

  Rng attack_rng = make_rng(seed, Stream::Attacks);
  setup.attacks = generate(config.attacks, config.clock, attack_rng);
  if (schedules_out) *schedules_out = setup.attacks;
  return setup;
}

inline RunSummary summarize(const ScenarioConfig& config, std::uint64_t seed, const RunResult& run,
                            const std::vector<AttackSchedule>& schedules,
                            const Topology& topology) {
  RunSummary s;
  s.seed = seed;
  s.config_digest = config_digest(config);
  s.mechanism = config.mechanism.kind;
  s.horizon = config.horizon;
  s.legitimate_count = run.legitimate.size();
  s.sync_tick =
      detect_sync(run.log, run.snapshots, run.legitimate, config.clock.period(), config.horizon);
  s.arc_trace = arc_trace(run.snapshots, config.clock);
  if (s.sync_tick) s.collective_periods = collective_period(run.log, run.legitimate, s.sync_tick);
  s.firing_gaps = firing_gaps(run.log, run.legitimate, 0);
  s.conditions = scenario_conditions(config, topology);
  for (const auto& schedule : schedules) {
    std::size_t emitted = 0;
    for (Tick t : schedule.ticks)
      if (t >= 0 && t <= config.horizon) ++emitted;
    s.attack_division.emplace_back(schedule.attacker, emitted);
  }
  if (!s.arc_trace.empty()) s.final_arc_rad = s.arc_trace.back().arc_rad;
  std::vector<bool> legit(topology.size(), false);
  for (NodeId i : run.legitimate) legit[i] = true;
  for (const auto& r : run.log) {
    if (r.type == RecordType::Fired && legit[r.id]) ++s.legitimate_fired;
    if (r.type == RecordType::ShiftedTo2Pi) ++s.shifts;
  }
  return s;
}

/// Runs `config` under `seed` (the config's own seed is ignored).
inline ScenarioOutcome run_scenario(const ScenarioConfig& config, std::uint64_t seed) {
  ScenarioOutcome out;
  SimulationSetup setup = make_setup(config, seed, &out.schedules);
  const Topology topology = setup.topology;
  out.run = simulate(std::move(setup));
  out.summary = summarize(config, seed, out.run, out.schedules, topology);
  return out;
}

inline ScenarioOutcome run_scenario(const ScenarioConfig& config) {
  return run_scenario(config, config.seed);
}

/// A run of a sweep failed; carries the offending seed.
class SweepError : public std::runtime_error {
 public:
  SweepError(std::uint64_t seed, const std::string& what)
      : std::runtime_error("run with seed " + std::to_string(seed) + " failed: " + what),
        seed_(seed) {}
  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
};

struct SweepAggregate {
  std::string config_digest;
  MechanismKind mechanism = MechanismKind::Mechanism1;
  std::size_t runs = 0;
  std::uint64_t seed_base = 0;
  std::size_t synced = 0;
  std::optional<Tick> sync_tick_min;
  /// Lower median of the synchronized runs' sync ticks.
  std::optional<Tick> sync_tick_median;
  std::optional<Tick> sync_tick_max;
  /// Seeds of runs that did not synchronize.
  std::vector<std::uint64_t> unsynced_seeds;
  std::optional<ConditionReport> conditions;
  bool per_run_included = false;
  std::vector<RunSummary> per_run;

  double synced_fraction() const {
    return runs == 0 ? 0.0 : static_cast<double>(synced) / static_cast<double>(runs);
  }
};

/**
 * Runs seeds seed_base .. seed_base + runs - 1, possibly on several threads.
 * Results are stored by run index before aggregation, so the aggregate does
 * not depend on the worker count.
 */
inline SweepAggregate run_sweep(const SweepConfig& sweep) {
  const std::size_t runs = sweep.runs;
  std::vector<RunSummary> summaries(runs);
  std::vector<std::exception_ptr> errors(runs);

  std::size_t workers = sweep.workers == 0 ? std::thread::hardware_concurrency() : sweep.workers;
  workers = std::max<std::size_t>(1, std::min(workers, std::max<std::size_t>(runs, 1)));

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k = next++; k < runs; k = next++) {
      try {
        auto outcome = run_scenario(sweep.base, sweep.seed_base + k);
        outcome.summary.arc_trace.clear();
        outcome.summary.arc_trace.shrink_to_fit();
        summaries[k] = std::move(outcome.summary);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  for (std::size_t k = 0; k < runs; ++k) {
    if (!errors[k]) continue;
    try {
      std::rethrow_exception(errors[k]);
    } catch (const std::exception& e) {
      throw SweepError(sweep.seed_base + k, e.what());
    }
  }

  SweepAggregate agg;
  agg.config_digest = config_digest(sweep.base);
  agg.mechanism = sweep.base.mechanism.kind;
  agg.runs = runs;
  agg.seed_base = sweep.seed_base;
  agg.conditions = scenario_conditions(sweep.base, load_topology(sweep.base.topology));
  std::vector<Tick> ticks;
  for (const auto& s : summaries) {
    if (s.sync_tick) {
      ++agg.synced;
      ticks.push_back(*s.sync_tick);
    } else {
      agg.unsynced_seeds.push_back(s.seed);
    }
  }
  if (!ticks.empty()) {
    std::sort(ticks.begin(), ticks.end());
    agg.sync_tick_min = ticks.front();
    agg.sync_tick_median = ticks[(ticks.size() - 1) / 2];
    agg.sync_tick_max = ticks.back();
  }
  agg.per_run_included = sweep.per_run;
  if (sweep.per_run) agg.per_run = std::move(summaries);
  return agg;
}

}  // namespace pcosync
