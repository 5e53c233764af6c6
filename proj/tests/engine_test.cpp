#include <gtest/gtest.h>

#include <algorithm>
#include <map>

#include "pcosync/pcosync.hpp"

using namespace pcosync;

namespace {

constexpr Tick T = 1'000'000;
constexpr Tick kEps = 10'000;
const TickClock kClock(T, kEps);

SimulationSetup m1_setup(Topology topo, std::int64_t n_known, std::vector<Tick> phases,
                         Tick horizon, std::vector<AttackSchedule> attacks = {}) {
  SimulationSetup s;
  s.clock = kClock;
  s.topology = std::move(topo);
  s.mechanism = {MechanismKind::Mechanism1, 1.0, n_known, 0};
  s.attacks = std::move(attacks);
  s.initial_phases = std::move(phases);
  s.horizon = horizon;
  s.snapshot_interval = T / 100;
  return s;
}

std::vector<EventRecord> records_of(const EventLog& log, RecordType type, NodeId id) {
  std::vector<EventRecord> out;
  for (const auto& r : log)
    if (r.type == type && r.id == id) out.push_back(r);
  return out;
}

std::vector<RecordType> node_trace_at(const EventLog& log, NodeId id, Tick tick) {
  std::vector<RecordType> out;
  for (const auto& r : log)
    if (r.tick == tick && r.id == id && r.type != RecordType::Received) out.push_back(r.type);
  return out;
}

ScenarioConfig random_scenario(MechanismKind kind, double coupling, std::vector<NodeId> attackers,
                               Tick horizon) {
  ScenarioConfig c;
  c.mechanism.kind = kind;
  c.mechanism.coupling = coupling;
  if (kind == MechanismKind::Mechanism1) c.mechanism.n_known = 24;
  c.attacks.attacker_ids = std::move(attackers);
  c.attacks.kind = attack::RandomBudget{c.attacks.attacker_ids.empty() ? 0 : 40, 7 * T / 2};
  c.horizon = horizon;
  return c;
}

}  // namespace

TEST(Engine, TwoOscillatorsInPhaseSynchronizeAtFirstWrap) {
  const auto run = simulate(m1_setup(complete_topology(2), 2, {0, 0}, 3 * T));
  for (NodeId i : {0u, 1u}) {
    const auto trace = node_trace_at(run.log, i, T);
    ASSERT_FALSE(trace.empty());
    EXPECT_EQ(trace.front(), RecordType::Fired);
    EXPECT_EQ(trace.back(), RecordType::ResetToZero);
  }
  EXPECT_EQ(detect_sync(run.log, run.snapshots, run.legitimate, T, 3 * T), T);
}

TEST(Engine, LoneOscillatorOnlyResetsToPi) {
  const auto run = simulate(m1_setup(Topology(std::vector<std::vector<NodeId>>(1)), 1, {0}, 3 * T));
  std::vector<Tick> fires;
  for (const auto& r : records_of(run.log, RecordType::Fired, 0)) fires.push_back(r.tick);
  EXPECT_EQ(fires, (std::vector<Tick>{T, 3 * T / 2, 2 * T, 5 * T / 2, 3 * T}));
  EXPECT_TRUE(records_of(run.log, RecordType::ResetToZero, 0).empty());
  EXPECT_EQ(records_of(run.log, RecordType::ResetToPi, 0).size(), 5u);
  EXPECT_FALSE(detect_sync(run.log, run.snapshots, run.legitimate, T, 3 * T));
}

TEST(Engine, ThreeNodeCompleteGraphAllEndAtZero) {
  const auto run = simulate(m1_setup(complete_topology(3), 3, {0, 0, 0}, 2 * T));
  for (NodeId i = 0; i < 3; ++i) {
    const auto trace = node_trace_at(run.log, i, T);
    EXPECT_EQ(std::count(trace.begin(), trace.end(), RecordType::Fired), 1);
    EXPECT_EQ(trace.back(), RecordType::ResetToZero);
    std::size_t received = 0;
    for (const auto& r : run.log)
      if (r.type == RecordType::Received && r.id == i && r.tick == T) ++received;
    EXPECT_EQ(received, 2u);
  }
}

TEST(Engine, PulsesBelowPiAreIgnored) {
  const AttackSchedule a{1, {T / 10}};
  const auto low = simulate(m1_setup(complete_topology(2), 2, {T / 10}, T / 2, {a}));
  EXPECT_EQ(records_of(low.log, RecordType::Received, 0).size(), 1u);
  EXPECT_TRUE(records_of(low.log, RecordType::ShiftedTo2Pi, 0).empty());

  // Same pulse when the phase already sits at 0.6T.
  const auto high = simulate(m1_setup(complete_topology(2), 2, {T / 2}, T / 2, {a}));
  EXPECT_EQ(records_of(high.log, RecordType::ShiftedTo2Pi, 0).size(), 1u);
}

TEST(Engine, RecentFireSuppressesSecondFire) {
  // Node 0 wraps (unfired) at T-1, fires at 1.5T-1, then two attacker pulses
  // at 1.5T shift it twice without a second firing.
  const std::vector<AttackSchedule> attacks{{1, {3 * T / 2}}, {2, {3 * T / 2}}};
  const auto run = simulate(m1_setup(complete_topology(3), 3, {1}, 2 * T, attacks));
  const auto fires = records_of(run.log, RecordType::Fired, 0);
  ASSERT_FALSE(fires.empty());
  EXPECT_EQ(fires.front().tick, 3 * T / 2 - 1);
  EXPECT_EQ(node_trace_at(run.log, 0, 3 * T / 2),
            (std::vector<RecordType>{RecordType::ShiftedTo2Pi, RecordType::ResetToPi,
                                     RecordType::ShiftedTo2Pi, RecordType::ResetToZero}));
}

TEST(Engine, SetupValidation) {
  EXPECT_THROW(Engine(m1_setup(complete_topology(2), 2, {0}, T)), std::invalid_argument);
  EXPECT_THROW(Engine(m1_setup(complete_topology(2), 2, {0}, T, {{5, {}}})), std::invalid_argument);
  EXPECT_THROW(Engine(m1_setup(complete_topology(3), 3, {0}, T, {{1, {}}, {1, {}}})),
               std::invalid_argument);
  EXPECT_THROW(Engine(m1_setup(complete_topology(2), 2, {0}, T, {{1, {0, kEps}}})),
               std::invalid_argument);
  EXPECT_THROW(Engine(m1_setup(complete_topology(2), 2, {0, T + 1}, T)), std::invalid_argument);
}

// A legitimate oscillator that has just reset to 0 cannot be shifted during
// the following period by a permitted number of attackers, however they time
// their pulses.
TEST(Engine, AttackersCannotShiftAfterZeroReset) {
  const Tick s = T / 10;
  const auto topo = build_circle_deployment(24, 40.0, 39.0);
  std::vector<AttackSchedule> attacks;
  for (NodeId id = 1; id < 24; ++id) attacks.push_back({id, {}});
  // Nine neighbours burst at s; three of them keep pulsing every eps + 1.
  for (NodeId id : {1u, 2u, 3u, 4u, 5u, 6u, 14u, 15u, 16u}) attacks[id - 1].ticks.push_back(s);
  for (NodeId id : {1u, 2u, 3u}) {
    for (Tick t = s + kEps + 1; t <= s + T; t += kEps + 1) attacks[id - 1].ticks.push_back(t);
  }
  const auto run = simulate(m1_setup(topo, 24, {6 * T / 10}, 2 * T, attacks));

  EXPECT_EQ(node_trace_at(run.log, 0, s).back(), RecordType::ResetToZero);
  std::size_t received_in_window = 0;
  for (const auto& r : run.log) {
    if (r.id != 0 || r.tick < s + T / 2 || r.tick >= s + T) continue;
    EXPECT_NE(r.type, RecordType::ShiftedTo2Pi) << "shift at " << r.tick;
    if (r.type == RecordType::Received) ++received_in_window;
  }
  EXPECT_GT(received_in_window, 100u);
}

TEST(EngineProperties, Invariants) {
  struct Case {
    MechanismKind kind;
    double coupling;
    std::vector<NodeId> attackers;
  };
  const std::vector<Case> cases{{MechanismKind::Mechanism1, 1.0, {1, 8, 20}},
                                {MechanismKind::Mechanism1, 1.0, {}},
                                {MechanismKind::Mechanism2, 1.0, {1, 8}},
                                {MechanismKind::Mechanism2, 1.0, {1, 8, 20}},
                                {MechanismKind::Conventional, 1.0, {1, 8, 20}},
                                {MechanismKind::Conventional, 0.021, {}}};
  for (const auto& c : cases) {
    const auto config = random_scenario(c.kind, c.coupling, c.attackers, 5 * T);
    const auto topo = load_topology(config.topology);
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
      SCOPED_TRACE(std::string(to_string(c.kind)) + " seed " + std::to_string(seed));
      const auto run = simulate(make_setup(config, seed));
      ASSERT_EQ(run.log, simulate(make_setup(config, seed)).log);

      const bool rules = c.kind != MechanismKind::Conventional;
      std::vector<bool> legit(24, false);
      for (NodeId i : run.legitimate) legit[i] = true;
      std::map<NodeId, Tick> last_fire;
      for (std::size_t k = 0; k < run.log.size(); ++k) {
        const auto& r = run.log[k];
        if (r.type != RecordType::Fired) continue;
        // Pulse conservation: one Received per out-neighbour, right after the firing.
        const auto& nb = topo.out_neighbors(r.id);
        ASSERT_LT(k + nb.size(), run.log.size());
        for (std::size_t j = 0; j < nb.size(); ++j) {
          const auto& rec = run.log[k + 1 + j];
          ASSERT_EQ(rec.type, RecordType::Received);
          ASSERT_EQ(rec.sender, r.id);
          ASSERT_EQ(rec.id, nb[j]);
          ASSERT_EQ(rec.tick, r.tick);
        }
        if (!legit[r.id] || !rules) continue;
        ASSERT_GE(r.tick, T);
        if (last_fire.count(r.id)) {
          ASSERT_GE(r.tick - last_fire[r.id], kEps);
        }
        last_fire[r.id] = r.tick;
      }

      for (const auto& snap : run.snapshots)
        for (const auto& [id, phase] : snap.phases) {
          ASSERT_GE(phase, 0);
          ASSERT_LT(phase, T);
        }

      if (!rules) continue;
      // Between snapshots a phase moves at unit speed unless the oscillator reset.
      std::map<NodeId, std::vector<Tick>> resets;
      for (const auto& r : run.log)
        if (r.type == RecordType::ResetToZero || r.type == RecordType::ResetToPi)
          resets[r.id].push_back(r.tick);
      for (std::size_t k = 1; k < run.snapshots.size(); ++k) {
        const auto& a = run.snapshots[k - 1];
        const auto& b = run.snapshots[k];
        for (std::size_t i = 0; i < a.phases.size(); ++i) {
          const NodeId id = a.phases[i].first;
          const auto& rs = resets[id];
          const bool reset = std::upper_bound(rs.begin(), rs.end(), a.tick) !=
                             std::upper_bound(rs.begin(), rs.end(), b.tick);
          if (!reset) {
            ASSERT_EQ(b.phases[i].second - a.phases[i].second, b.tick - a.tick);
          }
        }
      }
    }
  }
}

TEST(EngineProperties, LongerHorizonExtendsTheSameRun) {
  auto config = random_scenario(MechanismKind::Mechanism1, 1.0, {1, 8, 20}, 4 * T);
  const auto short_run = simulate(make_setup(config, 3));
  config.horizon = 6 * T;
  const auto long_run = simulate(make_setup(config, 3));
  EventLog prefix;
  for (const auto& r : long_run.log)
    if (r.tick <= 4 * T) prefix.push_back(r);
  EXPECT_EQ(short_run.log, prefix);
  ASSERT_LE(short_run.snapshots.size(), long_run.snapshots.size());
  for (std::size_t k = 0; k < short_run.snapshots.size(); ++k) {
    EXPECT_EQ(short_run.snapshots[k].tick, long_run.snapshots[k].tick);
    EXPECT_EQ(short_run.snapshots[k].phases, long_run.snapshots[k].phases);
  }
}

TEST(EngineProperties, SynchronyPersistsAfterAttackWindow) {
  for (auto kind : {MechanismKind::Mechanism1, MechanismKind::Mechanism2}) {
    const std::vector<NodeId> attackers =
        kind == MechanismKind::Mechanism1 ? std::vector<NodeId>{1, 8, 20} : std::vector<NodeId>{1, 8};
    const auto config = random_scenario(kind, 1.0, attackers, 20 * T);
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const auto outcome = run_scenario(config, seed);
      ASSERT_TRUE(outcome.summary.sync_tick) << to_string(kind) << " seed " << seed;
      EXPECT_EQ(outcome.summary.final_arc_rad, 0.0);
      for (Tick gap : outcome.summary.collective_periods) EXPECT_EQ(gap, T);
    }
  }
}
