#pragma once

#include <cstdint>
#include <deque>
#include <limits>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pcosync/adversary.hpp"
#include "pcosync/core.hpp"
#include "pcosync/mechanisms.hpp"
#include "pcosync/state.hpp"
#include "pcosync/topology.hpp"

namespace pcosync {

enum class RecordType { Fired, Received, ShiftedTo2Pi, ResetToZero, ResetToPi };

inline const char* to_string(RecordType type) {
  switch (type) {
    case RecordType::Fired: return "fired";
    case RecordType::Received: return "received";
    case RecordType::ShiftedTo2Pi: return "shifted_to_2pi";
    case RecordType::ResetToZero: return "reset_to_zero";
    case RecordType::ResetToPi: return "reset_to_pi";
  }
  return "?";
}

/// `sender` and `seq` are meaningful for Received records only.
struct EventRecord {
  RecordType type = RecordType::Fired;
  Tick tick = 0;
  NodeId id = 0;
  NodeId sender = 0;
  Seq seq = 0;

  friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

using EventLog = std::vector<EventRecord>;

/// Post-instant phases of the legitimate oscillators, ascending by id.
struct PhaseSnapshot {
  Tick tick = 0;
  std::vector<std::pair<NodeId, Tick>> phases;
};

struct SimulationSetup {
  TickClock clock;
  Topology topology;
  /// Kind, coupling and N; each oscillator's own degree is filled in from the topology.
  MechanismConfig mechanism;
  /// Every node with a schedule (possibly empty) is an attacker.
  std::vector<AttackSchedule> attacks;
  /// One phase in [0, T] per legitimate node, ascending by id.
  std::vector<Tick> initial_phases;
  Tick horizon = 0;
  /// Spacing of periodic snapshots; 0 records snapshots at event instants only.
  Tick snapshot_interval = 0;
};

struct RunResult {
  EventLog log;
  std::vector<PhaseSnapshot> snapshots;
  /// Indexed by node id; entries for attackers are left default.
  std::vector<OscillatorState> final_states;
  std::vector<NodeId> legitimate;
  std::vector<NodeId> attackers;
};

/// Thrown when a single instant produces more than N^2 firings.
class CascadeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/**
 * Discrete-event kernel with zero-delay pulse propagation.
 *
 * Events at one tick are handled in the order: attacker pulses, then phase
 * wraps by ascending node id. All of them are popped before any pulse is
 * processed; the resulting deliveries are then handled one at a time in
 * sequence order, and a delivery that lifts its receiver to 2*pi runs the
 * top-of-cycle rule immediately, which may queue further deliveries at the
 * same tick. The instant ends when the queue of deliveries drains.
 */
class Engine {
 public:
  explicit Engine(SimulationSetup setup) : setup_(std::move(setup)) {
    const std::size_t n = setup_.topology.size();
    is_attacker_.assign(n, false);
    for (const auto& schedule : setup_.attacks) {
      if (schedule.attacker >= n) {
        throw std::invalid_argument("attacker id " + std::to_string(schedule.attacker) +
                                    " outside the topology");
      }
      if (is_attacker_[schedule.attacker]) {
        throw std::invalid_argument("attacker id " + std::to_string(schedule.attacker) +
                                    " listed twice");
      }
      if (!validate_schedule(schedule, setup_.clock)) {
        throw std::invalid_argument("schedule of attacker " + std::to_string(schedule.attacker) +
                                    " violates the epsilon separation");
      }
      is_attacker_[schedule.attacker] = true;
    }
    for (NodeId i = 0; i < n; ++i) {
      (is_attacker_[i] ? attackers_ : legitimate_).push_back(i);
    }
    if (setup_.initial_phases.size() != legitimate_.size()) {
      throw std::invalid_argument("expected " + std::to_string(legitimate_.size()) +
                                  " initial phases, got " +
                                  std::to_string(setup_.initial_phases.size()));
    }
    for (Tick p : setup_.initial_phases) {
      if (p < 0 || p > setup_.clock.period()) {
        throw std::invalid_argument("initial phase outside [0, T]");
      }
    }
    if (setup_.horizon < 0) throw std::invalid_argument("negative horizon");
    if (setup_.snapshot_interval < 0) throw std::invalid_argument("negative snapshot interval");

    mechanisms_.reserve(n);
    for (NodeId i = 0; i < n; ++i) {
      MechanismConfig config = setup_.mechanism;
      config.own_degree = static_cast<std::int64_t>(setup_.topology.degree(i));
      mechanisms_.emplace_back(config, setup_.clock);
    }
  }

  RunResult run() {
    reset();
    const Tick interval = setup_.snapshot_interval;
    Tick next_snapshot = interval > 0 ? 0 : kNever;
    while (true) {
      const Tick next_event = peek_tick();
      if (next_snapshot <= setup_.horizon && next_snapshot < next_event) {
        snapshot(next_snapshot);
        next_snapshot += interval;
        continue;
      }
      if (next_event > setup_.horizon) break;
      resolve_instant(next_event);
      snapshot(next_event);
      if (next_snapshot == next_event) next_snapshot += interval;
    }
    RunResult result;
    result.log = std::move(log_);
    result.snapshots = std::move(snapshots_);
    result.final_states = std::move(states_);
    result.legitimate = legitimate_;
    result.attackers = attackers_;
    return result;
  }

 private:
  static constexpr Tick kNever = std::numeric_limits<Tick>::max();

  enum class EventKind : int { AttackerPulse = 0, PhaseWrap = 1 };

  struct Event {
    Tick tick;
    EventKind kind;
    NodeId node;
    std::uint64_t generation;
    std::uint64_t order;
  };

  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      if (a.tick != b.tick) return a.tick > b.tick;
      if (a.kind != b.kind) return a.kind > b.kind;
      if (a.node != b.node) return a.node > b.node;
      return a.order > b.order;
    }
  };

  struct Delivery {
    NodeId receiver;
    Seq seq;
  };

  void reset() {
    const std::size_t n = setup_.topology.size();
    states_.assign(n, OscillatorState{});
    wrap_generation_.assign(n, 0);
    queue_ = {};
    log_.clear();
    snapshots_.clear();
    next_seq_ = 0;
    next_order_ = 0;
    for (std::size_t k = 0; k < legitimate_.size(); ++k) {
      auto& s = states_[legitimate_[k]];
      s.id = legitimate_[k];
      s.started_at = 0;
      s.set_phase(setup_.initial_phases[k], 0);
      schedule_wrap(s.id, 0);
    }
    for (const auto& schedule : setup_.attacks) {
      for (Tick t : schedule.ticks) {
        if (t < 0 || t > setup_.horizon) continue;
        queue_.push({t, EventKind::AttackerPulse, schedule.attacker, 0, next_order_++});
      }
    }
  }

  Tick peek_tick() {
    while (!queue_.empty() && stale(queue_.top())) queue_.pop();
    return queue_.empty() ? kNever : queue_.top().tick;
  }

  bool stale(const Event& e) const {
    return e.kind == EventKind::PhaseWrap && e.generation != wrap_generation_[e.node];
  }

  void schedule_wrap(NodeId i, Tick now) {
    const Tick phase = states_[i].phase_at(now);
    const Tick at = now + (setup_.clock.period() - phase);
    queue_.push({at, EventKind::PhaseWrap, i, ++wrap_generation_[i], next_order_++});
  }

  void resolve_instant(Tick now) {
    fired_this_instant_ = 0;
    pending_.clear();
    while (peek_tick() == now) {
      const Event e = queue_.top();
      queue_.pop();
      if (e.kind == EventKind::AttackerPulse) {
        emit(e.node, now);
      } else {
        reach_top(e.node, now);
      }
    }
    while (!pending_.empty()) {
      const Delivery d = pending_.front();
      pending_.pop_front();
      deliver(d, now);
    }
  }

  void emit(NodeId sender, Tick now) {
    log_.push_back({RecordType::Fired, now, sender, 0, 0});
    for (NodeId r : setup_.topology.out_neighbors(sender)) {
      const Seq seq = ++next_seq_;
      log_.push_back({RecordType::Received, now, r, sender, seq});
      if (!is_attacker_[r]) pending_.push_back({r, seq});
    }
  }

  void reach_top(NodeId i, Tick now) {
    auto& s = states_[i];
    s.prune(now, setup_.clock);
    s.set_phase(setup_.clock.period(), now);
    const TopAction action = mechanisms_[i].on_reach_top(s, now);
    if (action.fire) {
      const auto n = static_cast<std::int64_t>(setup_.topology.size());
      if (++fired_this_instant_ > n * n) {
        throw CascadeError("more than N^2 firings at tick " + std::to_string(now));
      }
      s.last_fire_tick = now;
      emit(i, now);
    }
    if (action.reset_to == ResetTarget::Zero) {
      s.set_phase(0, now);
      s.zero_resets.push_back(now);
      log_.push_back({RecordType::ResetToZero, now, i, 0, 0});
    } else {
      s.set_phase(setup_.clock.half_period(), now);
      log_.push_back({RecordType::ResetToPi, now, i, 0, 0});
    }
    schedule_wrap(i, now);
  }

  void deliver(const Delivery& d, Tick now) {
    auto& s = states_[d.receiver];
    s.prune(now, setup_.clock);
    s.record_receive(now, d.seq);
    const PulseAction action = mechanisms_[d.receiver].on_pulse(s, now, d.seq);
    switch (action.kind) {
      case PulseAction::Kind::Ignore:
        break;
      case PulseAction::Kind::ShiftTo2Pi:
        log_.push_back({RecordType::ShiftedTo2Pi, now, d.receiver, 0, 0});
        reach_top(d.receiver, now);
        break;
      case PulseAction::Kind::JumpTo:
        if (action.target >= setup_.clock.period()) {
          reach_top(d.receiver, now);
        } else {
          s.set_phase(action.target, now);
          schedule_wrap(d.receiver, now);
        }
        break;
    }
  }

  void snapshot(Tick now) {
    PhaseSnapshot snap;
    snap.tick = now;
    snap.phases.reserve(legitimate_.size());
    for (NodeId i : legitimate_) snap.phases.emplace_back(i, states_[i].phase_at(now));
    snapshots_.push_back(std::move(snap));
  }

  SimulationSetup setup_;
  std::vector<bool> is_attacker_;
  std::vector<NodeId> legitimate_;
  std::vector<NodeId> attackers_;
  std::vector<Mechanism> mechanisms_;

  std::vector<OscillatorState> states_;
  std::vector<std::uint64_t> wrap_generation_;
  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  std::deque<Delivery> pending_;
  EventLog log_;
  std::vector<PhaseSnapshot> snapshots_;
  Seq next_seq_ = 0;
  std::uint64_t next_order_ = 0;
  std::int64_t fired_this_instant_ = 0;
};

inline RunResult simulate(SimulationSetup setup) { return Engine(std::move(setup)).run(); }

}  // namespace pcosync
