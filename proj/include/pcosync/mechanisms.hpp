#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>

#include "pcosync/core.hpp"
#include "pcosync/state.hpp"

namespace pcosync {

/// Phase response function: -phase on [0, pi], 2*pi - phase on (pi, 2*pi].
inline double prf(double phase) {
  if (!(phase >= 0.0 && phase <= kTwoPi)) {
    throw std::out_of_range("prf: phase outside [0, 2*pi]");
  }
  return phase <= std::numbers::pi ? -phase : kTwoPi - phase;
}

/**
 * Conventional jump phase + l * prf(phase), evaluated on the tick grid and
 * rounded to the nearest tick. A result equal to the period means the
 * oscillator reached 2*pi and fires immediately.
 */
inline Tick apply_conventional_jump(Tick phase, double coupling, const TickClock& clock) {
  if (!(coupling > 0.0 && coupling <= 1.0)) {
    throw std::invalid_argument("coupling strength must lie in (0, 1]");
  }
  if (phase < 0 || phase > clock.period()) {
    throw std::out_of_range("apply_conventional_jump: phase outside [0, T]");
  }
  // prf scaled to ticks; the half-period point belongs to the delaying branch.
  const Tick response = phase <= clock.half_period() ? -phase : clock.period() - phase;
  const auto jumped = static_cast<Tick>(
      std::llround(static_cast<double>(phase) + coupling * static_cast<double>(response)));
  return std::clamp<Tick>(jumped, 0, clock.period());
}

struct MechanismConfig {
  MechanismKind kind = MechanismKind::Mechanism1;
  /// Coupling strength l (conventional only).
  double coupling = 1.0;
  /// Network size N (Mechanism 1 only).
  std::int64_t n_total = 0;
  /// Own degree d_i (Mechanisms 1 and 2).
  std::int64_t own_degree = 0;
};

enum class ResetTarget { Zero, Pi };

struct TopAction {
  bool fire = false;
  ResetTarget reset_to = ResetTarget::Pi;
};

struct PulseAction {
  enum class Kind { Ignore, ShiftTo2Pi, JumpTo };
  Kind kind = Kind::Ignore;
  /// Target phase for JumpTo.
  Tick target = 0;

  static PulseAction ignore() { return {}; }
  static PulseAction shift() { return {Kind::ShiftTo2Pi, 0}; }
  static PulseAction jump(Tick to) { return {Kind::JumpTo, to}; }
};

/**
 * Per-oscillator decision rules. Each instance is built for one oscillator and
 * only knows what that oscillator may know: N (Mechanism 1) or its own degree
 * (Mechanism 2). Pure functions of the state handed in.
 *
 * Mechanisms 1 and 2, on reaching 2*pi at t:
 *   - fire unless already fired in (t - eps, t] or t < t0 + T;
 *   - reset to 0 when enough pulses arrived in (t - eps, t], else to pi.
 * On a pulse at t' while the phase is in [pi, 2*pi], jump to 2*pi when, not
 * counting the current pulse, either
 *   (a) the count in [t' - T/2, t'] meets the response threshold and there
 *       was no reset to 0 in (t' - T, t'), or
 *   (b) the count in (t' - eps, t'] meets the response threshold.
 */
class Mechanism {
 public:
  Mechanism(MechanismConfig config, TickClock clock) : config_(config), clock_(clock) {
    switch (config_.kind) {
      case MechanismKind::Conventional:
        if (!(config_.coupling > 0.0 && config_.coupling <= 1.0)) {
          throw std::invalid_argument("coupling strength must lie in (0, 1]");
        }
        break;
      case MechanismKind::Mechanism1:
        if (config_.n_total < 1) throw std::invalid_argument("Mechanism 1 needs N >= 1");
        if (config_.own_degree < 0) throw std::invalid_argument("negative degree");
        // Zero reset needs more than floor(N/3) pulses.
        zero_reset_min_ = config_.n_total / 3 + 1;
        response_threshold_ = config_.own_degree - 2 * config_.n_total / 3 - 1;
        break;
      case MechanismKind::Mechanism2:
        if (config_.own_degree < 0) throw std::invalid_argument("negative degree");
        zero_reset_min_ = config_.own_degree / 3;
        // Non-positive for d_i <= 11; applied as written.
        response_threshold_ = config_.own_degree / 6 - 1;
        break;
    }
  }

  const MechanismConfig& config() const { return config_; }
  MechanismKind kind() const { return config_.kind; }

  /// Minimum pulse count in (t - eps, t] that selects a reset to 0.
  std::int64_t zero_reset_min() const { return zero_reset_min_; }

  /// Minimum prior pulse count that lets a pulse shift the phase to 2*pi.
  std::int64_t response_threshold() const { return response_threshold_; }

  TopAction on_reach_top(const OscillatorState& state, Tick now) const {
    if (state.phase_at(now) != clock_.period()) {
      throw std::logic_error("on_reach_top called for oscillator " + std::to_string(state.id) +
                             " whose phase is not 2*pi");
    }
    if (config_.kind == MechanismKind::Conventional) {
      return {true, ResetTarget::Zero};
    }
    TopAction action;
    const bool recently_fired = state.last_fire_tick && *state.last_fire_tick > now - clock_.epsilon();
    const bool initiated = now >= state.started_at + clock_.period();
    action.fire = !recently_fired && initiated;
    const auto count = receive_count(state, Window::left_open(now - clock_.epsilon(), now));
    action.reset_to = count >= zero_reset_min_ ? ResetTarget::Zero : ResetTarget::Pi;
    return action;
  }

  /// `current_seq` is the pulse just appended to the receive log.
  PulseAction on_pulse(const OscillatorState& state, Tick now, Seq current_seq) const {
    const Tick phase = state.phase_at(now);
    if (config_.kind == MechanismKind::Conventional) {
      return PulseAction::jump(apply_conventional_jump(phase, config_.coupling, clock_));
    }
    if (phase < clock_.half_period() || phase > clock_.period()) {
      return PulseAction::ignore();
    }
    const bool recent_burst =
        receive_count(state, Window::left_open(now - clock_.epsilon(), now), current_seq) >=
        response_threshold_;
    if (recent_burst) return PulseAction::shift();
    const bool half_period_support =
        receive_count(state, Window::closed(now - clock_.half_period(), now), current_seq) >=
        response_threshold_;
    if (half_period_support &&
        !state.reset_to_zero_within(Window::open(now - clock_.period(), now))) {
      return PulseAction::shift();
    }
    return PulseAction::ignore();
  }

 private:
  MechanismConfig config_;
  TickClock clock_;
  std::int64_t zero_reset_min_ = 0;
  std::int64_t response_threshold_ = 0;
};

}  // namespace pcosync
