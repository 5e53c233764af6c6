#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>

namespace pcosync {

/// Simulation time and oscillator phase are both measured in integer ticks.
using Tick = std::int64_t;

/// Index of an oscillator in [0, N).
using NodeId = std::size_t;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

enum class MechanismKind { Conventional, Mechanism1, Mechanism2 };

inline const char* to_string(MechanismKind kind) {
  switch (kind) {
    case MechanismKind::Conventional: return "conventional";
    case MechanismKind::Mechanism1: return "mechanism1";
    case MechanismKind::Mechanism2: return "mechanism2";
  }
  return "?";
}

/**
 * Integer time base. One oscillation period T = 2*pi seconds spans
 * `ticks_per_period` ticks, so one tick is also 2*pi/ticks_per_period rad of
 * phase (the oscillators run at 1 rad/s).
 */
class TickClock {
 public:
  static constexpr Tick kDefaultTicksPerPeriod = 1'000'000;
  static constexpr Tick kDefaultEpsilonTicks = 10'000;

  TickClock() : TickClock(kDefaultTicksPerPeriod, kDefaultEpsilonTicks) {}

  TickClock(Tick ticks_per_period, Tick epsilon_ticks)
      : ticks_per_period_(ticks_per_period), epsilon_ticks_(epsilon_ticks) {
    if (ticks_per_period <= 0 || ticks_per_period % 2 != 0) {
      throw std::invalid_argument("ticks_per_period must be positive and even, got " +
                                  std::to_string(ticks_per_period));
    }
    if (epsilon_ticks <= 0) {
      throw std::invalid_argument("epsilon_ticks must be positive, got " +
                                  std::to_string(epsilon_ticks));
    }
    if (epsilon_ticks >= ticks_per_period / 2) {
      throw std::invalid_argument("epsilon_ticks must be below half a period");
    }
  }

  Tick period() const { return ticks_per_period_; }
  Tick half_period() const { return ticks_per_period_ / 2; }
  Tick epsilon() const { return epsilon_ticks_; }

  double ticks_to_rad(Tick ticks) const {
    return static_cast<double>(ticks) * kTwoPi / static_cast<double>(ticks_per_period_);
  }

  /// Seconds and radians coincide because the free-running speed is 1 rad/s.
  double ticks_to_seconds(Tick ticks) const { return ticks_to_rad(ticks); }

  /// Nearest tick for an angle in [0, 2*pi].
  Tick rad_to_ticks(double angle) const {
    if (!(angle >= 0.0 && angle <= kTwoPi)) {
      throw std::out_of_range("angle outside [0, 2*pi]: " + std::to_string(angle));
    }
    return static_cast<Tick>(
        std::llround(angle / kTwoPi * static_cast<double>(ticks_per_period_)));
  }

  /// Converts a duration expressed in periods (e.g. 3.5 for 3.5T) to ticks.
  Tick periods_to_ticks(double periods) const {
    if (!(periods >= 0.0) || !std::isfinite(periods)) {
      throw std::out_of_range("period count must be finite and non-negative");
    }
    return static_cast<Tick>(std::llround(periods * static_cast<double>(ticks_per_period_)));
  }

  friend bool operator==(const TickClock&, const TickClock&) = default;

 private:
  Tick ticks_per_period_;
  Tick epsilon_ticks_;
};

/**
 * Floor-function identities used by the threshold arguments of the resilient
 * mechanisms. For positive integers x > y and q:
 *
 *   floor(y*q/x) >= y*floor(q/x)
 *   floor(y*q/x) + floor((x-y)*q/x) + 1 >= q
 *
 * Returns whether both hold. Both are identities, so a false result means the
 * arithmetic is broken. Inputs violating the preconditions throw.
 */
inline bool floor_bounds_hold(std::int64_t x, std::int64_t y, std::int64_t q) {
  if (y < 1 || q < 1 || x <= y) {
    throw std::invalid_argument("floor_bounds_hold requires x > y >= 1 and q >= 1");
  }
  // Positive operands, so integer division is floor division.
  const std::int64_t yq_over_x = (y * q) / x;
  const bool first = yq_over_x >= y * (q / x);
  const bool second = yq_over_x + ((x - y) * q) / x + 1 >= q;
  return first && second;
}

}  // namespace pcosync
