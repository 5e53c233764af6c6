#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <stdexcept>

#include "pcosync/core.hpp"

namespace pcosync {

/// Global delivery sequence number; orders pulses that share a tick.
using Seq = std::uint64_t;

/// Time interval over ticks with explicit endpoint openness.
struct Window {
  Tick lo = 0;
  Tick hi = 0;
  bool lo_closed = false;
  bool hi_closed = true;

  /// (lo, hi]
  static Window left_open(Tick lo, Tick hi) { return {lo, hi, false, true}; }
  /// [lo, hi]
  static Window closed(Tick lo, Tick hi) { return {lo, hi, true, true}; }
  /// (lo, hi)
  static Window open(Tick lo, Tick hi) { return {lo, hi, false, false}; }

  bool contains(Tick t) const {
    const bool above = lo_closed ? t >= lo : t > lo;
    const bool below = hi_closed ? t <= hi : t < hi;
    return above && below;
  }
};

struct ReceivedPulse {
  Tick tick = 0;
  Seq seq = 0;
};

/**
 * Per-oscillator memory. The phase is stored together with the tick at which
 * it was last set; between events it advances one tick per tick.
 */
struct OscillatorState {
  NodeId id = 0;
  Tick phase = 0;
  Tick phase_set_at = 0;
  Tick started_at = 0;
  /// Sorted by (tick, seq).
  std::deque<ReceivedPulse> receive_log;
  std::optional<Tick> last_fire_tick;
  /// Reset-to-zero instants newer than one period.
  std::deque<Tick> zero_resets;

  Tick phase_at(Tick now) const { return phase + (now - phase_set_at); }

  void set_phase(Tick value, Tick now) {
    phase = value;
    phase_set_at = now;
  }

  std::optional<Tick> last_reset_to_zero_tick() const {
    if (zero_resets.empty()) return std::nullopt;
    return zero_resets.back();
  }

  bool reset_to_zero_within(const Window& w) const {
    for (Tick t : zero_resets)
      if (w.contains(t)) return true;
    return false;
  }

  void record_receive(Tick tick, Seq seq) {
    if (!receive_log.empty()) {
      const auto& last = receive_log.back();
      if (tick < last.tick || (tick == last.tick && seq <= last.seq)) {
        throw std::logic_error("receive log must grow in (tick, seq) order");
      }
    }
    receive_log.push_back({tick, seq});
  }

  /// Drops history no counting window can reach: receives older than
  /// now - T/2 and zero resets older than now - T.
  void prune(Tick now, const TickClock& clock) {
    while (!receive_log.empty() && receive_log.front().tick < now - clock.half_period())
      receive_log.pop_front();
    while (!zero_resets.empty() && zero_resets.front() <= now - clock.period())
      zero_resets.pop_front();
  }
};

/**
 * Number of logged receives inside `window`. With `before_seq`, only pulses
 * delivered strictly before that sequence number count, which excludes the
 * pulse currently being handled and anything queued after it.
 */
inline std::int64_t receive_count(const OscillatorState& state, const Window& window,
                                  std::optional<Seq> before_seq = std::nullopt) {
  std::int64_t count = 0;
  for (auto it = state.receive_log.rbegin(); it != state.receive_log.rend(); ++it) {
    if (window.lo_closed ? it->tick < window.lo : it->tick <= window.lo) break;
    if (!window.contains(it->tick)) continue;
    if (before_seq && it->seq >= *before_seq) continue;
    ++count;
  }
  return count;
}

/// Tick at which an oscillator whose phase is below T at `now` reaches 2*pi.
inline Tick next_wrap_tick(const OscillatorState& state, Tick now, const TickClock& clock) {
  const Tick phase = state.phase_at(now);
  if (phase >= clock.period()) {
    throw std::logic_error("next_wrap_tick called with phase at 2*pi");
  }
  return now + (clock.period() - phase);
}

}  // namespace pcosync
