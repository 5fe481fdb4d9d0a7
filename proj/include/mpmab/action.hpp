#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

namespace mpmab {

using Channel = std::size_t;  // 0-based channel index
using UserId = std::size_t;

enum class ActionKind : std::uint8_t { idle, transmit, sense, sense_wideband };

enum class ConcurrentSense : std::uint8_t { none, narrowband, wideband };

/// One user's decision for one slot.
///
/// A transmit with `payload == false` is a signaling pulse: it occupies the
/// channel (listeners sense it busy, other transmitters collide with it) but
/// carries no data and earns no reward. Type I radios may attach a concurrent
/// sense to a transmission.
struct Action {
  ActionKind kind = ActionKind::idle;
  Channel channel = 0;
  bool payload = true;
  ConcurrentSense concurrent = ConcurrentSense::none;
  Channel sense_channel = 0;

  static Action idle() { return {}; }
  static Action transmit(Channel c) { return {ActionKind::transmit, c, true, ConcurrentSense::none, 0}; }
  static Action signal(Channel c) { return {ActionKind::transmit, c, false, ConcurrentSense::none, 0}; }
  static Action sense(Channel c) { return {ActionKind::sense, c, true, ConcurrentSense::none, 0}; }
  static Action sense_wideband() { return {ActionKind::sense_wideband, 0, true, ConcurrentSense::none, 0}; }

  Action with_sense(Channel c) const {
    Action a = *this;
    a.concurrent = ConcurrentSense::narrowband;
    a.sense_channel = c;
    return a;
  }
  Action with_wideband_sense() const {
    Action a = *this;
    a.concurrent = ConcurrentSense::wideband;
    return a;
  }

  bool transmits() const { return kind == ActionKind::transmit; }

  friend bool operator==(const Action&, const Action&) = default;
};

inline std::string to_string(const Action& a) {
  switch (a.kind) {
    case ActionKind::idle:
      return "idle";
    case ActionKind::sense:
      return "sense(" + std::to_string(a.channel + 1) + ")";
    case ActionKind::sense_wideband:
      return "sense_wideband";
    case ActionKind::transmit: {
      std::string s = (a.payload ? "transmit(" : "signal(") + std::to_string(a.channel + 1) + ")";
      if (a.concurrent == ConcurrentSense::narrowband) s += "+sense(" + std::to_string(a.sense_channel + 1) + ")";
      if (a.concurrent == ConcurrentSense::wideband) s += "+sense_wideband";
      return s;
    }
  }
  return "?";
}

}  // namespace mpmab
