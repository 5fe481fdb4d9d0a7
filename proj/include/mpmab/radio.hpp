#pragma once

// What a terminal can physically observe about a slot, by radio type.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mpmab/action.hpp"
#include "mpmab/env.hpp"
#include "mpmab/errors.hpp"

namespace mpmab {

enum class Sensing : std::uint8_t { none, narrowband, wideband };

enum class Duplex : std::uint8_t {
  type1,  // sense and transmit in the same slot
  type2,  // sense or transmit
  type3,  // transmit only
};

struct RadioCapability {
  Sensing sensing = Sensing::narrowband;
  Duplex duplex = Duplex::type2;
  bool hybrid = false;  // wideband sensing front-end, narrowband transmitter

  bool can_sense() const { return sensing != Sensing::none; }
  bool simultaneous() const { return duplex == Duplex::type1; }

  bool valid() const {
    if (duplex == Duplex::type3 && sensing != Sensing::none) return false;
    if (duplex != Duplex::type3 && sensing == Sensing::none) return false;
    if (hybrid && sensing != Sensing::wideband) return false;
    return true;
  }

  friend bool operator==(const RadioCapability&, const RadioCapability&) = default;
};

inline RadioCapability parse_radio(std::string_view name) {
  if (name == "type1_nb") return {Sensing::narrowband, Duplex::type1, false};
  if (name == "type1_wb") return {Sensing::wideband, Duplex::type1, false};
  if (name == "type2_nb") return {Sensing::narrowband, Duplex::type2, false};
  if (name == "type2_wb") return {Sensing::wideband, Duplex::type2, false};
  if (name == "type3") return {Sensing::none, Duplex::type3, false};
  if (name == "hybrid1") return {Sensing::wideband, Duplex::type1, true};
  if (name == "hybrid2") return {Sensing::wideband, Duplex::type2, true};
  throw ConfigError("unknown radio '" + std::string(name) +
                    "' (expected type1_nb, type1_wb, type2_nb, type2_wb, type3, hybrid1, hybrid2)");
}

inline std::string radio_name(const RadioCapability& cap) {
  if (cap.duplex == Duplex::type3) return "type3";
  std::string prefix = cap.hybrid ? "hybrid" : "type";
  std::string n = cap.duplex == Duplex::type1 ? "1" : "2";
  if (cap.hybrid) return prefix + n;
  return prefix + n + (cap.sensing == Sensing::wideband ? "_wb" : "_nb");
}

enum class Sensed : std::uint8_t { unobserved, idle, busy };

struct Observation {
  std::size_t slot = 0;
  Action action;
  bool success = false;
  std::optional<double> reward;          // present iff a data transmission succeeded
  std::optional<bool> collision_flag;    // present iff the radio can attribute the failure
  std::vector<Sensed> sensed;            // per channel

  /// Whether the last transmission failed for a reason other than a clean
  /// channel. Uses the collision flag when the radio provides one.
  bool contention() const {
    if (!action.transmits()) return false;
    if (collision_flag) return *collision_flag;
    return !success;
  }
};

/// Empty when the action is legal for the capability, otherwise a reason.
inline std::optional<std::string> validate_action(const RadioCapability& cap, const Action& a) {
  switch (a.kind) {
    case ActionKind::idle:
      return std::nullopt;
    case ActionKind::sense:
      if (!cap.can_sense()) return "radio cannot sense";
      return std::nullopt;
    case ActionKind::sense_wideband:
      if (cap.sensing != Sensing::wideband) return "radio cannot sense wideband";
      return std::nullopt;
    case ActionKind::transmit:
      if (a.concurrent == ConcurrentSense::none) return std::nullopt;
      if (!cap.simultaneous()) return "radio cannot sense while transmitting";
      if (a.concurrent == ConcurrentSense::wideband && cap.sensing != Sensing::wideband)
        return "radio cannot sense wideband";
      return std::nullopt;
  }
  return "unknown action kind";
}

/// Filters the slot's ground truth down to what `user`'s terminal sees.
/// `index` is the user's position in `ground.actions`.
inline void observe(const RadioCapability& cap, const SlotGroundTruth& ground, std::size_t index,
                    Observation& obs) {
  const UserAction& ua = ground.actions.at(index);
  const UserOutcome& o = ground.outcomes.at(index);
  const Action& a = ua.action;
  if (auto why = validate_action(cap, a))
    throw ContractViolation("slot " + std::to_string(ground.slot) + ": user " + std::to_string(ua.user) +
                            " chose " + to_string(a) + ": " + *why);
  const std::size_t k = ground.num_channels();
  obs.slot = ground.slot;
  obs.action = a;
  obs.success = o.transmitted && o.success;
  obs.reward.reset();
  if (obs.success && a.payload) obs.reward = o.reward;
  obs.collision_flag.reset();
  if (o.transmitted && cap.can_sense()) obs.collision_flag = o.collided;
  obs.sensed.assign(k, Sensed::unobserved);

  auto fill = [&](Channel c) { obs.sensed[c] = ground.occupied(c) ? Sensed::busy : Sensed::idle; };
  switch (a.kind) {
    case ActionKind::sense:
      fill(a.channel);
      break;
    case ActionKind::sense_wideband:
      for (Channel c = 0; c < k; ++c) fill(c);
      break;
    case ActionKind::transmit:
      if (a.concurrent == ConcurrentSense::narrowband) fill(a.sense_channel);
      if (a.concurrent == ConcurrentSense::wideband)
        for (Channel c = 0; c < k; ++c) fill(c);
      break;
    case ActionKind::idle:
      break;
  }
}

inline Observation observe(const RadioCapability& cap, const SlotGroundTruth& ground, std::size_t index) {
  Observation obs;
  observe(cap, ground, index, obs);
  return obs;
}

}  // namespace mpmab
