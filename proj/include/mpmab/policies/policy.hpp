#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

#include "mpmab/action.hpp"
#include "mpmab/radio.hpp"

namespace mpmab {

/// Everything a decentralized learner may know before the first slot.
/// Nothing here describes other users or the channel means.
struct PolicyParams {
  std::size_t channels = 8;
  std::size_t horizon = 100000;
  std::size_t known_users = 0;  // N for algorithms that assume it; 0 = unknown
  RadioCapability radio{};

  std::size_t start_slot = 0;  // global slot of the instance's first act()
  bool entrant = false;        // joined an already running network

  // Random hopping / sequential hopping
  std::size_t rh_slots = 200;
  std::size_t sh_slots = 5000;

  // Musical chairs learning phase (T0)
  std::size_t mc_learning = 3000;

  // MEGA
  double mega_c = 0.1;
  double mega_d = 0.05;
  double mega_p0 = 0.6;
  double mega_alpha = 0.5;
  double mega_beta = 0.8;

  // Trekking: probation window W = ceil(trek_c * ln T)
  double trek_c = 10.0;
  std::size_t tdn_maintenance_rounds = 8;

  // ESER / mESER
  double eser_a = 5.0;
  std::size_t eser_exploit = 1000;  // first exploit length
  unsigned eser_bits = 8;
  std::size_t eser_retries = 1;

  // Epoch wrapper (DMC, DSCF): first epoch length, doubling afterwards
  std::size_t epoch_length = 20000;
};

/// One user's decision procedure. act() and update() see only this user's
/// own history and private randomness.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual void reset(const PolicyParams& params, std::uint64_t seed) = 0;
  virtual Action act(std::size_t t) = 0;
  virtual void update(const Observation& obs) = 0;
  virtual std::string_view name() const = 0;
};

}  // namespace mpmab
