#pragma once

// Random hopping (orthogonalization) and sequential hopping (collision-free
// round-robin exploration), plus the RH-then-SH learner shared by several
// algorithms.

#include <cstddef>
#include <string_view>

#include "mpmab/policies/arm_stats.hpp"
#include "mpmab/policies/policy.hpp"
#include "mpmab/rng.hpp"

namespace mpmab {

/// Next channel of the sequential hop. Over any K consecutive slots every
/// channel is visited once.
constexpr Channel seqhop_next(Channel c, std::size_t channels) { return (c + 1) % channels; }

/// Stay after a clean slot, redraw uniformly after a collision. Declared
/// orthogonal after K consecutive clean slots.
class RandomHopper {
 public:
  void start(std::size_t channels, Rng& rng) {
    channels_ = channels;
    current_ = rng.below(channels);
    streak_ = 0;
  }

  Channel current() const { return current_; }
  std::size_t clean_streak() const { return streak_; }
  bool orthogonal() const { return streak_ >= channels_; }

  /// Feeds the outcome of a transmission on current().
  void step(bool contention, Rng& rng) {
    if (contention) {
      current_ = rng.below(channels_);
      streak_ = 0;
    } else {
      ++streak_;
    }
  }

 private:
  std::size_t channels_ = 1;
  Channel current_ = 0;
  std::size_t streak_ = 0;
};

/// RH for a fixed number of local slots, then SH in a rotating frame where
/// the channel at local slot s is (offset + s) mod K. A collision in the SH
/// frame redraws the offset, which is RH applied to the rotating frame and
/// repairs users that were still colliding when RH ended.
class OrthogonalHopper {
 public:
  void start(std::size_t channels, std::size_t rh_slots, Rng& rng) {
    channels_ = channels;
    rh_slots_ = rh_slots;
    rh_.start(channels, rng);
    stats_ = ArmStats(channels);
    offset_ = 0;
    in_sh_ = rh_slots == 0;
    if (in_sh_) offset_ = rh_.current();
  }

  /// Channel to use at local slot s (s advances by one per call to step).
  Channel channel(std::size_t s) {
    if (!in_sh_ && s >= rh_slots_) {
      in_sh_ = true;
      // Continue from the RH channel without a jump.
      offset_ = (rh_.current() + channels_ - s % channels_) % channels_;
    }
    if (!in_sh_) return rh_.current();
    return (offset_ + s) % channels_;
  }

  bool in_sh() const { return in_sh_; }
  std::size_t offset() const { return offset_; }
  const ArmStats& stats() const { return stats_; }
  ArmStats& stats() { return stats_; }
  const RandomHopper& rh() const { return rh_; }

  void step(const Observation& obs, Rng& rng) {
    if (obs.reward) stats_.record(obs.action.channel, *obs.reward);
    const bool hit = obs.contention();
    if (!in_sh_) {
      rh_.step(hit, rng);
    } else if (hit) {
      offset_ = rng.below(channels_);
    }
  }

 private:
  std::size_t channels_ = 1;
  std::size_t rh_slots_ = 0;
  RandomHopper rh_;
  ArmStats stats_;
  std::size_t offset_ = 0;
  bool in_sh_ = false;
};

/// Pure random hopping: transmit, redraw on collision.
class RandomHopPolicy final : public Policy {
 public:
  void reset(const PolicyParams& p, std::uint64_t seed) override {
    rng_ = Rng(seed);
    rh_.start(p.channels, rng_);
  }
  Action act(std::size_t) override { return Action::transmit(rh_.current()); }
  void update(const Observation& obs) override { rh_.step(obs.contention(), rng_); }
  std::string_view name() const override { return "rh"; }

  const RandomHopper& hopper() const { return rh_; }

 private:
  Rng rng_;
  RandomHopper rh_;
};

/// Sequential hopping after an RH orthogonalization phase; every user visits
/// every channel the same fraction of time.
class SeqHopPolicy final : public Policy {
 public:
  void reset(const PolicyParams& p, std::uint64_t seed) override {
    rng_ = Rng(seed);
    start_ = p.start_slot;
    hop_.start(p.channels, p.rh_slots, rng_);
  }
  Action act(std::size_t t) override { return Action::transmit(hop_.channel(t - start_)); }
  void update(const Observation& obs) override { hop_.step(obs, rng_); }
  std::string_view name() const override { return "sh"; }

 private:
  Rng rng_;
  std::size_t start_ = 0;
  OrthogonalHopper hop_;
};

}  // namespace mpmab
