#pragma once

#include <algorithm>
#include <string_view>
#include <vector>

#include "mpmab/errors.hpp"
#include "mpmab/policies/hopping.hpp"
#include "mpmab/policies/policy.hpp"
#include "mpmab/rng.hpp"

namespace mpmab {

/// One-hot sensing bookkeeping. While every other user hops sequentially, a
/// user that holds one channel under a narrowband sensor for K slots sees
/// each of them cross it exactly once, and the slot of the crossing gives
/// away that user's hop offset.
class OneHotSensing {
 public:
  void start(std::size_t channels, Channel watched) {
    channels_ = channels;
    watched_ = watched;
    seen_.assign(channels, 0);
    busy_slots_ = 0;
  }

  Channel watched() const { return watched_; }

  /// `s` is the local slot of the sample (hop frame coordinates).
  void record(std::size_t s, bool busy) {
    if (!busy) return;
    ++busy_slots_;
    seen_[(watched_ + channels_ - s % channels_) % channels_] = 1;
  }

  std::size_t busy_slots() const { return busy_slots_; }
  std::size_t estimated_users() const { return busy_slots_ + 1; }

  /// Position of `own_offset` among all known offsets, ascending. Every user
  /// that observed the same set computes a distinct, consistent rank.
  std::size_t rank_of(std::size_t own_offset) const {
    std::size_t r = 0;
    for (std::size_t o = 0; o < own_offset && o < channels_; ++o) r += seen_[o];
    return r;
  }

  const std::vector<char>& offsets() const { return seen_; }

 private:
  std::size_t channels_ = 1;
  Channel watched_ = 0;
  std::vector<char> seen_;
  std::size_t busy_slots_ = 0;
};

/// Secondary-user coordination with fairness (SCF).
///
/// Phase 1 RH orthogonalization, phase 2 collision-free SH building channel
/// estimates; the last K*K slots of phase 2 hold the one-hot sensing windows,
/// one K-slot window per hop offset so at most one user pauses at a time.
/// Phase 3: the user with offset rank r settles on its r-th best channel
/// among the estimated top-N. A collision on the first settled slots (users
/// whose rankings disagree) falls back to random seating within the top-N.
class Scf final : public Policy {
 public:
  void reset(const PolicyParams& p, std::uint64_t seed) override {
    rng_ = Rng(seed);
    channels_ = p.channels;
    start_ = p.start_slot;
    if (p.sh_slots < channels_ * channels_)
      throw ConfigError("scf: sh_slots must be at least K*K to hold the sensing windows");
    sh_end_ = p.rh_slots + p.sh_slots;
    ohs_start_ = sh_end_ - channels_ * channels_;
    hop_.start(channels_, p.rh_slots, rng_);
    ohs_.start(channels_, 0);
    ohs_open_ = false;
    settled_phase_ = false;
    seated_ = false;
    chairs_.clear();
    estimate_ = 0;
    rank_ = 0;
  }

  Action act(std::size_t t) override {
    const std::size_t s = t - start_;
    if (s < sh_end_) {
      const Channel c = hop_.channel(s);
      if (s >= ohs_start_) {
        const std::size_t window = (s - ohs_start_) / channels_;
        if (window == hop_.offset()) {
          if (!ohs_open_) {
            ohs_.start(channels_, c);
            ohs_open_ = true;
          }
          return Action::sense(ohs_.watched());
        }
      }
      return Action::transmit(c);
    }
    if (!settled_phase_) enter_settling();
    return Action::transmit(current_);
  }

  void update(const Observation& obs) override {
    const std::size_t s = obs.slot - start_;
    if (s < sh_end_) {
      if (obs.action.kind == ActionKind::sense) {
        ohs_.record(s, obs.sensed[obs.action.channel] == Sensed::busy);
        return;
      }
      hop_.step(obs, rng_);
      return;
    }
    if (obs.reward) hop_.stats().record(obs.action.channel, *obs.reward);
    if (seated_) return;
    if (!obs.contention()) {
      seated_ = true;
    } else {
      current_ = chairs_[rng_.below(chairs_.size())];
    }
  }

  std::string_view name() const override { return "scf"; }

  std::size_t estimated_users() const { return estimate_; }
  std::size_t rank() const { return rank_; }
  bool settled() const { return seated_; }
  Channel current() const { return current_; }
  const OneHotSensing& sensing() const { return ohs_; }
  const ArmStats& stats() const { return hop_.stats(); }

 private:
  void enter_settling() {
    settled_phase_ = true;
    estimate_ = std::min(ohs_.estimated_users(), channels_);
    rank_ = std::min(ohs_.rank_of(hop_.offset()), estimate_ - 1);
    chairs_ = hop_.stats().ranking();
    chairs_.resize(estimate_);
    current_ = chairs_[rank_];
  }

  Rng rng_;
  std::size_t channels_ = 1;
  std::size_t start_ = 0;
  std::size_t sh_end_ = 0;
  std::size_t ohs_start_ = 0;
  OrthogonalHopper hop_;
  OneHotSensing ohs_;
  bool ohs_open_ = false;
  bool settled_phase_ = false;
  bool seated_ = false;
  std::vector<Channel> chairs_;
  std::size_t estimate_ = 0;
  std::size_t rank_ = 0;
  Channel current_ = 0;
};

}  // namespace mpmab
