#pragma once

#include <algorithm>
#include <cmath>
#include <string_view>
#include <vector>

#include "mpmab/policies/arm_stats.hpp"
#include "mpmab/policies/policy.hpp"
#include "mpmab/rng.hpp"

namespace mpmab {

/// Population estimate from the collision rate seen under uniform play:
/// a user collides with probability 1 - (1 - 1/K)^(N-1).
inline std::size_t estimate_users(double collision_rate, std::size_t channels) {
  if (channels <= 1) return 1;
  if (collision_rate >= 1.0) return channels;
  const double p = std::max(0.0, collision_rate);
  const double n = 1.0 + std::round(std::log(1.0 - p) / std::log(1.0 - 1.0 / static_cast<double>(channels)));
  return static_cast<std::size_t>(std::clamp(n, 1.0, static_cast<double>(channels)));
}

/// Musical chairs: uniform random play for T0 slots to learn means and the
/// population size, then random seating among the estimated top-N channels
/// until a clean slot, after which the channel is fixed for good.
class MusicalChairs final : public Policy {
 public:
  void reset(const PolicyParams& p, std::uint64_t seed) override {
    rng_ = Rng(seed);
    channels_ = p.channels;
    learning_ = p.mc_learning;
    start_ = p.start_slot;
    stats_ = ArmStats(channels_);
    transmissions_ = collisions_ = 0;
    estimate_ = 0;
    seated_ = false;
    chairs_.clear();
    current_ = 0;
  }

  Action act(std::size_t t) override {
    const std::size_t s = t - start_;
    if (s < learning_) {
      current_ = rng_.below(channels_);
    } else if (chairs_.empty()) {
      finish_learning();
      current_ = chairs_[rng_.below(chairs_.size())];
    }
    return Action::transmit(current_);
  }

  void update(const Observation& obs) override {
    if (obs.reward) stats_.record(obs.action.channel, *obs.reward);
    const bool hit = obs.contention();
    if (chairs_.empty()) {
      ++transmissions_;
      collisions_ += hit;
      return;
    }
    if (seated_) return;
    if (!hit) {
      seated_ = true;
    } else {
      current_ = chairs_[rng_.below(chairs_.size())];
    }
  }

  std::string_view name() const override { return "mc"; }

  std::size_t estimated_users() const { return estimate_; }
  bool seated() const { return seated_; }
  Channel current() const { return current_; }
  double collision_rate() const {
    return transmissions_ ? static_cast<double>(collisions_) / static_cast<double>(transmissions_) : 0.0;
  }

 private:
  void finish_learning() {
    estimate_ = estimate_users(collision_rate(), channels_);
    chairs_ = stats_.ranking();
    chairs_.resize(estimate_);
  }

  Rng rng_;
  std::size_t channels_ = 1;
  std::size_t learning_ = 0;
  std::size_t start_ = 0;
  ArmStats stats_;
  std::size_t transmissions_ = 0;
  std::size_t collisions_ = 0;
  std::size_t estimate_ = 0;
  bool seated_ = false;
  std::vector<Channel> chairs_;
  Channel current_ = 0;
};

/// MEGA: epsilon-greedy channel choice with ALOHA-style persistence. After a
/// collision the user keeps its channel with probability p (p shrinks by
/// alpha each time), otherwise the channel is barred for a random stretch of
/// up to t^beta slots and p returns to p0.
class Mega final : public Policy {
 public:
  void reset(const PolicyParams& p, std::uint64_t seed) override {
    rng_ = Rng(seed);
    params_ = p;
    channels_ = p.channels;
    start_ = p.start_slot;
    stats_ = ArmStats(channels_);
    barred_until_.assign(channels_, 0);
    persistence_ = p.mega_p0;
    persist_ = false;
    current_ = 0;
  }

  Action act(std::size_t t) override {
    const std::size_t tt = t - start_ + 1;
    if (persist_) return Action::transmit(current_);
    available_.clear();
    for (Channel c = 0; c < channels_; ++c)
      if (barred_until_[c] <= tt) available_.push_back(c);
    if (available_.empty()) return Action::idle();
    const double k = static_cast<double>(channels_);
    const double eps = std::min(1.0, params_.mega_c * k * k / (params_.mega_d * params_.mega_d * static_cast<double>(tt)));
    if (rng_.uniform() < eps) {
      current_ = available_[rng_.below(available_.size())];
    } else {
      current_ = available_.front();
      for (Channel c : available_)
        if (stats_.mean(c) > stats_.mean(current_)) current_ = c;
    }
    return Action::transmit(current_);
  }

  void update(const Observation& obs) override {
    if (!obs.action.transmits()) return;
    if (obs.reward) stats_.record(obs.action.channel, *obs.reward);
    const std::size_t tt = obs.slot - start_ + 1;
    if (obs.contention()) {
      if (rng_.uniform() < persistence_) {
        persist_ = true;
        persistence_ *= params_.mega_alpha;
      } else {
        persist_ = false;
        const double span = std::pow(static_cast<double>(tt), params_.mega_beta);
        const auto wait = rng_.below(static_cast<std::size_t>(std::ceil(span)) + 1);
        barred_until_[current_] = tt + 1 + wait;
        persistence_ = params_.mega_p0;
      }
    } else {
      persist_ = false;
      persistence_ = params_.mega_alpha * persistence_ + (1.0 - params_.mega_alpha);
    }
  }

  std::string_view name() const override { return "mega"; }

  double persistence() const { return persistence_; }
  bool persisting() const { return persist_; }

 private:
  Rng rng_;
  PolicyParams params_;
  std::size_t channels_ = 1;
  std::size_t start_ = 0;
  ArmStats stats_;
  std::vector<std::size_t> barred_until_;
  double persistence_ = 0.6;
  bool persist_ = false;
  Channel current_ = 0;
  std::vector<Channel> available_;
};

}  // namespace mpmab
