#pragma once

// UCB-driven learners for a known (or assumed) number of users: rho-RAND,
// MCTopM and UMCTopM.

#include <algorithm>
#include <string_view>
#include <vector>

#include "mpmab/policies/arm_stats.hpp"
#include "mpmab/policies/policy.hpp"
#include "mpmab/rng.hpp"

namespace mpmab {

/// Indices of the n largest entries, ties to the lower index.
inline std::vector<Channel> top_set(const std::vector<double>& index, std::size_t n) {
  auto order = rank_channels(index);
  order.resize(std::min(n, order.size()));
  return order;
}

/// rho-RAND: play the rank-th best channel by UCB index; redraw the rank
/// uniformly in 1..N after every collision.
class RhoRand final : public Policy {
 public:
  void reset(const PolicyParams& p, std::uint64_t seed) override {
    rng_ = Rng(seed);
    channels_ = p.channels;
    users_ = std::clamp<std::size_t>(p.known_users ? p.known_users : p.channels, 1, p.channels);
    stats_ = ArmStats(channels_);
    rank_ = rng_.below(users_);
    plays_ = 0;
  }

  Action act(std::size_t) override {
    ++plays_;
    stats_.ucb_all(plays_, index_);
    return Action::transmit(rank_channels(index_)[rank_]);
  }

  void update(const Observation& obs) override {
    if (obs.reward) stats_.record(obs.action.channel, *obs.reward);
    if (obs.contention()) rank_ = rng_.below(users_);
  }

  std::string_view name() const override { return "rhorand"; }

 private:
  Rng rng_;
  std::size_t channels_ = 1;
  std::size_t users_ = 1;
  ArmStats stats_;
  std::size_t rank_ = 0;
  std::uint64_t plays_ = 0;
  std::vector<double> index_;
};

/// MCTopM. Keeps the estimated top-N set by UCB index. Leaves its channel
/// when the channel drops out of that set; re-draws inside the set after a
/// collision only while not locked; locks after a clean slot on a channel in
/// the set. UMCTopM is the same machine with N := K.
class MCTopM final : public Policy {
 public:
  explicit MCTopM(bool assume_saturated = false) : assume_saturated_(assume_saturated) {}

  void reset(const PolicyParams& p, std::uint64_t seed) override {
    rng_ = Rng(seed);
    channels_ = p.channels;
    users_ = assume_saturated_ ? p.channels
                               : std::clamp<std::size_t>(p.known_users ? p.known_users : p.channels, 1, p.channels);
    stats_ = ArmStats(channels_);
    current_ = rng_.below(channels_);
    locked_ = false;
    plays_ = 0;
    prev_index_.assign(channels_, std::numeric_limits<double>::infinity());
  }

  Action act(std::size_t) override { return Action::transmit(current_); }

  void update(const Observation& obs) override {
    ++plays_;
    if (obs.reward) stats_.record(obs.action.channel, *obs.reward);
    stats_.ucb_all(plays_ + 1, index_);
    const auto best = top_set(index_, users_);
    in_set_.assign(channels_, 0);
    for (Channel c : best) in_set_[c] = 1;

    if (!in_set_[current_]) {
      // Prefer set members that looked no better than the current channel.
      candidates_.clear();
      for (Channel c : best)
        if (prev_index_[c] <= prev_index_[current_]) candidates_.push_back(c);
      if (candidates_.empty()) candidates_ = best;
      current_ = candidates_[rng_.below(candidates_.size())];
      locked_ = false;
    } else if (obs.contention() && !locked_) {
      current_ = best[rng_.below(best.size())];
      locked_ = false;
    } else {
      locked_ = true;
    }
    prev_index_ = index_;
  }

  std::string_view name() const override { return assume_saturated_ ? "umctopm" : "mctopm"; }

  bool locked() const { return locked_; }
  Channel current() const { return current_; }

 private:
  bool assume_saturated_ = false;
  Rng rng_;
  std::size_t channels_ = 1;
  std::size_t users_ = 1;
  ArmStats stats_;
  Channel current_ = 0;
  bool locked_ = false;
  std::uint64_t plays_ = 0;
  std::vector<double> index_, prev_index_;
  std::vector<char> in_set_;
  std::vector<Channel> candidates_;
};

}  // namespace mpmab
