#pragma once

#include <algorithm>
#include <cmath>
#include <string_view>
#include <vector>

#include "mpmab/policies/hopping.hpp"
#include "mpmab/policies/policy.hpp"
#include "mpmab/rng.hpp"

namespace mpmab {

inline std::size_t probation_window(double c, std::size_t horizon) {
  const double w = std::ceil(c * std::log(static_cast<double>(std::max<std::size_t>(horizon, 2))));
  return static_cast<std::size_t>(std::max(1.0, w));
}

/// Trekking for static (TSN) and dynamic (TDN) networks.
///
/// After RH + SH estimation every user ranks the channels and climbs: a user
/// on its rank-r channel senses the rank-(r-1) channel for a probation window
/// of W slots and moves there if it stayed idle throughout. Probing is laid
/// out in rounds of K-1 sub-windows, sub-window j belonging to users on rank
/// j+1, so probes never overlap and a whole chain of users can shift up in a
/// single round. A probe that finds its target busy for the full window moves
/// on to the next rank up in the following round; a user settles once every
/// channel it ranks above its own has been found held.
///
/// The dynamic variant keeps settled users watching: every few rounds they
/// sense one slot of their target and run a full probation if it is idle.
/// Users that join later scan for vacant channels, orthogonalize among them
/// with RH, estimate them with a local sequential hop and then trek.
class Trekking final : public Policy {
 public:
  explicit Trekking(bool dynamic = false) : dynamic_(dynamic) {}

  void reset(const PolicyParams& p, std::uint64_t seed) override {
    rng_ = Rng(seed);
    params_ = p;
    channels_ = p.channels;
    start_ = p.start_slot;
    window_ = probation_window(p.trek_c, p.horizon);
    round_len_ = std::max<std::size_t>(1, channels_ - 1) * window_;
    trek_origin_ = p.rh_slots + p.sh_slots;  // global: the network starts at slot 0
    hop_.start(channels_, p.rh_slots, rng_);
    stats_ = ArmStats(channels_);
    ranking_.clear();
    rank_of_.assign(channels_, 0);
    current_ = previous_ = 0;
    settled_ = false;
    mover_until_ = 0;
    backoff_round_ = 0;
    clash_streak_ = 0;
    probe_busy_ = probe_idle_ = 0;
    probe_live_ = false;
    probe_rank_ = 0;
    target_ = 0;
    maintenance_ = 0;
    rh_.start(channels_, rng_);
    vacant_.clear();
    if (dynamic_ && p.entrant) {
      stage_ = Stage::scan;
      stage_start_ = start_;
    } else {
      stage_ = Stage::learn;
    }
  }

  Action act(std::size_t t) override {
    switch (stage_) {
      case Stage::learn: {
        const std::size_t s = t - start_;
        if (s < params_.rh_slots + params_.sh_slots) return Action::transmit(hop_.channel(s));
        stats_ = hop_.stats();
        set_ranking(stats_.ranking());
        current_ = hop_.channel(s);
        aim();
        stage_ = Stage::trek;
        return act(t);
      }
      case Stage::scan:
        if (t < stage_start_ + channels_) return Action::sense((t - stage_start_) % channels_);
        return Action::idle();  // waiting out an empty scan
      case Stage::entry_rh:
        return Action::transmit(entry_channel_);
      case Stage::entry_estimate:
        return Action::transmit(vacant_[(vacant_pos_ + (t - stage_start_)) % vacant_.size()]);
      case Stage::rejoin:
        return Action::transmit(rh_.current());
      case Stage::trek:
        return trek_act(t);
    }
    return Action::idle();
  }

  void update(const Observation& obs) override {
    const std::size_t t = obs.slot;
    switch (stage_) {
      case Stage::learn:
        hop_.step(obs, rng_);
        return;
      case Stage::scan:
        scan_update(obs);
        return;
      case Stage::entry_rh:
        // RH restricted to the channels found vacant on entry.
        if (obs.contention()) {
          entry_channel_ = vacant_[rng_.below(vacant_.size())];
          entry_streak_ = 0;
        } else if (++entry_streak_ >= channels_) {
          stage_ = Stage::entry_estimate;
          stage_start_ = t + 1;
          vacant_pos_ = static_cast<std::size_t>(std::find(vacant_.begin(), vacant_.end(), entry_channel_) - vacant_.begin());
          estimate_len_ = std::max(vacant_.size(), params_.sh_slots * vacant_.size() / channels_);
        }
        return;
      case Stage::entry_estimate:
        if (obs.reward) stats_.record(obs.action.channel, *obs.reward);
        if (t + 1 >= stage_start_ + estimate_len_) finish_entry();
        return;
      case Stage::rejoin:
        rh_.step(obs.contention(), rng_);
        if (rh_.clean_streak() >= channels_) {
          current_ = rh_.current();
          stage_ = Stage::trek;
          settled_ = false;
          clash_streak_ = 0;
          aim();
        }
        return;
      case Stage::trek:
        trek_update(obs);
        return;
    }
  }

  std::string_view name() const override { return dynamic_ ? "tdn" : "tsn"; }

  bool settled() const { return settled_ || (stage_ == Stage::trek && rank_of_[current_] == 0); }
  bool trekking() const { return stage_ == Stage::trek; }
  Channel current() const { return current_; }
  std::size_t window() const { return window_; }
  std::size_t round_length() const { return round_len_; }
  const std::vector<Channel>& ranking() const { return ranking_; }

  /// Installs a ranking and a channel directly and starts trekking at once.
  /// Used to study the climb in isolation from estimation noise.
  void start_trek(std::vector<Channel> ranking, Channel from, std::size_t trek_origin) {
    set_ranking(std::move(ranking));
    current_ = from;
    aim();
    trek_origin_ = trek_origin;
    stage_ = Stage::trek;
  }

 private:
  enum class Stage { learn, scan, entry_rh, entry_estimate, rejoin, trek };

  void set_ranking(std::vector<Channel> r) {
    ranking_ = std::move(r);
    for (std::size_t i = 0; i < ranking_.size(); ++i) rank_of_[ranking_[i]] = i;
  }

  struct Clock {
    std::size_t round, sub, within;
  };
  Clock clock(std::size_t t) const {
    const std::size_t u = t - trek_origin_;
    const std::size_t pos = u % round_len_;
    return {u / round_len_, pos / window_, pos % window_};
  }

  bool maintenance_round(std::size_t round) const {
    const std::size_t m = std::max<std::size_t>(1, params_.tdn_maintenance_rounds);
    return round % m == m - 1;
  }

  Action trek_act(std::size_t t) {
    if (t < trek_origin_) return Action::transmit(current_);
    const Clock k = clock(t);
    const std::size_t r = rank_of_[current_];
    if (r == 0 || k.sub != r - 1) return Action::transmit(current_);
    if (k.within == 0) {
      probe_busy_ = probe_idle_ = 0;
      probe_live_ = false;
      if (settled_) {
        if (!dynamic_ || !maintenance_round(k.round)) return Action::transmit(current_);
        target_ = ranking_[maintenance_++ % r];
      } else if (k.round < backoff_round_) {
        return Action::transmit(current_);
      } else {
        target_ = ranking_[std::min(probe_rank_, r - 1)];
      }
      probe_live_ = true;
    }
    if (!probe_live_) return Action::transmit(current_);
    return Action::sense(target_);
  }

  void aim() {
    const std::size_t r = rank_of_[current_];
    probe_rank_ = r ? r - 1 : 0;
  }

  void move_to(Channel c, std::size_t t) {
    previous_ = current_;
    current_ = c;
    mover_until_ = t + window_;
    settled_ = false;
    aim();
  }

  void trek_update(const Observation& obs) {
    const std::size_t t = obs.slot;
    if (obs.action.kind == ActionKind::sense) {
      const bool busy = obs.sensed[obs.action.channel] == Sensed::busy;
      (busy ? probe_busy_ : probe_idle_) += 1;
      const Clock k = clock(t);
      if (settled_ && busy) {
        probe_live_ = false;  // maintenance probe found the channel held
        return;
      }
      if (k.within + 1 == window_) {
        probe_live_ = false;
        if (probe_idle_ == window_) {
          move_to(obs.action.channel, t);
        } else if (probe_busy_ == window_) {
          // Held: look one rank higher next round; settle once everything
          // above is known to be held.
          if (probe_rank_ == 0)
            settled_ = true;
          else
            --probe_rank_;
        }
      }
      return;
    }
    if (!obs.action.transmits()) return;
    if (obs.reward) stats_.record(obs.action.channel, *obs.reward);
    if (!obs.contention()) {
      clash_streak_ = 0;
      return;
    }
    if (t < mover_until_) {
      // Moved into a channel someone else holds: step back and sit out a
      // random number of rounds before probing again.
      current_ = previous_;
      mover_until_ = 0;
      aim();
      backoff_round_ = clock(t).round + 1 + rng_.below(3);
      return;
    }
    if (++clash_streak_ >= window_) {
      stage_ = Stage::rejoin;
      rh_.start(channels_, rng_);
    }
  }

  void scan_update(const Observation& obs) {
    const std::size_t t = obs.slot;
    if (obs.action.kind == ActionKind::sense && obs.sensed[obs.action.channel] == Sensed::idle)
      vacant_.push_back(obs.action.channel);
    if (t + 1 < stage_start_ + channels_) return;
    if (t + 1 == stage_start_ + channels_ && !vacant_.empty()) {
      stage_ = Stage::entry_rh;
      entry_channel_ = vacant_[rng_.below(vacant_.size())];
      entry_streak_ = 0;
      return;
    }
    // Nothing vacant: wait one trek round and scan again.
    if (t + 1 >= stage_start_ + channels_ + round_len_) {
      stage_start_ = t + 1;
      vacant_.clear();
    }
  }

  void finish_entry() {
    // Channels never sampled were held by settled users; rank them above
    // every sampled channel.
    std::vector<double> score(channels_);
    for (Channel c = 0; c < channels_; ++c) score[c] = stats_.pulls(c) ? stats_.mean(c) : 2.0;
    set_ranking(rank_channels(score));
    current_ = vacant_.front();
    for (Channel c : vacant_)
      if (rank_of_[c] < rank_of_[current_]) current_ = c;
    aim();
    stage_ = Stage::trek;
    settled_ = false;
  }

  bool dynamic_ = false;
  Rng rng_;
  PolicyParams params_;
  std::size_t channels_ = 1;
  std::size_t start_ = 0;
  std::size_t window_ = 1;
  std::size_t round_len_ = 1;
  std::size_t trek_origin_ = 0;
  OrthogonalHopper hop_;
  ArmStats stats_;
  std::vector<Channel> ranking_;
  std::vector<std::size_t> rank_of_;
  Channel current_ = 0, previous_ = 0;
  bool settled_ = false;
  std::size_t mover_until_ = 0;
  std::size_t backoff_round_ = 0;
  std::size_t clash_streak_ = 0;
  std::size_t probe_busy_ = 0, probe_idle_ = 0;
  bool probe_live_ = false;
  std::size_t probe_rank_ = 0;  // rank probed next while unsettled
  Channel target_ = 0;
  std::size_t maintenance_ = 0;

  Stage stage_ = Stage::learn;
  std::size_t stage_start_ = 0;
  RandomHopper rh_;
  std::vector<Channel> vacant_;
  Channel entry_channel_ = 0;
  std::size_t entry_streak_ = 0;
  std::size_t vacant_pos_ = 0;
  std::size_t estimate_len_ = 0;
};

}  // namespace mpmab
