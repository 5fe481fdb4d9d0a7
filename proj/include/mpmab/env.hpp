#pragma once

// Slotted-time ground truth: primary-user occupancy, reward samples and
// collision resolution among secondary users.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mpmab/action.hpp"
#include "mpmab/errors.hpp"
#include "mpmab/matching.hpp"
#include "mpmab/rng.hpp"

namespace mpmab {

enum class RewardLaw { bernoulli, uniform };

struct ChangePoint {
  std::size_t slot = 0;  // first slot at which `means` applies
  Matrix means;
};

/// Channel statistics seen by the secondary users.
///
/// `means` is indexed [row][channel]. A single row is the homogeneous case
/// and applies to every user; otherwise user `u` reads row `u % rows`.
class ChannelModel {
 public:
  ChannelModel() = default;

  explicit ChannelModel(Matrix means, std::vector<double> occupancy = {},
                        RewardLaw law = RewardLaw::bernoulli, double half_width = 0.1,
                        std::vector<ChangePoint> change_points = {}, double fade_probability = 0.0)
      : means_(std::move(means)),
        occupancy_(std::move(occupancy)),
        law_(law),
        half_width_(half_width),
        change_points_(std::move(change_points)),
        fade_(fade_probability) {
    if (means_.empty() || means_.front().empty()) throw ConfigError("channel model: means must be non-empty");
    const std::size_t k = means_.front().size();
    if (occupancy_.empty()) occupancy_.assign(k, 0.0);
    if (occupancy_.size() != k) throw ConfigError("channel model: occupancy must have one entry per channel");
    check_matrix(means_, k);
    for (double th : occupancy_)
      if (!(th >= 0.0 && th <= 1.0)) throw ConfigError("channel model: occupancy rates must lie in [0,1]");
    std::size_t prev = 0;
    for (std::size_t i = 0; i < change_points_.size(); ++i) {
      if (i > 0 && change_points_[i].slot <= prev)
        throw ConfigError("channel model: change points must be strictly increasing");
      prev = change_points_[i].slot;
      check_matrix(change_points_[i].means, k);
      if (change_points_[i].means.size() != means_.size())
        throw ConfigError("channel model: change point must keep the row count");
    }
    if (!(half_width_ >= 0.0)) throw ConfigError("channel model: half-width must be >= 0");
    if (!(fade_ >= 0.0 && fade_ <= 1.0)) throw ConfigError("channel model: fade probability must lie in [0,1]");
  }

  std::size_t num_channels() const { return means_.front().size(); }
  std::size_t num_rows() const { return means_.size(); }
  bool homogeneous() const { return means_.size() == 1; }
  RewardLaw law() const { return law_; }
  double half_width() const { return half_width_; }
  double fade_probability() const { return fade_; }
  std::span<const double> occupancy() const { return occupancy_; }
  bool licensed() const {
    return std::any_of(occupancy_.begin(), occupancy_.end(), [](double th) { return th > 0.0; });
  }
  const std::vector<ChangePoint>& change_points() const { return change_points_; }

  /// Mean matrix in force at slot t.
  const Matrix& means_at(std::size_t t) const {
    const Matrix* m = &means_;
    for (const auto& cp : change_points_) {
      if (cp.slot > t) break;
      m = &cp.means;
    }
    return *m;
  }

  std::size_t row_of(UserId user) const { return user % means_.size(); }

  double mean(UserId user, Channel c, std::size_t t) const { return means_at(t)[row_of(user)][c]; }

  /// Per-slot expected value of a lone transmission: mean discounted by
  /// the primary user's occupancy.
  double effective_mean(UserId user, Channel c, std::size_t t) const {
    return mean(user, c, t) * (1.0 - occupancy_[c]);
  }

  /// Reward realized by `user` on channel c given the channel's shared
  /// uniform variate for the slot.
  double reward(UserId user, Channel c, std::size_t t, double u) const {
    const double mu = mean(user, c, t);
    if (law_ == RewardLaw::bernoulli) return u < mu ? 1.0 : 0.0;
    const double lo = std::max(0.0, mu - half_width_);
    const double hi = std::min(1.0, mu + half_width_);
    return lo + (hi - lo) * u;
  }

 private:
  static void check_matrix(const Matrix& m, std::size_t k) {
    for (const auto& row : m) {
      if (row.size() != k) throw ConfigError("channel model: every row must have exactly K entries");
      for (double mu : row)
        if (!(mu >= 0.0 && mu <= 1.0)) throw ConfigError("channel model: means must lie in [0,1]");
    }
  }

  Matrix means_;
  std::vector<double> occupancy_;
  RewardLaw law_ = RewardLaw::bernoulli;
  double half_width_ = 0.1;
  std::vector<ChangePoint> change_points_;
  double fade_ = 0.0;
};

/// Channel state drawn once per slot, before any user acts on it.
struct SlotDraw {
  std::vector<std::uint8_t> pu_occupied;
  std::vector<double> reward_u;  // one shared variate per channel
  std::vector<std::uint8_t> faded;
};

/// Consumes exactly 3K variates per slot regardless of the model, so the
/// stream position depends only on the slot index.
inline void draw_slot(const ChannelModel& model, Rng& rng, SlotDraw& out) {
  const std::size_t k = model.num_channels();
  out.pu_occupied.resize(k);
  out.reward_u.resize(k);
  out.faded.resize(k);
  const auto theta = model.occupancy();
  for (std::size_t c = 0; c < k; ++c) out.pu_occupied[c] = rng.uniform() < theta[c];
  for (std::size_t c = 0; c < k; ++c) out.reward_u[c] = rng.uniform();
  for (std::size_t c = 0; c < k; ++c) out.faded[c] = rng.uniform() < model.fade_probability();
}

inline SlotDraw draw_slot(const ChannelModel& model, Rng& rng) {
  SlotDraw d;
  draw_slot(model, rng, d);
  return d;
}

/// The reward sample each channel would yield this slot for a given user.
inline std::vector<double> reward_draws(const ChannelModel& model, const SlotDraw& draw, UserId user,
                                        std::size_t t) {
  std::vector<double> out(model.num_channels());
  for (Channel c = 0; c < out.size(); ++c) out[c] = model.reward(user, c, t, draw.reward_u[c]);
  return out;
}

struct UserAction {
  UserId user = 0;
  Action action;
};

struct UserOutcome {
  bool transmitted = false;
  bool success = false;     // alone on a vacant channel and not faded
  bool collided = false;    // shared the channel with another SU
  bool pu_blocked = false;  // channel held by a primary user
  bool faded = false;
  double reward = 0.0;
};

struct SlotGroundTruth {
  std::size_t slot = 0;
  std::vector<std::uint8_t> pu_occupied;
  std::vector<double> reward_u;
  std::vector<UserAction> actions;
  std::vector<UserOutcome> outcomes;          // parallel to `actions`
  std::vector<std::uint32_t> transmitters;    // SU transmissions per channel
  std::vector<Channel> collision_channels;    // channels with >= 2 transmitters
  std::size_t pu_interference_events = 0;     // one per SU transmitting on a PU channel

  std::size_t num_channels() const { return transmitters.size(); }
  bool occupied(Channel c) const { return pu_occupied[c] || transmitters[c] > 0; }
};

/// Applies the collision model to one slot. The output buffer is reused.
inline void resolve_slot(const ChannelModel& model, const SlotDraw& draw, std::size_t t,
                         std::span<const UserAction> actions, SlotGroundTruth& g) {
  const std::size_t k = model.num_channels();
  g.slot = t;
  g.pu_occupied = draw.pu_occupied;
  g.reward_u = draw.reward_u;
  g.actions.assign(actions.begin(), actions.end());
  g.outcomes.assign(actions.size(), UserOutcome{});
  g.transmitters.assign(k, 0);
  g.collision_channels.clear();
  g.pu_interference_events = 0;

  for (const auto& ua : actions) {
    const Action& a = ua.action;
    const bool uses_channel = a.kind == ActionKind::transmit || a.kind == ActionKind::sense;
    if (uses_channel && a.channel >= k)
      throw ConfigError("slot " + std::to_string(t) + ": user " + std::to_string(ua.user) +
                        " references channel " + std::to_string(a.channel + 1) + " outside 1.." +
                        std::to_string(k));
    if (a.concurrent == ConcurrentSense::narrowband && a.sense_channel >= k)
      throw ConfigError("slot " + std::to_string(t) + ": concurrent sense channel out of range");
    if (a.transmits()) ++g.transmitters[a.channel];
  }
  for (Channel c = 0; c < k; ++c)
    if (g.transmitters[c] >= 2) g.collision_channels.push_back(c);

  for (std::size_t i = 0; i < actions.size(); ++i) {
    const Action& a = actions[i].action;
    if (!a.transmits()) continue;
    UserOutcome& o = g.outcomes[i];
    o.transmitted = true;
    o.collided = g.transmitters[a.channel] >= 2;
    o.pu_blocked = draw.pu_occupied[a.channel] != 0;
    o.faded = draw.faded[a.channel] != 0;
    if (o.pu_blocked) ++g.pu_interference_events;
    o.success = !o.collided && !o.pu_blocked && !o.faded;
    if (o.success && a.payload) o.reward = model.reward(actions[i].user, a.channel, t, draw.reward_u[a.channel]);
  }
}

inline SlotGroundTruth resolve_slot(const ChannelModel& model, const SlotDraw& draw, std::size_t t,
                                    std::span<const UserAction> actions) {
  SlotGroundTruth g;
  resolve_slot(model, draw, t, actions, g);
  return g;
}

/// Expected per-slot network reward of the optimal centralized allocation
/// for the given active users at slot t.
inline double oracle_slot_value(const ChannelModel& model, std::span<const UserId> active, std::size_t t) {
  if (active.empty()) return 0.0;
  const std::size_t k = model.num_channels();
  if (model.homogeneous()) {
    std::vector<double> eff(k);
    for (Channel c = 0; c < k; ++c) eff[c] = model.effective_mean(active.front(), c, t);
    return top_n(eff, active.size()).value;
  }
  if (active.size() > k) {
    // Saturated: only K users can be served; pick the best K rows by matching
    // the transposed problem.
    Matrix w(k, std::vector<double>(active.size()));
    for (Channel c = 0; c < k; ++c)
      for (std::size_t i = 0; i < active.size(); ++i) w[c][i] = model.effective_mean(active[i], c, t);
    return hungarian(w).value;
  }
  Matrix w(active.size(), std::vector<double>(k));
  for (std::size_t i = 0; i < active.size(); ++i)
    for (Channel c = 0; c < k; ++c) w[i][c] = model.effective_mean(active[i], c, t);
  return hungarian(w).value;
}

/// Homogeneous convenience form: value of N users.
inline double oracle_slot_value(const ChannelModel& model, std::size_t n, std::size_t t) {
  std::vector<UserId> users(n);
  for (std::size_t i = 0; i < n; ++i) users[i] = i;
  return oracle_slot_value(model, users, t);
}

}  // namespace mpmab
