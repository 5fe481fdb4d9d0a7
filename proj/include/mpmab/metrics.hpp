#pragma once

// Pseudo-regret and collision accounting.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "mpmab/env.hpp"

namespace mpmab {

/// Oracle value minus the expected value of every successful data
/// transmission this slot. Signaling pulses and sensing earn nothing.
inline double pseudo_regret_step(double oracle_value, const SlotGroundTruth& g, const ChannelModel& model) {
  double earned = 0.0;
  for (std::size_t i = 0; i < g.actions.size(); ++i) {
    const auto& o = g.outcomes[i];
    const auto& a = g.actions[i].action;
    if (o.success && a.payload) earned += model.effective_mean(g.actions[i].user, a.channel, g.slot);
  }
  return oracle_value - earned;
}

inline double realized_reward(const SlotGroundTruth& g) {
  double sum = 0.0;
  for (const auto& o : g.outcomes) sum += o.reward;
  return sum;
}

/// Users that took part in a collision this slot.
inline std::size_t colliding_users(const SlotGroundTruth& g) {
  std::size_t n = 0;
  for (const auto& o : g.outcomes) n += o.collided;
  return n;
}

enum class Metric { pseudo_regret, realized_regret, collisions, pu_interference, active_users };

inline const std::vector<Metric>& all_metrics() {
  static const std::vector<Metric> m = {Metric::pseudo_regret, Metric::realized_regret, Metric::collisions,
                                        Metric::pu_interference, Metric::active_users};
  return m;
}

inline std::string metric_name(Metric m) {
  switch (m) {
    case Metric::pseudo_regret:
      return "pseudo_regret";
    case Metric::realized_regret:
      return "realized_regret";
    case Metric::collisions:
      return "collisions";
    case Metric::pu_interference:
      return "pu_interference";
    case Metric::active_users:
      return "active_users";
  }
  return "?";
}

/// Cumulative per-replication series, recorded every `stride` slots and at
/// the final slot. Realized regret is oracle mean value minus realized
/// reward, so unlike the others it is not monotone.
struct MetricsSeries {
  std::size_t stride = 1;
  std::vector<std::size_t> slots;  // recorded slot indices (0-based, inclusive)
  std::map<Metric, std::vector<double>> values;
  std::map<UserId, std::vector<std::uint64_t>> occupancy;  // transmissions per channel

  double pseudo_regret = 0.0;
  double realized_regret = 0.0;
  std::uint64_t collisions = 0;
  std::uint64_t pu_interference = 0;
  double min_increment = std::numeric_limits<double>::infinity();
  std::size_t active_users = 0;

  const std::vector<double>& series(Metric m) const { return values.at(m); }

  double final_value(Metric m) const {
    switch (m) {
      case Metric::pseudo_regret:
        return pseudo_regret;
      case Metric::realized_regret:
        return realized_regret;
      case Metric::collisions:
        return static_cast<double>(collisions);
      case Metric::pu_interference:
        return static_cast<double>(pu_interference);
      case Metric::active_users:
        return static_cast<double>(active_users);
    }
    return 0.0;
  }
};

class MetricsAccumulator {
 public:
  MetricsAccumulator(std::size_t horizon, std::size_t stride, std::size_t channels)
      : horizon_(horizon), channels_(channels) {
    out_.stride = std::max<std::size_t>(1, stride);
    for (Metric m : all_metrics()) out_.values[m].reserve(horizon / out_.stride + 2);
  }

  /// Returns the pseudo-regret increment for the slot.
  double add(const SlotGroundTruth& g, double oracle_value, const ChannelModel& model, std::size_t active) {
    const double inc = pseudo_regret_step(oracle_value, g, model);
    out_.pseudo_regret += inc;
    out_.realized_regret += oracle_value - realized_reward(g);
    out_.collisions += colliding_users(g);
    out_.pu_interference += g.pu_interference_events;
    out_.min_increment = std::min(out_.min_increment, inc);
    out_.active_users = active;
    for (std::size_t i = 0; i < g.actions.size(); ++i) {
      if (!g.actions[i].action.transmits()) continue;
      auto& hist = out_.occupancy[g.actions[i].user];
      if (hist.empty()) hist.assign(channels_, 0);
      ++hist[g.actions[i].action.channel];
    }
    if ((g.slot + 1) % out_.stride == 0 || g.slot + 1 == horizon_) record(g.slot);
    return inc;
  }

  MetricsSeries take() { return std::move(out_); }
  const MetricsSeries& current() const { return out_; }

 private:
  void record(std::size_t t) {
    if (!out_.slots.empty() && out_.slots.back() == t) return;
    out_.slots.push_back(t);
    out_.values[Metric::pseudo_regret].push_back(out_.pseudo_regret);
    out_.values[Metric::realized_regret].push_back(out_.realized_regret);
    out_.values[Metric::collisions].push_back(static_cast<double>(out_.collisions));
    out_.values[Metric::pu_interference].push_back(static_cast<double>(out_.pu_interference));
    out_.values[Metric::active_users].push_back(static_cast<double>(out_.active_users));
  }

  std::size_t horizon_;
  std::size_t channels_;
  MetricsSeries out_;
};

}  // namespace mpmab
