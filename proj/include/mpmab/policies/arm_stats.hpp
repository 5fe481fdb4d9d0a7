#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "mpmab/action.hpp"
#include "mpmab/matching.hpp"

namespace mpmab {

/// UCB1 index with exploration constant 2. An unpulled arm is +inf.
inline double ucb_index(double mean, std::uint64_t pulls, std::uint64_t t) {
  if (pulls == 0) return std::numeric_limits<double>::infinity();
  const double tt = t < 1 ? 1.0 : static_cast<double>(t);
  return mean + std::sqrt(2.0 * std::log(tt) / static_cast<double>(pulls));
}

/// Per-channel sample counts and empirical means from a user's own
/// successful transmissions.
class ArmStats {
 public:
  ArmStats() = default;
  explicit ArmStats(std::size_t channels) : pulls_(channels, 0), sums_(channels, 0.0) {}

  std::size_t size() const { return pulls_.size(); }

  void record(Channel c, double reward) {
    ++pulls_[c];
    sums_[c] += reward;
  }

  std::uint64_t pulls(Channel c) const { return pulls_[c]; }
  double mean(Channel c) const { return pulls_[c] ? sums_[c] / static_cast<double>(pulls_[c]) : 0.0; }
  double ucb(Channel c, std::uint64_t t) const { return ucb_index(mean(c), pulls_[c], t); }

  std::vector<double> means() const {
    std::vector<double> m(size());
    for (Channel c = 0; c < size(); ++c) m[c] = mean(c);
    return m;
  }

  void ucb_all(std::uint64_t t, std::vector<double>& out) const {
    out.resize(size());
    const double log_term = 2.0 * std::log(t < 1 ? 1.0 : static_cast<double>(t));
    for (Channel c = 0; c < size(); ++c)
      out[c] = pulls_[c] ? mean(c) + std::sqrt(log_term / static_cast<double>(pulls_[c]))
                         : std::numeric_limits<double>::infinity();
  }

  /// Channels by decreasing empirical mean, ties to the lower index.
  std::vector<Channel> ranking() const { return rank_channels(means()); }

 private:
  std::vector<std::uint64_t> pulls_;
  std::vector<double> sums_;
};

}  // namespace mpmab
