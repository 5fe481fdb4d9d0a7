#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <vector>

#include "mpmab/env.hpp"
#include "mpmab/matching.hpp"
#include "mpmab/policies.hpp"
#include "mpmab/presets.hpp"
#include "mpmab/runner.hpp"

using namespace mpmab;

namespace {

double brute_force(const Matrix& w) {
  const std::size_t n = w.size(), k = w[0].size();
  std::vector<std::size_t> cols(k);
  std::iota(cols.begin(), cols.end(), 0);
  double best = -1e300;
  do {
    double v = 0.0;
    for (std::size_t i = 0; i < n; ++i) v += w[i][cols[i]];
    best = std::max(best, v);
  } while (std::next_permutation(cols.begin(), cols.end()));
  return best;
}

Matrix random_matrix(Rng& rng, std::size_t n, std::size_t k) {
  Matrix w(n, std::vector<double>(k));
  for (auto& row : w)
    for (double& x : row) x = rng.uniform();
  return w;
}

}  // namespace

TEST(Property, HungarianMatchesBruteForceUpToSix) {
  Rng rng(31);
  for (std::size_t k = 1; k <= 6; ++k)
    for (std::size_t n = 1; n <= k; ++n)
      for (int trial = 0; trial < 20; ++trial) {
        const Matrix w = random_matrix(rng, n, k);
        const Assignment a = hungarian(w);
        EXPECT_NEAR(a.value, brute_force(w), 1e-9);
        std::vector<std::size_t> used = a.channel_of;
        std::sort(used.begin(), used.end());
        EXPECT_EQ(std::adjacent_find(used.begin(), used.end()), used.end());
      }
}

TEST(Property, HungarianIsScaleEquivariant) {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    Matrix w = random_matrix(rng, 4, 6);
    const Assignment a = hungarian(w);
    for (auto& row : w)
      for (double& x : row) x = 3.5 * x + 0.25;
    const Assignment b = hungarian(w);
    EXPECT_EQ(a.channel_of, b.channel_of);
    EXPECT_NEAR(b.value, 3.5 * a.value + 4 * 0.25, 1e-9);
  }
}

TEST(Property, TopNSolvesIdenticalRows) {
  Rng rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> mu(8);
    for (double& x : mu) x = rng.uniform();
    for (std::size_t n = 1; n <= 8; ++n) {
      const Matrix w(n, mu);
      EXPECT_NEAR(top_n(mu, n).value, hungarian(w).value, 1e-9);
    }
  }
}

TEST(Property, OracleIgnoresChannelLabels) {
  std::vector<double> mu = reference_means();
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    for (std::size_t i = mu.size() - 1; i > 0; --i) std::swap(mu[i], mu[rng.below(i + 1)]);
    for (std::size_t n = 1; n <= 8; ++n)
      EXPECT_NEAR(oracle_slot_value(ChannelModel(Matrix{mu}), n, 0),
                  oracle_slot_value(ChannelModel(Matrix{reference_means()}), n, 0), 1e-12);
  }
}

TEST(Property, RewardsStayInUnitIntervalAndCollisionsPayNothing) {
  const ChannelModel m(Matrix{reference_means()}, std::vector<double>(8, 0.2), RewardLaw::uniform, 0.3);
  Rng env(9), pick(10);
  for (std::size_t t = 0; t < 2000; ++t) {
    std::vector<UserAction> a;
    for (UserId u = 0; u < 6; ++u) a.push_back({u, Action::transmit(pick.below(8))});
    const auto g = resolve_slot(m, draw_slot(m, env), t, a);
    std::size_t winners = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const auto& o = g.outcomes[i];
      EXPECT_GE(o.reward, 0.0);
      EXPECT_LE(o.reward, 1.0);
      if (o.collided || o.pu_blocked) EXPECT_EQ(o.reward, 0.0);
      winners += o.success;
    }
    // At most one paid user per channel.
    EXPECT_LE(winners, 8u);
    std::size_t tx = 0;
    for (auto n : g.transmitters) tx += n;
    EXPECT_EQ(tx, a.size());
  }
}

TEST(Property, PseudoRegretNeverDecreases) {
  for (const auto& alg : algorithm_names()) {
    const bool hetero = alg == "eser" || alg == "meser";
    ExperimentConfig cfg = hetero ? heterogeneous_setup(alg, 4, 1) : static_setup(alg, 4, 1);
    cfg.horizon = 12000;
    cfg.params.rh_slots = 200;
    const auto m = run_replication(cfg, 0).metrics;
    EXPECT_GE(m.min_increment, -1e-12) << alg;
    const auto& s = m.series(Metric::pseudo_regret);
    for (std::size_t j = 1; j < s.size(); ++j) ASSERT_GE(s[j], s[j - 1] - 1e-9) << alg;
    const auto& c = m.series(Metric::collisions);
    for (std::size_t j = 1; j < c.size(); ++j) ASSERT_GE(c[j], c[j - 1]) << alg;
  }
}

TEST(Property, OrthogonalSequentialHoppersStayOrthogonal) {
  Rng rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t k = 2 + rng.below(11);
    const std::size_t n = 1 + rng.below(k);
    std::vector<Channel> pos(k);
    std::iota(pos.begin(), pos.end(), 0);
    for (std::size_t i = k - 1; i > 0; --i) std::swap(pos[i], pos[rng.below(i + 1)]);
    pos.resize(n);
    for (std::size_t s = 0; s < 3 * k; ++s) {
      std::vector<Channel> sorted = pos;
      std::sort(sorted.begin(), sorted.end());
      ASSERT_EQ(std::adjacent_find(sorted.begin(), sorted.end()), sorted.end());
      for (auto& c : pos) c = seqhop_next(c, k);
    }
  }
}
