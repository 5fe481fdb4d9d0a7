#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "helpers.hpp"
#include "mpmab/policies.hpp"
#include "mpmab/runner.hpp"

using namespace mpmab;
using testing_support::ManualNetwork;

namespace {

ExperimentConfig reference(const std::string& algorithm, std::size_t users, std::size_t horizon) {
  ExperimentConfig c = static_setup(algorithm, users, 1);
  c.horizon = horizon;
  return c;
}

/// Last action of every user in replication 0.
std::vector<Action> final_actions(const ExperimentConfig& cfg, std::size_t rep = 0) {
  std::vector<Action> out;
  RunOptions o;
  o.observer = [&](const SlotGroundTruth& g, double) {
    if (g.slot + 1 == cfg.horizon)
      for (const auto& ua : g.actions) out.push_back(ua.action);
  };
  run_replication(cfg, rep, o);
  return out;
}

}  // namespace

TEST(Ucb, Index) {
  EXPECT_TRUE(std::isinf(ucb_index(0.3, 0, 10)));
  EXPECT_NEAR(ucb_index(0.5, 4, 100), 0.5 + std::sqrt(2.0 * std::log(100.0) / 4.0), 1e-15);
  EXPECT_NEAR(ucb_index(0.5, 4, 100), 2.0174, 1e-4);
  EXPECT_EQ(ucb_index(0.4, 7, 50), ucb_index(0.4, 7, 50));
  ArmStats s(2);
  s.record(0, 1.0);
  s.record(1, 1.0);
  EXPECT_EQ(s.ucb(0, 9), s.ucb(1, 9));
}

TEST(SeqHop, Wraparound) {
  EXPECT_EQ(seqhop_next(7, 8), 0u);
  EXPECT_EQ(seqhop_next(2, 8), 3u);
}

TEST(SeqHop, FourUsersSixteenSlots) {
  std::vector<Channel> ch = {0, 1, 2, 3};
  std::vector<std::map<Channel, int>> visits(4);
  for (int s = 0; s < 16; ++s) {
    std::set<Channel> used(ch.begin(), ch.end());
    EXPECT_EQ(used.size(), 4u);
    for (std::size_t u = 0; u < 4; ++u) {
      ++visits[u][ch[u]];
      ch[u] = seqhop_next(ch[u], 8);
    }
  }
  for (const auto& v : visits) {
    EXPECT_EQ(v.size(), 8u);
    for (const auto& [c, n] : v) EXPECT_EQ(n, 2);
  }
}

TEST(RandomHop, StaysWhenClean) {
  Rng rng(4);
  RandomHopper h;
  h.start(8, rng);
  const Channel c = h.current();
  for (int i = 0; i < 20; ++i) h.step(false, rng);
  EXPECT_EQ(h.current(), c);
  EXPECT_TRUE(h.orthogonal());
}

TEST(RandomHop, RedrawIsUniform) {
  Rng rng(8);
  RandomHopper h;
  h.start(8, rng);
  std::vector<int> counts(8, 0);
  int stay = 0;
  const int n = 80000;
  for (int i = 0; i < n; ++i) {
    const Channel before = h.current();
    h.step(true, rng);
    ++counts[h.current()];
    stay += h.current() == before;
  }
  for (int c : counts) EXPECT_NEAR(c / double(n), 1.0 / 8, 0.01);
  EXPECT_NEAR(stay / double(n), 1.0 / 8, 0.01);
}

TEST(RandomHop, FourUsersOrthogonalizeQuickly) {
  std::vector<std::size_t> times;
  for (int trial = 0; trial < 10000; ++trial) {
    Rng rng(stream_seed(77, trial, 0));
    std::vector<RandomHopper> hs(4);
    for (auto& h : hs) h.start(8, rng);
    std::size_t t = 0;
    while (true) {
      std::vector<int> cnt(8, 0);
      for (auto& h : hs) ++cnt[h.current()];
      bool clash = false;
      for (auto& h : hs) clash |= cnt[h.current()] > 1;
      if (!clash) break;
      for (auto& h : hs) h.step(cnt[h.current()] > 1, rng);
      ++t;
    }
    times.push_back(t);
  }
  std::nth_element(times.begin(), times.begin() + 5000, times.end());
  EXPECT_LE(times[5000], 50u);
}

TEST(MCTopM, LockedUserIgnoresCollision) {
  MCTopM p(false);
  PolicyParams params;
  params.channels = 3;
  params.known_users = 3;
  p.reset(params, 5);
  const Channel c = p.act(0).channel;
  Observation clean;
  clean.slot = 0;
  clean.action = Action::transmit(c);
  clean.success = true;
  clean.reward = 1.0;
  clean.collision_flag = false;
  p.update(clean);
  ASSERT_TRUE(p.locked());
  Observation hit = clean;
  hit.slot = 1;
  hit.success = false;
  hit.reward.reset();
  hit.collision_flag = true;
  p.update(hit);
  EXPECT_EQ(p.current(), c);
}

TEST(MCTopM, LeavesChannelThatDropsOutOfTopSet) {
  MCTopM p(false);
  PolicyParams params;
  params.channels = 2;
  params.known_users = 1;
  p.reset(params, 9);
  const Channel c = p.act(0).channel;
  Observation clean;
  clean.action = Action::transmit(c);
  clean.success = true;
  clean.reward = 1.0;
  clean.collision_flag = false;
  p.update(clean);  // the unplayed channel now has an infinite index
  EXPECT_NE(p.current(), c);
}

TEST(MCTopM, SaturatedVariantMatchesWhenUsersEqualChannels) {
  const auto a = run_replication(reference("mctopm", 8, 5000), 0).metrics;
  const auto b = run_replication(reference("umctopm", 8, 5000), 0).metrics;
  EXPECT_EQ(a.series(Metric::pseudo_regret), b.series(Metric::pseudo_regret));
}

TEST(MusicalChairs, EstimateInversion) {
  EXPECT_EQ(estimate_users(0.0, 8), 1u);
  for (std::size_t n = 1; n <= 8; ++n) {
    const double p = 1.0 - std::pow(1.0 - 1.0 / 8, static_cast<double>(n - 1));
    EXPECT_EQ(estimate_users(p, 8), n);
  }
  EXPECT_EQ(estimate_users(1.0, 8), 8u);
}

TEST(MusicalChairs, LoneUserFixesOnBestChannel) {
  ManualNetwork net{ChannelModel(Matrix{testing_support::reference_mu()})};
  auto mc = std::make_unique<MusicalChairs>();
  PolicyParams p;
  p.mc_learning = 3000;
  mc->reset(p, 3);
  auto* raw = mc.get();
  net.users.push_back(std::move(mc));
  net.run(0, 3100);
  EXPECT_EQ(raw->estimated_users(), 1u);
  EXPECT_TRUE(raw->seated());
  EXPECT_EQ(raw->current(), 7u);
}

TEST(MusicalChairs, SeatedUsersNeverCollideOrMove) {
  ManualNetwork net{ChannelModel(Matrix{testing_support::reference_mu()})};
  std::vector<MusicalChairs*> mcs;
  for (int i = 0; i < 4; ++i) {
    auto mc = std::make_unique<MusicalChairs>();
    PolicyParams p;
    mc->reset(p, 100 + i);
    mcs.push_back(mc.get());
    net.users.push_back(std::move(mc));
  }
  net.run(0, 6000);
  for (auto* m : mcs) ASSERT_TRUE(m->seated());
  const auto fixed = net.actions.back();
  net.run(6000, 8000);
  for (std::size_t t = 6000; t < 8000; ++t) {
    EXPECT_EQ(net.collisions[t], 0u);
    EXPECT_EQ(net.actions[t], fixed);
  }
}

TEST(Mega, GreedyOnceExplorationFades) {
  ExperimentConfig cfg = reference("mega", 1, 200000);
  std::size_t best = 0, total = 0;
  RunOptions o;
  o.observer = [&](const SlotGroundTruth& g, double) {
    if (g.slot < 190000) return;
    ++total;
    best += g.actions[0].action.channel == 7;
  };
  run_replication(cfg, 0, o);
  EXPECT_GT(best, total * 9 / 10);
}

TEST(Mega, PersistenceShrinksOnRepeatedCollisions) {
  Mega m;
  PolicyParams p;
  p.channels = 1;
  m.reset(p, 1);
  Observation hit;
  hit.action = Action::transmit(0);
  hit.collision_flag = true;
  double expected = p.mega_p0;
  int persisted = 0;
  for (int i = 0; i < 20; ++i) {
    hit.slot = i;
    m.act(i);
    m.update(hit);
    if (m.persisting()) {
      expected *= p.mega_alpha;
      ++persisted;
      EXPECT_NEAR(m.persistence(), expected, 1e-12);
    } else {
      expected = p.mega_p0;
      EXPECT_NEAR(m.persistence(), p.mega_p0, 1e-12);
    }
  }
  EXPECT_GT(persisted, 0);
}

TEST(OneHotSensing, CountsOtherSequentialHoppers) {
  const std::size_t k = 8;
  const std::vector<std::size_t> others = {1, 4, 6};
  OneHotSensing ohs;
  const Channel watched = 3;
  ohs.start(k, watched);
  for (std::size_t s = 40; s < 40 + k; ++s) {
    bool busy = false;
    for (auto o : others) busy |= (o + s) % k == watched;
    ohs.record(s, busy);
  }
  EXPECT_EQ(ohs.busy_slots(), 3u);
  EXPECT_EQ(ohs.estimated_users(), 4u);
  EXPECT_EQ(ohs.rank_of(0), 0u);
  EXPECT_EQ(ohs.rank_of(5), 2u);

  OneHotSensing alone;
  alone.start(k, 0);
  for (std::size_t s = 0; s < k; ++s) alone.record(s, false);
  EXPECT_EQ(alone.estimated_users(), 1u);
}

TEST(Scf, SettlesOnDistinctTopChannels) {
  const auto last = final_actions(reference("scf", 4, 8000));
  std::set<Channel> used;
  for (const auto& a : last) {
    ASSERT_TRUE(a.transmits());
    EXPECT_GE(a.channel, 4u);
    used.insert(a.channel);
  }
  EXPECT_EQ(used.size(), 4u);
}

TEST(Scf, RejectsShortSequentialPhase) {
  Scf s;
  PolicyParams p;
  p.sh_slots = 10;
  EXPECT_THROW(s.reset(p, 1), ConfigError);
}

TEST(Trekking, LoneUserClimbsToBestChannel) {
  const auto last = final_actions(reference("tsn", 1, 12000));
  ASSERT_EQ(last.size(), 1u);
  EXPECT_EQ(last[0], Action::transmit(7));
}

namespace {

ManualNetwork exact_trek(std::vector<Channel> start, bool dynamic, PolicyParams p, std::vector<Trekking*>& out) {
  ManualNetwork net{ChannelModel(Matrix{testing_support::reference_mu()})};
  const std::vector<Channel> ranking = {7, 6, 5, 4, 3, 2, 1, 0};
  for (std::size_t i = 0; i < start.size(); ++i) {
    auto t = std::make_unique<Trekking>(dynamic);
    t->reset(p, 50 + i);
    t->start_trek(ranking, start[i], 0);
    out.push_back(t.get());
    net.users.push_back(std::move(t));
  }
  return net;
}

}  // namespace

TEST(Trekking, ExactRankingReachesTopWithinBound) {
  PolicyParams p;
  std::vector<Trekking*> ts;
  auto net = exact_trek({0, 1, 2, 3}, false, p, ts);
  const std::size_t w = ts[0]->window();
  const std::size_t bound = (8 - 4) * w * 8;
  net.run(0, bound);
  std::set<Channel> held;
  for (const auto& a : net.actions.back()) held.insert(a.channel);
  EXPECT_EQ(held, (std::set<Channel>{4, 5, 6, 7}));
  net.run(bound, bound + 4 * ts[0]->round_length());
  for (std::size_t t = bound; t < net.actions.size(); ++t) EXPECT_EQ(net.collisions[t], 0u);
}

TEST(Trekking, TopOccupancyIsAbsorbing) {
  PolicyParams p;
  std::vector<Trekking*> ts;
  auto net = exact_trek({4, 5, 6, 7}, false, p, ts);
  net.run(0, 20 * ts[0]->round_length());
  const std::size_t settle = 3 * ts[0]->round_length();
  for (std::size_t t = settle; t < net.actions.size(); ++t) {
    EXPECT_EQ(net.actions[t], net.actions[settle]);
    EXPECT_NEAR(net.regret[t], 0.0, 1e-12);
  }
  for (auto* t : ts) EXPECT_TRUE(t->settled());
}

TEST(Trekking, DynamicNeighbourClimbsAfterDeparture) {
  PolicyParams p;
  p.tdn_maintenance_rounds = 4;
  std::vector<Trekking*> ts;
  auto net = exact_trek({4, 5, 6, 7}, true, p, ts);
  const std::size_t round = ts[0]->round_length();
  net.run(0, 4 * round);
  // The user on the best channel leaves.
  net.users.pop_back();
  const std::size_t left = net.actions.size();
  // Detection waits for a maintenance round; the move then takes one window.
  net.run(left, left + (p.tdn_maintenance_rounds + 1) * round + ts[0]->window());
  EXPECT_EQ(ts[2]->current(), 7u);
}

TEST(Trekking, DynamicMatchesStaticUntilFirstMaintenanceProbe) {
  auto cfg_s = reference("tsn", 4, 8000);
  auto cfg_d = reference("tdn", 4, 8000);
  std::vector<std::vector<Action>> s, d;
  RunOptions os, od;
  os.observer = [&](const SlotGroundTruth& g, double) {
    std::vector<Action> row;
    for (const auto& ua : g.actions) row.push_back(ua.action);
    s.push_back(row);
  };
  od.observer = [&](const SlotGroundTruth& g, double) {
    std::vector<Action> row;
    for (const auto& ua : g.actions) row.push_back(ua.action);
    d.push_back(row);
  };
  run_replication(cfg_s, 0, os);
  run_replication(cfg_d, 0, od);
  const PolicyParams p = cfg_s.policy_params();
  const std::size_t origin = p.rh_slots + p.sh_slots;
  const std::size_t first_probe = origin + (p.tdn_maintenance_rounds - 1) * 7 * probation_window(p.trek_c, p.horizon);
  for (std::size_t t = 0; t < first_probe; ++t) ASSERT_EQ(s[t], d[t]) << "slot " << t;
}

TEST(Eser, ScheduleDoublesExploit) {
  PolicyParams p;
  p.channels = 12;
  p.horizon = 300000;
  p.eser_exploit = 1000;
  EserSchedule sch(p, false, 6);
  EXPECT_EQ(sch.exploit_length(1), 1000u);
  EXPECT_EQ(sch.exploit_length(2), 2000u);
  EXPECT_EQ(sch.exploit_length(3), 4000u);
  EXPECT_EQ(sch.explore_length() % 12, 0u);
  EXPECT_GE(sch.explore_length(), static_cast<std::size_t>(std::ceil(12 * 5.0 * std::log(300000.0))));
  EXPECT_EQ(sch.signal_length(1), 6u * frame_slots(12, 8));
  EXPECT_EQ(frame_slots(12, 8), 108u);
  EserSchedule mod(p, true, 6);
  EXPECT_EQ(mod.bits(1), 5u);
  EXPECT_EQ(mod.bits(4), 8u);
  EXPECT_EQ(mod.bits(9), 8u);
}

TEST(Eser, TwoUsersTakeTheirBestMatching) {
  ExperimentConfig cfg;
  cfg.model = ChannelModel(Matrix{{0.9, 0.1}, {0.2, 0.8}}, {}, RewardLaw::uniform, 0.05);
  cfg.algorithm = "eser";
  cfg.users = 2;
  cfg.horizon = 30000;
  cfg.radio = parse_radio("type2_nb");
  cfg.params.rh_slots = 200;
  cfg.params.eser_exploit = 1000;
  EserSchedule sch(cfg.policy_params(), false, 2);
  std::size_t exploit_slots = 0;
  RunOptions o;
  o.observer = [&](const SlotGroundTruth& g, double inc) {
    if (sch.locate(g.slot).phase != EserPhase::exploit) return;
    ++exploit_slots;
    EXPECT_EQ(g.actions[0].action, Action::transmit(0));
    EXPECT_EQ(g.actions[1].action, Action::transmit(1));
    EXPECT_NEAR(inc, 0.0, 1e-12);
  };
  run_replication(cfg, 0, o);
  EXPECT_GT(exploit_slots, 10000u);
}

TEST(EpochReset, Boundaries) {
  EXPECT_EQ(next_epoch_boundary(0, 100), 100u);
  EXPECT_EQ(next_epoch_boundary(100, 100), 300u);
  EXPECT_EQ(next_epoch_boundary(299, 100), 300u);
  EXPECT_EQ(next_epoch_boundary(300, 100), 700u);
  EXPECT_TRUE(is_epoch_boundary(0, 100));
  EXPECT_TRUE(is_epoch_boundary(300, 100));
  EXPECT_FALSE(is_epoch_boundary(200, 100));
}

TEST(EpochReset, StaticNetworkPaysEveryEpoch) {
  auto cfg = reference("dscf", 4, 70000);
  cfg.params.epoch_length = 10000;
  std::vector<double> per_epoch(3, 0.0);
  RunOptions o;
  o.observer = [&](const SlotGroundTruth& g, double inc) {
    if (g.slot >= 10000 && g.slot < 30000) per_epoch[1] += inc;
    if (g.slot >= 30000 && g.slot < 70000) per_epoch[2] += inc;
  };
  run_replication(cfg, 0, o);
  EXPECT_GT(per_epoch[1], 100.0);
  EXPECT_GT(per_epoch[2], 100.0);
}

TEST(EpochReset, LateEntrantWaitsForBoundary) {
  EpochReset w([] { return make_policy("sh"); }, "dsh");
  PolicyParams p;
  p.epoch_length = 100;
  p.start_slot = 150;
  p.entrant = true;
  w.reset(p, 1);
  for (std::size_t t = 150; t < 300; ++t) EXPECT_EQ(w.act(t), Action::idle());
  EXPECT_TRUE(w.act(300).transmits());
}

TEST(Factory, KnowsEveryAlgorithm) {
  for (const auto& n : algorithm_names()) EXPECT_EQ(make_policy(n)->name(), n);
  EXPECT_THROW(make_policy("nope"), ConfigError);
  EXPECT_THROW(dynamic_wrapper("scf", DynamicMode::trek), ConfigError);
}
