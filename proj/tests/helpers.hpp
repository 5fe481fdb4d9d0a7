#pragma once

#include <memory>
#include <vector>

#include "mpmab/env.hpp"
#include "mpmab/metrics.hpp"
#include "mpmab/policies.hpp"
#include "mpmab/presets.hpp"
#include "mpmab/radio.hpp"

namespace testing_support {

using namespace mpmab;

inline const std::vector<double>& reference_mu() { return reference_means(); }

/// Drives hand-built policy instances through the slot loop and records
/// every action.
struct ManualNetwork {
  ChannelModel model;
  RadioCapability radio = parse_radio("type2_nb");
  std::vector<std::unique_ptr<Policy>> users;
  std::vector<std::vector<Action>> actions;  // [slot][user]
  std::vector<std::size_t> collisions;      // per slot
  std::vector<double> regret;               // per slot increment
  Rng env{1};

  void step(std::size_t t) {
    std::vector<UserAction> a;
    for (std::size_t i = 0; i < users.size(); ++i) a.push_back({i, users[i]->act(t)});
    const SlotDraw d = draw_slot(model, env);
    const SlotGroundTruth g = resolve_slot(model, d, t, a);
    std::vector<Action> row;
    for (std::size_t i = 0; i < users.size(); ++i) {
      users[i]->update(observe(radio, g, i));
      row.push_back(a[i].action);
    }
    actions.push_back(row);
    collisions.push_back(colliding_users(g));
    regret.push_back(pseudo_regret_step(oracle_slot_value(model, users.size(), t), g, model));
  }

  void run(std::size_t from, std::size_t to) {
    for (std::size_t t = from; t < to; ++t) step(t);
  }
};

}  // namespace testing_support
