#pragma once

// Canned experiments for the static, dynamic and heterogeneous figures.

#include <string>
#include <vector>

#include "mpmab/config.hpp"
#include "mpmab/errors.hpp"
#include "mpmab/runner.hpp"

namespace mpmab {

inline const std::vector<double>& reference_means() {
  static const std::vector<double> mu = {0.29, 0.36, 0.43, 0.50, 0.57, 0.64, 0.71, 0.78};
  return mu;
}

/// Homogeneous K=8 setup shared by the static and dynamic figures.
inline ExperimentConfig static_setup(const std::string& algorithm, std::size_t users, std::size_t replications = 50) {
  ExperimentConfig c;
  c.model = ChannelModel(Matrix{reference_means()});
  c.algorithm = algorithm;
  c.users = users;
  c.horizon = 100000;
  c.replications = replications;
  c.seed = 2024;
  c.radio = parse_radio("type2_nb");
  c.params.rh_slots = 200;
  c.params.sh_slots = 5000;
  c.params.mc_learning = 3000;
  c.params.trek_c = 2.0;
  return c;
}

inline ExperimentConfig dynamic_setup(const std::string& algorithm, std::size_t replications = 50) {
  ExperimentConfig c = static_setup(algorithm, 4, replications);
  c.horizon = 500000;
  c.dynamics = DynamicsSchedule::alternating(100000, c.horizon, EventKind::leave);
  c.params.epoch_length = 20000;
  return c;
}

/// K=12 heterogeneous setup. Means are uniform on [0.05, 0.95] and rewards
/// uniform within 0.05 of the mean, so no reward is ever clipped.
inline ExperimentConfig heterogeneous_setup(const std::string& algorithm, std::size_t users,
                                            std::size_t replications = 50) {
  ExperimentConfig c;
  c.model = ChannelModel(random_means(users, 12, 500 + users, 0.05, 0.95), {}, RewardLaw::uniform, 0.05);
  c.algorithm = algorithm;
  c.users = users;
  c.horizon = 300000;
  c.replications = replications;
  c.seed = 2024;
  c.radio = parse_radio("type2_nb");
  c.params.rh_slots = 20000;
  c.params.eser_a = 5.0;
  c.params.eser_exploit = 1000;
  c.params.eser_bits = 8;
  return c;
}

struct FigureRun {
  std::string label;  // algorithm, plus _n<N> where a figure sweeps N
  ExperimentConfig config;
};

inline const std::vector<std::string>& figure_names() {
  static const std::vector<std::string> names = {"fig2a", "fig2b", "fig3", "fig4", "fig5"};
  return names;
}

inline std::vector<FigureRun> figure_runs(const std::string& name, std::size_t replications = 50) {
  std::vector<FigureRun> runs;
  const std::vector<std::string> fig2 = {"mctopm", "umctopm", "sh", "mc", "scf", "tsn"};
  if (name == "fig2a" || name == "fig2b") {
    const std::size_t n = name == "fig2a" ? 4 : 8;
    for (const auto& a : fig2) runs.push_back({a, static_setup(a, n, replications)});
  } else if (name == "fig3") {
    for (std::size_t n : {4, 8})
      for (const auto& a : {"mctopm", "umctopm", "sh", "mc", "mega", "scf", "tsn"})
        runs.push_back({std::string(a) + "_n" + std::to_string(n), static_setup(a, n, replications)});
  } else if (name == "fig4") {
    for (const auto& a : {"dmc", "dscf", "tdn"}) runs.push_back({a, dynamic_setup(a, replications)});
  } else if (name == "fig5") {
    for (std::size_t n : {6, 10, 12})
      for (const auto& a : {"eser", "meser"})
        runs.push_back({std::string(a) + "_n" + std::to_string(n), heterogeneous_setup(a, n, replications)});
  } else {
    throw ConfigError("unknown figure '" + name + "' (expected fig2a, fig2b, fig3, fig4 or fig5)");
  }
  return runs;
}

/// Single-experiment presets usable in place of a config file.
inline ExperimentConfig named_preset(const std::string& name) {
  if (name == "paper-static-N4") return static_setup("scf", 4);
  if (name == "paper-static-N8") return static_setup("scf", 8);
  if (name == "paper-dynamic") return dynamic_setup("tdn");
  if (name == "paper-heterogeneous-N6") return heterogeneous_setup("meser", 6);
  throw ConfigError("unknown preset '" + name + "'");
}

inline std::vector<std::string> preset_names() {
  return {"paper-static-N4", "paper-static-N8", "paper-dynamic", "paper-heterogeneous-N6"};
}

}  // namespace mpmab
