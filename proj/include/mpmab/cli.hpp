#pragma once

// Command-line front end: run, figures, check.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mpmab/config.hpp"
#include "mpmab/errors.hpp"
#include "mpmab/output.hpp"
#include "mpmab/presets.hpp"
#include "mpmab/runner.hpp"

namespace mpmab {

inline constexpr int exit_ok = 0;
inline constexpr int exit_config = 2;
inline constexpr int exit_abort = 3;

inline constexpr const char* oracle_note =
    "best assignment of active users to channels by mean times (1 - PU occupancy), "
    "recomputed whenever the active set or the means change";

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> replications, horizon, threads, downsample, users;
  std::optional<std::string> algorithm, out;
};

inline std::optional<std::size_t> env_threads() {
  const char* v = std::getenv("MPMAB_THREADS");
  if (!v || !*v) return std::nullopt;
  return static_cast<std::size_t>(parse_uint("MPMAB_THREADS", v));
}

inline void apply(const Overrides& o, LoadedConfig& lc) {
  ExperimentConfig& c = lc.experiment;
  if (o.seed) c.seed = *o.seed;
  if (o.replications) c.replications = *o.replications;
  if (o.horizon) c.horizon = *o.horizon;
  if (o.downsample) c.downsample = *o.downsample;
  if (o.users) c.users = *o.users;
  if (o.algorithm) c.algorithm = *o.algorithm;
  if (o.out) lc.output_dir = *o.out;
  if (o.threads)
    c.threads = *o.threads;
  else if (auto t = env_threads())
    c.threads = *t;
  validate(c);
}

inline LoadedConfig from_preset(const std::string& name) {
  LoadedConfig lc;
  lc.experiment = named_preset(name);
  return lc;
}

inline LoadedConfig from_manifest(const std::string& path) {
  nlohmann::json m;
  try {
    m = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("manifest '" + path + "': " + e.what());
  }
  if (!m.contains("config") || !m["config"].is_string())
    throw ConfigError("manifest '" + path + "' has no config entry");
  return parse_config(m["config"].get<std::string>());
}

inline std::string series_csv(const AggregatedSeries& agg, const std::string& algorithm,
                              const std::vector<Metric>& metrics) {
  std::string s = csv_header;
  append_series(s, agg, algorithm, metrics);
  return s;
}

inline int cmd_run(LoadedConfig lc, const Overrides& o, std::ostream& out) {
  apply(o, lc);
  const ExperimentConfig& cfg = lc.experiment;
  const std::string started = utc_now();
  const ExperimentResult r = run_experiment(cfg);

  OutputBundle bundle(lc.output_dir);
  std::string regret = series_csv(r.aggregate, cfg.algorithm,
                                  {Metric::pseudo_regret, Metric::realized_regret, Metric::active_users});
  append_events(regret, cfg, cfg.algorithm);
  bundle.add("regret.csv", regret);
  bundle.add("collisions.csv", series_csv(r.aggregate, cfg.algorithm, {Metric::collisions, Metric::pu_interference}));
  std::string summary = csv_header;
  append_summary(summary, r.aggregate, cfg.algorithm, cfg.horizon);
  bundle.add("summary.csv", summary);

  nlohmann::ordered_json m;
  m["tool"] = "mpmab";
  m["version"] = tool_version;
  m["command"] = "run";
  m["seed"] = cfg.seed;
  m["replications"] = cfg.replications;
  m["horizon"] = cfg.horizon;
  m["downsample_stride"] = cfg.stride();
  m["oracle"] = oracle_note;
  m["started"] = started;
  m["finished"] = utc_now();
  m["config"] = to_ini(lc);
  bundle.write_manifest(m);

  const Statistics& fin = r.aggregate.final_values.at(Metric::pseudo_regret);
  out << cfg.algorithm << ": median final pseudo-regret " << format_value(fin.median) << " over " << cfg.replications
      << " replications -> " << bundle.dir().string() << "\n";
  return exit_ok;
}

inline int cmd_figures(const std::string& name, const Overrides& o, std::ostream& out) {
  auto runs = figure_runs(name, o.replications.value_or(50));
  const std::string dir = o.out.value_or("figures/" + name);
  const std::string started = utc_now();
  OutputBundle bundle(dir);
  std::string combined = csv_header, summary = csv_header;
  nlohmann::ordered_json configs = nlohmann::ordered_json::array();
  for (auto& run : runs) {
    LoadedConfig lc;
    lc.experiment = run.config;
    lc.output_dir = dir;
    Overrides local = o;
    local.out.reset();
    local.replications.reset();
    apply(local, lc);
    const ExperimentConfig& cfg = lc.experiment;
    const ExperimentResult r = run_experiment(cfg);
    std::string csv = csv_header;
    append_series(csv, r.aggregate, run.label, all_metrics());
    append_events(csv, cfg, run.label);
    bundle.add(name + "_" + run.label + ".csv", csv);
    combined += csv.substr(std::string(csv_header).size());
    append_summary(summary, r.aggregate, run.label, cfg.horizon);
    configs.push_back({{"label", run.label}, {"config", to_ini(lc)}});
    out << name << " " << run.label << ": median final pseudo-regret "
        << format_value(r.aggregate.final_values.at(Metric::pseudo_regret).median) << ", collisions "
        << format_value(r.aggregate.final_values.at(Metric::collisions).median) << "\n";
  }
  bundle.add(name + ".csv", combined);
  bundle.add(name + "_summary.csv", summary);
  nlohmann::ordered_json m;
  m["tool"] = "mpmab";
  m["version"] = tool_version;
  m["command"] = "figures";
  m["figure"] = name;
  m["oracle"] = oracle_note;
  m["started"] = started;
  m["finished"] = utc_now();
  m["runs"] = configs;
  bundle.write_manifest(m);
  return exit_ok;
}

inline int cmd_check(LoadedConfig lc, const Overrides& o, std::ostream& out) {
  apply(o, lc);
  const ExperimentConfig& cfg = lc.experiment;
  std::size_t peak = cfg.users, n = cfg.users;
  for (const auto& e : cfg.dynamics.events) {
    n = e.kind == EventKind::enter ? n + 1 : n - 1;
    peak = std::max(peak, n);
  }
  out << "OK\n" << to_ini(lc) << "\n";
  out << "workload: " << cfg.horizon << " slots x " << cfg.replications << " replications = "
      << cfg.horizon * cfg.replications << " slot rounds, up to " << peak << " users each\n";
  return exit_ok;
}

/// Entry point shared by the executable and the tests.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Decentralized multi-player bandit simulator for cognitive radio networks", "mpmab"};
  app.require_subcommand(1);

  Overrides o;
  std::string config, preset, manifest, figure;
  auto add_overrides = [&](CLI::App* sub) {
    sub->add_option("--seed", o.seed, "Base seed");
    sub->add_option("--replications", o.replications, "Replications R");
    sub->add_option("--horizon", o.horizon, "Horizon T in slots");
    sub->add_option("--algorithm", o.algorithm, "Algorithm name");
    sub->add_option("--threads", o.threads, "Worker threads (default: MPMAB_THREADS, then config)");
    sub->add_option("--downsample", o.downsample, "Record every N slots (default T/1000)");
    sub->add_option("--users", o.users, "Initial number of users");
    sub->add_option("--out", o.out, "Output directory");
  };

  auto* run = app.add_subcommand("run", "Run one experiment and write CSVs plus a manifest");
  auto* run_src = run->add_option_group("source");
  run_src->add_option("--config", config, "INI config file");
  run_src->add_option("--preset", preset, "Built-in preset")->check(CLI::IsMember(preset_names()));
  run_src->add_option("--manifest", manifest, "Re-run the experiment recorded in a manifest");
  run_src->require_option(1);
  add_overrides(run);

  auto* figs = app.add_subcommand("figures", "Reproduce a figure's experiments");
  figs->add_option("name", figure, "fig2a | fig2b | fig3 | fig4 | fig5")->required();
  add_overrides(figs);

  auto* check = app.add_subcommand("check", "Validate a config and print resolved parameters");
  auto* check_src = check->add_option_group("source");
  check_src->add_option("--config", config, "INI config file");
  check_src->add_option("--preset", preset, "Built-in preset")->check(CLI::IsMember(preset_names()));
  check_src->require_option(1);
  add_overrides(check);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return exit_ok;
    }
    app.exit(e, out, err);
    return exit_config;
  }

  auto source = [&]() -> LoadedConfig {
    if (!config.empty()) return load_config(config);
    if (!preset.empty()) return from_preset(preset);
    return from_manifest(manifest);
  };

  try {
    if (*run) return cmd_run(source(), o, out);
    if (*figs) return cmd_figures(figure, o, out);
    if (*check) return cmd_check(source(), o, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return exit_config;
  } catch (const ContractViolation& e) {
    err << "replication aborted: " << e.what() << "\n";
    return exit_abort;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_abort;
  }
  return exit_config;
}

}  // namespace mpmab
