#pragma once

// INI experiment configuration: parsing, validation, round-trip echo.

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "mpmab/errors.hpp"
#include "mpmab/runner.hpp"

namespace mpmab {

inline std::size_t edit_distance(const std::string& a, const std::string& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

inline std::string nearest(const std::string& key, const std::vector<std::string>& choices) {
  std::string best;
  std::size_t d = static_cast<std::size_t>(-1);
  for (const auto& c : choices) {
    const std::size_t e = edit_distance(key, c);
    if (e < d) {
      d = e;
      best = c;
    }
  }
  return best;
}

inline std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

inline double parse_double(const std::string& key, const std::string& v) {
  double x = 0.0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size() || v.empty())
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  return x;
}

inline std::uint64_t parse_uint(const std::string& key, const std::string& v) {
  std::uint64_t x = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size() || v.empty())
    throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'");
  return x;
}

inline std::vector<double> parse_row(const std::string& key, const std::string& v) {
  std::vector<double> row;
  for (const auto& item : split(v, ',')) row.push_back(parse_double(key, item));
  return row;
}

/// Rows separated by ';', entries by ','.
inline Matrix parse_matrix(const std::string& key, const std::string& v) {
  Matrix m;
  for (const auto& row : split(v, ';'))
    if (!row.empty()) m.push_back(parse_row(key, row));
  if (m.empty()) throw ConfigError(key + ": empty matrix");
  return m;
}

inline std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string format_row(const std::vector<double>& row) {
  std::string s;
  for (std::size_t i = 0; i < row.size(); ++i) s += (i ? "," : "") + format_double(row[i]);
  return s;
}

inline std::string format_matrix(const Matrix& m) {
  std::string s;
  for (std::size_t i = 0; i < m.size(); ++i) s += (i ? "; " : "") + format_row(m[i]);
  return s;
}

/// Means drawn independently and uniformly from [lo, hi].
inline Matrix random_means(std::size_t rows, std::size_t channels, std::uint64_t seed, double lo, double hi) {
  Rng rng(stream_seed(seed, 0, hash_tag("means")));
  Matrix m(rows, std::vector<double>(channels));
  for (auto& row : m)
    for (auto& x : row) x = lo + (hi - lo) * rng.uniform();
  return m;
}

inline std::string law_name(RewardLaw l) { return l == RewardLaw::bernoulli ? "bernoulli" : "uniform"; }

inline RewardLaw parse_law(const std::string& v) {
  if (v == "bernoulli") return RewardLaw::bernoulli;
  if (v == "uniform") return RewardLaw::uniform;
  throw ConfigError("channels.law: expected bernoulli or uniform, got '" + v + "'");
}

/// "leave@100000, enter@200000, leave:3@300000"
inline std::vector<DynamicsEvent> parse_events(const std::string& v) {
  std::vector<DynamicsEvent> out;
  for (const auto& item : split(v, ',')) {
    if (item.empty()) continue;
    const auto at = item.find('@');
    if (at == std::string::npos) throw ConfigError("dynamics.events: expected kind@slot, got '" + item + "'");
    std::string kind = item.substr(0, at);
    DynamicsEvent e;
    e.slot = parse_uint("dynamics.events", item.substr(at + 1));
    const auto colon = kind.find(':');
    if (colon != std::string::npos) {
      e.user = parse_uint("dynamics.events", kind.substr(colon + 1));
      kind = kind.substr(0, colon);
    }
    if (kind == "enter")
      e.kind = EventKind::enter;
    else if (kind == "leave")
      e.kind = EventKind::leave;
    else
      throw ConfigError("dynamics.events: unknown event '" + kind + "'");
    if (e.kind == EventKind::enter && e.user) throw ConfigError("dynamics.events: enter always takes a new id");
    out.push_back(e);
  }
  return out;
}

inline std::string format_events(const std::vector<DynamicsEvent>& events) {
  std::string s;
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto& e = events[i];
    s += (i ? ", " : "") + event_name(e.kind);
    if (e.user) s += ":" + std::to_string(*e.user);
    s += "@" + std::to_string(e.slot);
  }
  return s;
}

struct LoadedConfig {
  ExperimentConfig experiment;
  std::string output_dir = "out";
};

namespace detail {

inline const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = {
      "experiment.algorithm",
      "experiment.users",
      "experiment.horizon",
      "experiment.replications",
      "experiment.seed",
      "experiment.radio",
      "experiment.threads",
      "experiment.downsample",
      "channels.means",
      "channels.random_rows",
      "channels.random_channels",
      "channels.random_seed",
      "channels.random_low",
      "channels.random_high",
      "channels.occupancy",
      "channels.law",
      "channels.half_width",
      "channels.fade",
      "dynamics.events",
      "dynamics.alternate_every",
      "dynamics.alternate_first",
      "dynamics.cap",
      "policy.known_users",
      "policy.rh_slots",
      "policy.sh_slots",
      "policy.mc_learning",
      "policy.mega_c",
      "policy.mega_d",
      "policy.mega_p0",
      "policy.mega_alpha",
      "policy.mega_beta",
      "policy.trek_c",
      "policy.tdn_maintenance_rounds",
      "policy.eser_a",
      "policy.eser_exploit",
      "policy.eser_bits",
      "policy.eser_retries",
      "policy.epoch_length",
      "output.dir",
  };
  return keys;
}

}  // namespace detail

/// Parses INI text. Every key is checked against the known set; change
/// points live in a [change_points] section keyed by slot.
inline LoadedConfig parse_config(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.message() + " at line " + std::to_string(e.line()));
  }

  std::map<std::string, std::string> kv;
  std::vector<ChangePoint> change_points;
  const auto& known = detail::known_keys();
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty())
      throw ConfigError("config: key '" + section + "' outside any section");
    for (const auto& [name, value] : body) {
      if (section == "change_points") {
        change_points.push_back({parse_uint("change_points", name), parse_matrix("change_points." + name, value.data())});
        continue;
      }
      const std::string path = section + "." + name;
      if (std::find(known.begin(), known.end(), path) == known.end())
        throw ConfigError("config: unknown key '" + path + "' (did you mean '" + nearest(path, known) + "'?)");
      kv[path] = trim(value.data());
    }
  }
  std::sort(change_points.begin(), change_points.end(),
            [](const ChangePoint& a, const ChangePoint& b) { return a.slot < b.slot; });

  auto has = [&](const std::string& k) { return kv.count(k) > 0; };
  auto str = [&](const std::string& k, const std::string& def) { return has(k) ? kv[k] : def; };
  auto num = [&](const std::string& k, double def) { return has(k) ? parse_double(k, kv[k]) : def; };
  auto uint = [&](const std::string& k, std::uint64_t def) { return has(k) ? parse_uint(k, kv[k]) : def; };

  LoadedConfig out;
  ExperimentConfig& cfg = out.experiment;
  cfg.algorithm = str("experiment.algorithm", "sh");
  cfg.users = uint("experiment.users", 1);
  cfg.horizon = uint("experiment.horizon", 100000);
  cfg.replications = uint("experiment.replications", 50);
  cfg.seed = uint("experiment.seed", 1);
  cfg.radio = parse_radio(str("experiment.radio", "type2_nb"));
  cfg.threads = uint("experiment.threads", 1);
  cfg.downsample = uint("experiment.downsample", 0);

  Matrix means;
  if (has("channels.means")) {
    if (has("channels.random_rows")) throw ConfigError("channels: give either means or random_rows, not both");
    means = parse_matrix("channels.means", kv["channels.means"]);
  } else if (has("channels.random_rows")) {
    for (const char* k : {"channels.random_channels", "channels.random_seed"})
      if (!has(k)) throw ConfigError(std::string("config: missing key '") + k + "'");
    const double lo = num("channels.random_low", 0.0), hi = num("channels.random_high", 1.0);
    if (!(lo >= 0.0 && lo <= hi && hi <= 1.0)) throw ConfigError("channels: need 0 <= random_low <= random_high <= 1");
    means = random_means(uint("channels.random_rows", 1), uint("channels.random_channels", 1),
                         uint("channels.random_seed", 0), lo, hi);
  } else {
    throw ConfigError("config: missing key 'channels.means'");
  }
  std::vector<double> occupancy;
  if (has("channels.occupancy")) occupancy = parse_row("channels.occupancy", kv["channels.occupancy"]);
  cfg.model = ChannelModel(std::move(means), std::move(occupancy), parse_law(str("channels.law", "bernoulli")),
                           num("channels.half_width", 0.1), std::move(change_points), num("channels.fade", 0.0));

  cfg.dynamics.cap = uint("dynamics.cap", 0);
  if (has("dynamics.events") && has("dynamics.alternate_every"))
    throw ConfigError("dynamics: give either events or alternate_every, not both");
  if (has("dynamics.events")) cfg.dynamics.events = parse_events(kv["dynamics.events"]);
  if (has("dynamics.alternate_every")) {
    const std::string first = str("dynamics.alternate_first", "leave");
    if (first != "leave" && first != "enter")
      throw ConfigError("dynamics.alternate_first: expected leave or enter, got '" + first + "'");
    cfg.dynamics.events = DynamicsSchedule::alternating(uint("dynamics.alternate_every", 0), cfg.horizon,
                                                        first == "leave" ? EventKind::leave : EventKind::enter)
                              .events;
  }

  PolicyParams& p = cfg.params;
  p.known_users = uint("policy.known_users", p.known_users);
  p.rh_slots = uint("policy.rh_slots", p.rh_slots);
  p.sh_slots = uint("policy.sh_slots", p.sh_slots);
  p.mc_learning = uint("policy.mc_learning", p.mc_learning);
  p.mega_c = num("policy.mega_c", p.mega_c);
  p.mega_d = num("policy.mega_d", p.mega_d);
  p.mega_p0 = num("policy.mega_p0", p.mega_p0);
  p.mega_alpha = num("policy.mega_alpha", p.mega_alpha);
  p.mega_beta = num("policy.mega_beta", p.mega_beta);
  p.trek_c = num("policy.trek_c", p.trek_c);
  p.tdn_maintenance_rounds = uint("policy.tdn_maintenance_rounds", p.tdn_maintenance_rounds);
  p.eser_a = num("policy.eser_a", p.eser_a);
  p.eser_exploit = uint("policy.eser_exploit", p.eser_exploit);
  p.eser_bits = static_cast<unsigned>(uint("policy.eser_bits", p.eser_bits));
  p.eser_retries = uint("policy.eser_retries", p.eser_retries);
  p.epoch_length = uint("policy.epoch_length", p.epoch_length);
  check_bits(p.eser_bits);
  if (p.epoch_length == 0) throw ConfigError("policy.epoch_length must be >= 1");
  if (p.eser_exploit == 0) throw ConfigError("policy.eser_exploit must be >= 1");

  out.output_dir = str("output.dir", "out");
  validate(cfg);
  return out;
}

/// Resolved configuration with every default written out. Parsing the
/// result gives back an identical experiment.
inline std::string to_ini(const LoadedConfig& lc) {
  const ExperimentConfig& c = lc.experiment;
  const PolicyParams& p = c.params;
  std::ostringstream o;
  o << "[experiment]\n"
    << "algorithm = " << c.algorithm << "\n"
    << "users = " << c.users << "\n"
    << "horizon = " << c.horizon << "\n"
    << "replications = " << c.replications << "\n"
    << "seed = " << c.seed << "\n"
    << "radio = " << radio_name(c.radio) << "\n"
    << "threads = " << c.threads << "\n"
    << "downsample = " << c.stride() << "\n\n";
  o << "[channels]\n"
    << "means = " << format_matrix(c.model.means_at(0)) << "\n"
    << "occupancy = " << format_row({c.model.occupancy().begin(), c.model.occupancy().end()}) << "\n"
    << "law = " << law_name(c.model.law()) << "\n"
    << "half_width = " << format_double(c.model.half_width()) << "\n"
    << "fade = " << format_double(c.model.fade_probability()) << "\n\n";
  if (!c.model.change_points().empty()) {
    o << "[change_points]\n";
    for (const auto& cp : c.model.change_points()) o << cp.slot << " = " << format_matrix(cp.means) << "\n";
    o << "\n";
  }
  o << "[dynamics]\n"
    << "events = " << format_events(c.dynamics.events) << "\n"
    << "cap = " << c.user_cap() << "\n\n";
  o << "[policy]\n"
    << "known_users = " << p.known_users << "\n"
    << "rh_slots = " << p.rh_slots << "\n"
    << "sh_slots = " << p.sh_slots << "\n"
    << "mc_learning = " << p.mc_learning << "\n"
    << "mega_c = " << format_double(p.mega_c) << "\n"
    << "mega_d = " << format_double(p.mega_d) << "\n"
    << "mega_p0 = " << format_double(p.mega_p0) << "\n"
    << "mega_alpha = " << format_double(p.mega_alpha) << "\n"
    << "mega_beta = " << format_double(p.mega_beta) << "\n"
    << "trek_c = " << format_double(p.trek_c) << "\n"
    << "tdn_maintenance_rounds = " << p.tdn_maintenance_rounds << "\n"
    << "eser_a = " << format_double(p.eser_a) << "\n"
    << "eser_exploit = " << p.eser_exploit << "\n"
    << "eser_bits = " << p.eser_bits << "\n"
    << "eser_retries = " << p.eser_retries << "\n"
    << "epoch_length = " << p.epoch_length << "\n\n";
  o << "[output]\n"
    << "dir = " << lc.output_dir << "\n";
  return o.str();
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline LoadedConfig load_config(const std::string& path) { return parse_config(read_file(path)); }

}  // namespace mpmab
