#pragma once

// CSV and manifest emission.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <openssl/evp.h>

#include <json.hpp>

#include "mpmab/config.hpp"
#include "mpmab/errors.hpp"
#include "mpmab/runner.hpp"

namespace mpmab {

inline constexpr const char* tool_version = "1.0.0";
inline constexpr const char* csv_header = "slot,metric,algorithm,statistic,value\n";

inline std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

inline std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline void csv_row(std::string& out, std::size_t slot, const std::string& metric, const std::string& algorithm,
                    const std::string& statistic, double value) {
  out += std::to_string(slot);
  out += ',';
  out += metric;
  out += ',';
  out += algorithm;
  out += ',';
  out += statistic;
  out += ',';
  out += format_value(value);
  out += '\n';
}

/// Downsampled aggregated series for the given metrics. Slots are 1-based
/// counts of elapsed slots.
inline void append_series(std::string& out, const AggregatedSeries& agg, const std::string& algorithm,
                          const std::vector<Metric>& metrics) {
  for (Metric m : metrics) {
    const auto& col = agg.values.at(m);
    for (std::size_t j = 0; j < agg.slots.size(); ++j) {
      const std::size_t slot = agg.slots[j] + 1;
      const std::string name = metric_name(m);
      csv_row(out, slot, name, algorithm, "mean", col[j].mean);
      csv_row(out, slot, name, algorithm, "median", col[j].median);
      csv_row(out, slot, name, algorithm, "p5", col[j].p5);
      csv_row(out, slot, name, algorithm, "p95", col[j].p95);
    }
  }
}

inline void append_summary(std::string& out, const AggregatedSeries& agg, const std::string& algorithm,
                           std::size_t horizon) {
  for (Metric m : all_metrics()) {
    const Statistics& s = agg.final_values.at(m);
    const std::string name = metric_name(m);
    csv_row(out, horizon, name, algorithm, "mean", s.mean);
    csv_row(out, horizon, name, algorithm, "median", s.median);
    csv_row(out, horizon, name, algorithm, "p5", s.p5);
    csv_row(out, horizon, name, algorithm, "p95", s.p95);
  }
}

/// Enter/leave markers as rows of metric "event"; the value is the active
/// user count once the event has been applied.
inline void append_events(std::string& out, const ExperimentConfig& cfg, const std::string& algorithm) {
  std::size_t n = cfg.users;
  for (const auto& e : cfg.dynamics.events) {
    n = e.kind == EventKind::enter ? n + 1 : n - 1;
    csv_row(out, e.slot, "event", algorithm, event_name(e.kind), static_cast<double>(n));
  }
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + path.string() + "'");
  f << text;
}

inline std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Writes the named files and a manifest listing their digests.
class OutputBundle {
 public:
  explicit OutputBundle(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw ConfigError("cannot create output directory '" + dir_.string() + "': " + ec.message());
  }

  void add(const std::string& name, const std::string& text) {
    write_text(dir_ / name, text);
    digests_[name] = sha256_hex(text);
  }

  const std::map<std::string, std::string>& digests() const { return digests_; }
  const std::filesystem::path& dir() const { return dir_; }

  void write_manifest(nlohmann::ordered_json manifest) {
    nlohmann::ordered_json files = nlohmann::ordered_json::object();
    for (const auto& [name, digest] : digests_) files[name] = {{"sha256", digest}};
    manifest["outputs"] = files;
    write_text(dir_ / "manifest.json", manifest.dump(2) + "\n");
  }

 private:
  std::filesystem::path dir_;
  std::map<std::string, std::string> digests_;
};

}  // namespace mpmab
