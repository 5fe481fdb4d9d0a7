#pragma once

// Deterministic Monte Carlo engine.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "mpmab/env.hpp"
#include "mpmab/errors.hpp"
#include "mpmab/metrics.hpp"
#include "mpmab/policies.hpp"
#include "mpmab/radio.hpp"
#include "mpmab/rng.hpp"

namespace mpmab {

enum class EventKind { enter, leave };

struct DynamicsEvent {
  std::size_t slot = 0;
  EventKind kind = EventKind::enter;
  std::optional<UserId> user;  // leave only; empty = uniformly random active user
};

struct DynamicsSchedule {
  std::vector<DynamicsEvent> events;
  std::size_t cap = 0;  // 0 = number of channels

  bool empty() const { return events.empty(); }

  /// Leave at `every`, enter at 2*every, and so on up to the horizon.
  static DynamicsSchedule alternating(std::size_t every, std::size_t horizon, EventKind first = EventKind::leave) {
    DynamicsSchedule s;
    EventKind k = first;
    for (std::size_t t = every; every > 0 && t < horizon; t += every) {
      s.events.push_back({t, k, std::nullopt});
      k = k == EventKind::leave ? EventKind::enter : EventKind::leave;
    }
    return s;
  }
};

struct ExperimentConfig {
  ChannelModel model{Matrix{{0.5}}};
  std::string algorithm = "sh";
  PolicyParams params;  // channels, horizon and radio are filled from the fields below
  RadioCapability radio{};
  std::size_t horizon = 1000;
  std::size_t replications = 1;
  std::uint64_t seed = 1;
  std::size_t users = 1;
  DynamicsSchedule dynamics;
  std::size_t downsample = 0;  // 0 = max(1, T/1000)
  std::size_t threads = 1;

  std::size_t stride() const { return downsample ? downsample : std::max<std::size_t>(1, horizon / 1000); }
  std::size_t user_cap() const { return dynamics.cap ? dynamics.cap : model.num_channels(); }

  PolicyParams policy_params() const {
    PolicyParams p = params;
    p.channels = model.num_channels();
    p.horizon = horizon;
    p.radio = radio;
    if (p.known_users == 0) p.known_users = users;
    return p;
  }
};

inline std::string event_name(EventKind k) { return k == EventKind::enter ? "enter" : "leave"; }

/// Throws ConfigError on the first invariant violation.
inline void validate(const ExperimentConfig& cfg) {
  if (cfg.horizon < 1) throw ConfigError("horizon must be ≥ 1");
  if (cfg.replications < 1) throw ConfigError("replications must be >= 1");
  if (cfg.users < 1) throw ConfigError("users must be >= 1");
  if (!cfg.radio.valid()) throw ConfigError("invalid radio capability");
  make_policy(cfg.algorithm);
  const std::size_t cap = cfg.user_cap();
  if (cfg.users > cap)
    throw ConfigError("users = " + std::to_string(cfg.users) + " exceeds cap " + std::to_string(cap));
  std::size_t n = cfg.users;
  std::size_t last = 0;
  for (const auto& e : cfg.dynamics.events) {
    if (e.slot < last) throw ConfigError("dynamics events not sorted at slot " + std::to_string(e.slot));
    last = e.slot;
    if (e.kind == EventKind::enter) {
      if (++n > cap)
        throw ConfigError("dynamics: enter at slot " + std::to_string(e.slot) + " exceeds cap " + std::to_string(cap));
    } else {
      if (n == 0) throw ConfigError("dynamics: leave at slot " + std::to_string(e.slot) + " with no active user");
      --n;
    }
  }
}

/// Everything needed to replay one user's decisions through a fresh instance.
struct UserLog {
  UserId user = 0;
  PolicyParams params;
  std::uint64_t seed = 0;
  std::vector<Action> actions;
  std::vector<Observation> observations;
};

struct Trace {
  std::vector<UserLog> users;
  std::vector<std::size_t> active_count;  // per slot
};

struct ReplicationResult {
  MetricsSeries metrics;
  std::optional<Trace> trace;
};

/// Called after every slot with the resolved ground truth and the slot's
/// pseudo-regret increment.
using SlotObserver = std::function<void(const SlotGroundTruth&, double)>;

struct RunOptions {
  bool trace = false;
  SlotObserver observer;
};

inline std::uint64_t user_seed(std::uint64_t base, std::size_t replication, UserId user) {
  return stream_seed(base, replication, mix64(hash_tag("user") + user));
}

struct ActiveUser {
  UserId id = 0;
  std::unique_ptr<Policy> policy;
  std::size_t log = 0;  // index into the trace, when tracing
};

/// Applies the events scheduled at slot t. Returns true when the active set changed.
inline bool apply_dynamics(const ExperimentConfig& cfg, std::size_t replication, std::size_t t,
                           std::size_t& next_event, std::vector<ActiveUser>& active, UserId& next_id, Rng& rng,
                           Trace* trace) {
  bool changed = false;
  const auto& ev = cfg.dynamics.events;
  while (next_event < ev.size() && ev[next_event].slot == t) {
    const DynamicsEvent& e = ev[next_event++];
    changed = true;
    if (e.kind == EventKind::leave) {
      if (active.empty()) throw ConfigError("dynamics: leave at slot " + std::to_string(t) + " with no active user");
      std::size_t idx;
      if (e.user) {
        auto it = std::find_if(active.begin(), active.end(), [&](const ActiveUser& u) { return u.id == *e.user; });
        if (it == active.end())
          throw ConfigError("dynamics: user " + std::to_string(*e.user) + " not active at slot " + std::to_string(t));
        idx = static_cast<std::size_t>(it - active.begin());
      } else {
        idx = rng.below(active.size());
      }
      active.erase(active.begin() + static_cast<std::ptrdiff_t>(idx));
      continue;
    }
    if (active.size() >= cfg.user_cap())
      throw ConfigError("dynamics: enter at slot " + std::to_string(t) + " exceeds cap");
    PolicyParams p = cfg.policy_params();
    p.start_slot = t;
    p.entrant = true;
    ActiveUser u;
    u.id = next_id++;
    u.policy = make_policy(cfg.algorithm);
    const std::uint64_t seed = user_seed(cfg.seed, replication, u.id);
    u.policy->reset(p, seed);
    if (trace) {
      u.log = trace->users.size();
      trace->users.push_back({u.id, p, seed, {}, {}});
    }
    active.push_back(std::move(u));
  }
  return changed;
}

inline ReplicationResult run_replication(const ExperimentConfig& cfg, std::size_t replication,
                                         const RunOptions& opts = {}) {
  const ChannelModel& model = cfg.model;
  const std::size_t k = model.num_channels();
  Rng env_rng(stream_seed(cfg.seed, replication, hash_tag("env")));
  Rng dyn_rng(stream_seed(cfg.seed, replication, hash_tag("dynamics")));

  ReplicationResult result;
  Trace* trace = nullptr;
  if (opts.trace) {
    result.trace.emplace();
    trace = &*result.trace;
  }

  std::vector<ActiveUser> active;
  UserId next_id = 0;
  for (std::size_t i = 0; i < cfg.users; ++i) {
    PolicyParams p = cfg.policy_params();
    ActiveUser u;
    u.id = next_id++;
    u.policy = make_policy(cfg.algorithm);
    const std::uint64_t seed = user_seed(cfg.seed, replication, u.id);
    u.policy->reset(p, seed);
    if (trace) {
      u.log = trace->users.size();
      trace->users.push_back({u.id, p, seed, {}, {}});
    }
    active.push_back(std::move(u));
  }

  std::vector<std::size_t> change_slots;
  for (const auto& cp : model.change_points()) change_slots.push_back(cp.slot);

  MetricsAccumulator acc(cfg.horizon, cfg.stride(), k);
  SlotDraw draw;
  SlotGroundTruth ground;
  std::vector<UserAction> actions;
  std::vector<UserId> ids;
  Observation obs;
  std::size_t next_event = 0;
  double oracle = 0.0;
  bool stale = true;

  for (std::size_t t = 0; t < cfg.horizon; ++t) {
    if (apply_dynamics(cfg, replication, t, next_event, active, next_id, dyn_rng, trace)) stale = true;
    if (std::binary_search(change_slots.begin(), change_slots.end(), t)) stale = true;
    if (stale) {
      ids.clear();
      for (const auto& u : active) ids.push_back(u.id);
      oracle = oracle_slot_value(model, ids, t);
      stale = false;
    }

    actions.clear();
    for (auto& u : active) actions.push_back({u.id, u.policy->act(t)});
    draw_slot(model, env_rng, draw);
    resolve_slot(model, draw, t, actions, ground);
    for (std::size_t i = 0; i < active.size(); ++i) {
      observe(cfg.radio, ground, i, obs);
      if (trace) {
        trace->users[active[i].log].actions.push_back(actions[i].action);
        trace->users[active[i].log].observations.push_back(obs);
      }
      active[i].policy->update(obs);
    }
    const double inc = acc.add(ground, oracle, model, active.size());
    if (trace) trace->active_count.push_back(active.size());
    if (opts.observer) opts.observer(ground, inc);
  }
  result.metrics = acc.take();
  return result;
}

/// Feeds a recorded observation log through a fresh instance. Returns true
/// when every action matches the recorded one.
inline bool replay_matches(const std::string& algorithm, const UserLog& log) {
  auto policy = make_policy(algorithm);
  policy->reset(log.params, log.seed);
  for (std::size_t i = 0; i < log.observations.size(); ++i) {
    if (!(policy->act(log.observations[i].slot) == log.actions[i])) return false;
    policy->update(log.observations[i]);
  }
  return true;
}

struct Statistics {
  double mean = 0, median = 0, p5 = 0, p95 = 0;
};

/// Linear-interpolation percentile of sorted data, q in [0, 1].
inline double percentile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - static_cast<double>(lo));
}

inline Statistics summarize(std::vector<double> v) {
  Statistics s;
  if (v.empty()) return s;
  double sum = 0.0;
  for (double x : v) sum += x;
  s.mean = sum / static_cast<double>(v.size());
  std::sort(v.begin(), v.end());
  s.median = percentile_sorted(v, 0.5);
  s.p5 = percentile_sorted(v, 0.05);
  s.p95 = percentile_sorted(v, 0.95);
  return s;
}

struct AggregatedSeries {
  std::vector<std::size_t> slots;
  std::map<Metric, std::vector<Statistics>> values;
  std::map<Metric, Statistics> final_values;
};

inline AggregatedSeries aggregate(const std::vector<MetricsSeries>& reps) {
  AggregatedSeries out;
  if (reps.empty()) return out;
  out.slots = reps.front().slots;
  for (Metric m : all_metrics()) {
    auto& col = out.values[m];
    col.resize(out.slots.size());
    std::vector<double> buf(reps.size());
    for (std::size_t j = 0; j < out.slots.size(); ++j) {
      for (std::size_t r = 0; r < reps.size(); ++r) buf[r] = reps[r].series(m)[j];
      col[j] = summarize(buf);
    }
    for (std::size_t r = 0; r < reps.size(); ++r) buf[r] = reps[r].final_value(m);
    out.final_values[m] = summarize(buf);
  }
  return out;
}

struct ExperimentResult {
  std::vector<MetricsSeries> replications;
  AggregatedSeries aggregate;
};

inline std::size_t resolve_threads(std::size_t requested, std::size_t work) {
  std::size_t n = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
  return std::max<std::size_t>(1, std::min(n, work));
}

/// Runs `count` independent jobs on up to `threads` workers. Results are
/// stored by index; the lowest-index exception is rethrown.
template <class Job>
void parallel_for(std::size_t count, std::size_t threads, Job&& job) {
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        job(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t n = resolve_threads(threads, count);
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  ExperimentResult out;
  out.replications.resize(cfg.replications);
  parallel_for(cfg.replications, cfg.threads,
               [&](std::size_t r) { out.replications[r] = run_replication(cfg, r).metrics; });
  out.aggregate = aggregate(out.replications);
  return out;
}

}  // namespace mpmab
