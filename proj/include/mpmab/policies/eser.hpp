#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "mpmab/errors.hpp"
#include "mpmab/matching.hpp"
#include "mpmab/policies/hopping.hpp"
#include "mpmab/policies/policy.hpp"
#include "mpmab/policies/scf.hpp"
#include "mpmab/rng.hpp"
#include "mpmab/signaling.hpp"

namespace mpmab {

enum class EserPhase { orthogonalize, sense_users, explore, signal, exploit };

/// Slot layout of ESER / mESER, in local slots. Shared by the policy and by
/// anything that needs to know where exploit phases fall.
class EserSchedule {
 public:
  struct Position {
    EserPhase phase;
    std::size_t epoch;   // 1-based; 0 before the first epoch
    std::size_t offset;  // slots since the phase began
  };

  EserSchedule() = default;
  EserSchedule(const PolicyParams& p, bool modified, std::size_t users)
      : channels_(p.channels), rh_(p.rh_slots), users_(users), modified_(modified),
        max_bits_(p.eser_bits), exploit0_(p.eser_exploit) {
    check_bits(max_bits_);
    const double k = static_cast<double>(channels_);
    const double raw = std::ceil(k * p.eser_a * std::log(static_cast<double>(std::max<std::size_t>(p.horizon, 2))));
    const std::size_t len = std::max<std::size_t>(channels_, static_cast<std::size_t>(raw));
    explore_ = (len + channels_ - 1) / channels_ * channels_;  // whole SH cycles
    origin_ = rh_ + channels_ * channels_;
  }

  std::size_t explore_length() const { return explore_; }
  std::size_t origin() const { return origin_; }
  std::size_t users() const { return users_; }

  unsigned bits(std::size_t epoch) const {
    if (!modified_) return max_bits_;
    return static_cast<unsigned>(std::min<std::size_t>(4 + epoch, max_bits_));
  }
  std::size_t signal_length(std::size_t epoch) const { return users_ * frame_slots(channels_, bits(epoch)); }
  std::size_t exploit_length(std::size_t epoch) const { return exploit0_ << (epoch - 1); }
  std::size_t epoch_length(std::size_t epoch) const {
    return explore_ + signal_length(epoch) + exploit_length(epoch);
  }

  /// Local slot where `epoch` begins.
  std::size_t epoch_start(std::size_t epoch) const {
    std::size_t s = origin_;
    for (std::size_t e = 1; e < epoch; ++e) s += epoch_length(e);
    return s;
  }

  Position locate(std::size_t s) const {
    if (s < rh_) return {EserPhase::orthogonalize, 0, s};
    if (s < origin_) return {EserPhase::sense_users, 0, s - rh_};
    std::size_t e = 1, begin = origin_;
    while (s >= begin + epoch_length(e)) {
      begin += epoch_length(e);
      ++e;
    }
    std::size_t off = s - begin;
    if (off < explore_) return {EserPhase::explore, e, off};
    off -= explore_;
    if (off < signal_length(e)) return {EserPhase::signal, e, off};
    return {EserPhase::exploit, e, off - signal_length(e)};
  }

 private:
  std::size_t channels_ = 1, rh_ = 0, users_ = 1;
  bool modified_ = false;
  unsigned max_bits_ = 8;
  std::size_t exploit0_ = 1;
  std::size_t explore_ = 1, origin_ = 0;
};

/// Explore-Signal-Exploit-Repeat for heterogeneous channel means.
///
/// Users orthogonalize with RH, learn the population size and their hop-offset
/// rank by one-hot sensing, then run epochs: a sequential-hop exploration, a
/// signaling phase where each user in rank order broadcasts its quantized
/// mean row while everyone else listens, a local max-weight matching on the
/// assembled matrix (identical on every terminal), and an exploit phase on
/// the assigned channel whose length doubles every epoch. mESER grows the
/// quantization from 5 bits upward instead of always sending the maximum.
class Eser final : public Policy {
 public:
  explicit Eser(bool modified = false) : modified_(modified) {}

  void reset(const PolicyParams& p, std::uint64_t seed) override {
    rng_ = Rng(seed);
    params_ = p;
    channels_ = p.channels;
    start_ = p.start_slot;
    hop_.start(channels_, p.rh_slots, rng_);
    ohs_.start(channels_, 0);
    ohs_open_ = false;
    schedule_ = EserSchedule(p, modified_, 1);
    ready_ = false;
    rank_ = 0;
    assigned_ = 0;
    signal_epoch_ = 0;
  }

  Action act(std::size_t t) override {
    const std::size_t s = t - start_;
    const auto pos = schedule_.locate(s);
    switch (pos.phase) {
      case EserPhase::orthogonalize:
        return Action::transmit(hop_.channel(s));
      case EserPhase::sense_users: {
        const Channel c = hop_.channel(s);
        if (pos.offset / channels_ == hop_.offset()) {
          if (!ohs_open_) {
            ohs_.start(channels_, c);
            ohs_open_ = true;
          }
          return Action::sense(ohs_.watched());
        }
        return Action::transmit(c);
      }
      default:
        break;
    }
    if (!ready_) become_ready(s);
    const auto p = schedule_.locate(s);
    if (p.phase == EserPhase::explore) return Action::transmit(hop_.channel(s));
    if (p.phase == EserPhase::exploit) return Action::transmit(assigned_);
    if (signal_epoch_ != p.epoch) begin_signaling(p.epoch);
    const std::size_t frame = frame_slots(channels_, bits_);
    const std::size_t speaker = p.offset / frame;
    const std::size_t bit = p.offset % frame;
    const FrameSchedule fs = frame_schedule(speaker, channels_, bits_);
    if (speaker == rank_) return emit_bit(own_frame_[bit], fs.home);
    return Action::sense(fs.home);
  }

  void update(const Observation& obs) override {
    const std::size_t s = obs.slot - start_;
    const auto pos = schedule_.locate(s);
    switch (pos.phase) {
      case EserPhase::orthogonalize:
        hop_.step(obs, rng_);
        return;
      case EserPhase::sense_users:
        if (obs.action.kind == ActionKind::sense)
          ohs_.record(s, obs.sensed[obs.action.channel] == Sensed::busy);
        else
          hop_.step(obs, rng_);
        return;
      case EserPhase::explore:
        hop_.step(obs, rng_);
        return;
      case EserPhase::exploit:
        if (obs.reward) hop_.stats().record(obs.action.channel, *obs.reward);
        return;
      case EserPhase::signal:
        break;
    }
    const std::size_t frame = frame_slots(channels_, bits_);
    const std::size_t speaker = pos.offset / frame;
    if (speaker != rank_) heard_[speaker][pos.offset % frame] = obs.sensed[obs.action.channel];
    if (pos.offset + 1 == schedule_.signal_length(pos.epoch)) match(pos.epoch);
  }

  std::string_view name() const override { return modified_ ? "meser" : "eser"; }

  std::size_t estimated_users() const { return schedule_.users(); }
  std::size_t rank() const { return rank_; }
  Channel assigned() const { return assigned_; }
  const EserSchedule& schedule() const { return schedule_; }
  const Matrix& assembled() const { return assembled_; }
  const ArmStats& stats() const { return hop_.stats(); }

 private:
  void become_ready(std::size_t) {
    ready_ = true;
    const std::size_t users = std::min(ohs_.estimated_users(), channels_);
    schedule_ = EserSchedule(params_, modified_, users);
    rank_ = std::min(ohs_.rank_of(hop_.offset()), users - 1);
  }

  void begin_signaling(std::size_t epoch) {
    signal_epoch_ = epoch;
    bits_ = schedule_.bits(epoch);
    own_ = quantize(hop_.stats().means(), bits_);
    own_frame_ = encode_frame(own_);
    heard_.assign(schedule_.users(), std::vector<Sensed>(frame_slots(channels_, bits_), Sensed::unobserved));
  }

  void match(std::size_t epoch) {
    Matrix weights(schedule_.users());
    for (std::size_t r = 0; r < schedule_.users(); ++r) {
      if (r == rank_) {
        weights[r] = dequantize(own_);
        continue;
      }
      const DecodedFrame d = decode_frame(heard_[r], channels_, bits_);
      if (!d.ok())
        throw ContractViolation("eser: parity failure decoding rank " + std::to_string(r) + " in epoch " +
                                std::to_string(epoch));
      weights[r] = dequantize(d.estimate);
    }
    assembled_ = weights;
    assigned_ = hungarian(weights).channel_of[rank_];
  }

  bool modified_ = false;
  Rng rng_;
  PolicyParams params_;
  std::size_t channels_ = 1;
  std::size_t start_ = 0;
  OrthogonalHopper hop_;
  OneHotSensing ohs_;
  bool ohs_open_ = false;
  EserSchedule schedule_;
  bool ready_ = false;
  std::size_t rank_ = 0;
  Channel assigned_ = 0;
  std::size_t signal_epoch_ = 0;
  unsigned bits_ = 8;
  QuantizedEstimate own_;
  std::vector<std::uint8_t> own_frame_;
  std::vector<std::vector<Sensed>> heard_;
  Matrix assembled_;
};

}  // namespace mpmab
