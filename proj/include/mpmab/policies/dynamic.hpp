#pragma once

#include <functional>
#include <memory>
#include <string>
#include <string_view>

#include "mpmab/policies/policy.hpp"
#include "mpmab/rng.hpp"

namespace mpmab {

/// Epoch boundaries b_0 = 0, b_{j+1} = b_j + E * 2^j.
inline std::size_t next_epoch_boundary(std::size_t t, std::size_t first_epoch) {
  std::size_t b = 0, len = first_epoch;
  while (b <= t) {
    b += len;
    len *= 2;
  }
  return b;
}

inline bool is_epoch_boundary(std::size_t t, std::size_t first_epoch) {
  std::size_t b = 0, len = first_epoch;
  while (b < t) {
    b += len;
    len *= 2;
  }
  return b == t;
}

/// Restarts a static algorithm from scratch at every epoch boundary so it can
/// follow a changing population (DSCF, DMC). A user that joins mid-epoch
/// stays silent until the next boundary, where it starts in step with
/// everyone else.
class EpochReset final : public Policy {
 public:
  using Factory = std::function<std::unique_ptr<Policy>()>;

  EpochReset(Factory factory, std::string name) : factory_(std::move(factory)), name_(std::move(name)) {}

  void reset(const PolicyParams& p, std::uint64_t seed) override {
    params_ = p;
    seed_ = seed;
    epoch_ = 0;
    base_.reset();
    if (p.entrant && !is_epoch_boundary(p.start_slot, p.epoch_length)) {
      next_ = next_epoch_boundary(p.start_slot, p.epoch_length);
    } else {
      restart(p.start_slot);
    }
  }

  Action act(std::size_t t) override {
    if (t >= next_) restart(t);
    if (!base_) return Action::idle();
    return base_->act(t);
  }

  void update(const Observation& obs) override {
    if (base_) base_->update(obs);
  }

  std::string_view name() const override { return name_; }

  std::size_t epochs_started() const { return epoch_; }

 private:
  void restart(std::size_t t) {
    PolicyParams p = params_;
    p.start_slot = t;
    p.entrant = false;
    base_ = factory_();
    base_->reset(p, mix64(seed_ ^ (0x5eedULL + epoch_)));
    ++epoch_;
    next_ = next_epoch_boundary(t, params_.epoch_length);
  }

  Factory factory_;
  std::string name_;
  PolicyParams params_;
  std::uint64_t seed_ = 0;
  std::size_t epoch_ = 0;
  std::size_t next_ = 0;
  std::unique_ptr<Policy> base_;
};

}  // namespace mpmab
