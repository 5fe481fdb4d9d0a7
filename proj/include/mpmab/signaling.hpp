#pragma once

// On-off keyed bit frames on a rank-indexed home channel. A speaker
// transmits a signaling pulse for a 1 and stays silent for a 0; listeners
// park a narrowband sensor on the home channel and read busy/idle.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mpmab/action.hpp"
#include "mpmab/errors.hpp"
#include "mpmab/radio.hpp"

namespace mpmab {

struct QuantizedEstimate {
  unsigned bits = 8;
  std::vector<std::uint32_t> levels;  // one per channel, in [0, 2^bits - 1]

  friend bool operator==(const QuantizedEstimate&, const QuantizedEstimate&) = default;
};

inline void check_bits(unsigned bits) {
  if (bits < 1 || bits > 16) throw ConfigError("signaling: bits per estimate must be in [1,16], got " + std::to_string(bits));
}

inline std::uint32_t max_level(unsigned bits) { return (std::uint32_t{1} << bits) - 1; }

inline QuantizedEstimate quantize(std::span<const double> means, unsigned bits) {
  check_bits(bits);
  QuantizedEstimate q;
  q.bits = bits;
  q.levels.reserve(means.size());
  const double top = static_cast<double>(max_level(bits));
  for (double m : means) {
    const double clamped = m < 0.0 ? 0.0 : (m > 1.0 ? 1.0 : m);
    q.levels.push_back(static_cast<std::uint32_t>(std::lround(clamped * top)));
  }
  return q;
}

inline std::vector<double> dequantize(const QuantizedEstimate& q) {
  std::vector<double> out;
  out.reserve(q.levels.size());
  const double top = static_cast<double>(max_level(q.bits));
  for (auto level : q.levels) out.push_back(static_cast<double>(level) / top);
  return out;
}

/// Slots one speaker needs for a K-channel frame: B data bits plus one
/// parity bit per channel word.
constexpr std::size_t frame_slots(std::size_t channels, unsigned bits) { return channels * (bits + 1); }

/// Where and when a speaker talks. Speakers go in rank order, back to back.
struct FrameSchedule {
  std::size_t start = 0;  // first slot, relative to the signaling phase
  Channel home = 0;
};

inline FrameSchedule frame_schedule(std::size_t rank, std::size_t channels, unsigned bits) {
  return {rank * frame_slots(channels, bits), rank % channels};
}

/// Word-by-word, most significant bit first, each word followed by its even
/// parity bit.
inline std::vector<std::uint8_t> encode_frame(const QuantizedEstimate& q) {
  check_bits(q.bits);
  std::vector<std::uint8_t> out;
  out.reserve(frame_slots(q.levels.size(), q.bits));
  for (auto level : q.levels) {
    std::uint8_t parity = 0;
    for (unsigned b = q.bits; b-- > 0;) {
      const std::uint8_t bit = (level >> b) & 1U;
      parity ^= bit;
      out.push_back(bit);
    }
    out.push_back(parity);
  }
  return out;
}

inline Action emit_bit(std::uint8_t bit, Channel home) { return bit ? Action::signal(home) : Action::idle(); }

struct DecodedFrame {
  QuantizedEstimate estimate;
  std::vector<std::size_t> parity_failures;  // channel words whose parity mismatched

  bool ok() const { return parity_failures.empty(); }
};

/// Inverse of encode_frame over a sensed busy/idle sequence. An unobserved
/// slot is a precondition failure: the listener must hear the whole frame.
inline DecodedFrame decode_frame(std::span<const Sensed> pattern, std::size_t channels, unsigned bits) {
  check_bits(bits);
  if (pattern.size() != frame_slots(channels, bits))
    throw ContractViolation("signaling: frame has " + std::to_string(pattern.size()) + " slots, expected " +
                            std::to_string(frame_slots(channels, bits)));
  DecodedFrame out;
  out.estimate.bits = bits;
  out.estimate.levels.reserve(channels);
  std::size_t pos = 0;
  for (std::size_t c = 0; c < channels; ++c) {
    std::uint32_t level = 0;
    std::uint8_t parity = 0;
    for (unsigned b = 0; b <= bits; ++b, ++pos) {
      if (pattern[pos] == Sensed::unobserved) throw ContractViolation("signaling: listener missed a frame slot");
      const std::uint8_t bit = pattern[pos] == Sensed::busy ? 1 : 0;
      parity ^= bit;
      if (b < bits) level = (level << 1) | bit;
    }
    if (parity != 0) out.parity_failures.push_back(c);
    out.estimate.levels.push_back(level);
  }
  return out;
}

}  // namespace mpmab
