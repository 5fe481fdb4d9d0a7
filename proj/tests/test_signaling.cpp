#include <gtest/gtest.h>

#include <vector>

#include "mpmab/rng.hpp"
#include "mpmab/signaling.hpp"

using namespace mpmab;

namespace {

std::vector<Sensed> to_pattern(const std::vector<std::uint8_t>& bits) {
  std::vector<Sensed> p;
  for (auto b : bits) p.push_back(b ? Sensed::busy : Sensed::idle);
  return p;
}

}  // namespace

TEST(Quantize, Endpoints) {
  const std::vector<double> v = {0.0, 1.0};
  const auto q = quantize(v, 8);
  EXPECT_EQ(q.levels[0], 0u);
  EXPECT_EQ(q.levels[1], 255u);
}

TEST(Quantize, ReferenceMean) {
  const std::vector<double> v = {0.57};
  const auto q = quantize(v, 8);
  EXPECT_EQ(q.levels[0], 145u);
  const double back = dequantize(q)[0];
  EXPECT_NEAR(back, 145.0 / 255.0, 1e-15);
  EXPECT_LT(std::abs(back - 0.57), 1.0 / 255.0);
}

TEST(Quantize, BitsOutOfRange) {
  const std::vector<double> v = {0.5};
  EXPECT_THROW(quantize(v, 0), ConfigError);
  EXPECT_THROW(quantize(v, 17), ConfigError);
}

TEST(EmitBit, OnOffKeying) {
  EXPECT_EQ(emit_bit(1, 3), Action::signal(3));
  EXPECT_EQ(emit_bit(0, 3), Action::idle());
  const std::vector<std::uint8_t> bits = {1, 0, 1};
  EXPECT_TRUE(emit_bit(bits[0], 2).transmits());
  EXPECT_FALSE(emit_bit(bits[1], 2).transmits());
  EXPECT_TRUE(emit_bit(bits[2], 2).transmits());
}

TEST(Frame, AllZeroPayloadIsSilent) {
  QuantizedEstimate q{8, std::vector<std::uint32_t>(5, 0)};
  for (auto b : encode_frame(q)) EXPECT_EQ(b, 0);
}

TEST(Frame, LengthFormula) {
  EXPECT_EQ(frame_slots(12, 8), 108u);
  QuantizedEstimate q{8, std::vector<std::uint32_t>(12, 77)};
  EXPECT_EQ(encode_frame(q).size(), 108u);
}

TEST(Frame, ExhaustiveSingleWordRoundTrip) {
  for (std::uint32_t w = 0; w < 256; ++w) {
    QuantizedEstimate q{8, {w}};
    const auto d = decode_frame(to_pattern(encode_frame(q)), 1, 8);
    ASSERT_TRUE(d.ok());
    EXPECT_EQ(d.estimate, q);
  }
}

TEST(Frame, ParityCatchesSingleFlip) {
  QuantizedEstimate q{8, {0x5a, 0x33}};
  auto bits = encode_frame(q);
  bits[3] ^= 1;
  const auto d = decode_frame(to_pattern(bits), 2, 8);
  EXPECT_FALSE(d.ok());
  EXPECT_EQ(d.parity_failures, (std::vector<std::size_t>{0}));
}

TEST(Frame, WrongLengthOrGapIsViolation) {
  std::vector<Sensed> p(10, Sensed::idle);
  EXPECT_THROW(decode_frame(p, 2, 8), ContractViolation);
  std::vector<Sensed> gap(18, Sensed::idle);
  gap[4] = Sensed::unobserved;
  EXPECT_THROW(decode_frame(gap, 2, 8), ContractViolation);
}

TEST(Schedule, SpeakersDoNotOverlap) {
  for (std::size_t r = 0; r + 1 < 12; ++r) {
    const auto a = frame_schedule(r, 12, 8), b = frame_schedule(r + 1, 12, 8);
    EXPECT_EQ(a.start + frame_slots(12, 8), b.start);
    EXPECT_EQ(a.home, r % 12);
  }
}

TEST(Frame, RandomFramesRoundTrip) {
  Rng rng(17);
  for (int i = 0; i < 200; ++i) {
    std::vector<double> m(12);
    for (auto& x : m) x = rng.uniform();
    const auto q = quantize(m, 8);
    const auto d = decode_frame(to_pattern(encode_frame(q)), 12, 8);
    ASSERT_TRUE(d.ok());
    const auto back = dequantize(d.estimate);
    for (std::size_t c = 0; c < 12; ++c) EXPECT_LE(std::abs(back[c] - m[c]), 1.0 / 255.0);
  }
}
