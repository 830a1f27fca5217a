// SPDX-License-Identifier: Apache-2.0
#include "rmtlab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>
#include <numbers>

#include "rmtlab/simd/kernels.hpp"

namespace rmtlab {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

// 32 + 21 bits -> double in (0, 1); never exactly 0 or 1.
inline double to_open_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 21) | (lo >> 11);
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
    mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
  }
  return ctr;
}

std::array<std::uint32_t, 4> CounterRng::block(std::uint64_t index) const {
  // Trial and tag are folded into the key's complement so that the full
  // 64-bit index space stays available in the counter.
  const std::array<std::uint32_t, 4> ctr{
      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
      static_cast<std::uint32_t>(trial_), static_cast<std::uint32_t>(trial_ >> 32) ^ tag_};
  const std::array<std::uint32_t, 2> key{static_cast<std::uint32_t>(seed_),
                                         static_cast<std::uint32_t>(seed_ >> 32)};
  return philox4x32(ctr, key);
}

std::pair<double, double> CounterRng::uniform_pair(std::uint64_t index) const {
  const auto b = block(index);
  return {to_open_unit(b[0], b[1]), to_open_unit(b[2], b[3])};
}

std::pair<double, double> CounterRng::normal_pair(std::uint64_t index) const {
  const auto [u1, u2] = uniform_pair(index);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(theta), r * std::sin(theta)};
}

void CounterRng::normals(std::uint64_t first_pair, std::span<double> out) const {
  constexpr std::size_t kBatch = 256;
  double u1[kBatch], u2[kBatch], buf[2 * kBatch];
  std::size_t done = 0;
  std::uint64_t pair = first_pair;
  while (done < out.size()) {
    const std::size_t pairs = std::min(kBatch, (out.size() - done + 1) / 2);
    for (std::size_t j = 0; j < pairs; ++j) std::tie(u1[j], u2[j]) = uniform_pair(pair + j);
    const std::size_t take = std::min(2 * pairs, out.size() - done);
    if (take == 2 * pairs) {
      simd::box_muller({u1, pairs}, {u2, pairs}, out.subspan(done, take));
    } else {
      simd::box_muller({u1, pairs}, {u2, pairs}, {buf, 2 * pairs});
      std::copy_n(buf, take, out.begin() + done);
    }
    done += take;
    pair += pairs;
  }
}

std::complex<double> CounterRng::complex_normal(std::uint64_t index) const {
  const auto [a, b] = normal_pair(index);
  return {a * std::numbers::sqrt2 / 2.0, b * std::numbers::sqrt2 / 2.0};
}

SequentialRng::result_type SequentialRng::operator()() {
  if (used_ == 4) {
    buffer_ = base_.block(block_index_++);
    used_ = 0;
  }
  return buffer_[used_++];
}

double SequentialRng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // Offset the normal counter far from the bit-stream counter.
  const auto [a, b] = base_.normal_pair((std::uint64_t{1} << 62) + normal_index_++);
  spare_ = b;
  has_spare_ = true;
  return a;
}

}  // namespace rmtlab
