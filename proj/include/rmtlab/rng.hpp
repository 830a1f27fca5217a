// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <span>
#include <utility>

namespace rmtlab {

/// Stream tags keep independent consumers of one (seed, trial) pair apart.
enum class Stream : std::uint32_t {
  entries = 1,
  gaussian_component = 2,
  ginibre_component = 3,
  brownian = 4,
  brw = 5,
  surrogate = 6,
  synthetic = 7,
};

/// Philox4x32-10 block function (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Counter-based random stream addressed by (seed, trial, stream, substream).
///
/// Every draw is a pure function of its address and the draw index, so the
/// value of entry k of trial t never depends on how trials are scheduled.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t trial, Stream stream,
             std::uint32_t substream = 0)
      : seed_(seed), trial_(trial),
        tag_((static_cast<std::uint32_t>(stream) << 24) ^ substream) {}

  std::array<std::uint32_t, 4> block(std::uint64_t index) const;

  /// Two uniforms in the open interval (0, 1), 53 bits each.
  std::pair<double, double> uniform_pair(std::uint64_t index) const;

  /// Two independent standard normals (Box-Muller on uniform_pair(index)).
  std::pair<double, double> normal_pair(std::uint64_t index) const;

  /// out[2j], out[2j+1] = normal_pair(first_pair + j) up to the dispatched
  /// kernel's rounding (the scalar kernel matches exactly).
  void normals(std::uint64_t first_pair, std::span<double> out) const;

  /// Standard complex Gaussian: E|g|^2 = 1, E g^2 = 0.
  std::complex<double> complex_normal(std::uint64_t index) const;

 private:
  std::uint64_t seed_;
  std::uint64_t trial_;
  std::uint32_t tag_;
};

/// Sequential adaptor over CounterRng satisfying UniformRandomBitGenerator.
class SequentialRng {
 public:
  using result_type = std::uint32_t;
  explicit SequentialRng(CounterRng base) : base_(base) {}
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return 0xFFFFFFFFu; }
  result_type operator()();
  double normal();

 private:
  CounterRng base_;
  std::uint64_t block_index_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int used_ = 4;
  std::uint64_t normal_index_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace rmtlab
