//
// Project ChemScreen - Copyright 2026 ChemScreen Developers.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef CHEMSCREEN_RNG_HPP_
#define CHEMSCREEN_RNG_HPP_

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "chemscreen/hash.hpp"

namespace chemscreen {

// xoshiro256** 1.0 (Blackman & Vigna 2018), state expanded from the user
// seed with SplitMix64. Every stochastic result in the toolkit flows through
// this generator so that a (seed, algorithm) pair replays byte-identically
// on any platform; std::* distributions are avoided because the standard
// does not pin their output.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto &word : state_) {
      sm += kHashGolden;
      word = mix64(sm);
    }
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform_real(double lo, double hi) {
    return lo + (hi - lo) * uniform_unit();
  }

  // Uniform in [0, n) via Lemire's multiply-shift reduction. The residual
  // bias is below n / 2^64 and accepted in exchange for a fixed draw count.
  std::uint64_t uniform_below(std::uint64_t n) {
    using u128 = unsigned __int128;
    return static_cast<std::uint64_t>((static_cast<u128>(next()) * n) >> 64);
  }

  // Standard normal via the non-rejecting Box-Muller transform (two draws
  // per variate, no loop, so the stream position is input-independent).
  double normal() {
    const double u1 = 1.0 - uniform_unit();  // (0, 1]
    const double u2 = uniform_unit();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  // Fisher-Yates.
  template <typename T>
  void shuffle(std::vector<T> &v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(uniform_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> state_{};
};

// Deterministic per-stream seed derivation, e.g. one stream per forest tree.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  return mix64(base + kHashGolden * (stream + 1));
}

}  // namespace chemscreen

#endif  // CHEMSCREEN_RNG_HPP_
