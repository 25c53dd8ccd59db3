//
// Project ChemScreen - Copyright 2026 ChemScreen Developers.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef CHEMSCREEN_HASH_HPP_
#define CHEMSCREEN_HASH_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace chemscreen {

// 64-bit finalizer from SplitMix64 (Steele, Lea & Flood 2014). All hashed
// identifiers in the toolkit (fingerprint environments, per-tree seeds,
// dataset fingerprints) reduce to this mixer so outputs are bit-identical
// across platforms.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

inline constexpr std::uint64_t kHashGolden = 0x9e3779b97f4a7c15ULL;

// Order-dependent combination of a word sequence. Callers that need an
// order-independent digest pre-sort their words.
constexpr std::uint64_t hash_combine(std::uint64_t h, std::uint64_t word) {
  return mix64(h + kHashGolden + word);
}

inline std::uint64_t hash_words(std::span<const std::uint64_t> words) {
  std::uint64_t h = mix64(static_cast<std::uint64_t>(words.size()) + 1);
  for (std::uint64_t w : words) h = hash_combine(h, w);
  return h;
}

// FNV-1a over raw bytes; used for file/provenance hashes (integrity, not
// cryptography).
constexpr std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string to_hex(std::uint64_t value);

// FNV-1a of a file's full contents; throws std::runtime_error when the file
// cannot be read.
std::uint64_t hash_file(const std::string &path);

}  // namespace chemscreen

#endif  // CHEMSCREEN_HASH_HPP_
