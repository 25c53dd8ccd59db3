//
// Project ChemScreen - Copyright 2026 ChemScreen Developers.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef CHEMSCREEN_SYNTH_HPP_
#define CHEMSCREEN_SYNTH_HPP_

#include <cstdint>
#include <string>
#include <vector>

namespace chemscreen::synth {

inline constexpr double kBasePic50 = 4.5;
inline constexpr double kClampLow = 3.85;
inline constexpr double kClampHigh = 9.10;

struct BenchSpec {
  std::size_t n_compounds = 0;
  double prevalence = 0.021;  // fraction of motif-bearing molecules
  double effect = 2.0;        // pIC50 shift for the motif
  double noise = 0.2;         // Gaussian noise stddev
  std::uint64_t seed = 0;
};

struct BenchRecord {
  std::string smiles;  // canonical, unique across the dataset
  double pic50 = 0.0;
  bool has_motif = false;
};

// The sulfur-bearing ring that carries the activity signal; background
// fragments never contain sulfur, so this motif is the only source of
// S-environment fingerprint bits.
const std::string &active_motif();

// Closed-grammar generator: molecules are assembled from self-contained
// fragments, so every output parses; each SMILES is canonicalized and
// deduplicated. Exactly round(n * prevalence) molecules carry the motif;
// pIC50 = 4.5 + effect * has_motif + N(0, noise), clamped to [3.85, 9.10].
// Throws when the prevalence is unreachable (rounds to zero) or the
// requested count exceeds what the grammar can produce.
std::vector<BenchRecord> generate(const BenchSpec &spec);

// Dataset CSV with ground-truth labels: SMILES,pIC50,has_motif.
void write_csv(const std::string &path, const std::vector<BenchRecord> &records);

}  // namespace chemscreen::synth

#endif  // CHEMSCREEN_SYNTH_HPP_
