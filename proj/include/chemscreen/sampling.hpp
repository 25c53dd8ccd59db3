//
// Project ChemScreen - Copyright 2026 ChemScreen Developers.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef CHEMSCREEN_SAMPLING_HPP_
#define CHEMSCREEN_SAMPLING_HPP_

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace chemscreen::sampling {

enum class Split : std::uint8_t { kTrain = 0, kVal = 1, kTest = 2 };

std::string to_string(Split split);
Split split_from_string(const std::string &name);

struct Fractions {
  double train = 0.70;
  double val = 0.15;
  double test = 0.15;
};

struct SplitManifest {
  std::vector<Split> assignment;  // one entry per record
  Fractions fractions;
  std::uint64_t seed = 0;
  double stratify_threshold = 6.0;

  std::vector<int> indices(Split split) const;
};

// Per-class largest-remainder apportionment of n items over the fractions;
// remainder ties resolve toward the earlier split (train, val, test).
std::array<std::size_t, 3> apportion(std::size_t n, const Fractions &f);

// Within each class present in `labels`, records are shuffled by the seeded
// generator (actives first, then inactives, one stream) and partitioned by
// largest-remainder counts. Same seed, same manifest.
// Throws when fractions do not sum to 1 (1e-9) or labels is empty.
SplitManifest stratified_split(const std::vector<bool> &labels,
                               const Fractions &fractions, std::uint64_t seed,
                               double stratify_threshold = 6.0);

// Resample the minority class with replacement up to the majority count;
// majority indices appear exactly once; result order is shuffled.
// Already-balanced input comes back as a shuffled permutation.
// Throws when the train split holds a single class.
std::vector<int> oversample_to_balance(const std::vector<int> &train_indices,
                                       const std::vector<bool> &labels,
                                       std::uint64_t seed);

// w_i = N / (2 * N_class(i)); the active and inactive weight sums are then
// both exactly N/2. Throws when only one class is present.
Eigen::VectorXd compute_weights(const std::vector<bool> &labels);

// Manifest CSV `row_id,split,weight` (weight empty outside the train split
// or when no weights are given).
void write_manifest_csv(const std::string &path, const SplitManifest &manifest,
                        const Eigen::VectorXd *train_weights);
struct LoadedManifest {
  SplitManifest manifest;
  Eigen::VectorXd train_weights;  // size 0 when the file carries none
};
LoadedManifest read_manifest_csv(const std::string &path);

}  // namespace chemscreen::sampling

#endif  // CHEMSCREEN_SAMPLING_HPP_
