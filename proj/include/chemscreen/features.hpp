//
// Project ChemScreen - Copyright 2026 ChemScreen Developers.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef CHEMSCREEN_FEATURES_HPP_
#define CHEMSCREEN_FEATURES_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "chemscreen/chem.hpp"

namespace chemscreen::features {

inline constexpr double kZeroVarianceEps = 1e-12;

// Fixed-width binary fingerprint stored as 64-bit blocks.
class Fingerprint {
 public:
  explicit Fingerprint(int width = 2048)
      : width_(width),
        blocks_(static_cast<std::size_t>((width + 63) / 64), 0) {}

  int width() const { return width_; }
  void set(int bit) {
    blocks_[static_cast<std::size_t>(bit >> 6)] |= 1ULL << (bit & 63);
  }
  bool test(int bit) const {
    return (blocks_[static_cast<std::size_t>(bit >> 6)] >> (bit & 63)) & 1ULL;
  }
  int popcount() const;

  const std::vector<std::uint64_t> &blocks() const { return blocks_; }

  bool operator==(const Fingerprint &) const = default;

 private:
  int width_;
  std::vector<std::uint64_t> blocks_;
};

// Circular (Morgan-style) fingerprint. Environment identifiers are 64-bit
// mixes of the atom's initial invariant (element, degree, charge, hydrogen
// count, ring flag, aromatic flag) combined with the sorted
// (bond order, neighbor identifier) pairs of the previous radius; every
// identifier from radius 0 through `radius` sets bit (id mod width).
Fingerprint morgan_fingerprint(const chem::MoleculeGraph &g, int radius = 2,
                               int width = 2048);

// |a AND b| / |a OR b|; 1.0 when both fingerprints are empty.
// Throws std::invalid_argument on width mismatch.
double tanimoto(const Fingerprint &a, const Fingerprint &b);

struct DescriptorVector {
  std::vector<std::string> names;
  Eigen::VectorXd values;
};

const std::vector<std::string> &descriptor_names();

// Nine fixed descriptors, in the order of descriptor_names():
// mol_weight, heavy_atoms, ring_count, aromatic_atoms, heteroatoms,
// hbd, hba, rotatable_bonds, formal_charge_sum.
DescriptorVector descriptors(const chem::MoleculeGraph &g);

struct Scaler {
  Eigen::VectorXd mean;
  Eigen::VectorXd stddev;  // population standard deviation
};

struct FeatureMatrix {
  std::vector<std::string> ids;  // canonical SMILES, one per row
  std::vector<std::string> column_names;
  Eigen::MatrixXd values;
  bool standardized = false;
  std::optional<Scaler> scaler;

  Eigen::Index n_rows() const { return values.rows(); }
  Eigen::Index n_cols() const { return values.cols(); }
};

enum class FeatureMode { kFingerprints, kDescriptors, kBoth };

FeatureMode feature_mode_from_string(const std::string &name);
std::string to_string(FeatureMode mode);

// Rows are independent; computed in parallel when n_threads > 1 with output
// identical to sequential execution.
FeatureMatrix build_feature_matrix(const std::vector<std::string> &ids,
                                   const std::vector<chem::MoleculeGraph> &mols,
                                   FeatureMode mode, int radius = 2,
                                   int width = 2048, int n_threads = 1);

// Z-score every row using mean/stddev estimated on fit_rows only.
// Throws when the matrix is already standardized, fit_rows is empty, or a
// column has (near-)zero variance on the fitting rows.
FeatureMatrix standardize(const FeatureMatrix &m, std::span<const int> fit_rows);

// Apply a previously fitted scaler (e.g. to unseen prediction rows).
FeatureMatrix apply_scaler(const FeatureMatrix &m, const Scaler &scaler);

// Remove columns whose stddev on fit_rows is below kZeroVarianceEps.
// Returns the reduced matrix and the dropped column names; throws when
// every column would be dropped.
std::pair<FeatureMatrix, std::vector<std::string>> drop_zero_variance(
    const FeatureMatrix &m, std::span<const int> fit_rows);

// Select named columns (used to align prediction matrices with a trained
// model's schema). Throws when a requested column is missing.
FeatureMatrix select_columns(const FeatureMatrix &m,
                             const std::vector<std::string> &names);

void write_csv(const std::string &path, const FeatureMatrix &m);
FeatureMatrix read_csv(const std::string &path);

}  // namespace chemscreen::features

#endif  // CHEMSCREEN_FEATURES_HPP_
