//
// Project ChemScreen - Copyright 2026 ChemScreen Developers.
// SPDX-License-Identifier: Apache-2.0
//

#include "chemscreen/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "chemscreen/csv.hpp"
#include "chemscreen/rng.hpp"

namespace chemscreen::sampling {

std::string to_string(Split split) {
  switch (split) {
    case Split::kTrain:
      return "train";
    case Split::kVal:
      return "val";
    case Split::kTest:
      return "test";
  }
  return "train";
}

Split split_from_string(const std::string &name) {
  if (name == "train") return Split::kTrain;
  if (name == "val") return Split::kVal;
  if (name == "test") return Split::kTest;
  throw std::invalid_argument("unknown split name: " + name);
}

std::vector<int> SplitManifest::indices(Split split) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] == split) out.push_back(static_cast<int>(i));
  }
  return out;
}

std::array<std::size_t, 3> apportion(std::size_t n, const Fractions &f) {
  const std::array<double, 3> fracs{f.train, f.val, f.test};
  std::array<std::size_t, 3> counts{};
  std::array<double, 3> remainders{};
  std::size_t assigned = 0;
  for (std::size_t k = 0; k < 3; ++k) {
    const double ideal = fracs[k] * static_cast<double>(n);
    counts[k] = static_cast<std::size_t>(std::floor(ideal));
    remainders[k] = ideal - std::floor(ideal);
    assigned += counts[k];
  }
  std::array<std::size_t, 3> order{0, 1, 2};
  std::sort(order.begin(), order.end(), [&remainders](std::size_t a, std::size_t b) {
    if (remainders[a] != remainders[b]) return remainders[a] > remainders[b];
    return a < b;  // tie toward the earlier split
  });
  for (std::size_t k = 0; assigned < n; ++k) {
    ++counts[order[k % 3]];
    ++assigned;
  }
  return counts;
}

SplitManifest stratified_split(const std::vector<bool> &labels,
                               const Fractions &fractions, std::uint64_t seed,
                               double stratify_threshold) {
  if (labels.empty()) throw std::invalid_argument("no records to split");
  const double sum = fractions.train + fractions.val + fractions.test;
  if (std::abs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument("split fractions must sum to 1");
  }

  SplitManifest manifest;
  manifest.assignment.resize(labels.size(), Split::kTrain);
  manifest.fractions = fractions;
  manifest.seed = seed;
  manifest.stratify_threshold = stratify_threshold;

  SeededRng rng(seed);
  for (const bool cls : {true, false}) {
    std::vector<int> members;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == cls) members.push_back(static_cast<int>(i));
    }
    if (members.empty()) continue;
    rng.shuffle(members);
    const auto counts = apportion(members.size(), fractions);
    std::size_t cursor = 0;
    for (std::size_t k = 0; k < 3; ++k) {
      for (std::size_t c = 0; c < counts[k]; ++c, ++cursor) {
        manifest.assignment[static_cast<std::size_t>(members[cursor])] =
            static_cast<Split>(k);
      }
    }
  }
  return manifest;
}

std::vector<int> oversample_to_balance(const std::vector<int> &train_indices,
                                       const std::vector<bool> &labels,
                                       std::uint64_t seed) {
  std::vector<int> actives;
  std::vector<int> inactives;
  for (int idx : train_indices) {
    (labels[static_cast<std::size_t>(idx)] ? actives : inactives).push_back(idx);
  }
  if (actives.empty() || inactives.empty()) {
    throw std::invalid_argument(
        "oversampling requires both classes in the train split");
  }

  SeededRng rng(seed);
  std::vector<int> out;
  if (actives.size() == inactives.size()) {
    out = train_indices;
  } else {
    const auto &majority = actives.size() > inactives.size() ? actives : inactives;
    const auto &minority = actives.size() > inactives.size() ? inactives : actives;
    out = majority;
    out.reserve(2 * majority.size());
    for (std::size_t d = 0; d < majority.size(); ++d) {
      out.push_back(minority[static_cast<std::size_t>(
          rng.uniform_below(minority.size()))]);
    }
  }
  rng.shuffle(out);
  return out;
}

Eigen::VectorXd compute_weights(const std::vector<bool> &labels) {
  const std::size_t n = labels.size();
  std::size_t n_active = 0;
  for (const bool label : labels) {
    if (label) ++n_active;
  }
  const std::size_t n_inactive = n - n_active;
  if (n_active == 0 || n_inactive == 0) {
    throw std::invalid_argument(
        "class weights require both classes to be present");
  }
  const double w_active =
      static_cast<double>(n) / (2.0 * static_cast<double>(n_active));
  const double w_inactive =
      static_cast<double>(n) / (2.0 * static_cast<double>(n_inactive));
  Eigen::VectorXd weights(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    weights(static_cast<Eigen::Index>(i)) = labels[i] ? w_active : w_inactive;
  }
  return weights;
}

void write_manifest_csv(const std::string &path, const SplitManifest &manifest,
                        const Eigen::VectorXd *train_weights) {
  csv::Table table;
  table.header = {"row_id", "split", "weight"};
  table.rows.reserve(manifest.assignment.size());
  Eigen::Index train_cursor = 0;
  for (std::size_t i = 0; i < manifest.assignment.size(); ++i) {
    const Split split = manifest.assignment[i];
    std::string weight;
    if (split == Split::kTrain) {
      if (train_weights != nullptr && train_weights->size() > 0) {
        weight = csv::format_double((*train_weights)(train_cursor));
      }
      ++train_cursor;
    }
    table.rows.push_back(
        {std::to_string(i), to_string(split), std::move(weight)});
  }
  csv::write_file(path, table);
}

LoadedManifest read_manifest_csv(const std::string &path) {
  const csv::Table table = csv::read_file(path);
  if (table.column("row_id") != 0 || table.column("split") != 1 ||
      table.column("weight") != 2) {
    throw std::runtime_error("manifest CSV must have header row_id,split,weight: " +
                             path);
  }
  LoadedManifest loaded;
  loaded.manifest.assignment.resize(table.rows.size());
  std::vector<double> weights;
  bool any_weight = false;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto &row = table.rows[r];
    const auto row_id = csv::parse_int(row[0]);
    if (!row_id || static_cast<std::size_t>(*row_id) != r) {
      throw std::runtime_error(path + ": manifest row_id out of order at row " +
                               std::to_string(r + 2));
    }
    const Split split = split_from_string(row[1]);
    loaded.manifest.assignment[r] = split;
    if (split == Split::kTrain) {
      if (!row[2].empty()) {
        const auto w = csv::parse_double(row[2]);
        if (!w) {
          throw std::runtime_error(path + ": bad weight at row " +
                                   std::to_string(r + 2));
        }
        weights.push_back(*w);
        any_weight = true;
      } else {
        weights.push_back(1.0);
      }
    }
  }
  if (any_weight) {
    loaded.train_weights.resize(static_cast<Eigen::Index>(weights.size()));
    for (std::size_t i = 0; i < weights.size(); ++i) {
      loaded.train_weights(static_cast<Eigen::Index>(i)) = weights[i];
    }
  }
  return loaded;
}

}  // namespace chemscreen::sampling
