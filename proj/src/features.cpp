//
// Project ChemScreen - Copyright 2026 ChemScreen Developers.
// SPDX-License-Identifier: Apache-2.0
//

#include "chemscreen/features.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "chemscreen/csv.hpp"
#include "chemscreen/hash.hpp"

namespace chemscreen::features {

namespace {

std::vector<std::uint64_t> initial_invariant(const chem::MoleculeGraph &g,
                                             int atom_index) {
  const chem::Atom &atom = g.atoms[static_cast<std::size_t>(atom_index)];
  return {
      static_cast<std::uint64_t>(chem::atomic_number(atom.element)),
      static_cast<std::uint64_t>(g.degree(atom_index)),
      static_cast<std::uint64_t>(static_cast<std::int64_t>(atom.formal_charge)),
      static_cast<std::uint64_t>(chem::total_hydrogens(g, atom_index)),
      atom.in_ring ? 1ULL : 0ULL,
      atom.aromatic ? 1ULL : 0ULL,
  };
}

int count_components(const chem::MoleculeGraph &g) {
  const std::size_t n = g.atoms.size();
  std::vector<char> seen(n, 0);
  int components = 0;
  for (std::size_t start = 0; start < n; ++start) {
    if (seen[start]) continue;
    ++components;
    std::vector<int> stack{static_cast<int>(start)};
    seen[start] = 1;
    while (!stack.empty()) {
      const int cur = stack.back();
      stack.pop_back();
      for (const auto &[nbr, bond] : g.adjacency[static_cast<std::size_t>(cur)]) {
        (void)bond;
        if (!seen[static_cast<std::size_t>(nbr)]) {
          seen[static_cast<std::size_t>(nbr)] = 1;
          stack.push_back(nbr);
        }
      }
    }
  }
  return components;
}

}  // namespace

int Fingerprint::popcount() const {
  int total = 0;
  for (std::uint64_t block : blocks_) total += std::popcount(block);
  return total;
}

Fingerprint morgan_fingerprint(const chem::MoleculeGraph &g, int radius,
                               int width) {
  if (radius < 0) throw std::invalid_argument("fingerprint radius must be >= 0");
  if (width < 8) throw std::invalid_argument("fingerprint width must be >= 8");

  Fingerprint fp(width);
  const std::size_t n = g.atoms.size();

  std::vector<std::uint64_t> current(n);
  for (std::size_t a = 0; a < n; ++a) {
    current[a] = hash_words(initial_invariant(g, static_cast<int>(a)));
    fp.set(static_cast<int>(current[a] % static_cast<std::uint64_t>(width)));
  }

  for (int r = 1; r <= radius; ++r) {
    std::vector<std::uint64_t> next(n);
    for (std::size_t a = 0; a < n; ++a) {
      std::vector<std::pair<std::uint64_t, std::uint64_t>> nbrs;
      nbrs.reserve(g.adjacency[a].size());
      for (const auto &[nbr, bond] : g.adjacency[a]) {
        nbrs.emplace_back(
            static_cast<std::uint64_t>(
                g.bonds[static_cast<std::size_t>(bond)].order),
            current[static_cast<std::size_t>(nbr)]);
      }
      std::sort(nbrs.begin(), nbrs.end());
      std::vector<std::uint64_t> words = initial_invariant(g, static_cast<int>(a));
      for (const auto &[code, id] : nbrs) {
        words.push_back(code);
        words.push_back(id);
      }
      next[a] = hash_words(words);
      fp.set(static_cast<int>(next[a] % static_cast<std::uint64_t>(width)));
    }
    current = std::move(next);
  }
  return fp;
}

double tanimoto(const Fingerprint &a, const Fingerprint &b) {
  if (a.width() != b.width()) {
    throw std::invalid_argument("tanimoto: fingerprint width mismatch");
  }
  int inter = 0;
  int uni = 0;
  const auto &ba = a.blocks();
  const auto &bb = b.blocks();
  for (std::size_t i = 0; i < ba.size(); ++i) {
    inter += std::popcount(ba[i] & bb[i]);
    uni += std::popcount(ba[i] | bb[i]);
  }
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

const std::vector<std::string> &descriptor_names() {
  static const std::vector<std::string> kNames{
      "mol_weight",  "heavy_atoms", "ring_count",
      "aromatic_atoms", "heteroatoms", "hbd",
      "hba",         "rotatable_bonds", "formal_charge_sum"};
  return kNames;
}

DescriptorVector descriptors(const chem::MoleculeGraph &g) {
  const int n = static_cast<int>(g.atoms.size());

  double weight = 0.0;
  int heavy = 0;
  int aromatic = 0;
  int hetero = 0;
  int hbd = 0;
  int hba = 0;
  int charge = 0;
  for (int a = 0; a < n; ++a) {
    const chem::Atom &atom = g.atoms[static_cast<std::size_t>(a)];
    const int hydrogens = chem::total_hydrogens(g, a);
    weight += chem::atomic_mass(atom.element) +
              hydrogens * chem::atomic_mass("H");
    charge += atom.formal_charge;
    if (atom.element != "H") ++heavy;
    if (atom.aromatic) ++aromatic;
    if (atom.element != "H" && atom.element != "C") ++hetero;
    if (atom.element == "N" || atom.element == "O") {
      ++hba;
      if (hydrogens >= 1) ++hbd;
    }
  }

  // Cycle rank: robust to macrocycles that exceed the bounded ring list.
  const int rings = static_cast<int>(g.bonds.size()) - n + count_components(g);

  int rotatable = 0;
  for (const chem::Bond &bond : g.bonds) {
    if (bond.order != chem::BondOrder::kSingle || bond.in_ring) continue;
    if (g.degree(bond.a) >= 2 && g.degree(bond.b) >= 2) ++rotatable;
  }

  DescriptorVector out;
  out.names = descriptor_names();
  out.values.resize(9);
  out.values << weight, heavy, rings, aromatic, hetero, hbd, hba, rotatable,
      charge;
  return out;
}

FeatureMode feature_mode_from_string(const std::string &name) {
  if (name == "fingerprints") return FeatureMode::kFingerprints;
  if (name == "descriptors") return FeatureMode::kDescriptors;
  if (name == "both") return FeatureMode::kBoth;
  throw std::invalid_argument("unknown feature mode: " + name);
}

std::string to_string(FeatureMode mode) {
  switch (mode) {
    case FeatureMode::kFingerprints:
      return "fingerprints";
    case FeatureMode::kDescriptors:
      return "descriptors";
    case FeatureMode::kBoth:
      return "both";
  }
  return "fingerprints";
}

FeatureMatrix build_feature_matrix(const std::vector<std::string> &ids,
                                   const std::vector<chem::MoleculeGraph> &mols,
                                   FeatureMode mode, int radius, int width,
                                   int n_threads) {
  if (ids.size() != mols.size()) {
    throw std::invalid_argument("ids and molecules differ in length");
  }
  const bool with_fp = mode != FeatureMode::kDescriptors;
  const bool with_desc = mode != FeatureMode::kFingerprints;

  FeatureMatrix m;
  m.ids = ids;
  if (with_fp) {
    m.column_names.reserve(static_cast<std::size_t>(width) +
                           (with_desc ? 9 : 0));
    for (int b = 0; b < width; ++b) {
      std::string name = "fp_" + std::to_string(b);
      m.column_names.push_back(std::move(name));
    }
  }
  if (with_desc) {
    for (const auto &name : descriptor_names()) m.column_names.push_back(name);
  }

  const Eigen::Index rows = static_cast<Eigen::Index>(mols.size());
  const Eigen::Index cols = static_cast<Eigen::Index>(m.column_names.size());
  m.values.setZero(rows, cols);

  auto fill_row = [&](std::size_t r) {
    Eigen::Index c = 0;
    if (with_fp) {
      const Fingerprint fp = morgan_fingerprint(mols[r], radius, width);
      for (int b = 0; b < width; ++b) {
        m.values(static_cast<Eigen::Index>(r), c + b) = fp.test(b) ? 1.0 : 0.0;
      }
      c += width;
    }
    if (with_desc) {
      const DescriptorVector d = descriptors(mols[r]);
      m.values.row(static_cast<Eigen::Index>(r)).segment(c, 9) =
          d.values.transpose();
    }
  };

  if (n_threads <= 1 || mols.size() < 64) {
    for (std::size_t r = 0; r < mols.size(); ++r) fill_row(r);
  } else {
    std::vector<std::thread> workers;
    std::size_t chunk = (mols.size() + static_cast<std::size_t>(n_threads) - 1) /
                        static_cast<std::size_t>(n_threads);
    for (int t = 0; t < n_threads; ++t) {
      const std::size_t lo = static_cast<std::size_t>(t) * chunk;
      const std::size_t hi = std::min(mols.size(), lo + chunk);
      if (lo >= hi) break;
      workers.emplace_back([&, lo, hi] {
        for (std::size_t r = lo; r < hi; ++r) fill_row(r);
      });
    }
    for (auto &w : workers) w.join();
  }
  return m;
}

namespace {

Scaler fit_scaler(const FeatureMatrix &m, std::span<const int> fit_rows) {
  const Eigen::Index cols = m.n_cols();
  Scaler s;
  s.mean.setZero(cols);
  s.stddev.setZero(cols);
  const double inv_n = 1.0 / static_cast<double>(fit_rows.size());
  for (int r : fit_rows) s.mean += m.values.row(r).transpose();
  s.mean *= inv_n;
  for (int r : fit_rows) {
    const Eigen::VectorXd d = m.values.row(r).transpose() - s.mean;
    s.stddev += d.cwiseProduct(d);
  }
  s.stddev = (s.stddev * inv_n).cwiseSqrt();
  return s;
}

}  // namespace

FeatureMatrix standardize(const FeatureMatrix &m,
                          std::span<const int> fit_rows) {
  if (m.standardized) {
    throw std::invalid_argument("matrix is already standardized");
  }
  if (fit_rows.empty()) throw std::invalid_argument("empty fit-row set");

  const Scaler s = fit_scaler(m, fit_rows);
  for (Eigen::Index c = 0; c < m.n_cols(); ++c) {
    if (s.stddev(c) < kZeroVarianceEps) {
      throw std::invalid_argument(
          "zero-variance column must be removed before standardization: " +
          m.column_names[static_cast<std::size_t>(c)]);
    }
  }

  FeatureMatrix out = m;
  out.values = (m.values.rowwise() - s.mean.transpose()).array().rowwise() /
               s.stddev.transpose().array();
  out.standardized = true;
  out.scaler = s;
  return out;
}

FeatureMatrix apply_scaler(const FeatureMatrix &m, const Scaler &scaler) {
  if (scaler.mean.size() != m.n_cols()) {
    throw std::invalid_argument("scaler dimension mismatch");
  }
  FeatureMatrix out = m;
  out.values = (m.values.rowwise() - scaler.mean.transpose()).array().rowwise() /
               scaler.stddev.transpose().array();
  out.standardized = true;
  out.scaler = scaler;
  return out;
}

std::pair<FeatureMatrix, std::vector<std::string>> drop_zero_variance(
    const FeatureMatrix &m, std::span<const int> fit_rows) {
  if (fit_rows.empty()) throw std::invalid_argument("empty fit-row set");
  const Scaler s = fit_scaler(m, fit_rows);

  std::vector<Eigen::Index> keep;
  std::vector<std::string> dropped;
  for (Eigen::Index c = 0; c < m.n_cols(); ++c) {
    if (s.stddev(c) < kZeroVarianceEps) {
      dropped.push_back(m.column_names[static_cast<std::size_t>(c)]);
    } else {
      keep.push_back(c);
    }
  }
  if (keep.empty()) {
    throw std::runtime_error("all feature columns have zero variance");
  }

  FeatureMatrix out;
  out.ids = m.ids;
  out.standardized = m.standardized;
  out.values.resize(m.n_rows(), static_cast<Eigen::Index>(keep.size()));
  out.column_names.reserve(keep.size());
  for (std::size_t k = 0; k < keep.size(); ++k) {
    out.values.col(static_cast<Eigen::Index>(k)) = m.values.col(keep[k]);
    out.column_names.push_back(
        m.column_names[static_cast<std::size_t>(keep[k])]);
  }
  return {std::move(out), std::move(dropped)};
}

FeatureMatrix select_columns(const FeatureMatrix &m,
                             const std::vector<std::string> &names) {
  FeatureMatrix out;
  out.ids = m.ids;
  out.standardized = m.standardized;
  out.column_names = names;
  out.values.resize(m.n_rows(), static_cast<Eigen::Index>(names.size()));
  for (std::size_t k = 0; k < names.size(); ++k) {
    const auto it =
        std::find(m.column_names.begin(), m.column_names.end(), names[k]);
    if (it == m.column_names.end()) {
      throw std::invalid_argument("feature column not found: " + names[k]);
    }
    const Eigen::Index c =
        static_cast<Eigen::Index>(it - m.column_names.begin());
    out.values.col(static_cast<Eigen::Index>(k)) = m.values.col(c);
  }
  return out;
}

void write_csv(const std::string &path, const FeatureMatrix &m) {
  csv::Table table;
  table.header.reserve(m.column_names.size() + 1);
  table.header.push_back("SMILES");
  for (const auto &name : m.column_names) table.header.push_back(name);
  table.rows.reserve(static_cast<std::size_t>(m.n_rows()));
  for (Eigen::Index r = 0; r < m.n_rows(); ++r) {
    std::vector<std::string> row;
    row.reserve(m.column_names.size() + 1);
    row.push_back(m.ids[static_cast<std::size_t>(r)]);
    for (Eigen::Index c = 0; c < m.n_cols(); ++c) {
      row.push_back(csv::format_double(m.values(r, c)));
    }
    table.rows.push_back(std::move(row));
  }
  csv::write_file(path, table);
}

FeatureMatrix read_csv(const std::string &path) {
  const csv::Table table = csv::read_file(path);
  if (table.header.empty() || table.header[0] != "SMILES") {
    throw std::runtime_error("feature CSV must start with a SMILES column: " +
                             path);
  }
  FeatureMatrix m;
  m.column_names.assign(table.header.begin() + 1, table.header.end());
  m.values.resize(static_cast<Eigen::Index>(table.rows.size()),
                  static_cast<Eigen::Index>(m.column_names.size()));
  m.ids.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto &row = table.rows[r];
    if (row.size() != table.header.size()) {
      throw std::runtime_error("feature CSV row " + std::to_string(r + 2) +
                               " has wrong field count");
    }
    m.ids.push_back(row[0]);
    for (std::size_t c = 1; c < row.size(); ++c) {
      const auto value = csv::parse_double(row[c]);
      if (!value || !std::isfinite(*value)) {
        throw std::runtime_error("feature CSV row " + std::to_string(r + 2) +
                                 ": non-numeric value '" + row[c] + "'");
      }
      m.values(static_cast<Eigen::Index>(r),
               static_cast<Eigen::Index>(c - 1)) = *value;
    }
  }
  return m;
}

}  // namespace chemscreen::features
