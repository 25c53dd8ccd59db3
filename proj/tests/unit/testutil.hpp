//
// Project ChemScreen - Copyright 2026 ChemScreen Developers.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef CHEMSCREEN_TESTS_TESTUTIL_HPP_
#define CHEMSCREEN_TESTS_TESTUTIL_HPP_

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "chemscreen/chem.hpp"
#include "chemscreen/rng.hpp"

namespace testutil {

inline std::string fixture_path(const std::string &name) {
  return std::string(CHEMSCREEN_FIXTURE_DIR) + "/" + name;
}

inline std::vector<std::string> read_lines(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("missing fixture: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

inline std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("missing file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Relabel atoms: perm[i] is the new index of old atom i.
inline chemscreen::chem::MoleculeGraph permute_graph(
    const chemscreen::chem::MoleculeGraph &g, const std::vector<int> &perm) {
  chemscreen::chem::MoleculeGraph out;
  out.atoms.resize(g.atoms.size());
  for (std::size_t i = 0; i < g.atoms.size(); ++i) {
    chemscreen::chem::Atom atom = g.atoms[i];
    atom.index = perm[i];
    out.atoms[static_cast<std::size_t>(perm[i])] = std::move(atom);
  }
  out.bonds.reserve(g.bonds.size());
  for (const auto &bond : g.bonds) {
    chemscreen::chem::Bond moved = bond;
    moved.a = perm[static_cast<std::size_t>(bond.a)];
    moved.b = perm[static_cast<std::size_t>(bond.b)];
    out.bonds.push_back(moved);
  }
  chemscreen::chem::perceive_rings(out);
  return out;
}

inline std::vector<int> random_permutation(std::size_t n,
                                           chemscreen::SeededRng &rng) {
  std::vector<int> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = static_cast<int>(i);
  rng.shuffle(perm);
  return perm;
}

// Independent ring oracle: enumerate every simple cycle up to max_size by
// unconstrained path extension from every start atom, normalizing each found
// cycle by rotation + reflection before deduplication. Deliberately a
// different algorithm from the library's root-anchored enumeration.
inline std::set<std::vector<int>> brute_force_cycles(
    const chemscreen::chem::MoleculeGraph &g, int max_size) {
  std::set<std::vector<int>> found;
  const int n = static_cast<int>(g.atoms.size());
  std::vector<char> on_path(static_cast<std::size_t>(n), 0);
  std::vector<int> path;

  auto normalize = [](std::vector<int> cycle) {
    std::sort(cycle.begin(), cycle.end());
    return cycle;
  };

  auto extend = [&](auto &&self, int start) -> void {
    const int last = path.back();
    for (const auto &[nbr, bond] : g.adjacency[static_cast<std::size_t>(last)]) {
      (void)bond;
      if (nbr == start && path.size() >= 3) {
        found.insert(normalize(path));
      } else if (!on_path[static_cast<std::size_t>(nbr)] &&
                 static_cast<int>(path.size()) < max_size) {
        on_path[static_cast<std::size_t>(nbr)] = 1;
        path.push_back(nbr);
        self(self, start);
        path.pop_back();
        on_path[static_cast<std::size_t>(nbr)] = 0;
      }
    }
  };

  for (int v = 0; v < n; ++v) {
    path.assign(1, v);
    on_path[static_cast<std::size_t>(v)] = 1;
    extend(extend, v);
    on_path[static_cast<std::size_t>(v)] = 0;
  }
  return found;
}

// Order-independent structural profile; equal profiles are a necessary
// condition for isomorphism (1-WL style), used to sanity-check round trips.
inline std::vector<std::string> structure_profile(
    const chemscreen::chem::MoleculeGraph &g) {
  namespace chem = chemscreen::chem;
  std::vector<std::string> profile;
  for (std::size_t a = 0; a < g.atoms.size(); ++a) {
    const chem::Atom &atom = g.atoms[a];
    std::vector<std::string> nbrs;
    for (const auto &[nbr, bond] : g.adjacency[a]) {
      nbrs.push_back(std::to_string(static_cast<int>(
                         g.bonds[static_cast<std::size_t>(bond)].order)) +
                     g.atoms[static_cast<std::size_t>(nbr)].element +
                     (g.atoms[static_cast<std::size_t>(nbr)].aromatic ? "a"
                                                                      : ""));
    }
    std::sort(nbrs.begin(), nbrs.end());
    std::string entry = atom.element + (atom.aromatic ? "a" : "") + "/" +
                        std::to_string(atom.formal_charge) + "/" +
                        std::to_string(chem::total_hydrogens(
                            g, static_cast<int>(a)));
    for (const auto &n : nbrs) entry += "|" + n;
    profile.push_back(std::move(entry));
  }
  std::sort(profile.begin(), profile.end());
  return profile;
}

}  // namespace testutil

#endif  // CHEMSCREEN_TESTS_TESTUTIL_HPP_
