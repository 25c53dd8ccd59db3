//
// Project ChemScreen - Copyright 2026 ChemScreen Developers.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef CHEMSCREEN_CHEM_HPP_
#define CHEMSCREEN_CHEM_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace chemscreen::chem {

inline constexpr int kMaxRingSize = 8;
inline constexpr std::size_t kMaxInputBytes = 4096;

enum class BondOrder : std::uint8_t {
  kSingle = 1,
  kDouble = 2,
  kTriple = 3,
  kAromatic = 4,
};

struct Atom {
  std::string element;
  bool aromatic = false;
  int formal_charge = 0;
  std::optional<int> isotope;     // positive when present
  std::optional<int> explicit_h;  // bracket atoms only
  int index = 0;
  bool in_ring = false;  // member of any cycle, regardless of cycle size
};

struct Bond {
  int a = 0;
  int b = 0;
  BondOrder order = BondOrder::kSingle;
  bool in_ring = false;
};

// Parsed molecular graph. May be disconnected (dot-separated input).
// `rings` holds every simple cycle of size <= kMaxRingSize as a sorted
// atom-index list; larger macrocycles are visible only through the in_ring
// flags. Immutable after parse/perceive_rings; safe to share across threads.
struct MoleculeGraph {
  std::vector<Atom> atoms;
  std::vector<Bond> bonds;
  std::vector<std::vector<int>> rings;

  // (neighbor atom index, bond index), rebuilt by perceive_rings.
  std::vector<std::vector<std::pair<int, int>>> adjacency;

  int degree(int atom) const {
    return static_cast<int>(adjacency[static_cast<std::size_t>(atom)].size());
  }
};

struct ParseDiagnostic {
  enum class Severity { kError, kWarning };
  std::size_t byte_offset = 0;
  std::string message;
  Severity severity = Severity::kError;
};

struct ParseResult {
  std::optional<MoleculeGraph> graph;
  std::vector<ParseDiagnostic> diagnostics;

  bool ok() const { return graph.has_value(); }
  std::string first_error() const;
};

// Parse SMILES text into a molecular graph. Atom order follows source token
// order. Stereo markers (/ \ @ @@) are accepted, reported as warnings and
// discarded. The returned graph already has rings perceived. Every rejected
// input carries at least one error diagnostic with a byte offset; this
// function never throws on bad input.
ParseResult parse(std::string_view smiles);

// Rebuild adjacency, cycle-membership flags and the bounded ring list.
// Idempotent; parse() calls it on every graph it returns.
void perceive_rings(MoleculeGraph &g);

// Canonical SMILES: identical bytes for any atom ordering of the same graph.
// Ranking is iterative neighborhood refinement over (element, aromaticity,
// charge, degree, hydrogen count) with deterministic tie-breaking; stereo
// and isotopes never influence ranks (isotopes are still written out).
std::string canonicalize(const MoleculeGraph &g);

// Element facts (full periodic table for bracket atoms).
bool is_known_element(std::string_view symbol);
int atomic_number(std::string_view symbol);
double atomic_mass(std::string_view symbol);

// Hydrogens on an atom: the bracket-specified count when present, otherwise
// the organic-subset valence rule (C:4, N:3/5, O:2, S:2/4/6, ...). Aromatic
// atoms use their lowest valence with a one-bond pi allowance for B/C/N/P.
int total_hydrogens(const MoleculeGraph &g, int atom);

}  // namespace chemscreen::chem

#endif  // CHEMSCREEN_CHEM_HPP_
