//
// Project ChemScreen - Copyright 2026 ChemScreen Developers.
// SPDX-License-Identifier: Apache-2.0
//

#include "chemscreen/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "chemscreen/chem.hpp"
#include "chemscreen/csv.hpp"
#include "chemscreen/rng.hpp"

namespace chemscreen::synth {

namespace {

struct Fragment {
  const char *smiles;
  int tail_budget;  // free valence on the fragment's final atom once attached
};

// Background fragments: carbon/nitrogen/oxygen only (no sulfur), each a
// complete SMILES that stays valid under plain concatenation or as a
// parenthesized branch.
constexpr Fragment kBackground[] = {
    {"C", 3},        {"CC", 3},       {"CCC", 3},      {"CO", 1},
    {"CN", 2},       {"CCO", 1},      {"CCN", 2},      {"C=C", 2},
    {"CC(C)C", 3},   {"C(F)C", 3},    {"C(Cl)C", 3},   {"C1CCCCC1", 2},
    {"C1CCOC1", 2},  {"C1CCNC1", 2},  {"c1ccccc1", 1}, {"c1ccncc1", 1},
    {"C=O", 0},      {"C#N", 0},
};

constexpr Fragment kMotif{"c1ccsc1", 1};

// Fragments usable in the middle of a chain need a free tail valence.
bool chainable(const Fragment &f) { return f.tail_budget >= 1; }

std::string assemble(SeededRng &rng, bool with_motif) {
  const std::size_t n_background = std::size(kBackground);
  const std::size_t n_segments = 2 + rng.uniform_below(4);  // 2..5
  const std::size_t motif_slot =
      with_motif ? rng.uniform_below(n_segments) : n_segments;

  std::string out;
  int tail_budget = 0;
  for (std::size_t s = 0; s < n_segments; ++s) {
    const bool is_last = s + 1 == n_segments;
    Fragment frag{};
    if (s == motif_slot) {
      frag = kMotif;
    } else {
      do {
        frag = kBackground[rng.uniform_below(n_background)];
      } while (!is_last && !chainable(frag));
    }
    if (s == 0) {
      out = frag.smiles;
      tail_budget = frag.tail_budget;
      continue;
    }
    // A branch keeps the current tail (needs >= 2 free valences: one for the
    // branch, one for the continuation); otherwise extend the chain.
    const bool branch = !is_last && tail_budget >= 2 &&
                        rng.uniform_unit() < 0.35;
    if (branch) {
      out += "(";
      out += frag.smiles;
      out += ")";
      tail_budget -= 1;
    } else {
      out += frag.smiles;
      tail_budget = frag.tail_budget;
    }
    // Dead-end tail: nothing more can attach.
    if (tail_budget == 0 && !is_last) break;
  }
  return out;
}

}  // namespace

const std::string &active_motif() {
  static const std::string kMotifSmiles = kMotif.smiles;
  return kMotifSmiles;
}

std::vector<BenchRecord> generate(const BenchSpec &spec) {
  if (spec.n_compounds == 0) {
    throw std::invalid_argument("synthetic benchmark needs n_compounds >= 1");
  }
  if (spec.prevalence < 0.0 || spec.prevalence > 1.0) {
    throw std::invalid_argument("prevalence must lie in [0, 1]");
  }
  if (spec.noise < 0.0) throw std::invalid_argument("noise must be >= 0");

  const std::size_t n_motif = static_cast<std::size_t>(
      std::llround(spec.prevalence * static_cast<double>(spec.n_compounds)));
  if (spec.prevalence > 0.0 && n_motif == 0) {
    throw std::invalid_argument(
        "prevalence unreachable: rounds to zero motif-bearing molecules");
  }

  SeededRng rng(spec.seed);
  std::unordered_set<std::string> seen;
  std::vector<BenchRecord> records;
  records.reserve(spec.n_compounds);

  constexpr int kMaxAttemptsPerMolecule = 10000;
  for (std::size_t i = 0; i < spec.n_compounds; ++i) {
    const bool with_motif = i < n_motif;
    std::string canonical;
    int attempts = 0;
    while (true) {
      if (++attempts > kMaxAttemptsPerMolecule) {
        throw std::runtime_error(
            "synthetic grammar exhausted while generating unique molecules");
      }
      const std::string smiles = assemble(rng, with_motif);
      const chem::ParseResult parsed = chem::parse(smiles);
      if (!parsed.ok()) {
        throw std::logic_error("synthetic grammar produced invalid SMILES: " +
                               smiles);
      }
      canonical = chem::canonicalize(*parsed.graph);
      if (seen.insert(canonical).second) break;
    }

    BenchRecord record;
    record.smiles = std::move(canonical);
    record.has_motif = with_motif;
    double pic50 = kBasePic50 + (with_motif ? spec.effect : 0.0) +
                   spec.noise * rng.normal();
    record.pic50 = std::clamp(pic50, kClampLow, kClampHigh);
    records.push_back(std::move(record));
  }

  // Interleave classes so downstream splits see no ordering signal.
  rng.shuffle(records);
  return records;
}

void write_csv(const std::string &path,
               const std::vector<BenchRecord> &records) {
  csv::Table table;
  table.header = {"SMILES", "pIC50", "has_motif"};
  table.rows.reserve(records.size());
  for (const auto &record : records) {
    table.rows.push_back({record.smiles, csv::format_double(record.pic50),
                          record.has_motif ? "1" : "0"});
  }
  csv::write_file(path, table);
}

}  // namespace chemscreen::synth
