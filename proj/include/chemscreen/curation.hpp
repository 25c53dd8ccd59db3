//
// Project ChemScreen - Copyright 2026 ChemScreen Developers.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef CHEMSCREEN_CURATION_HPP_
#define CHEMSCREEN_CURATION_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "chemscreen/csv.hpp"

namespace chemscreen::curation {

inline constexpr double kActiveThreshold = 6.0;
inline constexpr double kPotentThreshold = 7.0;

// One raw assay row. Exactly one of ac50_um / pic50 is present.
struct AssayRecord {
  std::string source_id;
  std::string smiles;
  std::optional<double> ac50_um;  // micromolar, > 0
  std::optional<double> pic50;
};

struct CuratedRecord {
  std::string smiles;  // canonical
  double pic50 = 0.0;
};

struct HistogramBin {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;
};

struct DatasetSummary {
  std::size_t n = 0;
  double mean = 0.0;
  double median = 0.0;  // lower-middle element for even n
  double stddev = 0.0;  // population
  double min = 0.0;
  double max = 0.0;
  std::size_t n_active = 0;  // pIC50 >= 6.0
  double prevalence = 0.0;
  std::size_t n_potent = 0;  // pIC50 >= 7.0
  std::vector<HistogramBin> histogram;  // 0.5-wide pIC50 bins
};

// pIC50 = -log10(AC50[uM] * 1e-6), computed as 6 - log10(AC50) so that
// 1 uM maps to exactly 6.0. Throws std::invalid_argument for non-positive
// or non-finite input.
double to_pic50(double ac50_um);

// Inverse: micromolar AC50 equivalent of a pIC50.
double from_pic50(double pic50);

bool label_activity(double pic50, double threshold = kActiveThreshold);

struct SourceSpec {
  enum class Kind { kAc50Um, kPic50 };
  std::string source_id;
  std::string path;
  std::string smiles_column;
  std::string activity_column;
  Kind kind = Kind::kAc50Um;
};

// Parse the sources configuration JSON ({"sources":[{source_id, path,
// smiles_column, activity_column, activity_kind}, ...]}); relative paths are
// resolved against the config file's directory.
std::vector<SourceSpec> load_sources_config(const std::string &path);

struct RowDiagnostic {
  std::string source_id;
  std::size_t line = 0;  // 1-based file line (header is line 1)
  std::string message;
};

struct IngestResult {
  std::vector<AssayRecord> records;
  std::vector<RowDiagnostic> diagnostics;
};

// Rows with missing SMILES or a non-numeric / non-positive activity are
// dropped and reported. Throws on unreadable files or unknown columns.
IngestResult ingest(const std::vector<SourceSpec> &sources);
IngestResult ingest_table(const SourceSpec &spec, const csv::Table &table);

enum class DedupKey { kCanonical, kRawText };

struct MergeResult {
  std::vector<CuratedRecord> records;  // sorted by SMILES key
  std::vector<RowDiagnostic> diagnostics;  // unparseable SMILES
  std::size_t n_duplicate_rows = 0;    // rows beyond the first of each key
  std::size_t n_conflict_groups = 0;   // keys with >1 distinct activity
};

// Group by canonical SMILES (or raw text for audit); conflicting AC50
// values are averaged in micromolar space before pIC50 conversion;
// pIC50-only records join the average through the inverse formula.
MergeResult merge_and_dedup(const std::vector<AssayRecord> &records,
                            DedupKey key = DedupKey::kCanonical);

DatasetSummary summarize(const std::vector<CuratedRecord> &records);

// Curated dataset CSV, header `SMILES,pIC50`. The reader requires those two
// columns by name and ignores extras (e.g. synthetic-benchmark labels).
void write_dataset_csv(const std::string &path,
                       const std::vector<CuratedRecord> &records);
std::vector<CuratedRecord> read_dataset_csv(const std::string &path);

}  // namespace chemscreen::curation

#endif  // CHEMSCREEN_CURATION_HPP_
