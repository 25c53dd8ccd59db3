//
// Project ChemScreen - Copyright 2026 ChemScreen Developers.
// SPDX-License-Identifier: Apache-2.0
//

#include "chemscreen/curation.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>

#include <json.hpp>

#include "chemscreen/chem.hpp"

namespace chemscreen::curation {

double to_pic50(double ac50_um) {
  if (!std::isfinite(ac50_um) || ac50_um <= 0.0) {
    throw std::invalid_argument("AC50 must be a positive finite value");
  }
  return 6.0 - std::log10(ac50_um);
}

double from_pic50(double pic50) {
  if (!std::isfinite(pic50)) {
    throw std::invalid_argument("pIC50 must be finite");
  }
  return std::pow(10.0, 6.0 - pic50);
}

bool label_activity(double pic50, double threshold) {
  return pic50 >= threshold;
}

std::vector<SourceSpec> load_sources_config(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open sources config: " + path);
  nlohmann::json doc;
  in >> doc;
  if (!doc.contains("sources") || !doc["sources"].is_array()) {
    throw std::runtime_error("sources config must contain a 'sources' array");
  }
  const std::filesystem::path base =
      std::filesystem::path(path).parent_path();

  std::vector<SourceSpec> specs;
  for (const auto &entry : doc["sources"]) {
    SourceSpec spec;
    spec.source_id = entry.at("source_id").get<std::string>();
    spec.smiles_column = entry.at("smiles_column").get<std::string>();
    spec.activity_column = entry.at("activity_column").get<std::string>();
    const std::string kind = entry.at("activity_kind").get<std::string>();
    if (kind == "ac50_um") {
      spec.kind = SourceSpec::Kind::kAc50Um;
    } else if (kind == "pic50") {
      spec.kind = SourceSpec::Kind::kPic50;
    } else {
      throw std::runtime_error("unknown activity_kind '" + kind +
                               "' for source " + spec.source_id);
    }
    std::filesystem::path p = entry.at("path").get<std::string>();
    spec.path = p.is_absolute() ? p.string() : (base / p).string();
    specs.push_back(std::move(spec));
  }
  return specs;
}

IngestResult ingest_table(const SourceSpec &spec, const csv::Table &table) {
  const int smiles_col = table.column(spec.smiles_column);
  const int activity_col = table.column(spec.activity_column);
  if (smiles_col < 0) {
    throw std::runtime_error("source " + spec.source_id +
                             ": missing SMILES column '" + spec.smiles_column +
                             "'");
  }
  if (activity_col < 0) {
    throw std::runtime_error("source " + spec.source_id +
                             ": missing activity column '" +
                             spec.activity_column + "'");
  }

  IngestResult result;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto &row = table.rows[r];
    const std::size_t line = r + 2;  // header occupies line 1
    if (row.size() != table.header.size()) {
      result.diagnostics.push_back(
          {spec.source_id, line, "wrong field count"});
      continue;
    }
    const std::string &smiles = row[static_cast<std::size_t>(smiles_col)];
    if (smiles.empty()) {
      result.diagnostics.push_back({spec.source_id, line, "missing SMILES"});
      continue;
    }
    const std::string &activity = row[static_cast<std::size_t>(activity_col)];
    const auto value = csv::parse_double(activity);
    if (!value || !std::isfinite(*value)) {
      result.diagnostics.push_back(
          {spec.source_id, line,
           "non-numeric activity value '" + activity + "'"});
      continue;
    }
    AssayRecord record;
    record.source_id = spec.source_id;
    record.smiles = smiles;
    if (spec.kind == SourceSpec::Kind::kAc50Um) {
      if (*value <= 0.0) {
        result.diagnostics.push_back(
            {spec.source_id, line,
             "non-positive AC50 value '" + activity + "'"});
        continue;
      }
      record.ac50_um = *value;
    } else {
      record.pic50 = *value;
    }
    result.records.push_back(std::move(record));
  }
  return result;
}

IngestResult ingest(const std::vector<SourceSpec> &sources) {
  IngestResult all;
  for (const auto &spec : sources) {
    const csv::Table table = csv::read_file(spec.path);
    IngestResult one = ingest_table(spec, table);
    all.records.insert(all.records.end(),
                       std::make_move_iterator(one.records.begin()),
                       std::make_move_iterator(one.records.end()));
    all.diagnostics.insert(all.diagnostics.end(),
                           std::make_move_iterator(one.diagnostics.begin()),
                           std::make_move_iterator(one.diagnostics.end()));
  }
  return all;
}

MergeResult merge_and_dedup(const std::vector<AssayRecord> &records,
                            DedupKey key) {
  struct Group {
    std::vector<double> ac50_values;   // micromolar equivalents
    std::vector<double> native_pic50;  // original pIC50 values, when given
  };
  std::map<std::string, Group> groups;

  MergeResult result;
  for (const AssayRecord &record : records) {
    std::string group_key;
    if (key == DedupKey::kRawText) {
      group_key = record.smiles;
    } else {
      const chem::ParseResult parsed = chem::parse(record.smiles);
      if (!parsed.ok()) {
        result.diagnostics.push_back(
            {record.source_id, 0,
             "invalid SMILES '" + record.smiles + "': " +
                 parsed.first_error()});
        continue;
      }
      group_key = chem::canonicalize(*parsed.graph);
    }
    Group &group = groups[group_key];
    if (record.ac50_um) {
      group.ac50_values.push_back(*record.ac50_um);
    } else {
      group.ac50_values.push_back(from_pic50(*record.pic50));
      group.native_pic50.push_back(*record.pic50);
    }
  }

  for (const auto &[group_key, group] : groups) {
    const std::size_t size = group.ac50_values.size();
    result.n_duplicate_rows += size - 1;

    std::vector<double> distinct = group.ac50_values;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()),
                   distinct.end());
    if (distinct.size() > 1) ++result.n_conflict_groups;

    double pic50 = 0.0;
    if (distinct.size() == 1 && group.native_pic50.size() == size) {
      // All members arrived as identical pIC50 entries; keep the native
      // value instead of a round trip through micromolar space.
      pic50 = group.native_pic50.front();
    } else if (distinct.size() == 1) {
      pic50 = to_pic50(distinct.front());
    } else {
      double sum = 0.0;
      for (double v : group.ac50_values) sum += v;
      pic50 = to_pic50(sum / static_cast<double>(size));
    }
    result.records.push_back({group_key, pic50});
  }
  // std::map iterates keys in byte order, so records are already sorted.
  return result;
}

DatasetSummary summarize(const std::vector<CuratedRecord> &records) {
  if (records.empty()) {
    throw std::invalid_argument("cannot summarize an empty dataset");
  }
  std::vector<double> values;
  values.reserve(records.size());
  for (const auto &record : records) values.push_back(record.pic50);
  std::sort(values.begin(), values.end());

  DatasetSummary s;
  s.n = values.size();
  s.min = values.front();
  s.max = values.back();
  s.median = values[(values.size() - 1) / 2];

  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(s.n);
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.stddev = std::sqrt(ss / static_cast<double>(s.n));

  for (double v : values) {
    if (label_activity(v, kActiveThreshold)) ++s.n_active;
    if (label_activity(v, kPotentThreshold)) ++s.n_potent;
  }
  s.prevalence = static_cast<double>(s.n_active) / static_cast<double>(s.n);

  const long long first_bin = static_cast<long long>(std::floor(s.min / 0.5));
  const long long last_bin = static_cast<long long>(std::floor(s.max / 0.5));
  s.histogram.resize(static_cast<std::size_t>(last_bin - first_bin + 1));
  for (std::size_t b = 0; b < s.histogram.size(); ++b) {
    s.histogram[b].lo = static_cast<double>(first_bin + static_cast<long long>(b)) * 0.5;
    s.histogram[b].hi = s.histogram[b].lo + 0.5;
  }
  for (double v : values) {
    const long long bin = static_cast<long long>(std::floor(v / 0.5));
    ++s.histogram[static_cast<std::size_t>(bin - first_bin)].count;
  }
  return s;
}

void write_dataset_csv(const std::string &path,
                       const std::vector<CuratedRecord> &records) {
  csv::Table table;
  table.header = {"SMILES", "pIC50"};
  table.rows.reserve(records.size());
  for (const auto &record : records) {
    table.rows.push_back({record.smiles, csv::format_double(record.pic50)});
  }
  csv::write_file(path, table);
}

std::vector<CuratedRecord> read_dataset_csv(const std::string &path) {
  const csv::Table table = csv::read_file(path);
  const int smiles_col = table.column("SMILES");
  const int pic50_col = table.column("pIC50");
  if (smiles_col < 0 || pic50_col < 0) {
    throw std::runtime_error(
        "dataset CSV must have SMILES and pIC50 columns: " + path);
  }
  std::vector<CuratedRecord> records;
  records.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto &row = table.rows[r];
    if (row.size() != table.header.size()) {
      throw std::runtime_error(path + ": row " + std::to_string(r + 2) +
                               " has wrong field count");
    }
    const auto value = csv::parse_double(row[static_cast<std::size_t>(pic50_col)]);
    if (!value) {
      throw std::runtime_error(path + ": row " + std::to_string(r + 2) +
                               " has non-numeric pIC50");
    }
    records.push_back({row[static_cast<std::size_t>(smiles_col)], *value});
  }
  return records;
}

}  // namespace chemscreen::curation
