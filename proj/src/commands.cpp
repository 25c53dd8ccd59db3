//
// Project ChemScreen - Copyright 2026 ChemScreen Developers.
// SPDX-License-Identifier: Apache-2.0
//

#include "chemscreen/commands.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "chemscreen/chem.hpp"
#include "chemscreen/csv.hpp"
#include "chemscreen/curation.hpp"
#include "chemscreen/features.hpp"
#include "chemscreen/hash.hpp"
#include "chemscreen/metrics.hpp"
#include "chemscreen/models.hpp"
#include "chemscreen/rng.hpp"
#include "chemscreen/sampling.hpp"
#include "chemscreen/synth.hpp"
#include "chemscreen/tuning.hpp"
#include "chemscreen/version.hpp"

namespace chemscreen::cli {

namespace {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Shared helpers
// ---------------------------------------------------------------------------

json file_entry(const std::string &path) {
  return json{{"path", path}, {"fnv1a64", to_hex(hash_file(path))}};
}

void write_json_file(const std::string &path, const json &doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << doc.dump(2) << "\n";
  if (!out) throw std::runtime_error("write failed: " + path);
}

// Every command that writes outputs records its configuration and the hashes
// of everything it read and wrote, next to its primary output.
void write_provenance(const std::string &primary_output,
                      const std::string &command, const json &config,
                      const std::vector<std::string> &inputs,
                      const std::vector<std::string> &outputs) {
  json doc;
  doc["tool"] = kToolName;
  doc["version"] = kVersion;
  doc["command"] = command;
  doc["config"] = config;
  doc["inputs"] = json::array();
  for (const auto &path : inputs) doc["inputs"].push_back(file_entry(path));
  doc["outputs"] = json::array();
  for (const auto &path : outputs) doc["outputs"].push_back(file_entry(path));
  write_json_file(primary_output + ".provenance.json", doc);
}

sampling::Fractions parse_fractions(const std::string &text) {
  std::vector<double> parts;
  std::stringstream ss(text);
  std::string field;
  while (std::getline(ss, field, ',')) {
    const auto value = csv::parse_double(field);
    if (!value) throw std::runtime_error("bad fraction value: " + field);
    parts.push_back(*value);
  }
  if (parts.size() != 3) {
    throw std::runtime_error("--fractions needs three comma-separated values");
  }
  return {parts[0], parts[1], parts[2]};
}

std::vector<double> parse_percent_list(const std::string &text) {
  std::vector<double> fractions;
  std::stringstream ss(text);
  std::string field;
  while (std::getline(ss, field, ',')) {
    const auto value = csv::parse_double(field);
    if (!value || *value <= 0.0 || *value > 100.0) {
      throw std::runtime_error("bad top-fraction percentage: " + field);
    }
    fractions.push_back(*value / 100.0);
  }
  if (fractions.empty()) throw std::runtime_error("--top-fractions is empty");
  return fractions;
}

std::vector<bool> activity_labels(
    const std::vector<curation::CuratedRecord> &records, double threshold) {
  std::vector<bool> labels(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    labels[i] = curation::label_activity(records[i].pic50, threshold);
  }
  return labels;
}

void require_row_agreement(std::size_t dataset_rows, std::size_t other_rows,
                           const std::string &what) {
  if (dataset_rows != other_rows) {
    throw std::runtime_error(what + " row count (" +
                             std::to_string(other_rows) +
                             ") does not match the dataset (" +
                             std::to_string(dataset_rows) + ")");
  }
}

json summary_to_json(const curation::DatasetSummary &s) {
  json doc;
  doc["n"] = s.n;
  doc["mean"] = s.mean;
  doc["median"] = s.median;
  doc["stddev"] = s.stddev;
  doc["min"] = s.min;
  doc["max"] = s.max;
  doc["n_active"] = s.n_active;
  doc["prevalence"] = s.prevalence;
  doc["n_potent"] = s.n_potent;
  doc["active_threshold"] = curation::kActiveThreshold;
  doc["potent_threshold"] = curation::kPotentThreshold;
  doc["histogram"] = json::array();
  for (const auto &bin : s.histogram) {
    doc["histogram"].push_back(
        {{"lo", bin.lo}, {"hi", bin.hi}, {"count", bin.count}});
  }
  return doc;
}

void set_metric(json &doc, const std::string &name,
                const std::optional<double> &value, const std::string &reason) {
  if (value) {
    doc[name] = *value;
  } else {
    doc[name] = nullptr;
    doc["undefined_reasons"][name] = reason;
  }
}

// Reads a model file that is either a random-forest binary artifact or a
// random-predictor JSON.
struct LoadedModel {
  std::optional<models::RandomForestModel> forest;
  std::optional<models::RandomPredictorModel> random;
};

LoadedModel load_model(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open model: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string bytes = buf.str();
  LoadedModel model;
  if (bytes.rfind("CSRFMDL1", 0) == 0) {
    model.forest = models::rf_load(bytes);
  } else {
    model.random = models::random_model_from_json(bytes);
  }
  return model;
}

struct RowSelection {
  std::vector<int> rows;
  std::string name;  // all | train | val | test
};

RowSelection select_rows(const std::string &rows_arg,
                         const std::string &manifest_path, std::size_t n_rows) {
  RowSelection sel;
  sel.name = rows_arg;
  if (rows_arg == "all") {
    sel.rows.resize(n_rows);
    for (std::size_t i = 0; i < n_rows; ++i) sel.rows[i] = static_cast<int>(i);
    return sel;
  }
  if (manifest_path.empty()) {
    throw std::runtime_error("--rows " + rows_arg + " requires --manifest");
  }
  const auto loaded = sampling::read_manifest_csv(manifest_path);
  require_row_agreement(n_rows, loaded.manifest.assignment.size(), "manifest");
  sel.rows = loaded.manifest.indices(sampling::split_from_string(rows_arg));
  return sel;
}

features::FeatureMatrix subset_rows(const features::FeatureMatrix &m,
                                    const std::vector<int> &rows) {
  features::FeatureMatrix out;
  out.column_names = m.column_names;
  out.standardized = m.standardized;
  out.values.resize(static_cast<Eigen::Index>(rows.size()), m.n_cols());
  out.ids.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.values.row(static_cast<Eigen::Index>(i)) = m.values.row(rows[i]);
    out.ids.push_back(m.ids[static_cast<std::size_t>(rows[i])]);
  }
  return out;
}

int default_threads() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// ---------------------------------------------------------------------------
// curate
// ---------------------------------------------------------------------------

struct CurateOptions {
  std::string sources;
  std::string out;
  std::string summary;
  std::string hist;
  std::string diagnostics;
  std::string dedup_key = "canonical";
};

int cmd_curate(const CurateOptions &opt) {
  const auto specs = curation::load_sources_config(opt.sources);
  const curation::IngestResult ingested = curation::ingest(specs);
  const curation::DedupKey key = opt.dedup_key == "raw"
                                     ? curation::DedupKey::kRawText
                                     : curation::DedupKey::kCanonical;
  const curation::MergeResult merged =
      curation::merge_and_dedup(ingested.records, key);

  const std::string diagnostics_path =
      opt.diagnostics.empty() ? opt.out + ".diagnostics.jsonl" : opt.diagnostics;
  {
    std::ofstream diag(diagnostics_path, std::ios::binary);
    if (!diag) throw std::runtime_error("cannot write " + diagnostics_path);
    for (const auto &d : ingested.diagnostics) {
      diag << json{{"stage", "ingest"},
                   {"source_id", d.source_id},
                   {"line", d.line},
                   {"message", d.message}}
                  .dump()
           << "\n";
    }
    for (const auto &d : merged.diagnostics) {
      diag << json{{"stage", "merge"},
                   {"source_id", d.source_id},
                   {"message", d.message}}
                  .dump()
           << "\n";
    }
  }

  if (merged.records.empty()) {
    std::cerr << "curate: no records survived curation\n";
    return 1;
  }

  curation::write_dataset_csv(opt.out, merged.records);

  const curation::DatasetSummary summary = curation::summarize(merged.records);
  json summary_doc = summary_to_json(summary);
  summary_doc["n_input_records"] = ingested.records.size();
  summary_doc["n_ingest_dropped"] = ingested.diagnostics.size();
  summary_doc["n_unparseable_smiles"] = merged.diagnostics.size();
  summary_doc["n_duplicate_rows"] = merged.n_duplicate_rows;
  summary_doc["n_conflict_groups"] = merged.n_conflict_groups;
  summary_doc["dedup_key"] = opt.dedup_key;
  const std::string summary_path =
      opt.summary.empty() ? opt.out + ".summary.json" : opt.summary;
  write_json_file(summary_path, summary_doc);

  std::vector<std::string> outputs{opt.out, summary_path, diagnostics_path};
  if (!opt.hist.empty()) {
    csv::Table hist;
    hist.header = {"bin_lo", "bin_hi", "count"};
    for (const auto &bin : summary.histogram) {
      hist.rows.push_back({csv::format_double(bin.lo),
                           csv::format_double(bin.hi),
                           std::to_string(bin.count)});
    }
    csv::write_file(opt.hist, hist);
    outputs.push_back(opt.hist);
  }

  std::vector<std::string> inputs{opt.sources};
  for (const auto &spec : specs) inputs.push_back(spec.path);
  write_provenance(opt.out, "curate",
                   json{{"sources", opt.sources},
                        {"out", opt.out},
                        {"dedup_key", opt.dedup_key}},
                   inputs, outputs);

  std::cout << "curate: " << merged.records.size() << " records ("
            << merged.n_duplicate_rows << " duplicate rows, "
            << merged.n_conflict_groups << " conflicting groups, "
            << ingested.diagnostics.size() << " rows dropped at ingest)\n";
  return 0;
}

// ---------------------------------------------------------------------------
// split
// ---------------------------------------------------------------------------

struct SplitOptions {
  std::string dataset;
  std::string out;
  std::uint64_t seed = 0;
  std::string fractions = "0.7,0.15,0.15";
  double threshold = 6.0;
  std::string weighting = "none";
};

int cmd_split(const SplitOptions &opt) {
  const auto records = curation::read_dataset_csv(opt.dataset);
  const auto labels = activity_labels(records, opt.threshold);
  const sampling::Fractions fractions = parse_fractions(opt.fractions);

  const sampling::SplitManifest manifest =
      sampling::stratified_split(labels, fractions, opt.seed, opt.threshold);

  Eigen::VectorXd train_weights;
  if (opt.weighting == "sample-weight") {
    const std::vector<int> train = manifest.indices(sampling::Split::kTrain);
    std::vector<bool> train_labels(train.size());
    for (std::size_t i = 0; i < train.size(); ++i) {
      train_labels[i] = labels[static_cast<std::size_t>(train[i])];
    }
    train_weights = sampling::compute_weights(train_labels);
  }
  sampling::write_manifest_csv(opt.out, manifest,
                               train_weights.size() > 0 ? &train_weights
                                                        : nullptr);

  std::vector<std::string> outputs{opt.out};
  std::string oversample_path;
  if (opt.weighting == "oversample") {
    const std::vector<int> train = manifest.indices(sampling::Split::kTrain);
    const std::vector<int> resampled =
        sampling::oversample_to_balance(train, labels, derive_seed(opt.seed, 1));
    oversample_path = opt.out + ".oversample.csv";
    csv::Table table;
    table.header = {"row_id"};
    for (int idx : resampled) table.rows.push_back({std::to_string(idx)});
    csv::write_file(oversample_path, table);
    outputs.push_back(oversample_path);
  }

  // Sidecar: seed, fractions and per-split audit counts.
  json sidecar;
  sidecar["seed"] = opt.seed;
  sidecar["fractions"] = {fractions.train, fractions.val, fractions.test};
  sidecar["stratify_threshold"] = opt.threshold;
  sidecar["weighting"] = opt.weighting;
  sidecar["n"] = records.size();
  for (const auto split :
       {sampling::Split::kTrain, sampling::Split::kVal, sampling::Split::kTest}) {
    const auto idx = manifest.indices(split);
    std::size_t actives = 0;
    for (int i : idx) {
      if (labels[static_cast<std::size_t>(i)]) ++actives;
    }
    sidecar["splits"][sampling::to_string(split)] = {
        {"n", idx.size()},
        {"n_active", actives},
        {"prevalence", idx.empty() ? 0.0
                                   : static_cast<double>(actives) /
                                         static_cast<double>(idx.size())}};
  }
  if (!oversample_path.empty()) sidecar["oversample_file"] = oversample_path;
  const std::string sidecar_path = opt.out + ".json";
  write_json_file(sidecar_path, sidecar);
  outputs.push_back(sidecar_path);

  write_provenance(opt.out, "split",
                   json{{"dataset", opt.dataset},
                        {"out", opt.out},
                        {"seed", opt.seed},
                        {"fractions", opt.fractions},
                        {"threshold", opt.threshold},
                        {"weighting", opt.weighting}},
                   {opt.dataset}, outputs);
  std::cout << "split: " << records.size() << " records -> "
            << manifest.indices(sampling::Split::kTrain).size() << " train / "
            << manifest.indices(sampling::Split::kVal).size() << " val / "
            << manifest.indices(sampling::Split::kTest).size() << " test\n";
  return 0;
}

// ---------------------------------------------------------------------------
// featurize
// ---------------------------------------------------------------------------

struct FeaturizeOptions {
  std::string dataset;
  std::string out;
  std::string mode = "fingerprints";
  int radius = 2;
  int width = 2048;
  int threads = 0;
};

int cmd_featurize(const FeaturizeOptions &opt) {
  const auto records = curation::read_dataset_csv(opt.dataset);
  std::vector<std::string> ids;
  std::vector<chem::MoleculeGraph> mols;
  ids.reserve(records.size());
  mols.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    chem::ParseResult parsed = chem::parse(records[i].smiles);
    if (!parsed.ok()) {
      throw std::runtime_error("dataset row " + std::to_string(i + 2) +
                               ": invalid SMILES '" + records[i].smiles +
                               "': " + parsed.first_error());
    }
    ids.push_back(records[i].smiles);
    mols.push_back(std::move(*parsed.graph));
  }

  const int threads = opt.threads > 0 ? opt.threads : default_threads();
  const features::FeatureMatrix m = features::build_feature_matrix(
      ids, mols, features::feature_mode_from_string(opt.mode), opt.radius,
      opt.width, threads);
  features::write_csv(opt.out, m);

  write_provenance(opt.out, "featurize",
                   json{{"dataset", opt.dataset},
                        {"out", opt.out},
                        {"feature_mode", opt.mode},
                        {"radius", opt.radius},
                        {"width", opt.width}},
                   {opt.dataset}, {opt.out});
  std::cout << "featurize: " << m.n_rows() << " rows x " << m.n_cols()
            << " columns (" << opt.mode << ")\n";
  return 0;
}

// ---------------------------------------------------------------------------
// train-rf / train-random
// ---------------------------------------------------------------------------

struct TrainRfOptions {
  std::string features;
  std::string dataset;
  std::string manifest;
  std::string oversample;
  std::string out;
  std::uint64_t seed = 0;
  int trees = 100;
  int max_depth = 20;
  int min_samples_leaf = 1;
  double features_per_split = 1.0 / 3.0;
  bool standardize = true;
  int threads = 0;
  double threshold = 6.0;
};

struct TrainData {
  features::FeatureMatrix X;  // training rows, raw columns
  Eigen::VectorXd y;
  Eigen::VectorXd w;
  std::vector<std::string> source_columns;
};

TrainData load_training_rows(const std::string &features_path,
                             const std::string &dataset_path,
                             const std::string &manifest_path,
                             const std::string &oversample_path) {
  const features::FeatureMatrix X_all = features::read_csv(features_path);
  const auto records = curation::read_dataset_csv(dataset_path);
  require_row_agreement(records.size(),
                        static_cast<std::size_t>(X_all.n_rows()), "features");
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (X_all.ids[i] != records[i].smiles) {
      throw std::runtime_error("features row " + std::to_string(i + 2) +
                               " id does not match the dataset SMILES");
    }
  }
  const auto loaded = sampling::read_manifest_csv(manifest_path);
  require_row_agreement(records.size(), loaded.manifest.assignment.size(),
                        "manifest");

  std::vector<int> train_rows;
  Eigen::VectorXd weights;
  if (!oversample_path.empty()) {
    const csv::Table table = csv::read_file(oversample_path);
    if (table.column("row_id") != 0) {
      throw std::runtime_error("oversample file must have a row_id column");
    }
    for (const auto &row : table.rows) {
      const auto idx = csv::parse_int(row[0]);
      if (!idx || *idx < 0 ||
          static_cast<std::size_t>(*idx) >= records.size()) {
        throw std::runtime_error("oversample row_id out of range");
      }
      if (loaded.manifest.assignment[static_cast<std::size_t>(*idx)] !=
          sampling::Split::kTrain) {
        throw std::runtime_error(
            "oversample file references a non-train row: " + row[0]);
      }
      train_rows.push_back(static_cast<int>(*idx));
    }
    weights = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(train_rows.size()));
  } else {
    train_rows = loaded.manifest.indices(sampling::Split::kTrain);
    if (loaded.train_weights.size() > 0) {
      weights = loaded.train_weights;
    } else {
      weights =
          Eigen::VectorXd::Ones(static_cast<Eigen::Index>(train_rows.size()));
    }
  }

  TrainData data;
  data.source_columns = X_all.column_names;
  data.X = subset_rows(X_all, train_rows);
  data.y.resize(static_cast<Eigen::Index>(train_rows.size()));
  for (std::size_t i = 0; i < train_rows.size(); ++i) {
    data.y(static_cast<Eigen::Index>(i)) =
        records[static_cast<std::size_t>(train_rows[i])].pic50;
  }
  data.w = std::move(weights);
  return data;
}

models::RandomForestModel train_forest(const TrainData &data,
                                       const models::ForestConfig &config,
                                       bool standardize, int threads) {
  auto [X_kept, dropped] = features::drop_zero_variance(
      data.X, [&] {
        std::vector<int> all(static_cast<std::size_t>(data.X.n_rows()));
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
        return all;
      }());

  models::Preprocess prep;
  prep.source_columns = data.source_columns;
  prep.dropped_columns = dropped;
  prep.standardized = standardize;

  features::FeatureMatrix X_final = std::move(X_kept);
  if (standardize) {
    std::vector<int> all(static_cast<std::size_t>(X_final.n_rows()));
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
    X_final = features::standardize(X_final, all);
    prep.scaler = *X_final.scaler;
  }

  models::RandomForestModel model =
      models::rf_train(X_final, data.y, data.w, config, threads);
  model.preprocess = std::move(prep);
  return model;
}

int cmd_train_rf(const TrainRfOptions &opt) {
  const TrainData data = load_training_rows(opt.features, opt.dataset,
                                            opt.manifest, opt.oversample);
  models::ForestConfig config;
  config.n_estimators = opt.trees;
  config.max_depth = opt.max_depth;
  config.min_samples_leaf = opt.min_samples_leaf;
  config.features_per_split = opt.features_per_split;
  config.seed = opt.seed;

  const int threads = opt.threads > 0 ? opt.threads : default_threads();
  const models::RandomForestModel model =
      train_forest(data, config, opt.standardize, threads);
  models::rf_save_file(opt.out, model);

  std::vector<std::string> inputs{opt.features, opt.dataset, opt.manifest};
  if (!opt.oversample.empty()) inputs.push_back(opt.oversample);
  write_provenance(opt.out, "train-rf",
                   json{{"features", opt.features},
                        {"dataset", opt.dataset},
                        {"manifest", opt.manifest},
                        {"oversample", opt.oversample},
                        {"out", opt.out},
                        {"seed", opt.seed},
                        {"trees", opt.trees},
                        {"max_depth", opt.max_depth},
                        {"min_samples_leaf", opt.min_samples_leaf},
                        {"features_per_split", opt.features_per_split},
                        {"standardize", opt.standardize}},
                   inputs, {opt.out});
  std::cout << "train-rf: " << model.trees.size() << " trees on "
            << data.X.n_rows() << " rows, "
            << model.feature_schema.size() << " features ("
            << model.preprocess->dropped_columns.size()
            << " zero-variance columns dropped)\n";
  return 0;
}

struct TrainRandomOptions {
  std::string dataset;
  std::string manifest;
  std::string out;
  std::uint64_t seed = 0;
};

int cmd_train_random(const TrainRandomOptions &opt) {
  const auto records = curation::read_dataset_csv(opt.dataset);
  const auto loaded = sampling::read_manifest_csv(opt.manifest);
  require_row_agreement(records.size(), loaded.manifest.assignment.size(),
                        "manifest");
  const auto train = loaded.manifest.indices(sampling::Split::kTrain);
  Eigen::VectorXd targets(static_cast<Eigen::Index>(train.size()));
  for (std::size_t i = 0; i < train.size(); ++i) {
    targets(static_cast<Eigen::Index>(i)) =
        records[static_cast<std::size_t>(train[i])].pic50;
  }
  const models::RandomPredictorModel model =
      models::fit_random(targets, opt.seed);
  {
    std::ofstream out(opt.out, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + opt.out);
    out << models::random_model_to_json(model);
  }
  write_provenance(opt.out, "train-random",
                   json{{"dataset", opt.dataset},
                        {"manifest", opt.manifest},
                        {"out", opt.out},
                        {"seed", opt.seed}},
                   {opt.dataset, opt.manifest}, {opt.out});
  std::cout << "train-random: range [" << model.low << ", " << model.high
            << "]\n";
  return 0;
}

// ---------------------------------------------------------------------------
// predict
// ---------------------------------------------------------------------------

struct PredictOptions {
  std::string model;
  std::string features;
  std::string out;
  std::string rows = "all";
  std::string manifest;
};

int cmd_predict(const PredictOptions &opt) {
  const features::FeatureMatrix X_all = features::read_csv(opt.features);
  const RowSelection sel = select_rows(
      opt.rows, opt.manifest, static_cast<std::size_t>(X_all.n_rows()));
  const features::FeatureMatrix X = subset_rows(X_all, sel.rows);

  const LoadedModel model = load_model(opt.model);
  Eigen::VectorXd preds;
  if (model.forest) {
    preds = models::rf_predict_preprocessed(*model.forest, X);
  } else {
    preds = models::random_predict(*model.random, X.n_rows());
  }

  csv::Table table;
  table.header = {"SMILES", "pred_pIC50"};
  table.rows.reserve(static_cast<std::size_t>(preds.size()));
  for (Eigen::Index i = 0; i < preds.size(); ++i) {
    table.rows.push_back(
        {X.ids[static_cast<std::size_t>(i)], csv::format_double(preds(i))});
  }
  csv::write_file(opt.out, table);

  std::vector<std::string> inputs{opt.model, opt.features};
  if (!opt.manifest.empty()) inputs.push_back(opt.manifest);
  write_provenance(opt.out, "predict",
                   json{{"model", opt.model},
                        {"features", opt.features},
                        {"out", opt.out},
                        {"rows", opt.rows},
                        {"manifest", opt.manifest}},
                   inputs, {opt.out});
  std::cout << "predict: " << preds.size() << " rows (" << sel.name << ")\n";
  return 0;
}

// ---------------------------------------------------------------------------
// evaluate
// ---------------------------------------------------------------------------

struct EvaluateOptions {
  std::string pred;
  std::string truth;
  std::string out;
  std::string curve;
  double threshold = 6.0;
  std::string top_fractions = "0.5,1,2,5";
};

std::vector<metrics::PredictionRecord> load_prediction_records(
    const EvaluateOptions &opt) {
  const csv::Table table = csv::read_file(opt.pred);
  std::vector<metrics::PredictionRecord> records;

  const int id_col = table.column("id");
  const int ytrue_col = table.column("y_true");
  const int ypred_col = table.column("y_pred");
  if (id_col >= 0 && ytrue_col >= 0 && ypred_col >= 0) {
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      const auto &row = table.rows[r];
      const auto yt = csv::parse_double(row[static_cast<std::size_t>(ytrue_col)]);
      const auto yp = csv::parse_double(row[static_cast<std::size_t>(ypred_col)]);
      if (!yt || !yp) {
        throw std::runtime_error(opt.pred + ": row " + std::to_string(r + 2) +
                                 " has non-numeric values");
      }
      records.push_back({row[static_cast<std::size_t>(id_col)], *yt, *yp,
                         curation::label_activity(*yt, opt.threshold)});
    }
    return records;
  }

  const int smiles_col = table.column("SMILES");
  const int pred_col = table.column("pred_pIC50");
  if (smiles_col < 0 || pred_col < 0) {
    throw std::runtime_error(
        opt.pred +
        ": predictions need either id,y_true,y_pred or SMILES,pred_pIC50");
  }
  if (opt.truth.empty()) {
    throw std::runtime_error(
        "SMILES,pred_pIC50 predictions require --truth to join against");
  }
  const auto truth_records = curation::read_dataset_csv(opt.truth);
  std::map<std::string, double> truth;
  for (const auto &record : truth_records) {
    if (!truth.emplace(record.smiles, record.pic50).second) {
      throw std::runtime_error("duplicate SMILES in truth file: " +
                               record.smiles);
    }
  }
  std::map<std::string, int> seen;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto &row = table.rows[r];
    const std::string &smiles = row[static_cast<std::size_t>(smiles_col)];
    const auto yp = csv::parse_double(row[static_cast<std::size_t>(pred_col)]);
    if (!yp) {
      throw std::runtime_error(opt.pred + ": row " + std::to_string(r + 2) +
                               " has a non-numeric prediction");
    }
    const auto it = truth.find(smiles);
    if (it == truth.end()) {
      throw std::runtime_error(opt.pred + ": row " + std::to_string(r + 2) +
                               ": prediction id not found in truth: " + smiles);
    }
    if (++seen[smiles] > 1) {
      throw std::runtime_error(opt.pred + ": row " + std::to_string(r + 2) +
                               ": duplicate prediction id: " + smiles);
    }
    records.push_back({smiles, it->second, *yp,
                       curation::label_activity(it->second, opt.threshold)});
  }
  return records;
}

json report_to_json(const metrics::MetricsReport &report) {
  json doc;
  doc["n"] = report.n;
  doc["n_active"] = report.n_active;
  doc["prevalence"] = report.prevalence;
  doc["mse"] = report.mse;
  doc["mae"] = report.mae;
  set_metric(doc, "r2", report.r2, "zero variance in y_true");
  set_metric(doc, "active_mae", report.active_mae, "no active records");
  set_metric(doc, "auc_roc", report.auc_roc, "single-class input");
  set_metric(doc, "ranking_differential", report.ranking_differential,
             "single-class input");
  doc["tie_policy"] = report.tie_policy;
  doc["top_fractions"] = json::array();
  for (std::size_t i = 0; i < report.fractions.size(); ++i) {
    json entry;
    entry["fraction"] = report.fractions[i];
    entry["k"] = report.top_k_counts[i];
    entry["precision"] = report.precision[i];
    if (report.ef[i]) {
      entry["ef"] = *report.ef[i];
    } else {
      entry["ef"] = nullptr;
      entry["ef_undefined_reason"] = "no active records";
    }
    doc["top_fractions"].push_back(std::move(entry));
  }
  return doc;
}

int cmd_evaluate(const EvaluateOptions &opt) {
  const auto records = load_prediction_records(opt);
  if (records.empty()) throw std::runtime_error("no prediction records");
  const auto fractions = parse_percent_list(opt.top_fractions);
  const metrics::MetricsReport report = metrics::compute_report(records, fractions);

  json doc = report_to_json(report);
  doc["threshold"] = opt.threshold;
  doc["inputs"]["predictions"] = file_entry(opt.pred);
  if (!opt.truth.empty()) doc["inputs"]["truth"] = file_entry(opt.truth);
  write_json_file(opt.out, doc);

  std::vector<std::string> outputs{opt.out};
  if (!opt.curve.empty()) {
    csv::Table curve;
    curve.header = {"fraction", "k", "precision", "ef"};
    for (std::size_t i = 0; i < report.fractions.size(); ++i) {
      curve.rows.push_back(
          {csv::format_double(report.fractions[i]),
           std::to_string(report.top_k_counts[i]),
           csv::format_double(report.precision[i]),
           report.ef[i] ? csv::format_double(*report.ef[i]) : ""});
    }
    csv::write_file(opt.curve, curve);
    outputs.push_back(opt.curve);
  }

  std::vector<std::string> inputs{opt.pred};
  if (!opt.truth.empty()) inputs.push_back(opt.truth);
  write_provenance(opt.out, "evaluate",
                   json{{"pred", opt.pred},
                        {"truth", opt.truth},
                        {"out", opt.out},
                        {"threshold", opt.threshold},
                        {"top_fractions", opt.top_fractions}},
                   inputs, outputs);

  std::cout << "evaluate: n=" << report.n << " prevalence="
            << report.prevalence;
  if (report.auc_roc) std::cout << " auc=" << *report.auc_roc;
  for (std::size_t i = 0; i < report.fractions.size(); ++i) {
    if (report.ef[i]) {
      std::cout << " ef@" << report.fractions[i] * 100.0 << "%="
                << *report.ef[i];
    }
  }
  std::cout << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// tune
// ---------------------------------------------------------------------------

struct TuneOptions {
  std::string features;
  std::string dataset;
  std::string manifest;
  std::string out;
  std::string log;
  int budget = 20;
  std::uint64_t seed = 0;
  double threshold = 6.0;
  bool standardize = true;
  int threads = 0;
};

int cmd_tune(const TuneOptions &opt) {
  const features::FeatureMatrix X_all = features::read_csv(opt.features);
  const auto records = curation::read_dataset_csv(opt.dataset);
  require_row_agreement(records.size(),
                        static_cast<std::size_t>(X_all.n_rows()), "features");
  const auto loaded = sampling::read_manifest_csv(opt.manifest);
  require_row_agreement(records.size(), loaded.manifest.assignment.size(),
                        "manifest");

  const TrainData data = load_training_rows(opt.features, opt.dataset,
                                            opt.manifest, "");
  const auto val_rows = loaded.manifest.indices(sampling::Split::kVal);
  if (val_rows.empty()) {
    throw std::runtime_error("tune: manifest has an empty validation split");
  }
  const features::FeatureMatrix X_val = subset_rows(X_all, val_rows);
  const int threads = opt.threads > 0 ? opt.threads : default_threads();

  // Objective: validation-set Active MAE of a forest trained with the
  // sampled configuration.
  const tuning::Objective objective =
      [&](const tuning::ParamSet &params) -> std::optional<double> {
    models::ForestConfig config;
    config.n_estimators = static_cast<int>(
        std::get<long long>(params.at("n_estimators")));
    config.max_depth =
        static_cast<int>(std::get<long long>(params.at("max_depth")));
    config.features_per_split =
        std::stod(std::get<std::string>(params.at("features_per_split")));
    config.seed = opt.seed;

    const models::RandomForestModel model =
        train_forest(data, config, opt.standardize, threads);
    const Eigen::VectorXd preds =
        models::rf_predict_preprocessed(model, X_val);

    std::vector<metrics::PredictionRecord> val_records;
    val_records.reserve(val_rows.size());
    for (std::size_t i = 0; i < val_rows.size(); ++i) {
      const auto &record = records[static_cast<std::size_t>(val_rows[i])];
      val_records.push_back(
          {record.smiles, record.pic50, preds(static_cast<Eigen::Index>(i)),
           curation::label_activity(record.pic50, opt.threshold)});
    }
    const auto mae = metrics::active_mae(val_records);
    if (!mae) return std::nullopt;  // no actives in validation
    return *mae;
  };

  const tuning::StudyResult study =
      tuning::random_search(tuning::builtin_rf_space(), opt.budget, objective,
                            opt.seed);

  // JSONL log carries wall-clock durations; the study JSON is the replayable
  // output and omits them.
  const std::string log_path = opt.log.empty() ? opt.out + ".jsonl" : opt.log;
  {
    std::ofstream log(log_path, std::ios::binary);
    if (!log) throw std::runtime_error("cannot write " + log_path);
    for (const auto &trial : study.trials) {
      json line;
      line["trial"] = trial.index;
      for (const auto &[name, value] : trial.params) {
        line["params"][name] = tuning::param_value_to_string(value);
      }
      if (trial.objective) {
        line["objective"] = *trial.objective;
      } else {
        line["objective"] = nullptr;
        line["failure"] = trial.failure;
      }
      line["duration_seconds"] = trial.duration_seconds;
      log << line.dump() << "\n";
    }
  }

  json doc;
  doc["seed"] = study.seed;
  doc["budget"] = opt.budget;
  doc["objective"] = "validation_active_mae";
  doc["best_trial"] = study.best_trial;
  const auto &best = study.trials[static_cast<std::size_t>(study.best_trial)];
  doc["best_objective"] = *best.objective;
  for (const auto &[name, value] : best.params) {
    doc["best_params"][name] = tuning::param_value_to_string(value);
  }
  doc["trials"] = json::array();
  for (const auto &trial : study.trials) {
    json entry;
    entry["index"] = trial.index;
    for (const auto &[name, value] : trial.params) {
      entry["params"][name] = tuning::param_value_to_string(value);
    }
    if (trial.objective) {
      entry["objective"] = *trial.objective;
    } else {
      entry["objective"] = nullptr;
      entry["failure"] = trial.failure;
    }
    doc["trials"].push_back(std::move(entry));
  }
  write_json_file(opt.out, doc);

  write_provenance(opt.out, "tune",
                   json{{"features", opt.features},
                        {"dataset", opt.dataset},
                        {"manifest", opt.manifest},
                        {"out", opt.out},
                        {"budget", opt.budget},
                        {"seed", opt.seed},
                        {"threshold", opt.threshold},
                        {"standardize", opt.standardize}},
                   {opt.features, opt.dataset, opt.manifest},
                   {opt.out, log_path});
  std::cout << "tune: best trial " << study.best_trial << " objective "
            << *best.objective << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// synth-bench
// ---------------------------------------------------------------------------

struct SynthOptions {
  std::size_t n = 10000;
  double prevalence = 0.021;
  double effect = 2.0;
  double noise = 0.2;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_synth_bench(const SynthOptions &opt) {
  synth::BenchSpec spec;
  spec.n_compounds = opt.n;
  spec.prevalence = opt.prevalence;
  spec.effect = opt.effect;
  spec.noise = opt.noise;
  spec.seed = opt.seed;
  const auto records = synth::generate(spec);
  synth::write_csv(opt.out, records);

  std::size_t n_motif = 0;
  for (const auto &record : records) {
    if (record.has_motif) ++n_motif;
  }
  write_provenance(opt.out, "synth-bench",
                   json{{"n", opt.n},
                        {"prevalence", opt.prevalence},
                        {"effect", opt.effect},
                        {"noise", opt.noise},
                        {"seed", opt.seed},
                        {"out", opt.out}},
                   {}, {opt.out});
  std::cout << "synth-bench: " << records.size() << " molecules, " << n_motif
            << " with motif " << synth::active_motif() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

int cmd_verify(const std::string &provenance_path) {
  std::ifstream in(provenance_path);
  if (!in) throw std::runtime_error("cannot open " + provenance_path);
  json doc;
  in >> doc;

  int mismatches = 0;
  auto check = [&mismatches](const json &entries, const char *kind) {
    for (const auto &entry : entries) {
      const std::string path = entry.at("path").get<std::string>();
      const std::string recorded = entry.at("fnv1a64").get<std::string>();
      std::string actual;
      try {
        actual = to_hex(hash_file(path));
      } catch (const std::exception &) {
        std::cout << "MISSING " << kind << " " << path << "\n";
        ++mismatches;
        continue;
      }
      if (actual == recorded) {
        std::cout << "OK      " << kind << " " << path << "\n";
      } else {
        std::cout << "CHANGED " << kind << " " << path << "\n";
        ++mismatches;
      }
    }
  };
  check(doc.at("inputs"), "input ");
  check(doc.at("outputs"), "output");
  if (mismatches > 0) {
    std::cerr << "verify: " << mismatches << " file(s) differ from provenance\n";
    return 1;
  }
  std::cout << "verify: all hashes match\n";
  return 0;
}

}  // namespace

// ---------------------------------------------------------------------------
// Argument wiring
// ---------------------------------------------------------------------------

int run(int argc, const char *const *argv) {
  CLI::App app{"TDP1 virtual-screening toolkit: curation, splitting, "
               "fingerprints, baseline models and screening metrics"};
  app.set_version_flag("--version", std::string(kToolName) + " " + kVersion);
  app.require_subcommand(1);

  CurateOptions curate;
  auto *curate_cmd = app.add_subcommand(
      "curate", "Ingest assay sources, dedup, emit SMILES,pIC50 dataset");
  curate_cmd->add_option("--sources", curate.sources, "Sources config JSON")
      ->required();
  curate_cmd->add_option("--out", curate.out, "Curated dataset CSV")->required();
  curate_cmd->add_option("--summary", curate.summary, "Summary JSON path");
  curate_cmd->add_option("--hist", curate.hist, "Histogram CSV path");
  curate_cmd->add_option("--diagnostics", curate.diagnostics,
                         "Diagnostics JSONL path");
  curate_cmd
      ->add_option("--dedup-key", curate.dedup_key, "canonical or raw")
      ->check(CLI::IsMember({"canonical", "raw"}));

  SplitOptions split;
  auto *split_cmd =
      app.add_subcommand("split", "Stratified train/val/test manifest");
  split_cmd->add_option("--dataset", split.dataset, "Curated dataset CSV")
      ->required();
  split_cmd->add_option("--out", split.out, "Manifest CSV")->required();
  split_cmd->add_option("--seed", split.seed, "RNG seed")->required();
  split_cmd->add_option("--fractions", split.fractions,
                        "train,val,test fractions");
  split_cmd->add_option("--threshold", split.threshold, "Activity threshold");
  split_cmd
      ->add_option("--weighting", split.weighting,
                   "none, sample-weight or oversample")
      ->check(CLI::IsMember({"none", "sample-weight", "oversample"}));

  FeaturizeOptions featurize;
  auto *feat_cmd =
      app.add_subcommand("featurize", "Fingerprints/descriptors matrix");
  feat_cmd->add_option("--dataset", featurize.dataset, "Curated dataset CSV")
      ->required();
  feat_cmd->add_option("--out", featurize.out, "Feature matrix CSV")->required();
  feat_cmd
      ->add_option("--feature-mode", featurize.mode,
                   "fingerprints, descriptors or both")
      ->check(CLI::IsMember({"fingerprints", "descriptors", "both"}));
  feat_cmd->add_option("--radius", featurize.radius, "Morgan radius");
  feat_cmd->add_option("--width", featurize.width, "Fingerprint width");
  feat_cmd->add_option("--threads", featurize.threads, "Worker threads");

  TrainRfOptions train_rf;
  auto *rf_cmd = app.add_subcommand("train-rf", "Random-forest regressor");
  rf_cmd->add_option("--features", train_rf.features, "Feature matrix CSV")
      ->required();
  rf_cmd->add_option("--dataset", train_rf.dataset, "Curated dataset CSV")
      ->required();
  rf_cmd->add_option("--manifest", train_rf.manifest, "Split manifest CSV")
      ->required();
  rf_cmd->add_option("--oversample", train_rf.oversample,
                     "Oversampled train row_id CSV");
  rf_cmd->add_option("--out", train_rf.out, "Model artifact path")->required();
  rf_cmd->add_option("--seed", train_rf.seed, "RNG seed")->required();
  rf_cmd->add_option("--trees", train_rf.trees, "Number of trees");
  rf_cmd->add_option("--max-depth", train_rf.max_depth, "Maximum tree depth");
  rf_cmd->add_option("--min-samples-leaf", train_rf.min_samples_leaf,
                     "Minimum samples per leaf");
  rf_cmd->add_option("--features-per-split", train_rf.features_per_split,
                     "Fraction of features scanned per node");
  rf_cmd->add_flag("--standardize,!--no-standardize", train_rf.standardize,
                   "Drop zero-variance columns and z-score (default on)");
  rf_cmd->add_option("--threads", train_rf.threads, "Worker threads");

  TrainRandomOptions train_random;
  auto *rand_cmd =
      app.add_subcommand("train-random", "Uniform random baseline");
  rand_cmd->add_option("--dataset", train_random.dataset, "Curated dataset CSV")
      ->required();
  rand_cmd->add_option("--manifest", train_random.manifest, "Split manifest")
      ->required();
  rand_cmd->add_option("--out", train_random.out, "Model JSON path")->required();
  rand_cmd->add_option("--seed", train_random.seed, "RNG seed")->required();

  PredictOptions predict;
  auto *predict_cmd = app.add_subcommand("predict", "Apply a trained model");
  predict_cmd->add_option("--model", predict.model, "Model artifact")->required();
  predict_cmd->add_option("--features", predict.features, "Feature matrix CSV")
      ->required();
  predict_cmd->add_option("--out", predict.out, "Predictions CSV")->required();
  predict_cmd
      ->add_option("--rows", predict.rows, "all, train, val or test")
      ->check(CLI::IsMember({"all", "train", "val", "test"}));
  predict_cmd->add_option("--manifest", predict.manifest,
                          "Split manifest (required unless --rows all)");

  EvaluateOptions evaluate;
  auto *eval_cmd = app.add_subcommand(
      "evaluate", "Score predictions (internal or external) against truth");
  eval_cmd->add_option("--pred", evaluate.pred, "Predictions CSV")->required();
  eval_cmd->add_option("--truth", evaluate.truth,
                       "Curated dataset CSV to join SMILES predictions");
  eval_cmd->add_option("--out", evaluate.out, "Metrics report JSON")->required();
  eval_cmd->add_option("--curve", evaluate.curve, "EF-vs-fraction CSV");
  eval_cmd->add_option("--threshold", evaluate.threshold, "Activity threshold");
  eval_cmd->add_option("--top-fractions", evaluate.top_fractions,
                       "Percent list, e.g. 0.5,1,2,5");

  TuneOptions tune;
  auto *tune_cmd = app.add_subcommand(
      "tune", "Random search over forest hyperparameters (min Active MAE)");
  tune_cmd->add_option("--features", tune.features, "Feature matrix CSV")
      ->required();
  tune_cmd->add_option("--dataset", tune.dataset, "Curated dataset CSV")
      ->required();
  tune_cmd->add_option("--manifest", tune.manifest, "Split manifest CSV")
      ->required();
  tune_cmd->add_option("--out", tune.out, "Study result JSON")->required();
  tune_cmd->add_option("--log", tune.log, "Trial log JSONL");
  tune_cmd->add_option("--budget", tune.budget, "Trial count");
  tune_cmd->add_option("--seed", tune.seed, "RNG seed")->required();
  tune_cmd->add_option("--threshold", tune.threshold, "Activity threshold");
  tune_cmd->add_flag("--standardize,!--no-standardize", tune.standardize,
                     "Standardize features before each fit");
  tune_cmd->add_option("--threads", tune.threads, "Worker threads");

  SynthOptions synth_opt;
  auto *synth_cmd = app.add_subcommand(
      "synth-bench", "Generate a motif-driven synthetic benchmark");
  synth_cmd->add_option("--n", synth_opt.n, "Number of molecules")->required();
  synth_cmd->add_option("--prevalence", synth_opt.prevalence,
                        "Motif prevalence");
  synth_cmd->add_option("--effect", synth_opt.effect, "Motif pIC50 shift");
  synth_cmd->add_option("--noise", synth_opt.noise, "Gaussian noise stddev");
  synth_cmd->add_option("--seed", synth_opt.seed, "RNG seed")->required();
  synth_cmd->add_option("--out", synth_opt.out, "Output CSV")->required();

  std::string provenance_path;
  auto *verify_cmd =
      app.add_subcommand("verify", "Re-hash files recorded in a provenance JSON");
  verify_cmd->add_option("--provenance", provenance_path, "Provenance JSON")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    return app.exit(e);
  }

  try {
    if (curate_cmd->parsed()) return cmd_curate(curate);
    if (split_cmd->parsed()) return cmd_split(split);
    if (feat_cmd->parsed()) return cmd_featurize(featurize);
    if (rf_cmd->parsed()) return cmd_train_rf(train_rf);
    if (rand_cmd->parsed()) return cmd_train_random(train_random);
    if (predict_cmd->parsed()) return cmd_predict(predict);
    if (eval_cmd->parsed()) return cmd_evaluate(evaluate);
    if (tune_cmd->parsed()) return cmd_tune(tune);
    if (synth_cmd->parsed()) return cmd_synth_bench(synth_opt);
    if (verify_cmd->parsed()) return cmd_verify(provenance_path);
  } catch (const std::exception &e) {
    std::cerr << kToolName << ": " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace chemscreen::cli
