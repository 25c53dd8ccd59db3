//
// Project ChemScreen - Copyright 2026 ChemScreen Developers.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef CHEMSCREEN_MODELS_HPP_
#define CHEMSCREEN_MODELS_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "chemscreen/features.hpp"

namespace chemscreen::models {

// ---------------------------------------------------------------------------
// Losses
// ---------------------------------------------------------------------------

// (1/N) * sum_i w_i (y_i - yhat_i)^2. Throws on length mismatch, empty
// input or non-positive weights.
double weighted_mse(const Eigen::VectorXd &y, const Eigen::VectorXd &yhat,
                    const Eigen::VectorXd &w);

// ---------------------------------------------------------------------------
// Random predictor baseline
// ---------------------------------------------------------------------------

struct RandomPredictorModel {
  double low = 0.0;
  double high = 0.0;
  std::uint64_t seed = 0;
};

// low/high are the observed training-target range. Throws when the range is
// degenerate (low == high).
RandomPredictorModel fit_random(const Eigen::VectorXd &train_targets,
                                std::uint64_t seed);

// n independent seeded uniform draws in [low, high); the same model always
// reproduces the same sequence.
Eigen::VectorXd random_predict(const RandomPredictorModel &model,
                               Eigen::Index n);

std::string random_model_to_json(const RandomPredictorModel &model);
RandomPredictorModel random_model_from_json(const std::string &text);

// ---------------------------------------------------------------------------
// Random forest regressor
// ---------------------------------------------------------------------------

// Flat node: feature < 0 marks a leaf carrying `value`; internal nodes route
// x[feature] <= threshold to `left`, otherwise to `right`.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  double value = 0.0;
  int left = -1;
  int right = -1;

  bool is_leaf() const { return feature < 0; }
};

struct Tree {
  std::vector<TreeNode> nodes;

  double predict_row(const Eigen::MatrixXd &X, Eigen::Index row) const;
  int depth() const;
};

struct ForestConfig {
  int n_estimators = 100;
  int max_depth = 20;
  int min_samples_leaf = 1;
  double features_per_split = 1.0 / 3.0;  // fraction of columns per node
  std::uint64_t seed = 0;
};

// Optional preprocessing captured at fit time so raw feature matrices can be
// replayed through the exact training transform.
struct Preprocess {
  std::vector<std::string> source_columns;
  std::vector<std::string> dropped_columns;
  bool standardized = false;
  features::Scaler scaler;  // over the retained columns, when standardized
};

struct RandomForestModel {
  ForestConfig config;
  std::vector<std::string> feature_schema;  // columns expected by the trees
  std::optional<Preprocess> preprocess;
  std::vector<Tree> trees;
  std::uint64_t train_fingerprint = 0;
};

// Train on a prepared matrix: per-tree seeded bootstrap, seeded feature
// subsets of ceil(features_per_split * n_cols) columns per node, splits by
// weighted-variance reduction with ties broken toward the lowest feature
// index then lowest threshold. Pass w of size 0 for unweighted training.
// Trees train in parallel across n_threads with results identical to
// sequential execution.
RandomForestModel rf_train(const features::FeatureMatrix &X,
                           const Eigen::VectorXd &y, const Eigen::VectorXd &w,
                           const ForestConfig &config, int n_threads = 1);

// Per-row mean of the trees' leaf values. Throws when X's columns do not
// match the model's feature schema.
Eigen::VectorXd rf_predict(const RandomForestModel &model,
                           const features::FeatureMatrix &X);

// Accepts either the trained schema or the raw source columns recorded in
// model.preprocess (which are then dropped/standardized as at fit time).
Eigen::VectorXd rf_predict_preprocessed(const RandomForestModel &model,
                                        const features::FeatureMatrix &X);

// Artifact bytes: magic, format version, JSON header (config, schema,
// preprocessing, fingerprint), little-endian tree payload, FNV-1a checksum.
std::string rf_save(const RandomForestModel &model);
RandomForestModel rf_load(const std::string &bytes);

void rf_save_file(const std::string &path, const RandomForestModel &model);
RandomForestModel rf_load_file(const std::string &path);

}  // namespace chemscreen::models

#endif  // CHEMSCREEN_MODELS_HPP_
