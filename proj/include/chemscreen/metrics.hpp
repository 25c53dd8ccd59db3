//
// Project ChemScreen - Copyright 2026 ChemScreen Developers.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef CHEMSCREEN_METRICS_HPP_
#define CHEMSCREEN_METRICS_HPP_

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace chemscreen::metrics {

inline constexpr const char *kTiePolicy = "desc_pred_then_id_asc";

struct PredictionRecord {
  std::string id;  // canonical SMILES or row id
  double y_true = 0.0;
  double y_pred = 0.0;
  bool active = false;
};

// Deterministic total order: descending y_pred, ties by ascending id.
std::vector<PredictionRecord> rank(std::vector<PredictionRecord> records);

// Top-K cutoff: K = max(1, round(x * n)) with round-half-away-from-zero.
std::size_t top_k(std::size_t n, double fraction);

// Fraction of actives among the top-K ranked predictions.
double precision_at(const std::vector<PredictionRecord> &records,
                    double fraction);

// EF@x = Precision@x / prevalence (the two are computed through the same
// identity, so the ratio holds exactly). Empty when the set has no actives.
std::optional<double> enrichment_factor(
    const std::vector<PredictionRecord> &records, double fraction);

double enrichment_from_precision(double precision, double prevalence);

// Rank-based (Mann-Whitney) AUC with midranks for tied scores; equals
// exhaustive pair counting exactly. Empty for single-class input.
std::optional<double> auc_roc(const std::vector<PredictionRecord> &records);

struct RegressionMetrics {
  double mse = 0.0;
  double mae = 0.0;
  std::optional<double> r2;  // empty when y_true has zero variance
};

RegressionMetrics regression_metrics(
    const std::vector<PredictionRecord> &records);

// MAE over active records only; empty when there are none.
std::optional<double> active_mae(const std::vector<PredictionRecord> &records);

// mean(y_pred | active) - mean(y_pred | inactive); empty for single-class.
std::optional<double> ranking_differential(
    const std::vector<PredictionRecord> &records);

struct MetricsReport {
  std::size_t n = 0;
  std::size_t n_active = 0;
  double prevalence = 0.0;
  double mse = 0.0;
  double mae = 0.0;
  std::optional<double> r2;
  std::optional<double> active_mae;
  std::optional<double> auc_roc;
  std::vector<double> fractions;  // e.g. 0.005, 0.01, 0.02, 0.05
  std::vector<std::size_t> top_k_counts;
  std::vector<double> precision;
  std::vector<std::optional<double>> ef;
  std::optional<double> ranking_differential;
  std::string tie_policy = kTiePolicy;
};

inline const std::vector<double> kDefaultFractions{0.005, 0.01, 0.02, 0.05};

MetricsReport compute_report(const std::vector<PredictionRecord> &records,
                             const std::vector<double> &fractions =
                                 kDefaultFractions);

}  // namespace chemscreen::metrics

#endif  // CHEMSCREEN_METRICS_HPP_
