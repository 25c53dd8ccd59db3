//
// Project ChemScreen - Copyright 2026 ChemScreen Developers.
// SPDX-License-Identifier: Apache-2.0
//

#include "chemscreen/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace chemscreen::metrics {

namespace {

std::size_t count_active(const std::vector<PredictionRecord> &records) {
  std::size_t n = 0;
  for (const auto &record : records) {
    if (record.active) ++n;
  }
  return n;
}

void require_nonempty(const std::vector<PredictionRecord> &records) {
  if (records.empty()) {
    throw std::invalid_argument("metrics require at least one record");
  }
}

}  // namespace

std::vector<PredictionRecord> rank(std::vector<PredictionRecord> records) {
  require_nonempty(records);
  std::sort(records.begin(), records.end(),
            [](const PredictionRecord &a, const PredictionRecord &b) {
              if (a.y_pred != b.y_pred) return a.y_pred > b.y_pred;
              if (a.id != b.id) return a.id < b.id;
              if (a.y_true != b.y_true) return a.y_true < b.y_true;
              return a.active < b.active;
            });
  return records;
}

std::size_t top_k(std::size_t n, double fraction) {
  if (!(fraction > 0.0) || fraction > 1.0) {
    throw std::invalid_argument("top fraction must lie in (0, 1]");
  }
  const long long k = std::llround(fraction * static_cast<double>(n));
  return static_cast<std::size_t>(std::max(1LL, k));
}

double precision_at(const std::vector<PredictionRecord> &records,
                    double fraction) {
  require_nonempty(records);
  const std::size_t k = top_k(records.size(), fraction);
  const std::vector<PredictionRecord> ordered = rank(records);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < k && i < ordered.size(); ++i) {
    if (ordered[i].active) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(k);
}

double enrichment_from_precision(double precision, double prevalence) {
  if (!(prevalence > 0.0)) {
    throw std::invalid_argument("enrichment requires positive prevalence");
  }
  return precision / prevalence;
}

std::optional<double> enrichment_factor(
    const std::vector<PredictionRecord> &records, double fraction) {
  require_nonempty(records);
  const std::size_t actives = count_active(records);
  if (actives == 0) return std::nullopt;
  const double prevalence =
      static_cast<double>(actives) / static_cast<double>(records.size());
  return enrichment_from_precision(precision_at(records, fraction), prevalence);
}

std::optional<double> auc_roc(const std::vector<PredictionRecord> &records) {
  require_nonempty(records);
  const std::size_t n_active = count_active(records);
  const std::size_t n_inactive = records.size() - n_active;
  if (n_active == 0 || n_inactive == 0) return std::nullopt;

  // Midranks doubled stay integral, so the whole numerator is exact and the
  // result matches exhaustive pair enumeration bit for bit.
  std::vector<std::pair<double, bool>> scored;
  scored.reserve(records.size());
  for (const auto &record : records) {
    scored.emplace_back(record.y_pred, record.active);
  }
  std::sort(scored.begin(), scored.end(),
            [](const auto &a, const auto &b) { return a.first < b.first; });

  long long rank2_active = 0;  // sum of (2 * midrank) over actives
  std::size_t i = 0;
  while (i < scored.size()) {
    std::size_t j = i;
    while (j < scored.size() && scored[j].first == scored[i].first) ++j;
    // 1-based positions i+1 .. j; doubled midrank = (i+1) + j
    const long long doubled =
        static_cast<long long>(i + 1) + static_cast<long long>(j);
    for (std::size_t t = i; t < j; ++t) {
      if (scored[t].second) rank2_active += doubled;
    }
    i = j;
  }
  const long long na = static_cast<long long>(n_active);
  const long long ni = static_cast<long long>(n_inactive);
  const long long numerator = rank2_active - na * (na + 1);
  return static_cast<double>(numerator) / static_cast<double>(2 * na * ni);
}

RegressionMetrics regression_metrics(
    const std::vector<PredictionRecord> &records) {
  require_nonempty(records);
  const double n = static_cast<double>(records.size());

  double se = 0.0;
  double ae = 0.0;
  double mean_true = 0.0;
  for (const auto &record : records) mean_true += record.y_true;
  mean_true /= n;

  double ss_res = 0.0;
  double ss_tot = 0.0;
  for (const auto &record : records) {
    const double err = record.y_true - record.y_pred;
    se += err * err;
    ae += std::abs(err);
    ss_res += err * err;
    const double dev = record.y_true - mean_true;
    ss_tot += dev * dev;
  }

  RegressionMetrics out;
  out.mse = se / n;
  out.mae = ae / n;
  if (ss_tot > 1e-24) out.r2 = 1.0 - ss_res / ss_tot;
  return out;
}

std::optional<double> active_mae(const std::vector<PredictionRecord> &records) {
  require_nonempty(records);
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto &record : records) {
    if (!record.active) continue;
    sum += std::abs(record.y_true - record.y_pred);
    ++count;
  }
  if (count == 0) return std::nullopt;
  return sum / static_cast<double>(count);
}

std::optional<double> ranking_differential(
    const std::vector<PredictionRecord> &records) {
  require_nonempty(records);
  double sum_active = 0.0;
  double sum_inactive = 0.0;
  std::size_t n_active = 0;
  for (const auto &record : records) {
    if (record.active) {
      sum_active += record.y_pred;
      ++n_active;
    } else {
      sum_inactive += record.y_pred;
    }
  }
  const std::size_t n_inactive = records.size() - n_active;
  if (n_active == 0 || n_inactive == 0) return std::nullopt;
  return sum_active / static_cast<double>(n_active) -
         sum_inactive / static_cast<double>(n_inactive);
}

MetricsReport compute_report(const std::vector<PredictionRecord> &records,
                             const std::vector<double> &fractions) {
  require_nonempty(records);
  MetricsReport report;
  report.n = records.size();
  report.n_active = count_active(records);
  report.prevalence =
      static_cast<double>(report.n_active) / static_cast<double>(report.n);

  const RegressionMetrics reg = regression_metrics(records);
  report.mse = reg.mse;
  report.mae = reg.mae;
  report.r2 = reg.r2;
  report.active_mae = active_mae(records);
  report.auc_roc = auc_roc(records);
  report.ranking_differential = ranking_differential(records);

  const std::vector<PredictionRecord> ordered = rank(records);
  report.fractions = fractions;
  for (const double fraction : fractions) {
    const std::size_t k = top_k(report.n, fraction);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < k && i < ordered.size(); ++i) {
      if (ordered[i].active) ++hits;
    }
    const double precision =
        static_cast<double>(hits) / static_cast<double>(k);
    report.top_k_counts.push_back(k);
    report.precision.push_back(precision);
    if (report.n_active == 0) {
      report.ef.push_back(std::nullopt);
    } else {
      report.ef.push_back(
          enrichment_from_precision(precision, report.prevalence));
    }
  }
  return report;
}

}  // namespace chemscreen::metrics
