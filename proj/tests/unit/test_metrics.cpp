//
// Project ChemScreen - Copyright 2026 ChemScreen Developers.
// SPDX-License-Identifier: Apache-2.0
//

#include "chemscreen/metrics.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "chemscreen/rng.hpp"

using namespace chemscreen;

namespace {

metrics::PredictionRecord rec(std::string id, double y_true, double y_pred,
                              bool active) {
  return {std::move(id), y_true, y_pred, active};
}

// Exhaustive pairwise AUC oracle with half-credit ties, kept in exact
// integer arithmetic so equality with the rank formula is bitwise.
double pairwise_auc(const std::vector<metrics::PredictionRecord> &records) {
  long long wins2 = 0;
  long long n_active = 0;
  long long n_inactive = 0;
  for (const auto &a : records) {
    if (!a.active) {
      ++n_inactive;
      continue;
    }
    ++n_active;
    for (const auto &b : records) {
      if (b.active) continue;
      if (a.y_pred > b.y_pred) {
        wins2 += 2;
      } else if (a.y_pred == b.y_pred) {
        wins2 += 1;
      }
    }
  }
  return static_cast<double>(wins2) /
         static_cast<double>(2 * n_active * n_inactive);
}

std::vector<metrics::PredictionRecord> random_instance(SeededRng &rng,
                                                       bool tie_heavy) {
  const std::size_t n = 2 + rng.uniform_below(29);
  std::vector<metrics::PredictionRecord> records;
  bool any_active = false;
  bool any_inactive = false;
  for (std::size_t i = 0; i < n; ++i) {
    const bool active = rng.uniform_below(2) == 1;
    const double score = tie_heavy
                             ? static_cast<double>(rng.uniform_below(4))
                             : rng.uniform_real(0.0, 1.0);
    records.push_back(rec("m" + std::to_string(i), active ? 7.0 : 4.5, score,
                          active));
    any_active |= active;
    any_inactive |= !active;
  }
  if (!any_active) records[0].active = true;
  if (!any_inactive) records[0].active = false;
  if (records.size() == 2 && records[0].active == records[1].active) {
    records[1].active = !records[0].active;
  }
  return records;
}

}  // namespace

TEST_CASE("rank: descending score with ascending-id ties") {
  std::vector<metrics::PredictionRecord> records{
      rec("b", 5, 1.0, false), rec("a", 5, 1.0, false), rec("c", 5, 2.0, true)};
  const auto ordered = metrics::rank(records);
  CHECK(ordered[0].id == "c");
  CHECK(ordered[1].id == "a");
  CHECK(ordered[2].id == "b");

  // shuffled input, same output
  SeededRng rng(1);
  for (int trial = 0; trial < 10; ++trial) {
    auto shuffled = records;
    rng.shuffle(shuffled);
    const auto again = metrics::rank(shuffled);
    for (std::size_t i = 0; i < ordered.size(); ++i) {
      CHECK(again[i].id == ordered[i].id);
    }
  }
}

TEST_CASE("top_k: max(1, round-half-away) rule") {
  CHECK(metrics::top_k(1000, 0.01) == 10);
  CHECK(metrics::top_k(150, 0.01) == 2);   // round(1.5) -> 2
  CHECK(metrics::top_k(10, 0.01) == 1);    // floor would be 0
  CHECK(metrics::top_k(100, 1.0) == 100);
  CHECK_THROWS_AS(metrics::top_k(10, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(metrics::top_k(10, 1.5), std::invalid_argument);
}

TEST_CASE("enrichment_factor: brute-force counting example") {
  // n=1000, 20 actives, 8 of them in the top 10 -> EF = 0.8 / 0.02 = 40.
  std::vector<metrics::PredictionRecord> records;
  for (int i = 0; i < 1000; ++i) {
    const bool in_top = i < 10;
    const bool active = i < 8 || (i >= 100 && i < 112);
    records.push_back(rec("m" + std::to_string(1000 + i), active ? 7 : 4,
                          in_top ? 100.0 - i : 50.0 - i, active));
  }
  const auto ef = metrics::enrichment_factor(records, 0.01);
  REQUIRE(ef.has_value());
  CHECK(*ef == doctest::Approx(40.0));
  CHECK(metrics::precision_at(records, 0.01) == doctest::Approx(0.8));
}

TEST_CASE("enrichment_factor: paper pairs via the precision identity") {
  const double prevalence = 3800.0 / 177092.0;
  CHECK(metrics::enrichment_from_precision(0.374, prevalence) ==
        doctest::Approx(17.4).epsilon(0.1 / 17.4));
  CHECK(metrics::enrichment_from_precision(0.460, prevalence) ==
        doctest::Approx(21.5).epsilon(0.15 / 21.5));
}

TEST_CASE("enrichment_factor: undefined without actives, not zero") {
  std::vector<metrics::PredictionRecord> records{rec("a", 4, 1, false),
                                                 rec("b", 4, 2, false)};
  CHECK_FALSE(metrics::enrichment_factor(records, 0.5).has_value());
}

TEST_CASE("precision_at: perfect ranking saturates") {
  std::vector<metrics::PredictionRecord> records;
  for (int i = 0; i < 1000; ++i) {
    const bool active = i < 21;  // prevalence 2.1%
    records.push_back(
        rec("m" + std::to_string(i), active ? 7 : 4, 1000.0 - i, active));
  }
  CHECK(metrics::precision_at(records, 0.01) == 1.0);
  const auto ef = metrics::enrichment_factor(records, 0.01);
  CHECK(*ef == doctest::Approx(1.0 / 0.021));
}

TEST_CASE("auc: spec example 0.75") {
  std::vector<metrics::PredictionRecord> records{
      rec("a1", 7, 3, true), rec("a2", 7, 1, true), rec("i1", 4, 2, false),
      rec("i2", 4, 0, false)};
  CHECK(*metrics::auc_roc(records) == 0.75);
}

TEST_CASE("auc: perfect separation and all ties") {
  std::vector<metrics::PredictionRecord> perfect{
      rec("a", 7, 10, true), rec("b", 7, 9, true), rec("c", 4, 1, false)};
  CHECK(*metrics::auc_roc(perfect) == 1.0);

  std::vector<metrics::PredictionRecord> flat{
      rec("a", 7, 5, true), rec("b", 4, 5, false), rec("c", 4, 5, false)};
  CHECK(*metrics::auc_roc(flat) == 0.5);

  std::vector<metrics::PredictionRecord> one_class{rec("a", 7, 5, true)};
  CHECK_FALSE(metrics::auc_roc(one_class).has_value());
}

TEST_CASE("auc: rank formula equals exhaustive pairs on 1000 instances") {
  SeededRng rng(616);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto records = random_instance(rng, trial % 2 == 0);
    const auto auc = metrics::auc_roc(records);
    REQUIRE(auc.has_value());
    CHECK(*auc == pairwise_auc(records));  // exact, including tie-heavy
  }
}

TEST_CASE("regression_metrics: hand arithmetic") {
  std::vector<metrics::PredictionRecord> records{
      rec("a", 1, 2, false), rec("b", 2, 2, false), rec("c", 3, 2, false)};
  const auto m = metrics::regression_metrics(records);
  CHECK(m.mse == doctest::Approx(2.0 / 3.0));
  CHECK(m.mae == doctest::Approx(2.0 / 3.0));
  REQUIRE(m.r2.has_value());
  CHECK(*m.r2 == doctest::Approx(0.0));

  std::vector<metrics::PredictionRecord> exact{
      rec("a", 1, 1, false), rec("b", 2, 2, false)};
  const auto perfect = metrics::regression_metrics(exact);
  CHECK(perfect.mse == 0.0);
  CHECK(perfect.mae == 0.0);
  CHECK(*perfect.r2 == 1.0);

  std::vector<metrics::PredictionRecord> flat{
      rec("a", 5, 1, false), rec("b", 5, 9, false)};
  CHECK_FALSE(metrics::regression_metrics(flat).r2.has_value());
}

TEST_CASE("active_mae: restriction to actives") {
  std::vector<metrics::PredictionRecord> records{
      rec("a", 7.0, 6.7, true), rec("b", 4.0, 9.0, false),
      rec("c", 4.2, 0.0, false)};
  CHECK(*metrics::active_mae(records) == doctest::Approx(0.3));

  std::vector<metrics::PredictionRecord> none{rec("a", 4, 4, false)};
  CHECK_FALSE(metrics::active_mae(none).has_value());

  // equals plain MAE when everything is active
  std::vector<metrics::PredictionRecord> all{
      rec("a", 7, 6, true), rec("b", 8, 10, true)};
  CHECK(*metrics::active_mae(all) ==
        doctest::Approx(metrics::regression_metrics(all).mae));
}

TEST_CASE("ranking_differential: hand value and antisymmetry") {
  std::vector<metrics::PredictionRecord> records{
      rec("a", 7, 6, true), rec("b", 7, 7, true), rec("c", 4, 4, false),
      rec("d", 4, 5, false)};
  CHECK(*metrics::ranking_differential(records) == doctest::Approx(2.0));

  auto flipped = records;
  for (auto &record : flipped) record.active = !record.active;
  CHECK(*metrics::ranking_differential(flipped) == doctest::Approx(-2.0));

  std::vector<metrics::PredictionRecord> constant{
      rec("a", 7, 5, true), rec("b", 4, 5, false)};
  CHECK(*metrics::ranking_differential(constant) == 0.0);
}

TEST_CASE("report: EF/precision identity holds to 1e-9 everywhere") {
  SeededRng rng(2718);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<metrics::PredictionRecord> records;
    const std::size_t n = 50 + rng.uniform_below(500);
    for (std::size_t i = 0; i < n; ++i) {
      const bool active = rng.uniform_below(10) == 0;
      records.push_back(rec("m" + std::to_string(i), active ? 7 : 4,
                            rng.uniform_real(3.8, 9.1), active));
    }
    bool has_active = false;
    for (const auto &record : records) has_active |= record.active;
    if (!has_active) records[0].active = true;

    const auto report = metrics::compute_report(records);
    for (std::size_t i = 0; i < report.fractions.size(); ++i) {
      REQUIRE(report.ef[i].has_value());
      CHECK(std::abs(*report.ef[i] -
                     report.precision[i] / report.prevalence) < 1e-9);
    }
    CHECK(report.tie_policy == metrics::kTiePolicy);
  }
}

TEST_CASE("report: rank metrics invariant under monotone score transforms") {
  SeededRng rng(321);
  std::vector<metrics::PredictionRecord> records;
  for (int i = 0; i < 200; ++i) {
    const bool active = i % 17 == 0;
    records.push_back(rec("m" + std::to_string(i), active ? 7 : 4,
                          rng.uniform_real(0.0, 1.0), active));
  }
  auto transformed = records;
  for (auto &record : transformed) {
    record.y_pred = std::exp(3.0 * record.y_pred) + 10.0;  // strictly increasing
  }
  const auto a = metrics::compute_report(records);
  const auto b = metrics::compute_report(transformed);
  CHECK(*a.auc_roc == *b.auc_roc);
  for (std::size_t i = 0; i < a.fractions.size(); ++i) {
    CHECK(a.precision[i] == b.precision[i]);
    CHECK(*a.ef[i] == *b.ef[i]);
  }
  // regression metrics are NOT transform-invariant
  CHECK(a.mse != b.mse);
  CHECK(a.mae != b.mae);
}

TEST_CASE("report: monotone K for a perfect ranking") {
  std::vector<metrics::PredictionRecord> records;
  for (int i = 0; i < 1000; ++i) {
    const bool active = i < 30;  // prevalence 3%
    records.push_back(
        rec("m" + std::to_string(i), active ? 7 : 4, 1000.0 - i, active));
  }
  const auto p_small = metrics::precision_at(records, 0.005);
  const auto p_large = metrics::precision_at(records, 0.05);
  CHECK(p_small >= p_large);
}
