//
// Project ChemScreen - Copyright 2026 ChemScreen Developers.
// SPDX-License-Identifier: Apache-2.0
//

#include "chemscreen/tuning.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "chemscreen/csv.hpp"
#include "chemscreen/rng.hpp"

namespace chemscreen::tuning {

ParamSpec ParamSpec::real(std::string name, double lo, double hi,
                          bool log_scale) {
  ParamSpec spec;
  spec.name = std::move(name);
  spec.kind = Kind::kReal;
  spec.lo = lo;
  spec.hi = hi;
  spec.log_scale = log_scale;
  return spec;
}

ParamSpec ParamSpec::integer(std::string name, long long lo, long long hi) {
  ParamSpec spec;
  spec.name = std::move(name);
  spec.kind = Kind::kInt;
  spec.ilo = lo;
  spec.ihi = hi;
  return spec;
}

ParamSpec ParamSpec::categorical(std::string name,
                                 std::vector<std::string> choices) {
  ParamSpec spec;
  spec.name = std::move(name);
  spec.kind = Kind::kCategorical;
  spec.choices = std::move(choices);
  return spec;
}

void SearchSpace::validate() const {
  if (parameters.empty()) {
    throw std::invalid_argument("search space has no parameters");
  }
  for (const ParamSpec &p : parameters) {
    switch (p.kind) {
      case ParamSpec::Kind::kReal:
        if (!(p.lo < p.hi)) {
          throw std::invalid_argument("empty real range for " + p.name);
        }
        if (p.log_scale && p.lo <= 0.0) {
          throw std::invalid_argument("log-scaled range must be positive: " +
                                      p.name);
        }
        break;
      case ParamSpec::Kind::kInt:
        if (p.ilo > p.ihi) {
          throw std::invalid_argument("empty integer range for " + p.name);
        }
        break;
      case ParamSpec::Kind::kCategorical:
        if (p.choices.empty()) {
          throw std::invalid_argument("no choices for " + p.name);
        }
        break;
    }
  }
}

namespace {

ParamValue sample_param(const ParamSpec &spec, SeededRng &rng) {
  switch (spec.kind) {
    case ParamSpec::Kind::kReal:
      if (spec.log_scale) {
        return std::exp(rng.uniform_real(std::log(spec.lo), std::log(spec.hi)));
      }
      return rng.uniform_real(spec.lo, spec.hi);
    case ParamSpec::Kind::kInt:
      return spec.ilo + static_cast<long long>(rng.uniform_below(
                            static_cast<std::uint64_t>(spec.ihi - spec.ilo + 1)));
    case ParamSpec::Kind::kCategorical:
      return spec.choices[static_cast<std::size_t>(
          rng.uniform_below(spec.choices.size()))];
  }
  throw std::logic_error("unreachable");
}

}  // namespace

StudyResult random_search(const SearchSpace &space, int budget,
                          const Objective &objective, std::uint64_t seed) {
  if (budget < 1) throw std::invalid_argument("budget must be >= 1");
  space.validate();

  StudyResult result;
  result.seed = seed;

  SeededRng rng(seed);
  std::vector<ParamSet> sampled(static_cast<std::size_t>(budget));
  for (int t = 0; t < budget; ++t) {
    for (const ParamSpec &spec : space.parameters) {
      sampled[static_cast<std::size_t>(t)][spec.name] = sample_param(spec, rng);
    }
  }

  for (int t = 0; t < budget; ++t) {
    Trial trial;
    trial.index = t;
    trial.params = sampled[static_cast<std::size_t>(t)];
    const auto start = std::chrono::steady_clock::now();
    try {
      trial.objective = objective(trial.params);
      if (!trial.objective) trial.failure = "objective reported failure";
    } catch (const std::exception &e) {
      trial.objective = std::nullopt;
      trial.failure = e.what();
    }
    trial.duration_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    if (trial.objective &&
        (result.best_trial < 0 ||
         *trial.objective <
             *result.trials[static_cast<std::size_t>(result.best_trial)]
                  .objective)) {
      result.best_trial = t;
    }
    result.trials.push_back(std::move(trial));
  }

  if (result.best_trial < 0) {
    throw std::runtime_error("random search: every trial failed");
  }
  return result;
}

std::pair<int, int> early_stopping(std::span<const double> losses,
                                   int patience) {
  if (losses.empty()) throw std::invalid_argument("empty loss stream");
  if (patience < 1) throw std::invalid_argument("patience must be >= 1");

  int best = 0;
  for (int epoch = 1; epoch < static_cast<int>(losses.size()); ++epoch) {
    if (losses[static_cast<std::size_t>(epoch)] <
        losses[static_cast<std::size_t>(best)]) {
      best = epoch;
    } else if (epoch - best >= patience) {
      return {epoch, best};
    }
  }
  return {static_cast<int>(losses.size()) - 1, best};
}

SearchSpace builtin_rf_space() {
  SearchSpace space;
  space.parameters.push_back(ParamSpec::integer("n_estimators", 50, 300));
  space.parameters.push_back(ParamSpec::integer("max_depth", 8, 32));
  space.parameters.push_back(ParamSpec::categorical(
      "features_per_split", {"0.25", "0.33", "0.5", "1.0"}));
  return space;
}

std::string param_value_to_string(const ParamValue &value) {
  if (std::holds_alternative<double>(value)) {
    return csv::format_double(std::get<double>(value));
  }
  if (std::holds_alternative<long long>(value)) {
    return std::to_string(std::get<long long>(value));
  }
  return std::get<std::string>(value);
}

}  // namespace chemscreen::tuning
