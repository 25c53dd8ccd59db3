//
// Project ChemScreen - Copyright 2026 ChemScreen Developers.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef CHEMSCREEN_TUNING_HPP_
#define CHEMSCREEN_TUNING_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace chemscreen::tuning {

struct ParamSpec {
  enum class Kind { kReal, kInt, kCategorical };

  std::string name;
  Kind kind = Kind::kReal;
  double lo = 0.0;   // real range
  double hi = 0.0;
  bool log_scale = false;
  long long ilo = 0;  // integer range, inclusive
  long long ihi = 0;
  std::vector<std::string> choices;

  static ParamSpec real(std::string name, double lo, double hi,
                        bool log_scale = false);
  static ParamSpec integer(std::string name, long long lo, long long hi);
  static ParamSpec categorical(std::string name,
                               std::vector<std::string> choices);
};

struct SearchSpace {
  std::vector<ParamSpec> parameters;

  void validate() const;  // throws on empty/invalid ranges
};

using ParamValue = std::variant<double, long long, std::string>;
using ParamSet = std::map<std::string, ParamValue>;

struct Trial {
  int index = 0;
  ParamSet params;
  std::optional<double> objective;  // empty = failed trial
  std::string failure;
  double duration_seconds = 0.0;
};

struct StudyResult {
  std::vector<Trial> trials;
  int best_trial = -1;  // index of minimal objective; ties -> lowest index
  std::uint64_t seed = 0;
};

// Objective returns the value to minimize, or empty to mark the trial failed.
using Objective = std::function<std::optional<double>(const ParamSet &)>;

// Budgeted random search: all parameter sets are pre-sampled sequentially
// from the seed (log-uniform over log-scaled ranges), so evaluation order
// cannot change what is sampled. Failed trials are recorded and skipped for
// best-trial selection; throws only when every trial fails.
StudyResult random_search(const SearchSpace &space, int budget,
                          const Objective &objective, std::uint64_t seed);

// Consume per-epoch validation losses; stop after `patience` epochs without
// a strict improvement of the running minimum. Returns (stop_epoch,
// best_epoch), both 0-based; shorter streams are consumed fully.
std::pair<int, int> early_stopping(std::span<const double> losses,
                                   int patience = 5);

// Search space for the in-toolkit random-forest objective.
SearchSpace builtin_rf_space();

std::string param_value_to_string(const ParamValue &value);

}  // namespace chemscreen::tuning

#endif  // CHEMSCREEN_TUNING_HPP_
