// SPDX-License-Identifier: Apache-2.0
//
// Seeded Monte Carlo scenario runners and their CSV / manifest output.
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ldma/scenario.hpp"

namespace ldma {

struct ResultRow {
  std::string sweep_var;
  double sweep_value = 0.0;
  std::string method;
  double mean = 0.0;
  double std_error = 0.0;
  int trials = 0;
  std::uint64_t seed = 0;
};

struct RunResult {
  std::string scenario_id;
  std::vector<ResultRow> rows;

  /// Row for (method, sweep_value); throws std::out_of_range when absent.
  const ResultRow& at(const std::string& method, double sweep_value) const;
};

/// Frozen column order.
inline constexpr const char* kCsvHeader =
    "scenario,sweep_var,sweep_value,method,mean,std_error,trials,seed";

/// Header plus one line per row; LF line endings, 17 significant digits.
std::string to_csv(const RunResult& result);

struct RunOptions {
  /// 0 picks the hardware concurrency.
  int workers = 1;
};

RunResult run_correlation_sweep(const ScenarioConfig& cfg);
RunResult run_linear_bound(const ScenarioConfig& cfg, const RunOptions& options = {});
RunResult run_linear_multipath(const ScenarioConfig& cfg, const RunOptions& options = {});
RunResult run_uniform_cell(const ScenarioConfig& cfg, const RunOptions& options = {});

/// Dispatches on cfg.scenario_kind.
RunResult run_scenario(const ScenarioConfig& cfg, const RunOptions& options = {});

/// CSV method labels used by the multipath scenarios.
std::string method_label(PrecoderMethod method, const CodebookSpec& codebook);

/// Sum rates of one multipath trial: method label -> one value per SNR point.
using TrialRates = std::map<std::string, std::vector<double>>;

/// Everything one trial of linear_multipath / uniform_cell computes. Depends
/// only on (cfg, trial index).
TrialRates simulate_multipath_trial(const ScenarioConfig& cfg, int trial);

/// {"config", "seed", "git_describe", "wall_time_s", "workers", "csv"}
std::string run_manifest(const ScenarioConfig& cfg, double wall_time_s, int workers,
                         const std::string& csv_name);

std::string git_describe();

}  // namespace ldma
