// SPDX-License-Identifier: Apache-2.0
//
// bdris-meta: learned optimization for BD-RIS assisted uplink RSMA
// Copyright (C) 2026 bdris-meta contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef BDRIS_EXPERIMENT_HPP
#define BDRIS_EXPERIMENT_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "bdris/config.hpp"
#include "bdris/meta_opt.hpp"

namespace bdris {

enum class SweepAxis { None, Elements, Antennas };

enum class RunStatus { Ok, Diverged, Failed };

std::string_view status_name(RunStatus s);

struct ResultRow {
  Scheme scheme = Scheme::BDRIS;
  std::uint64_t seed = 0;
  int n_antennas = 0;
  int m_elements = 0;
  int groups = 0;
  double best_sum_rate = 0.0;
  double r1 = 0.0;
  double r2 = 0.0;
  double initial_sum_rate = 0.0;  // NaN for schemes without a starting point
  // Residuals of the reported (projected) solution.
  double norm_deviation = 0.0;
  double unitarity_deviation = 0.0;
  double symmetry_deviation = 0.0;
  double power_slack1 = 0.0;
  double power_slack2 = 0.0;
  double rate_slack1 = 0.0;
  double rate_slack2 = 0.0;
  double wall_time_seconds = 0.0;
  int epochs_run = 0;
  long evaluations = 0;
  RunStatus status = RunStatus::Ok;
  std::string failure;
  Solution solution;
  std::vector<EpochRecord> history;
};

// `base` with the swept dimension replaced; explicit group sizes are dropped
// when the element count changes.
ExperimentConfig scenario_config(const ExperimentConfig& base, SweepAxis axis, int value);

// One scheme on one seeded channel realization. Never throws for run-time
// failures; they are reported through `status`.
ResultRow run_one(const ExperimentConfig& config, Scheme scheme, std::uint64_t seed);

// Cap from BDRIS_MAX_WORKERS, else the hardware concurrency.
int worker_limit();

// Every (value x scheme x seed) combination, on a bounded worker pool; rows
// come back sorted by (N, M, scheme, seed). An empty `values` with
// SweepAxis::None runs the config's own scenario.
std::vector<ResultRow> run_sweep(const ExperimentConfig& config, SweepAxis axis, const std::vector<int>& values,
                                 int max_workers = 0);

// Column order of results.csv.
const std::vector<std::string>& result_columns();
std::string results_csv(const std::vector<ResultRow>& rows);
std::string convergence_csv(const std::vector<EpochRecord>& history);
std::string run_label(const ResultRow& row);

// Writes into `dir`:
//   results.csv, timings.csv, metadata.cfg, failures.txt (only if a run
//   failed), convergence/<label>.csv for learned schemes and
//   solutions/<label>.sol for every successful row.
void emit_results(const std::vector<ResultRow>& rows, const ExperimentConfig& config, SweepAxis axis,
                  const std::vector<int>& values, const std::filesystem::path& dir);

std::string format_solution(const Solution& sol);
Solution parse_solution(const std::string& text);
Solution read_solution(const std::filesystem::path& path);

}  // namespace bdris

#endif  // BDRIS_EXPERIMENT_HPP
