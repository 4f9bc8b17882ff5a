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

#include "bdris/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "bdris/baselines.hpp"
#include "bdris/channel.hpp"
#include "bdris/error.hpp"

namespace bdris {

namespace {

void fill_residuals(ResultRow& row, const Solution& sol, const ChannelSet& ch, const SystemParams& params) {
  const ConstraintResiduals r = constraint_residuals(sol, ch, params);
  const auto unit = unitarity_deviation(sol);
  const auto sym = symmetry_deviation(sol);
  row.norm_deviation = r.max_norm_deviation();
  row.unitarity_deviation = unit.empty() ? 0.0 : *std::max_element(unit.begin(), unit.end());
  row.symmetry_deviation = sym.empty() ? 0.0 : *std::max_element(sym.begin(), sym.end());
  row.power_slack1 = r.upsilon1;
  row.power_slack2 = r.upsilon2;
  row.rate_slack1 = r.xi1;
  row.rate_slack2 = r.xi2;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << content;
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

bool is_learned(Scheme s) { return s == Scheme::BDRIS || s == Scheme::DiagonalRIS; }

}  // namespace

std::string_view status_name(RunStatus s) {
  switch (s) {
    case RunStatus::Ok: return "ok";
    case RunStatus::Diverged: return "diverged";
    case RunStatus::Failed: return "failed";
  }
  return "failed";
}

ExperimentConfig scenario_config(const ExperimentConfig& base, SweepAxis axis, int value) {
  ExperimentConfig c = base;
  switch (axis) {
    case SweepAxis::None:
      break;
    case SweepAxis::Elements:
      c.m_elements = value;
      c.group_sizes.clear();
      break;
    case SweepAxis::Antennas:
      c.n_antennas = value;
      break;
  }
  return c;
}

ResultRow run_one(const ExperimentConfig& config, Scheme scheme, std::uint64_t seed) {
  ResultRow row;
  row.scheme = scheme;
  row.seed = seed;
  row.n_antennas = config.n_antennas;
  row.m_elements = config.m_elements;
  row.initial_sum_rate = std::numeric_limits<double>::quiet_NaN();
  const auto start = std::chrono::steady_clock::now();
  try {
    config.validate();
    const SystemParams params = config.system_params();
    const ChannelSet ch = generate_channel_set(config.geometry, config.fading, config.n_antennas,
                                               config.m_elements, seed);
    const auto take_training = [&](const TrainResult& tr) {
      row.solution = tr.best_solution;
      row.best_sum_rate = tr.best_sum_rate;
      row.r1 = tr.best_rates.r1;
      row.r2 = tr.best_rates.r2;
      row.initial_sum_rate = tr.initial_sum_rate;
      row.epochs_run = tr.epochs_run;
      row.history = tr.history;
      row.evaluations = static_cast<long>(tr.epochs_run) * config.meta.outer_iterations;
      if (tr.diverged) {
        row.status = RunStatus::Diverged;
        row.failure = tr.failure;
      }
    };
    const auto take_baseline = [&](const BaselineResult& br) {
      row.solution = br.solution;
      row.best_sum_rate = br.sum_rate;
      const RateBreakdown rates = sum_rate(br.solution, ch, params.noise_power);
      row.r1 = rates.r1;
      row.r2 = rates.r2;
      row.evaluations = br.evaluations;
    };
    switch (scheme) {
      case Scheme::BDRIS: {
        const SurfaceLayout layout = config.layout();
        row.groups = static_cast<int>(layout.group_sizes.size());
        take_training(run_algorithm1(ch, params, layout, config.meta, seed));
        break;
      }
      case Scheme::DiagonalRIS:
        row.groups = config.m_elements;
        take_training(run_diagonal_baseline(ch, params, config.meta, seed));
        break;
      case Scheme::RandomPhases: {
        const SurfaceLayout layout = config.layout();
        row.groups = static_cast<int>(layout.group_sizes.size());
        take_baseline(random_phases_baseline(ch, params, layout, seed, config.random_trials));
        break;
      }
      case Scheme::GridOracle:
        row.groups = config.m_elements;
        take_baseline(grid_oracle_tiny(ch, params, config.oracle_levels));
        break;
    }
    if (row.status == RunStatus::Ok) fill_residuals(row, row.solution, ch, params);
  } catch (const std::exception& e) {
    row.status = RunStatus::Failed;
    row.failure = e.what();
  }
  row.wall_time_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return row;
}

int worker_limit() {
  if (const char* env = std::getenv("BDRIS_MAX_WORKERS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<ResultRow> run_sweep(const ExperimentConfig& config, SweepAxis axis, const std::vector<int>& values,
                                 int max_workers) {
  struct Job {
    ExperimentConfig scenario;
    Scheme scheme;
    std::uint64_t seed;
  };
  std::vector<ExperimentConfig> scenarios;
  if (axis == SweepAxis::None || values.empty()) {
    scenarios.push_back(config);
  } else {
    for (int v : values) scenarios.push_back(scenario_config(config, axis, v));
  }
  for (const auto& s : scenarios) s.validate();
  std::vector<Job> jobs;
  for (const auto& s : scenarios) {
    for (Scheme scheme : config.schemes) {
      for (std::uint64_t seed : config.seeds) jobs.push_back({s, scheme, seed});
    }
  }
  std::vector<ResultRow> rows(jobs.size());
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      rows[i] = run_one(jobs[i].scenario, jobs[i].scheme, jobs[i].seed);
    }
  };
  int workers = max_workers > 0 ? max_workers : worker_limit();
  workers = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(workers), jobs.size()));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  std::sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    return std::tie(a.n_antennas, a.m_elements, a.scheme, a.seed) <
           std::tie(b.n_antennas, b.m_elements, b.scheme, b.seed);
  });
  return rows;
}

const std::vector<std::string>& result_columns() {
  static const std::vector<std::string> cols = {
      "scheme",          "seed",          "N",
      "M",               "G",             "best_sum_rate",
      "R1",              "R2",            "initial_sum_rate",
      "norm_deviation",  "unitarity_deviation", "symmetry_deviation",
      "power_slack1",    "power_slack2",  "rate_slack1",
      "rate_slack2",     "epochs_run",    "evaluations",
      "status"};
  return cols;
}

std::string results_csv(const std::vector<ResultRow>& rows) {
  std::ostringstream out;
  const auto& cols = result_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  for (const auto& r : rows) {
    out << scheme_name(r.scheme) << ',' << r.seed << ',' << r.n_antennas << ',' << r.m_elements << ',' << r.groups
        << ',' << format_number(r.best_sum_rate) << ',' << format_number(r.r1) << ',' << format_number(r.r2) << ','
        << format_number(r.initial_sum_rate) << ',' << format_number(r.norm_deviation) << ','
        << format_number(r.unitarity_deviation) << ',' << format_number(r.symmetry_deviation) << ','
        << format_number(r.power_slack1) << ',' << format_number(r.power_slack2) << ','
        << format_number(r.rate_slack1) << ',' << format_number(r.rate_slack2) << ',' << r.epochs_run << ','
        << r.evaluations << ',' << status_name(r.status) << '\n';
  }
  return out.str();
}

std::string convergence_csv(const std::vector<EpochRecord>& history) {
  std::ostringstream out;
  out << "epoch,mean_loss,mean_sum_rate,best_objective,best_sum_rate,l_rate,l_threshold,l_norm,l_ris,l_power\n";
  for (const auto& e : history) {
    out << e.epoch << ',' << format_number(e.mean_loss) << ',' << format_number(e.mean_sum_rate) << ','
        << format_number(e.best_objective) << ',' << format_number(e.best_sum_rate) << ','
        << format_number(e.mean_terms.l_rate) << ',' << format_number(e.mean_terms.l_threshold) << ','
        << format_number(e.mean_terms.l_norm) << ',' << format_number(e.mean_terms.l_ris) << ','
        << format_number(e.mean_terms.l_power) << '\n';
  }
  return out.str();
}

std::string run_label(const ResultRow& row) {
  return std::string(scheme_name(row.scheme)) + "_N" + std::to_string(row.n_antennas) + "_M" +
         std::to_string(row.m_elements) + "_seed" + std::to_string(row.seed);
}

void emit_results(const std::vector<ResultRow>& rows, const ExperimentConfig& config, SweepAxis axis,
                  const std::vector<int>& values, const std::filesystem::path& dir) {
  if (rows.empty()) throw Error(ErrorCode::InvalidArgument, "no result rows to emit");
  std::error_code ec;
  std::filesystem::create_directories(dir / "convergence", ec);
  if (!ec) std::filesystem::create_directories(dir / "solutions", ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + dir.string() + ": " + ec.message());

  write_file(dir / "results.csv", results_csv(rows));

  std::ostringstream timings;
  timings << "scheme,seed,N,M,wall_time_seconds\n";
  std::ostringstream failures;
  for (const auto& r : rows) {
    timings << scheme_name(r.scheme) << ',' << r.seed << ',' << r.n_antennas << ',' << r.m_elements << ','
            << format_number(r.wall_time_seconds) << '\n';
    if (r.status != RunStatus::Ok) failures << run_label(r) << ": " << status_name(r.status) << ": " << r.failure << '\n';
    if (is_learned(r.scheme)) write_file(dir / "convergence" / (run_label(r) + ".csv"), convergence_csv(r.history));
    if (r.status == RunStatus::Ok) write_file(dir / "solutions" / (run_label(r) + ".sol"), format_solution(r.solution));
  }
  write_file(dir / "timings.csv", timings.str());
  if (!failures.str().empty()) write_file(dir / "failures.txt", failures.str());

  std::vector<std::string> notes = {
      std::string("bdris-meta ") + BDRIS_VERSION_STRING + " run metadata; load with load_config()",
  };
  std::string seeds;
  for (auto s : config.seeds) seeds += (seeds.empty() ? "" : ",") + std::to_string(s);
  notes.push_back("seeds: " + seeds);
  if (axis != SweepAxis::None && !values.empty()) {
    std::string vals;
    for (int v : values) vals += (vals.empty() ? "" : ",") + std::to_string(v);
    notes.push_back(std::string("sweep: vary ") + (axis == SweepAxis::Elements ? "M" : "N") + " over " + vals);
  }
  notes.push_back("note: diagonal-ris reuses every meta-learner setting of bd-ris; only the surface differs");
  notes.push_back("note: best_sum_rate is the rescored sum rate of the projected best solution");
  notes.push_back("note: wall times are in timings.csv so results.csv is reproducible byte for byte");
  write_file(dir / "metadata.cfg", format_config(config, notes));
}

std::string format_solution(const Solution& sol) {
  std::ostringstream out;
  const auto c = [&out](std::complex<double> z) { out << format_number(z.real()) << ' ' << format_number(z.imag()); };
  out << "antennas " << sol.W.rows() << '\n';
  out << "groups";
  for (int s : sol.group_sizes) out << ' ' << s;
  out << '\n';
  out << "W\n";
  for (Eigen::Index i = 0; i < sol.W.rows(); ++i) {
    for (Eigen::Index k = 0; k < sol.W.cols(); ++k) {
      if (k) out << "  ";
      c(sol.W(i, k));
    }
    out << '\n';
  }
  out << "P " << format_number(sol.P(0)) << ' ' << format_number(sol.P(1)) << ' ' << format_number(sol.P(2)) << '\n';
  out << "Phi\n";
  for (Eigen::Index i = 0; i < sol.Phi.rows(); ++i) {
    for (Eigen::Index k = 0; k < sol.Phi.cols(); ++k) {
      if (k) out << "  ";
      c(sol.Phi(i, k));
    }
    out << '\n';
  }
  return out.str();
}

Solution parse_solution(const std::string& text) {
  std::istringstream in(text);
  std::string word;
  const auto expect = [&](const char* w) {
    if (!(in >> word) || word != w) throw Error(ErrorCode::Parse, std::string("solution: expected '") + w + "'");
  };
  const auto number = [&]() {
    if (!(in >> word)) throw Error(ErrorCode::Parse, "solution: truncated");
    try {
      std::size_t used = 0;
      const double v = std::stod(word, &used);
      if (used != word.size()) throw std::invalid_argument(word);
      return v;
    } catch (const std::exception&) {
      throw Error(ErrorCode::Parse, "solution: bad number '" + word + "'");
    }
  };
  Solution sol;
  expect("antennas");
  const int n = static_cast<int>(number());
  if (n < 1) throw Error(ErrorCode::Parse, "solution: bad antenna count");
  expect("groups");
  int m = 0;
  while (in >> word && word != "W") {
    const int s = std::atoi(word.c_str());
    if (s < 1) throw Error(ErrorCode::Parse, "solution: bad group size");
    sol.group_sizes.push_back(s);
    m += s;
  }
  if (word != "W" || m == 0) throw Error(ErrorCode::Parse, "solution: expected groups then 'W'");
  sol.W.resize(n, 3);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < 3; ++k) {
      const double re = number();
      sol.W(i, k) = {re, number()};
    }
  }
  expect("P");
  for (int k = 0; k < 3; ++k) sol.P(k) = number();
  expect("Phi");
  sol.Phi.resize(m, m);
  for (int i = 0; i < m; ++i) {
    for (int k = 0; k < m; ++k) {
      const double re = number();
      sol.Phi(i, k) = {re, number()};
    }
  }
  return sol;
}

Solution read_solution(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_solution(buffer.str());
}

}  // namespace bdris
