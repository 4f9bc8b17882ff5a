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

// bdris-sim: command-line front end over the C API.

#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "CLI11.hpp"
#include "bdris/bdris.h"

namespace {

struct Options {
  std::string config_path;
  std::string seeds;
  std::string out_dir;
  std::vector<std::string> schemes;
  bool strict_paper = false;
  int workers = 0;
  std::string vary;
  std::vector<int> values;
};

class Config {
 public:
  explicit Config(const std::string& path) {
    if (bdris_config_load(path.c_str(), &handle_) != BDRIS_OK) throw std::runtime_error(bdris_last_error());
  }
  ~Config() { bdris_config_free(handle_); }
  Config(const Config&) = delete;
  Config& operator=(const Config&) = delete;

  void set(const char* key, const std::string& value) {
    if (bdris_config_set(handle_, key, value.c_str()) != BDRIS_OK) throw std::runtime_error(bdris_last_error());
  }
  bdris_config* get() const { return handle_; }

 private:
  bdris_config* handle_ = nullptr;
};

class Results {
 public:
  Results() = default;
  ~Results() { bdris_results_free(handle_); }
  Results(const Results&) = delete;
  Results& operator=(const Results&) = delete;

  bdris_results** out() { return &handle_; }
  bdris_results* get() const { return handle_; }

  std::vector<bdris_row> rows() const {
    size_t n = 0;
    bdris_results_count(handle_, &n);
    std::vector<bdris_row> out(n);
    for (size_t i = 0; i < n; ++i) bdris_results_row(handle_, i, &out[i]);
    return out;
  }

 private:
  bdris_results* handle_ = nullptr;
};

void apply_overrides(Config& config, const Options& opt) {
  if (!opt.seeds.empty()) config.set("seeds", opt.seeds);
  if (!opt.out_dir.empty()) config.set("output_dir", opt.out_dir);
  if (!opt.schemes.empty()) {
    std::string joined;
    for (const auto& s : opt.schemes) joined += (joined.empty() ? "" : ",") + s;
    config.set("schemes", joined);
  }
  if (opt.strict_paper) config.set("mode", "strict-paper");
}

std::string output_dir(const Config& config) {
  char* text = nullptr;
  if (bdris_config_to_string(config.get(), &text) != BDRIS_OK) throw std::runtime_error(bdris_last_error());
  std::string s(text);
  bdris_string_free(text);
  const auto pos = s.find("\noutput_dir = ");
  if (pos == std::string::npos) return "results";
  const auto start = pos + 14;
  return s.substr(start, s.find('\n', start) - start);
}

void print_summary(const std::vector<bdris_row>& rows) {
  struct Acc {
    double sum = 0.0;
    int ok = 0;
    int total = 0;
  };
  std::map<std::tuple<int, int, std::string>, Acc> groups;
  for (const auto& r : rows) {
    auto& a = groups[{r.n_antennas, r.m_elements, r.scheme}];
    ++a.total;
    if (std::string(r.status) == "ok") {
      a.sum += r.best_sum_rate;
      ++a.ok;
    }
  }
  std::printf("%4s %4s  %-14s %12s %8s\n", "N", "M", "scheme", "mean_rate", "ok/runs");
  for (const auto& [key, a] : groups) {
    const auto& [n, m, scheme] = key;
    std::printf("%4d %4d  %-14s %12.6f %5d/%d\n", n, m, scheme.c_str(), a.ok ? a.sum / a.ok : NAN, a.ok, a.total);
  }
}

int run_sweep(const Options& opt, bdris_axis axis) {
  Config config(opt.config_path);
  apply_overrides(config, opt);
  Results results;
  const bdris_status st = bdris_sweep(config.get(), axis, opt.values.data(), opt.values.size(), opt.workers,
                                      results.out());
  if (st != BDRIS_OK) throw std::runtime_error(bdris_last_error());
  const std::string dir = output_dir(config);
  if (bdris_results_write(results.get(), dir.c_str()) != BDRIS_OK) throw std::runtime_error(bdris_last_error());
  print_summary(results.rows());
  std::printf("results written to %s\n", dir.c_str());
  return 0;
}

int run_oracle(Options opt) {
  opt.schemes = {"grid-oracle", "diagonal-ris"};
  Config config(opt.config_path);
  apply_overrides(config, opt);
  Results results;
  if (bdris_run(config.get(), opt.workers, results.out()) != BDRIS_OK) throw std::runtime_error(bdris_last_error());
  const std::string dir = output_dir(config);
  if (bdris_results_write(results.get(), dir.c_str()) != BDRIS_OK) throw std::runtime_error(bdris_last_error());

  std::map<uint64_t, std::pair<double, double>> by_seed;
  for (const auto& r : results.rows()) {
    auto& slot = by_seed[r.seed];
    const double v = std::string(r.status) == "ok" ? r.best_sum_rate : NAN;
    (std::string(r.scheme) == "grid-oracle" ? slot.first : slot.second) = v;
  }
  int reached = 0;
  std::printf("%8s %12s %12s %8s\n", "seed", "oracle", "learner", "ratio");
  for (const auto& [seed, v] : by_seed) {
    const double ratio = v.second / v.first;
    if (ratio >= 0.9) ++reached;
    std::printf("%8llu %12.6f %12.6f %8.4f\n", static_cast<unsigned long long>(seed), v.first, v.second, ratio);
  }
  std::printf("learner >= 90%% of oracle on %d/%zu seeds\n", reached, by_seed.size());
  return 0;
}

void add_common(CLI::App* cmd, Options& opt) {
  cmd->add_option("config", opt.config_path, "Experiment config file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--seeds", opt.seeds, "Seed list, e.g. 1,2,3 or 1..10");
  cmd->add_option("--out-dir", opt.out_dir, "Output directory");
  cmd->add_option("--scheme", opt.schemes, "Scheme(s): bd-ris, diagonal-ris, random-phases, grid-oracle");
  cmd->add_flag("--strict-paper", opt.strict_paper, "Literal loss switches, unmirrored phase updates");
  cmd->add_option("--workers", opt.workers, "Worker threads (default: BDRIS_MAX_WORKERS or core count)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"BD-RIS uplink RSMA meta-learning simulator"};
  app.set_version_flag("--version", std::string(bdris_version()));
  app.require_subcommand(1);

  Options opt;
  auto* run = app.add_subcommand("run", "Run every scheme and seed of a config");
  add_common(run, opt);
  auto* sweep = app.add_subcommand("sweep", "Sweep M or N");
  add_common(sweep, opt);
  sweep->add_option("--vary", opt.vary, "Swept dimension")->required()->check(CLI::IsMember({"M", "N"}));
  sweep->add_option("--values", opt.values, "Values of the swept dimension")->required()->delimiter(',');
  auto* oracle = app.add_subcommand("oracle", "Compare the diagonal learner with the grid oracle");
  add_common(oracle, opt);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return run_sweep(opt, BDRIS_AXIS_NONE);
    if (*sweep) return run_sweep(opt, opt.vary == "M" ? BDRIS_AXIS_M : BDRIS_AXIS_N);
    if (*oracle) return run_oracle(opt);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "bdris-sim: %s\n", e.what());
    return 1;
  }
  return 1;
}
