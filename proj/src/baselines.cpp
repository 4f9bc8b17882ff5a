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

#include "bdris/baselines.hpp"

#include <cmath>
#include <numbers>

namespace bdris {

TrainResult run_diagonal_baseline(const ChannelSet& ch, const SystemParams& params, const MetaConfig& config,
                                  std::uint64_t seed) {
  SurfaceLayout layout;
  layout.architecture = Architecture::SingleConnected;
  layout.group_sizes = group_layout(Architecture::SingleConnected, ch.elements(), ch.elements());
  layout.magnitude = MagnitudeMode::UnitModulus;
  MetaConfig diag = config;
  diag.per_group_smn = false;
  return run_algorithm1(ch, params, layout, diag, seed);
}

Solution matched_filter_solution(const Eigen::MatrixXcd& Phi, const std::vector<int>& group_sizes,
                                 const ChannelSet& ch, const SystemParams& params) {
  const Eigen::VectorXcd g1 = effective_channel(ch.h_1b, ch.H_rb, Phi, ch.h_r1);
  const Eigen::VectorXcd g2 = effective_channel(ch.h_2b, ch.H_rb, Phi, ch.h_r2);
  Solution sol;
  sol.W.resize(ch.antennas(), 3);
  sol.W.col(0) = g1.normalized();
  sol.W.col(1) = g1.normalized();
  sol.W.col(2) = g2.normalized();
  sol.P << params.p_max1 / 2.0, params.p_max1 / 2.0, params.p_max2;
  sol.Phi = Phi;
  sol.group_sizes = group_sizes;
  return sol;
}

BaselineResult random_phases_baseline(const ChannelSet& ch, const SystemParams& params, const SurfaceLayout& layout,
                                      std::uint64_t seed, int trials) {
  if (trials < 1) throw Error(ErrorCode::InvalidArgument, "random_phases_baseline: trials must be >= 1");
  if (layout.elements() != ch.elements()) throw Error(ErrorCode::Dimension, "layout does not match channel");
  Rng rng = make_rng(seed, {300});
  BaselineResult best;
  best.scheme = BaselineScheme::RandomPhases;
  best.sum_rate = -1.0;
  const int m = layout.elements();
  for (int t = 0; t < trials; ++t) {
    Eigen::MatrixXcd phi = Eigen::MatrixXcd::Zero(m, m);
    int offset = 0;
    for (int s : layout.group_sizes) {
      phi.block(offset, offset, s, s) = random_symmetric_unitary(s, rng);
      offset += s;
    }
    Solution sol = matched_filter_solution(phi, layout.group_sizes, ch, params);
    const double r = sum_rate(sol, ch, params.noise_power).sum;
    if (r > best.sum_rate) {
      best.sum_rate = r;
      best.solution = std::move(sol);
    }
  }
  best.evaluations = trials;
  return best;
}

BaselineResult grid_oracle_tiny(const ChannelSet& ch, const SystemParams& params, int levels) {
  if (levels < 1) throw Error(ErrorCode::InvalidArgument, "grid oracle: levels must be >= 1");
  const int m = ch.elements();
  const double points = std::pow(static_cast<double>(levels), m);
  if (points > 1e6) throw Error(ErrorCode::OracleTooLarge, "oracle too large");
  const long total = std::lround(points);

  BaselineResult best;
  best.scheme = BaselineScheme::GridOracle;
  best.sum_rate = -1.0;
  const std::vector<int> groups(static_cast<std::size_t>(m), 1);
  const double step = 2.0 * std::numbers::pi / levels;
  std::vector<int> digits(static_cast<std::size_t>(m), 0);
  for (long k = 0; k < total; ++k) {
    long rest = k;
    for (int i = 0; i < m; ++i) {
      digits[i] = static_cast<int>(rest % levels);
      rest /= levels;
    }
    Eigen::MatrixXcd phi = Eigen::MatrixXcd::Zero(m, m);
    for (int i = 0; i < m; ++i) phi(i, i) = std::polar(1.0, step * digits[i]);
    Solution sol = matched_filter_solution(phi, groups, ch, params);
    const double r = sum_rate(sol, ch, params.noise_power).sum;
    if (r > best.sum_rate) {
      best.sum_rate = r;
      best.solution = std::move(sol);
    }
  }
  best.evaluations = total;
  return best;
}

}  // namespace bdris
