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

#ifndef BDRIS_BASELINES_HPP
#define BDRIS_BASELINES_HPP

#include <cstdint>

#include "bdris/meta_opt.hpp"

namespace bdris {

enum class BaselineScheme { DiagonalRIS, RandomPhases, GridOracle };

struct BaselineResult {
  BaselineScheme scheme = BaselineScheme::RandomPhases;
  double sum_rate = 0.0;
  Solution solution;
  long evaluations = 0;
};

// The meta-learner with a single-connected (diagonal) surface and every
// other setting unchanged.
TrainResult run_diagonal_baseline(const ChannelSet& ch, const SystemParams& params, const MetaConfig& config,
                                  std::uint64_t seed);

// Matched filters w11 = w12 = g1/||g1||, w2 = g2/||g2||; p11 = p12 = P_max1/2,
// p2 = P_max2.
Solution matched_filter_solution(const Eigen::MatrixXcd& Phi, const std::vector<int>& group_sizes,
                                 const ChannelSet& ch, const SystemParams& params);

// Best of `trials` random feasible solutions (random symmetric unitary blocks
// for the given layout).
BaselineResult random_phases_baseline(const ChannelSet& ch, const SystemParams& params, const SurfaceLayout& layout,
                                      std::uint64_t seed, int trials);

// Exhaustive search over levels^M diagonal phase combinations with
// matched-filter beamformers and full-budget powers. Throws OracleTooLarge
// above 1e6 points.
BaselineResult grid_oracle_tiny(const ChannelSet& ch, const SystemParams& params, int levels);

}  // namespace bdris

#endif  // BDRIS_BASELINES_HPP
