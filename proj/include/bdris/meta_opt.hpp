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

#ifndef BDRIS_META_OPT_HPP
#define BDRIS_META_OPT_HPP

#include <cstdint>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "bdris/channel.hpp"
#include "bdris/mlp.hpp"
#include "bdris/sysmodel.hpp"

namespace bdris {

// Default: per-residual hinge penalties, power penalty included, symmetric
// phase updates. StrictPaper: group indicator times the raw residual sum, no
// power term in the total, unmirrored phase updates.
enum class LossMode { Default, StrictPaper };

struct PenaltyWeights {
  double threshold = 1.0;
  double norm = 1.0;
  double ris = 1.0;
  double power = 1.0;

  bool operator==(const PenaltyWeights&) const = default;
};

struct MetaConfig {
  int inner_iterations = 10;
  int outer_iterations = 5;
  int epochs = 300;
  double lr_w = 1e-3;
  double lr_p = 1e-3;
  double lr_phi = 1.5e-3;
  double alpha = 2.0 * std::numbers::pi;
  int smn_update_period = 5;
  PenaltyWeights penalty;
  LossMode mode = LossMode::Default;
  int hidden_units = 200;
  // One SMN per group instead of a single shared network; required when the
  // groups differ in size.
  bool per_group_smn = false;

  void validate() const;
  bool operator==(const MetaConfig&) const = default;
};

// How the surface is split and parameterized.
struct SurfaceLayout {
  Architecture architecture = Architecture::GroupConnected;
  std::vector<int> group_sizes;
  MagnitudeMode magnitude = MagnitudeMode::ScaledModulus;

  int elements() const;
};

// Weighted loss terms; indicators are 1 iff a residual of the group is
// positive.
struct MetaLossBreakdown {
  double l_rate = 0.0;
  double l_threshold = 0.0;
  double l_norm = 0.0;
  double l_ris = 0.0;
  double l_power = 0.0;
  int lambda = 0;
  int zeta = 0;
  int eta = 0;
  int mu = 0;
  double total = 0.0;
};

struct MetaLossVars {
  ad::Var total;
  ad::Var sum_rate;
  MetaLossBreakdown breakdown;
};

MetaLossVars meta_loss_on_tape(const ad::Var& W, const ad::Var& P, const RealizedPhi& phi, const TapeChannels& ch,
                               const SystemParams& params, const MetaConfig& config);

MetaLossBreakdown meta_loss(const Solution& sol, const ChannelSet& ch, const SystemParams& params,
                            const MetaConfig& config);

// ---------------------------------------------------------------- gradients
//
// Gradients of the sum rate at fixed values; these are the (detached) inputs
// of the update networks.

// Packed complex gradient, N x 3.
Eigen::MatrixXcd sum_rate_grad_w(const Eigen::MatrixXcd& W, const Eigen::Vector3d& P, const Eigen::MatrixXcd& Phi,
                                 const ChannelSet& ch, double noise_power);
Eigen::Vector3d sum_rate_grad_p(const Eigen::MatrixXcd& W, const Eigen::Vector3d& P, const Eigen::MatrixXcd& Phi,
                                const ChannelSet& ch, double noise_power);
std::vector<Eigen::MatrixXd> sum_rate_grad_phases(const Eigen::MatrixXcd& W, const Eigen::Vector3d& P,
                                                  std::span<const Eigen::MatrixXd> phases, MagnitudeMode magnitude,
                                                  const ChannelSet& ch, double noise_power);

// Network inputs: one column per network evaluation.
Eigen::MatrixXd rbn_inputs(const Eigen::MatrixXcd& grad_w);
Eigen::MatrixXd tpn_inputs(const Eigen::Vector3d& grad_p);
// Columns are the rows of every phase-gradient block, group by group.
Eigen::MatrixXd smn_inputs(std::span<const Eigen::MatrixXd> grad_phases);

// ---------------------------------------------------------------- updates

double phase_regulator(double delta_theta, double alpha);
ad::Var phase_regulator(const ad::Var& delta_theta, double alpha);

// W <- W + RBN(dR/dW), each entry's (Re, Im) gradient fed through the
// shared network.
ad::Var rbn_step(const Mlp::Bound& rbn, const ad::Var& W, const Eigen::Vector3d& P_hat,
                 const Eigen::MatrixXcd& Phi_hat, const ChannelSet& ch, double noise_power);

// P <- clamp(P + TPN(dR/dP), 0, P_max).
ad::Var tpn_step(const Mlp::Bound& tpn, const ad::Var& P, const Eigen::MatrixXcd& W_hat,
                 const Eigen::MatrixXcd& Phi_hat, const ChannelSet& ch, const SystemParams& params);

// theta_g <- wrap(theta_g + alpha * sigmoid(SMN(rows of dR/dtheta_g))). With
// a single network all groups are batched through it; otherwise `smn` holds
// one network per group.
std::vector<ad::Var> smn_step(std::span<const Mlp::Bound> smn, std::span<const ad::Var> phases,
                              const Eigen::MatrixXcd& W_hat, const Eigen::Vector3d& P_hat, const ChannelSet& ch,
                              double noise_power, MagnitudeMode magnitude, double alpha, LossMode mode);

// ---------------------------------------------------------------- training

struct InitialPoint {
  Eigen::MatrixXcd W;
  Eigen::Vector3d P;
  std::vector<Eigen::MatrixXd> phases;
};

// Unit-norm complex Gaussian beamformers, p11 = p12 = P_max1 / 2,
// p2 = P_max2, symmetric phases uniform in [0, 2 pi). W and P depend only on
// the seed, so every scheme starts from the same beamformers and powers.
InitialPoint initial_point(int n_antennas, const SurfaceLayout& layout, const SystemParams& params,
                           std::uint64_t seed);

Solution to_solution(const Eigen::MatrixXcd& W, const Eigen::Vector3d& P, std::span<const Eigen::MatrixXd> phases,
                     const SurfaceLayout& layout);

struct EpochRecord {
  int epoch = 0;                 // 1-based
  double mean_loss = 0.0;        // averaged meta loss of the epoch
  double mean_sum_rate = 0.0;    // mean R over the epoch's outer iterations
  double best_objective = 0.0;   // best -L^j so far
  double best_sum_rate = 0.0;    // sum rate of the tracked best, unprojected
  MetaLossBreakdown mean_terms;  // loss terms averaged over outer iterations
};

struct TrainResult {
  Solution best_solution;  // tracked best after feasibility projection
  RateBreakdown best_rates;
  double best_sum_rate = 0.0;  // sum rate of best_solution
  double best_objective = 0.0; // max over outer iterations of -L^j
  Solution best_raw_solution;
  Solution initial_solution;   // projected initial point
  double initial_sum_rate = 0.0;
  std::vector<EpochRecord> history;
  ConstraintResiduals constraint_report;
  int epochs_run = 0;
  bool diverged = false;
  std::string failure;
};

// Hooks for instrumentation; all optional.
struct TrainObserver {
  std::function<void(int epoch, int outer, const Eigen::MatrixXcd& W0, const Eigen::Vector3d& P0,
                     std::span<const Eigen::MatrixXd> phases0)>
      on_outer_start;
  std::function<void(int epoch, const Mlp& rbn, const Mlp& tpn, std::span<const Mlp> smn)> on_epoch_end;
};

TrainResult run_algorithm1(const ChannelSet& ch, const SystemParams& params, const SurfaceLayout& layout,
                           const MetaConfig& config, std::uint64_t seed, const TrainObserver* observer = nullptr);

}  // namespace bdris

#endif  // BDRIS_META_OPT_HPP
