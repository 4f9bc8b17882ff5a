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

#ifndef BDRIS_SYSMODEL_HPP
#define BDRIS_SYSMODEL_HPP

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "bdris/autodiff.hpp"
#include "bdris/channel.hpp"
#include "bdris/random.hpp"

namespace bdris {

enum class Architecture { SingleConnected, GroupConnected, FullyConnected };

// UnitModulus places e^{j theta} in every block entry; ScaledModulus uses
// e^{j theta} / sqrt(M_g), which keeps symmetric unitary blocks reachable
// for M_g >= 2.
enum class MagnitudeMode { UnitModulus, ScaledModulus };

// Phase parameterization of a block-diagonal scattering matrix. Single
// connected surfaces are the special case of M groups of size one.
struct ScatteringMatrix {
  Architecture architecture = Architecture::GroupConnected;
  std::vector<int> group_sizes;
  std::vector<Eigen::MatrixXd> phases;  // one M_g x M_g block per group, radians
  MagnitudeMode magnitude = MagnitudeMode::ScaledModulus;

  int elements() const;
  void validate() const;

  static ScatteringMatrix single_connected(const Eigen::VectorXd& theta);
  static ScatteringMatrix group_connected(std::vector<Eigen::MatrixXd> blocks,
                                          MagnitudeMode magnitude = MagnitudeMode::ScaledModulus);
  static ScatteringMatrix fully_connected(const Eigen::MatrixXd& block,
                                          MagnitudeMode magnitude = MagnitudeMode::ScaledModulus);
};

// Group sizes for an architecture: M ones, one block of M, or G equal blocks.
std::vector<int> group_layout(Architecture architecture, int m_elements, int groups);

// Per-entry modulus of a block of the given size.
double block_modulus(int block_size, MagnitudeMode magnitude);

Eigen::MatrixXcd realize(const ScatteringMatrix& phi);

struct RealizedPhi {
  std::vector<ad::Var> blocks;
  ad::Var full;
};

// Tape version of realize(); one phase block per group.
RealizedPhi realize(std::span<const ad::Var> phase_blocks, MagnitudeMode magnitude);

// Receive beamformers (columns w11, w12, w2), stream powers (p11, p12, p2)
// in watts and the realized scattering matrix.
struct Solution {
  Eigen::MatrixXcd W;
  Eigen::Vector3d P = Eigen::Vector3d::Zero();
  Eigen::MatrixXcd Phi;
  std::vector<int> group_sizes;

  // Diagonal blocks of Phi.
  std::vector<Eigen::MatrixXcd> blocks() const;
};

struct SystemParams {
  double noise_power = 1e-11;  // watts
  double p_max1 = 0.19952623149688797;
  double p_max2 = 0.19952623149688797;
  double r_th1 = 1.0;  // bits/s/Hz
  double r_th2 = 1.0;
};

Eigen::VectorXcd effective_channel(const Eigen::VectorXcd& h_direct, const Eigen::MatrixXcd& H_rb,
                                   const Eigen::MatrixXcd& Phi, const Eigen::VectorXcd& h_ru);

// Rates in bits/s/Hz. Decoding order at the BS is s11, s2, s12.
struct RateBreakdown {
  double r11 = 0.0;
  double r2 = 0.0;
  double r12 = 0.0;
  double r1 = 0.0;
  double sum = 0.0;
};

double rate_r11(const Solution& sol, const ChannelSet& ch, double noise_power);
double rate_r2(const Solution& sol, const ChannelSet& ch, double noise_power);
double rate_r12(const Solution& sol, const ChannelSet& ch, double noise_power);
RateBreakdown sum_rate(const Solution& sol, const ChannelSet& ch, double noise_power);

// Channels as tape constants: direct links and RIS links stacked as N x 2 and
// M x 2 (column 0 is UE-1).
struct TapeChannels {
  ad::Var h_direct;
  ad::Var H_rb;
  ad::Var h_ris;
};

TapeChannels record_channels(ad::Tape& tape, const ChannelSet& ch);

struct RateVars {
  ad::Var r11, r2, r12, r1, sum;
};

// W: N x 3, P: 3 x 1 (real), Phi: M x M.
RateVars rates_on_tape(const ad::Var& W, const ad::Var& P, const ad::Var& Phi, const TapeChannels& ch,
                       double noise_power);

// A residual <= 0 means the constraint holds.
struct ConstraintResiduals {
  double xi1 = 0.0, xi2 = 0.0;                    // rate thresholds
  double gamma1 = 0.0, gamma2 = 0.0, gamma3 = 0.0; // | ||w|| - 1 |
  double sigma1 = 0.0, sigma2 = 0.0;              // unitarity, symmetry
  double upsilon1 = 0.0, upsilon2 = 0.0;          // power budgets, watts

  double max_norm_deviation() const;
};

struct ResidualVars {
  ad::Var xi1, xi2, gamma1, gamma2, gamma3, sigma1, sigma2, upsilon1, upsilon2;
};

ResidualVars residuals_on_tape(const ad::Var& W, const ad::Var& P, std::span<const ad::Var> phi_blocks,
                               const RateVars& rates, const SystemParams& params);

ConstraintResiduals constraint_residuals(const Solution& sol, const ChannelSet& ch, const SystemParams& params);

// Per-block ||Phi_g^H Phi_g - I||_F and ||Phi_g - Phi_g^T||_F.
std::vector<double> unitarity_deviation(const Solution& sol);
std::vector<double> symmetry_deviation(const Solution& sol);

// exp(j S) for real symmetric S, via the eigen-decomposition of S.
Eigen::MatrixXcd symmetric_unitary_exp(const Eigen::MatrixXd& S);

// exp(j S) with S symmetrized from i.i.d. standard normal entries.
Eigen::MatrixXcd random_symmetric_unitary(int m, Rng& rng);

// Nearest symmetric unitary matrix: with the Takagi factorization
// a = U diag(s) U^T this is U U^T, computed as the unitary polar factor of a.
// Inputs are symmetrized first. Throws DegenerateProjection when the smallest
// singular value is below 1e-12.
Eigen::MatrixXcd takagi_project(const Eigen::MatrixXcd& a);

// Normalizes beamformers, scales powers into the budgets and projects every
// scattering block onto the symmetric unitary set.
Solution project_to_feasible(const Solution& sol, const SystemParams& params);

}  // namespace bdris

#endif  // BDRIS_SYSMODEL_HPP
