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

#include "bdris/sysmodel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace bdris {

using ad::Var;

// ---------------------------------------------------------------- scattering

int ScatteringMatrix::elements() const { return std::accumulate(group_sizes.begin(), group_sizes.end(), 0); }

void ScatteringMatrix::validate() const {
  if (group_sizes.empty()) throw Error(ErrorCode::InvalidArgument, "scattering matrix has no groups");
  if (phases.size() != group_sizes.size()) {
    throw Error(ErrorCode::InvalidArgument, "scattering matrix: one phase block per group required");
  }
  for (std::size_t g = 0; g < group_sizes.size(); ++g) {
    if (group_sizes[g] < 1) throw Error(ErrorCode::InvalidArgument, "scattering matrix: empty group");
    if (phases[g].rows() != group_sizes[g] || phases[g].cols() != group_sizes[g]) {
      throw Error(ErrorCode::Dimension, "scattering matrix: phase block " + std::to_string(g) + " has wrong shape");
    }
  }
  if (architecture == Architecture::SingleConnected &&
      std::any_of(group_sizes.begin(), group_sizes.end(), [](int s) { return s != 1; })) {
    throw Error(ErrorCode::InvalidArgument, "single-connected surfaces have groups of one element");
  }
  if (architecture == Architecture::FullyConnected && group_sizes.size() != 1) {
    throw Error(ErrorCode::InvalidArgument, "fully-connected surfaces have exactly one group");
  }
}

ScatteringMatrix ScatteringMatrix::single_connected(const Eigen::VectorXd& theta) {
  ScatteringMatrix phi;
  phi.architecture = Architecture::SingleConnected;
  phi.magnitude = MagnitudeMode::UnitModulus;
  for (Eigen::Index m = 0; m < theta.size(); ++m) {
    phi.group_sizes.push_back(1);
    phi.phases.push_back(Eigen::MatrixXd::Constant(1, 1, theta(m)));
  }
  return phi;
}

ScatteringMatrix ScatteringMatrix::group_connected(std::vector<Eigen::MatrixXd> blocks, MagnitudeMode magnitude) {
  ScatteringMatrix phi;
  phi.architecture = Architecture::GroupConnected;
  phi.magnitude = magnitude;
  for (const auto& b : blocks) phi.group_sizes.push_back(static_cast<int>(b.rows()));
  phi.phases = std::move(blocks);
  phi.validate();
  return phi;
}

ScatteringMatrix ScatteringMatrix::fully_connected(const Eigen::MatrixXd& block, MagnitudeMode magnitude) {
  ScatteringMatrix phi = group_connected({block}, magnitude);
  phi.architecture = Architecture::FullyConnected;
  return phi;
}

std::vector<int> group_layout(Architecture architecture, int m_elements, int groups) {
  if (m_elements < 1) throw Error(ErrorCode::InvalidArgument, "need at least one RIS element");
  switch (architecture) {
    case Architecture::SingleConnected:
      return std::vector<int>(static_cast<std::size_t>(m_elements), 1);
    case Architecture::FullyConnected:
      return {m_elements};
    case Architecture::GroupConnected:
      break;
  }
  if (groups < 1 || m_elements % groups != 0) {
    throw Error(ErrorCode::InvalidArgument, "cannot split " + std::to_string(m_elements) + " elements into " +
                                                std::to_string(groups) + " equal groups");
  }
  return std::vector<int>(static_cast<std::size_t>(groups), m_elements / groups);
}

double block_modulus(int block_size, MagnitudeMode magnitude) {
  return magnitude == MagnitudeMode::ScaledModulus ? 1.0 / std::sqrt(static_cast<double>(block_size)) : 1.0;
}

Eigen::MatrixXcd realize(const ScatteringMatrix& phi) {
  phi.validate();
  const int m = phi.elements();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(m, m);
  int offset = 0;
  for (std::size_t g = 0; g < phi.group_sizes.size(); ++g) {
    const int s = phi.group_sizes[g];
    const double mod = block_modulus(s, phi.magnitude);
    for (int j = 0; j < s; ++j) {
      for (int i = 0; i < s; ++i) out(offset + i, offset + j) = std::polar(mod, phi.phases[g](i, j));
    }
    offset += s;
  }
  return out;
}

RealizedPhi realize(std::span<const Var> phase_blocks, MagnitudeMode magnitude) {
  RealizedPhi out;
  out.blocks.reserve(phase_blocks.size());
  for (const Var& theta : phase_blocks) {
    Var b = ad::exp_j(theta);
    const double mod = block_modulus(static_cast<int>(theta.rows()), magnitude);
    if (mod != 1.0) b = ad::scale(b, mod);
    out.blocks.push_back(b);
  }
  out.full = out.blocks.size() == 1 ? out.blocks.front() : ad::block_diag(out.blocks);
  return out;
}

std::vector<Eigen::MatrixXcd> Solution::blocks() const {
  std::vector<Eigen::MatrixXcd> out;
  int offset = 0;
  for (int s : group_sizes) {
    out.emplace_back(Phi.block(offset, offset, s, s));
    offset += s;
  }
  return out;
}

// ---------------------------------------------------------------- rates

Eigen::VectorXcd effective_channel(const Eigen::VectorXcd& h_direct, const Eigen::MatrixXcd& H_rb,
                                   const Eigen::MatrixXcd& Phi, const Eigen::VectorXcd& h_ru) {
  if (H_rb.rows() != h_direct.size() || H_rb.cols() != Phi.rows() || Phi.cols() != h_ru.size() ||
      Phi.rows() != Phi.cols()) {
    throw Error(ErrorCode::Dimension, "effective_channel: inconsistent dimensions");
  }
  return h_direct + H_rb * (Phi * h_ru);
}

TapeChannels record_channels(ad::Tape& tape, const ChannelSet& ch) {
  Eigen::MatrixXcd direct(ch.h_1b.size(), 2);
  direct << ch.h_1b, ch.h_2b;
  Eigen::MatrixXcd ris(ch.h_r1.size(), 2);
  ris << ch.h_r1, ch.h_r2;
  return {tape.constant(std::move(direct)), tape.constant(ch.H_rb), tape.constant(std::move(ris))};
}

RateVars rates_on_tape(const Var& W, const Var& P, const Var& Phi, const TapeChannels& ch, double noise_power) {
  if (W.cols() != 3 || W.rows() != ch.h_direct.rows()) {
    throw Error(ErrorCode::Dimension, "rates: W must be N x 3");
  }
  if (P.rows() != 3 || P.cols() != 1) throw Error(ErrorCode::Dimension, "rates: P must be 3 x 1");
  if (Phi.rows() != ch.H_rb.cols() || Phi.cols() != ch.H_rb.cols()) {
    throw Error(ErrorCode::Dimension, "rates: Phi must be M x M");
  }
  using namespace ad;
  // Effective channels g1, g2 as the columns of G.
  const Var G = add(ch.h_direct, matmul(ch.H_rb, matmul(Phi, ch.h_ris)));
  // gains(i, k) = |w_i^H g_k|^2
  const Var gains = abs2(matmul(adjoint(W), G));
  auto gain = [&](int i, int k) { return slice(gains, i, k, 1, 1); };
  const Var p11 = real_part(slice(P, 0, 0, 1, 1));
  const Var p12 = real_part(slice(P, 1, 0, 1, 1));
  const Var p2 = real_part(slice(P, 2, 0, 1, 1));

  const Var a11 = gain(0, 0);  // w11 -> UE-1
  const Var sinr11 = cwise_div(cwise_mul(p11, a11),
                               add_constant(add(cwise_mul(p12, a11), cwise_mul(p2, gain(0, 1))), noise_power));
  const Var sinr2 = cwise_div(cwise_mul(p2, gain(2, 1)), add_constant(cwise_mul(p12, gain(2, 0)), noise_power));
  const Var snr12 = scale(cwise_mul(p12, gain(1, 0)), 1.0 / noise_power);

  RateVars r;
  r.r11 = log2p1(sinr11);
  r.r2 = log2p1(sinr2);
  r.r12 = log2p1(snr12);
  r.r1 = add(r.r11, r.r12);
  r.sum = add(r.r1, r.r2);
  return r;
}

namespace {

struct ConstantSolution {
  Var W, P, Phi;
  std::vector<Var> blocks;
};

ConstantSolution record_solution(ad::Tape& tape, const Solution& sol) {
  ConstantSolution c;
  c.W = tape.constant(sol.W);
  c.P = tape.constant(Eigen::MatrixXd(sol.P));
  c.Phi = tape.constant(sol.Phi);
  for (const auto& b : sol.blocks()) c.blocks.push_back(tape.constant(b));
  return c;
}

}  // namespace

RateBreakdown sum_rate(const Solution& sol, const ChannelSet& ch, double noise_power) {
  ad::Tape tape;
  const ConstantSolution c = record_solution(tape, sol);
  const RateVars r = rates_on_tape(c.W, c.P, c.Phi, record_channels(tape, ch), noise_power);
  return {r.r11.scalar(), r.r2.scalar(), r.r12.scalar(), r.r1.scalar(), r.sum.scalar()};
}

double rate_r11(const Solution& sol, const ChannelSet& ch, double noise_power) {
  return sum_rate(sol, ch, noise_power).r11;
}
double rate_r2(const Solution& sol, const ChannelSet& ch, double noise_power) {
  return sum_rate(sol, ch, noise_power).r2;
}
double rate_r12(const Solution& sol, const ChannelSet& ch, double noise_power) {
  return sum_rate(sol, ch, noise_power).r12;
}

// ---------------------------------------------------------------- residuals

double ConstraintResiduals::max_norm_deviation() const { return std::max({gamma1, gamma2, gamma3}); }

ResidualVars residuals_on_tape(const Var& W, const Var& P, std::span<const Var> phi_blocks, const RateVars& rates,
                               const SystemParams& params) {
  using namespace ad;
  ResidualVars r;
  ad::Tape& tape = *W.tape();
  r.xi1 = scale(add_constant(rates.r1, -params.r_th1), -1.0);
  r.xi2 = scale(add_constant(rates.r2, -params.r_th2), -1.0);
  auto norm_dev = [&](int i) { return abs_real(add_constant(frobenius_norm(slice(W, 0, i, W.rows(), 1)), -1.0)); };
  r.gamma1 = norm_dev(0);
  r.gamma2 = norm_dev(1);
  r.gamma3 = norm_dev(2);

  Var unitarity = tape.constant(Eigen::MatrixXd(Eigen::MatrixXd::Zero(1, 1)));
  Var symmetry = unitarity;
  for (const Var& b : phi_blocks) {
    const Var eye = tape.constant(Eigen::MatrixXd(Eigen::MatrixXd::Identity(b.rows(), b.cols())));
    unitarity = add(unitarity, frobenius_norm(sub(matmul(adjoint(b), b), eye)));
    symmetry = add(symmetry, frobenius_norm(sub(b, transpose(b))));
  }
  r.sigma1 = unitarity;
  r.sigma2 = symmetry;

  const Var p = real_part(P);
  r.upsilon1 = add_constant(add(slice(p, 0, 0, 1, 1), slice(p, 1, 0, 1, 1)), -params.p_max1);
  r.upsilon2 = add_constant(slice(p, 2, 0, 1, 1), -params.p_max2);
  return r;
}

ConstraintResiduals constraint_residuals(const Solution& sol, const ChannelSet& ch, const SystemParams& params) {
  ad::Tape tape;
  const ConstantSolution c = record_solution(tape, sol);
  const RateVars rates = rates_on_tape(c.W, c.P, c.Phi, record_channels(tape, ch), params.noise_power);
  const ResidualVars r = residuals_on_tape(c.W, c.P, c.blocks, rates, params);
  return {r.xi1.scalar(),    r.xi2.scalar(),    r.gamma1.scalar(),   r.gamma2.scalar(),  r.gamma3.scalar(),
          r.sigma1.scalar(), r.sigma2.scalar(), r.upsilon1.scalar(), r.upsilon2.scalar()};
}

std::vector<double> unitarity_deviation(const Solution& sol) {
  std::vector<double> out;
  for (const auto& b : sol.blocks()) {
    out.push_back((b.adjoint() * b - Eigen::MatrixXcd::Identity(b.rows(), b.cols())).norm());
  }
  return out;
}

std::vector<double> symmetry_deviation(const Solution& sol) {
  std::vector<double> out;
  for (const auto& b : sol.blocks()) out.push_back((b - b.transpose()).norm());
  return out;
}

// ---------------------------------------------------------------- feasibility

Eigen::MatrixXcd symmetric_unitary_exp(const Eigen::MatrixXd& S) {
  if (S.rows() != S.cols()) throw Error(ErrorCode::Dimension, "symmetric_unitary_exp: S must be square");
  const Eigen::MatrixXd sym = 0.5 * (S + S.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  const Eigen::MatrixXd& V = eig.eigenvectors();
  Eigen::VectorXcd d(V.cols());
  for (Eigen::Index i = 0; i < d.size(); ++i) d(i) = std::polar(1.0, eig.eigenvalues()(i));
  const Eigen::MatrixXcd Vc = V.cast<ad::cplx>();
  Eigen::MatrixXcd out = Vc * d.asDiagonal() * Vc.transpose();
  return 0.5 * (out + out.transpose());
}

Eigen::MatrixXcd random_symmetric_unitary(int m, Rng& rng) {
  if (m < 1) throw Error(ErrorCode::InvalidArgument, "random_symmetric_unitary: m must be >= 1");
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXd S(m, m);
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) S(i, j) = n(rng);
  }
  return symmetric_unitary_exp(0.5 * (S + S.transpose()));
}

Eigen::MatrixXcd takagi_project(const Eigen::MatrixXcd& a) {
  if (a.rows() != a.cols()) throw Error(ErrorCode::Dimension, "takagi_project: matrix must be square");
  const Eigen::MatrixXcd sym = 0.5 * (a + a.transpose());
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(sym, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(s.size() - 1) < 1e-12) {
    throw Error(ErrorCode::DegenerateProjection, "degenerate projection");
  }
  // For a nonsingular symmetric matrix the polar factor U V^H equals the
  // Takagi product Q Q^T.
  const Eigen::MatrixXcd q = svd.matrixU() * svd.matrixV().adjoint();
  return 0.5 * (q + q.transpose());
}

Solution project_to_feasible(const Solution& sol, const SystemParams& params) {
  Solution out = sol;
  for (Eigen::Index i = 0; i < out.W.cols(); ++i) {
    const double n = out.W.col(i).norm();
    if (n > 0.0) {
      out.W.col(i) /= n;
    } else {
      out.W.col(i).setZero();
      out.W(0, i) = 1.0;
    }
  }
  out.P = out.P.cwiseMax(0.0);
  const double ue1 = out.P(0) + out.P(1);
  if (ue1 > params.p_max1) {
    out.P(0) *= params.p_max1 / ue1;
    out.P(1) = params.p_max1 - out.P(0);
  }
  out.P(2) = std::min(out.P(2), params.p_max2);

  int offset = 0;
  for (int s : out.group_sizes) {
    out.Phi.block(offset, offset, s, s) = takagi_project(sol.Phi.block(offset, offset, s, s));
    offset += s;
  }
  return out;
}

}  // namespace bdris
