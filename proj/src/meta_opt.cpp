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

#include "bdris/meta_opt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace bdris {

using ad::Var;

namespace {

enum Stream : std::uint64_t {
  kInitW = 100,
  kInitPhases = 101,
  kNetRbn = 200,
  kNetTpn = 201,
  kNetSmn = 202,
};

int positive_indicator(std::initializer_list<double> residuals) {
  return std::any_of(residuals.begin(), residuals.end(), [](double r) { return r > 0.0; }) ? 1 : 0;
}

std::vector<Var> record_phases(ad::Tape& tape, std::span<const Eigen::MatrixXd> phases, bool variable) {
  std::vector<Var> out;
  out.reserve(phases.size());
  for (const auto& p : phases) out.push_back(variable ? tape.variable(p) : tape.constant(p));
  return out;
}

std::vector<Eigen::MatrixXd> phase_values(std::span<const Var> phases) {
  std::vector<Eigen::MatrixXd> out;
  out.reserve(phases.size());
  for (const Var& p : phases) out.push_back(p.re());
  return out;
}

void check_finite(const Eigen::MatrixXd& m, const char* what) {
  if (!m.allFinite()) throw Error(ErrorCode::Diverged, std::string("diverged: non-finite ") + what);
}

}  // namespace

void MetaConfig::validate() const {
  if (inner_iterations < 1 || outer_iterations < 1 || epochs < 1 || smn_update_period < 1 || hidden_units < 1) {
    throw Error(ErrorCode::InvalidArgument, "meta config: iteration counts must be >= 1");
  }
  if (!(alpha > 0.0)) throw Error(ErrorCode::InvalidArgument, "meta config: alpha must be positive");
  if (!(lr_w > 0.0) || !(lr_p > 0.0) || !(lr_phi > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "meta config: learning rates must be positive");
  }
}

int SurfaceLayout::elements() const { return std::accumulate(group_sizes.begin(), group_sizes.end(), 0); }

// ---------------------------------------------------------------- meta loss

MetaLossVars meta_loss_on_tape(const Var& W, const Var& P, const RealizedPhi& phi, const TapeChannels& ch,
                               const SystemParams& params, const MetaConfig& config) {
  using namespace ad;
  ad::Tape& tape = *W.tape();
  const RateVars rates = rates_on_tape(W, P, phi.full, ch, params.noise_power);
  const ResidualVars r = residuals_on_tape(W, P, phi.blocks, rates, params);
  const PenaltyWeights& w = config.penalty;

  MetaLossBreakdown b;
  b.lambda = positive_indicator({r.xi1.scalar(), r.xi2.scalar()});
  b.zeta = positive_indicator({r.gamma1.scalar(), r.gamma2.scalar(), r.gamma3.scalar()});
  b.eta = positive_indicator({r.sigma1.scalar(), r.sigma2.scalar()});
  b.mu = positive_indicator({r.upsilon1.scalar(), r.upsilon2.scalar()});

  const Var l_rate = neg(rates.sum);
  Var l_threshold, l_norm, l_ris, l_power;
  if (config.mode == LossMode::Default) {
    l_threshold = scale(add(hinge(r.xi1), hinge(r.xi2)), w.threshold);
    l_norm = scale(add(add(hinge(r.gamma1), hinge(r.gamma2)), hinge(r.gamma3)), w.norm);
    l_ris = scale(add(hinge(r.sigma1), hinge(r.sigma2)), w.ris);
    l_power = scale(add(hinge(r.upsilon1), hinge(r.upsilon2)), w.power);
  } else {
    const Var zero = tape.constant(Eigen::MatrixXd(Eigen::MatrixXd::Zero(1, 1)));
    auto switched = [&](int on, const Var& raw, double weight) { return on ? scale(raw, weight) : zero; };
    l_threshold = switched(b.lambda, add(r.xi1, r.xi2), w.threshold);
    l_norm = switched(b.zeta, add(add(r.gamma1, r.gamma2), r.gamma3), w.norm);
    l_ris = switched(b.eta, add(r.sigma1, r.sigma2), w.ris);
    l_power = switched(b.mu, add(r.upsilon1, r.upsilon2), w.power);
  }

  Var total = add(add(add(l_rate, l_threshold), l_norm), l_ris);
  if (config.mode == LossMode::Default) total = add(total, l_power);

  b.l_rate = l_rate.scalar();
  b.l_threshold = l_threshold.scalar();
  b.l_norm = l_norm.scalar();
  b.l_ris = l_ris.scalar();
  b.l_power = l_power.scalar();
  b.total = total.scalar();
  return {total, rates.sum, b};
}

MetaLossBreakdown meta_loss(const Solution& sol, const ChannelSet& ch, const SystemParams& params,
                            const MetaConfig& config) {
  ad::Tape tape;
  RealizedPhi phi;
  phi.full = tape.constant(sol.Phi);
  for (const auto& b : sol.blocks()) phi.blocks.push_back(tape.constant(b));
  const Var W = tape.constant(sol.W);
  const Var P = tape.constant(Eigen::MatrixXd(sol.P));
  return meta_loss_on_tape(W, P, phi, record_channels(tape, ch), params, config).breakdown;
}

// ---------------------------------------------------------------- gradients

Eigen::MatrixXcd sum_rate_grad_w(const Eigen::MatrixXcd& W, const Eigen::Vector3d& P, const Eigen::MatrixXcd& Phi,
                                 const ChannelSet& ch, double noise_power) {
  ad::Tape tape;
  const Var w = tape.variable(W);
  const RateVars r = rates_on_tape(w, tape.constant(Eigen::MatrixXd(P)), tape.constant(Phi),
                                   record_channels(tape, ch), noise_power);
  return ad::grad(r.sum, {w})[0].packed();
}

Eigen::Vector3d sum_rate_grad_p(const Eigen::MatrixXcd& W, const Eigen::Vector3d& P, const Eigen::MatrixXcd& Phi,
                                const ChannelSet& ch, double noise_power) {
  ad::Tape tape;
  const Var p = tape.variable(Eigen::MatrixXd(P));
  const RateVars r = rates_on_tape(tape.constant(W), p, tape.constant(Phi), record_channels(tape, ch), noise_power);
  return ad::grad(r.sum, {p})[0].re.col(0);
}

std::vector<Eigen::MatrixXd> sum_rate_grad_phases(const Eigen::MatrixXcd& W, const Eigen::Vector3d& P,
                                                  std::span<const Eigen::MatrixXd> phases, MagnitudeMode magnitude,
                                                  const ChannelSet& ch, double noise_power) {
  ad::Tape tape;
  const std::vector<Var> theta = record_phases(tape, phases, true);
  const RealizedPhi phi = realize(theta, magnitude);
  const RateVars r = rates_on_tape(tape.constant(W), tape.constant(Eigen::MatrixXd(P)), phi.full,
                                   record_channels(tape, ch), noise_power);
  std::vector<Eigen::MatrixXd> out;
  for (auto& g : ad::grad(r.sum, theta)) out.push_back(std::move(g.re));
  return out;
}

Eigen::MatrixXd rbn_inputs(const Eigen::MatrixXcd& grad_w) {
  Eigen::MatrixXd x(2, grad_w.size());
  x.row(0) = grad_w.real().reshaped().transpose();
  x.row(1) = grad_w.imag().reshaped().transpose();
  return x;
}

Eigen::MatrixXd tpn_inputs(const Eigen::Vector3d& grad_p) { return grad_p.transpose(); }

Eigen::MatrixXd smn_inputs(std::span<const Eigen::MatrixXd> grad_phases) {
  if (grad_phases.empty()) throw Error(ErrorCode::InvalidArgument, "smn_inputs: no groups");
  const Eigen::Index width = grad_phases.front().rows();
  Eigen::Index cols = 0;
  for (const auto& g : grad_phases) {
    if (g.rows() != width) throw Error(ErrorCode::Dimension, "smn_inputs: groups differ in size");
    cols += g.rows();
  }
  Eigen::MatrixXd x(width, cols);
  Eigen::Index c = 0;
  for (const auto& g : grad_phases) {
    x.middleCols(c, g.rows()) = g.transpose();
    c += g.rows();
  }
  return x;
}

// ---------------------------------------------------------------- updates

double phase_regulator(double delta_theta, double alpha) {
  const double s = delta_theta >= 0.0 ? 1.0 / (1.0 + std::exp(-delta_theta))
                                      : std::exp(delta_theta) / (1.0 + std::exp(delta_theta));
  return alpha * s;
}

Var phase_regulator(const Var& delta_theta, double alpha) { return ad::scale(ad::sigmoid(delta_theta), alpha); }

Var rbn_step(const Mlp::Bound& rbn, const Var& W, const Eigen::Vector3d& P_hat, const Eigen::MatrixXcd& Phi_hat,
             const ChannelSet& ch, double noise_power) {
  using namespace ad;
  const Eigen::MatrixXcd g = sum_rate_grad_w(W.value(), P_hat, Phi_hat, ch, noise_power);
  const Eigen::MatrixXd x = rbn_inputs(g);
  check_finite(x, "beamformer gradient");
  const Var out = mlp2(W.tape()->constant(x), rbn.w1, rbn.b1, rbn.w2, rbn.b2);
  check_finite(out.re(), "RBN output");
  const Var delta = make_complex(slice(out, 0, 0, 1, out.cols()), slice(out, 1, 0, 1, out.cols()));
  return add(W, reshape(delta, W.rows(), W.cols()));
}

Var tpn_step(const Mlp::Bound& tpn, const Var& P, const Eigen::MatrixXcd& W_hat, const Eigen::MatrixXcd& Phi_hat,
             const ChannelSet& ch, const SystemParams& params) {
  using namespace ad;
  const Eigen::Vector3d p = P.re().col(0);
  const Eigen::MatrixXd x = tpn_inputs(sum_rate_grad_p(W_hat, p, Phi_hat, ch, params.noise_power));
  check_finite(x, "power gradient");
  const Var out = mlp2(P.tape()->constant(x), tpn.w1, tpn.b1, tpn.w2, tpn.b2);
  check_finite(out.re(), "TPN output");
  const Eigen::MatrixXd lo = Eigen::MatrixXd::Zero(3, 1);
  const Eigen::MatrixXd hi = (Eigen::MatrixXd(3, 1) << params.p_max1, params.p_max1, params.p_max2).finished();
  // The budget coupling is left to the meta loss, so its gradient must reach
  // the network even while a power sits on its bound.
  return clamp(add(P, transpose(out)), lo, hi, /*straight_through=*/true);
}

std::vector<Var> smn_step(std::span<const Mlp::Bound> smn, std::span<const Var> phases, const Eigen::MatrixXcd& W_hat,
                          const Eigen::Vector3d& P_hat, const ChannelSet& ch, double noise_power,
                          MagnitudeMode magnitude, double alpha, LossMode mode) {
  using namespace ad;
  if (phases.empty()) throw Error(ErrorCode::InvalidArgument, "smn_step: no phase blocks");
  if (smn.size() != 1 && smn.size() != phases.size()) {
    throw Error(ErrorCode::InvalidArgument, "smn_step: need one shared network or one per group");
  }
  ad::Tape& tape = *phases.front().tape();
  const std::vector<Eigen::MatrixXd> values = phase_values(phases);
  const std::vector<Eigen::MatrixXd> grads = sum_rate_grad_phases(W_hat, P_hat, values, magnitude, ch, noise_power);

  // Raw network output for each group, row r of a block = output for row r.
  std::vector<Var> raw;
  raw.reserve(phases.size());
  if (smn.size() == 1) {
    const Eigen::MatrixXd x = smn_inputs(grads);
    check_finite(x, "phase gradient");
    const Var out = mlp2(tape.constant(x), smn[0].w1, smn[0].b1, smn[0].w2, smn[0].b2);
    check_finite(out.re(), "SMN output");
    Eigen::Index c = 0;
    for (const Var& p : phases) {
      raw.push_back(transpose(slice(out, 0, c, p.rows(), p.rows())));
      c += p.rows();
    }
  } else {
    for (std::size_t g = 0; g < phases.size(); ++g) {
      const Eigen::MatrixXd x = grads[g].transpose();
      check_finite(x, "phase gradient");
      const Var out = mlp2(tape.constant(x), smn[g].w1, smn[g].b1, smn[g].w2, smn[g].b2);
      check_finite(out.re(), "SMN output");
      raw.push_back(transpose(out));
    }
  }

  std::vector<Var> next;
  next.reserve(phases.size());
  for (std::size_t g = 0; g < phases.size(); ++g) {
    Var delta = phase_regulator(raw[g], alpha);
    if (mode == LossMode::Default) delta = sym_upper(delta);
    next.push_back(wrap_two_pi(add(phases[g], delta)));
  }
  return next;
}

// ---------------------------------------------------------------- training

InitialPoint initial_point(int n_antennas, const SurfaceLayout& layout, const SystemParams& params,
                           std::uint64_t seed) {
  if (n_antennas < 1) throw Error(ErrorCode::InvalidArgument, "initial_point: N must be >= 1");
  InitialPoint init;
  Rng rng_w = make_rng(seed, {kInitW});
  init.W.resize(n_antennas, 3);
  for (int j = 0; j < 3; ++j) {
    for (int i = 0; i < n_antennas; ++i) init.W(i, j) = complex_normal(rng_w);
    init.W.col(j).normalize();
  }
  init.P << params.p_max1 / 2.0, params.p_max1 / 2.0, params.p_max2;

  Rng rng_phi = make_rng(seed, {kInitPhases});
  std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
  for (int s : layout.group_sizes) {
    Eigen::MatrixXd theta(s, s);
    for (int j = 0; j < s; ++j) {
      for (int i = 0; i <= j; ++i) theta(i, j) = theta(j, i) = u(rng_phi);
    }
    init.phases.push_back(std::move(theta));
  }
  return init;
}

Solution to_solution(const Eigen::MatrixXcd& W, const Eigen::Vector3d& P, std::span<const Eigen::MatrixXd> phases,
                     const SurfaceLayout& layout) {
  ScatteringMatrix phi;
  phi.architecture = layout.architecture;
  phi.group_sizes = layout.group_sizes;
  phi.phases.assign(phases.begin(), phases.end());
  phi.magnitude = layout.magnitude;
  return Solution{W, P, realize(phi), layout.group_sizes};
}

namespace {

struct Networks {
  Mlp rbn, tpn;
  std::vector<Mlp> smn;
};

Networks make_networks(const SurfaceLayout& layout, const MetaConfig& config, std::uint64_t seed) {
  Networks nets;
  Rng r_rbn = make_rng(seed, {kNetRbn});
  Rng r_tpn = make_rng(seed, {kNetTpn});
  nets.rbn = Mlp::initialized(2, config.hidden_units, 2, r_rbn);
  nets.tpn = Mlp::initialized(1, config.hidden_units, 1, r_tpn);
  const auto& sizes = layout.group_sizes;
  if (config.per_group_smn) {
    for (std::size_t g = 0; g < sizes.size(); ++g) {
      Rng r = make_rng(seed, {kNetSmn, g});
      nets.smn.push_back(Mlp::initialized(sizes[g], config.hidden_units, sizes[g], r));
    }
  } else {
    if (std::adjacent_find(sizes.begin(), sizes.end(), std::not_equal_to<>()) != sizes.end()) {
      throw Error(ErrorCode::InvalidArgument,
                  "a shared scattering-matrix network needs equal group sizes; enable per_group_smn");
    }
    Rng r = make_rng(seed, {kNetSmn, 0});
    nets.smn.push_back(Mlp::initialized(sizes.front(), config.hidden_units, sizes.front(), r));
  }
  return nets;
}

std::array<Eigen::MatrixXd, 4> take_grads(std::vector<ad::Gradient>& grads, std::size_t offset) {
  return {std::move(grads[offset].re), std::move(grads[offset + 1].re), std::move(grads[offset + 2].re),
          std::move(grads[offset + 3].re)};
}

void accumulate_terms(MetaLossBreakdown& acc, const MetaLossBreakdown& b) {
  acc.l_rate += b.l_rate;
  acc.l_threshold += b.l_threshold;
  acc.l_norm += b.l_norm;
  acc.l_ris += b.l_ris;
  acc.l_power += b.l_power;
  acc.lambda = std::max(acc.lambda, b.lambda);
  acc.zeta = std::max(acc.zeta, b.zeta);
  acc.eta = std::max(acc.eta, b.eta);
  acc.mu = std::max(acc.mu, b.mu);
  acc.total += b.total;
}

}  // namespace

TrainResult run_algorithm1(const ChannelSet& ch, const SystemParams& params, const SurfaceLayout& layout,
                           const MetaConfig& config, std::uint64_t seed, const TrainObserver* observer) {
  config.validate();
  if (layout.elements() != ch.elements()) {
    throw Error(ErrorCode::Dimension, "surface layout does not match the channel's RIS size");
  }
  const int n_antennas = ch.antennas();
  const InitialPoint init = initial_point(n_antennas, layout, params, seed);
  Networks nets = make_networks(layout, config, seed);
  MlpAdam opt_rbn(config.lr_w), opt_tpn(config.lr_p);
  std::vector<MlpAdam> opt_smn(nets.smn.size(), MlpAdam(config.lr_phi));

  TrainResult result;
  result.initial_solution = project_to_feasible(to_solution(init.W, init.P, init.phases, layout), params);
  result.initial_sum_rate = sum_rate(result.initial_solution, ch, params.noise_power).sum;

  // Variables inherited between networks: the latest P* and Phi*.
  Eigen::Vector3d p_star = init.P;
  std::vector<Eigen::MatrixXd> phases_star = init.phases;

  double best_objective = -std::numeric_limits<double>::infinity();
  double best_raw_rate = 0.0;
  bool have_best = false;
  const double inv_outer = 1.0 / config.outer_iterations;

  try {
    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
      ad::Tape tape;
      const TapeChannels tch = record_channels(tape, ch);
      const Mlp::Bound rbn = nets.rbn.bind(tape);
      const Mlp::Bound tpn = nets.tpn.bind(tape);
      std::vector<Mlp::Bound> smn;
      for (const Mlp& net : nets.smn) smn.push_back(net.bind(tape));

      Var loss_sum;
      double rate_sum = 0.0;
      MetaLossBreakdown term_sum;
      for (int outer = 1; outer <= config.outer_iterations; ++outer) {
        if (observer && observer->on_outer_start) {
          observer->on_outer_start(epoch, outer, init.W, init.P, init.phases);
        }
        const Eigen::MatrixXcd phi_hat = to_solution(init.W, p_star, phases_star, layout).Phi;

        Var W = tape.constant(init.W);
        for (int i = 0; i < config.inner_iterations; ++i) {
          W = rbn_step(rbn, W, p_star, phi_hat, ch, params.noise_power);
        }
        const Eigen::MatrixXcd w_star = W.value();

        Var P = tape.constant(Eigen::MatrixXd(init.P));
        for (int i = 0; i < config.inner_iterations; ++i) {
          P = tpn_step(tpn, P, w_star, phi_hat, ch, params);
        }
        p_star = P.re().col(0);

        std::vector<Var> theta = record_phases(tape, init.phases, false);
        for (int i = 0; i < config.inner_iterations; ++i) {
          theta = smn_step(smn, theta, w_star, p_star, ch, params.noise_power, layout.magnitude, config.alpha,
                           config.mode);
        }
        phases_star = phase_values(theta);

        const MetaLossVars loss = meta_loss_on_tape(W, P, realize(theta, layout.magnitude), tch, params, config);
        const double total = loss.breakdown.total;
        if (!std::isfinite(total)) throw Error(ErrorCode::Diverged, "diverged: non-finite meta loss");
        loss_sum = loss_sum.valid() ? ad::add(loss_sum, loss.total) : loss.total;
        rate_sum += loss.sum_rate.scalar();
        accumulate_terms(term_sum, loss.breakdown);

        if (-total > best_objective) {
          best_objective = -total;
          best_raw_rate = loss.sum_rate.scalar();
          result.best_raw_solution = to_solution(w_star, p_star, phases_star, layout);
          have_best = true;
        }
      }

      const Var mean_loss = ad::scale(loss_sum, inv_outer);
      std::vector<Var> params_on_tape{rbn.w1, rbn.b1, rbn.w2, rbn.b2, tpn.w1, tpn.b1, tpn.w2, tpn.b2};
      for (const auto& s : smn) params_on_tape.insert(params_on_tape.end(), {s.w1, s.b1, s.w2, s.b2});
      std::vector<ad::Gradient> grads = ad::grad(mean_loss, params_on_tape);

      opt_rbn.step(nets.rbn, take_grads(grads, 0));
      opt_tpn.step(nets.tpn, take_grads(grads, 4));
      if ((epoch + 1) % config.smn_update_period == 0) {
        for (std::size_t g = 0; g < nets.smn.size(); ++g) opt_smn[g].step(nets.smn[g], take_grads(grads, 8 + 4 * g));
      }

      EpochRecord rec;
      rec.epoch = epoch;
      rec.mean_loss = mean_loss.scalar();
      rec.mean_sum_rate = rate_sum * inv_outer;
      rec.best_objective = best_objective;
      rec.best_sum_rate = best_raw_rate;
      rec.mean_terms = term_sum;
      rec.mean_terms.l_rate *= inv_outer;
      rec.mean_terms.l_threshold *= inv_outer;
      rec.mean_terms.l_norm *= inv_outer;
      rec.mean_terms.l_ris *= inv_outer;
      rec.mean_terms.l_power *= inv_outer;
      rec.mean_terms.total *= inv_outer;
      result.history.push_back(rec);
      result.epochs_run = epoch;

      if (observer && observer->on_epoch_end) observer->on_epoch_end(epoch, nets.rbn, nets.tpn, nets.smn);
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::Diverged) throw;
    result.diverged = true;
    result.failure = e.what();
  }

  if (!have_best) {
    result.best_raw_solution = to_solution(init.W, init.P, init.phases, layout);
    best_objective = -meta_loss(result.best_raw_solution, ch, params, config).total;
  }
  result.best_objective = best_objective;
  result.best_solution = project_to_feasible(result.best_raw_solution, params);
  result.best_rates = sum_rate(result.best_solution, ch, params.noise_power);
  result.best_sum_rate = result.best_rates.sum;
  result.constraint_report = constraint_residuals(result.best_solution, ch, params);
  return result;
}

}  // namespace bdris
