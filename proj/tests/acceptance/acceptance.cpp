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

// Acceptance driver: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. An optional argument names a directory that receives the
// sweep outputs.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "bdris/channel.hpp"
#include "bdris/config.hpp"
#include "bdris/experiment.hpp"
#include "bdris/meta_opt.hpp"
#include "bdris/sysmodel.hpp"
#include "oracles.hpp"

using namespace bdris;
using cplx = std::complex<double>;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(bool ok, const std::string& name, const std::string& detail) {
  std::printf("%s %s: %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double mean_rate(const std::vector<ResultRow>& rows, Scheme scheme, int n, int m) {
  double sum = 0.0;
  int count = 0;
  for (const auto& r : rows) {
    if (r.scheme == scheme && r.n_antennas == n && r.m_elements == m) {
      sum += r.best_sum_rate;
      ++count;
    }
  }
  return count ? sum / count : std::numeric_limits<double>::quiet_NaN();
}

struct FeasibilityTally {
  int runs = 0;
  int bad = 0;
  double worst_norm = 0.0, worst_power = 0.0, worst_unit = 0.0, worst_sym = 0.0;
  std::vector<std::string> notes;

  void add(const ResultRow& r) {
    ++runs;
    if (r.status != RunStatus::Ok) {
      ++bad;
      notes.push_back(run_label(r) + " " + std::string(status_name(r.status)) + ": " + r.failure);
      return;
    }
    worst_norm = std::max(worst_norm, r.norm_deviation);
    worst_power = std::max({worst_power, r.power_slack1, r.power_slack2});
    for (double d : unitarity_deviation(r.solution)) worst_unit = std::max(worst_unit, d);
    for (double d : symmetry_deviation(r.solution)) worst_sym = std::max(worst_sym, d);
  }
  bool ok() const {
    return bad == 0 && worst_norm <= 1e-9 && worst_power <= 1e-12 && worst_unit <= 1e-8 && worst_sym <= 1e-8;
  }
};

ExperimentConfig desk_config() {
  ExperimentConfig c;
  c.n_antennas = 4;
  c.m_elements = 8;
  c.groups = 2;
  c.seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  c.schemes = {Scheme::BDRIS, Scheme::DiagonalRIS};
  return c;
}

void emit_if(const std::string& out, const std::string& sub, const std::vector<ResultRow>& rows,
             const ExperimentConfig& c, SweepAxis axis, const std::vector<int>& values) {
  if (out.empty()) return;
  emit_results(rows, c, axis, values, std::filesystem::path(out) / sub);
}

// Sweeps over M, then over N. Returns the M-sweep rows for the convergence
// criterion.
std::vector<ResultRow> sweeps(FeasibilityTally& tally, const std::string& out) {
  const ExperimentConfig c = desk_config();
  const int workers = worker_limit();

  auto t0 = Clock::now();
  const std::vector<int> ms{4, 8, 16};
  const auto m_rows = run_sweep(c, SweepAxis::Elements, ms, workers);
  const double m_time = seconds_since(t0);
  for (const auto& r : m_rows) tally.add(r);
  emit_if(out, "sweep_m", m_rows, c, SweepAxis::Elements, ms);

  bool ok = true;
  std::string detail;
  for (int m : ms) {
    const double bd = mean_rate(m_rows, Scheme::BDRIS, 4, m);
    const double dg = mean_rate(m_rows, Scheme::DiagonalRIS, 4, m);
    ok = ok && bd >= dg;
    detail += "M=" + std::to_string(m) + " bd " + fmt("%.4f", bd) + " diag " + fmt("%.4f", dg) + "; ";
  }
  const double bd16 = mean_rate(m_rows, Scheme::BDRIS, 4, 16);
  const double dg16 = mean_rate(m_rows, Scheme::DiagonalRIS, 4, 16);
  const double gain = (bd16 - dg16) / dg16;
  ok = ok && gain > 0.0;
  detail += "gain at M=16 " + fmt("%.2f%%", 100.0 * gain) + "; " + fmt("%.0f s", m_time);
  report(ok, "gain-vs-elements", detail);

  t0 = Clock::now();
  ExperimentConfig cn = c;
  cn.m_elements = 16;
  const std::vector<int> ns{2, 4, 8};
  const auto n_rows = run_sweep(cn, SweepAxis::Antennas, ns, workers);
  const double n_time = seconds_since(t0);
  for (const auto& r : n_rows) tally.add(r);
  emit_if(out, "sweep_n", n_rows, cn, SweepAxis::Antennas, ns);
  ok = true;
  detail.clear();
  for (Scheme s : {Scheme::BDRIS, Scheme::DiagonalRIS}) {
    double previous = -1.0;
    detail += std::string(scheme_name(s)) + ":";
    for (int n : ns) {
      const double v = mean_rate(n_rows, s, n, 16);
      ok = ok && v >= previous;
      previous = v;
      detail += " N=" + std::to_string(n) + " " + fmt("%.4f", v);
    }
    detail += "; ";
  }
  detail += fmt("%.0f s", n_time);
  report(ok, "rate-vs-antennas", detail);
  return m_rows;
}

void convergence(const std::vector<ResultRow>& m_rows) {
  int seeds = 0, improved = 0, monotone = 0;
  double worst_ratio = std::numeric_limits<double>::infinity();
  for (const auto& r : m_rows) {
    if (r.scheme != Scheme::BDRIS || r.m_elements != 8 || r.status != RunStatus::Ok) continue;
    ++seeds;
    bool mono = true;
    for (std::size_t e = 1; e < r.history.size(); ++e) mono = mono && r.history[e].best_objective >= r.history[e - 1].best_objective;
    monotone += mono ? 1 : 0;
    const double ratio = r.best_sum_rate / r.initial_sum_rate;
    worst_ratio = std::min(worst_ratio, ratio);
    if (ratio >= 1.1) ++improved;
  }
  const bool ok = seeds >= 10 && monotone == seeds && improved * 10 >= seeds * 8;
  report(ok, "convergence",
         std::to_string(monotone) + "/" + std::to_string(seeds) + " best-so-far series non-decreasing; " +
             std::to_string(improved) + "/" + std::to_string(seeds) + " seeds >= 1.1x initial (worst " +
             fmt("%.3fx", worst_ratio) + ")");
}

void oracle_gate(FeasibilityTally& tally) {
  ExperimentConfig c = desk_config();
  c.n_antennas = 2;
  c.m_elements = 2;
  c.groups = 2;
  c.oracle_levels = 16;
  c.schemes = {Scheme::DiagonalRIS, Scheme::GridOracle};
  const auto t0 = Clock::now();
  const auto rows = run_sweep(c, SweepAxis::None, {}, worker_limit());
  const double elapsed = seconds_since(t0);
  std::map<std::uint64_t, double> learner, grid;
  for (const auto& r : rows) {
    tally.add(r);
    (r.scheme == Scheme::GridOracle ? grid : learner)[r.seed] = r.best_sum_rate;
  }
  int hits = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& [seed, g] : grid) {
    const double ratio = learner[seed] / g;
    worst = std::min(worst, ratio);
    if (ratio >= 0.9) ++hits;
  }
  const bool ok = grid.size() == 10 && hits >= 8 && elapsed <= 120.0;
  report(ok, "oracle-gate",
         std::to_string(hits) + "/" + std::to_string(grid.size()) + " seeds >= 90% of oracle (worst " +
             fmt("%.3f", worst) + "); " + fmt("%.1f s", elapsed));
}

// Finite-difference check of every rate, the sum rate and the meta loss with
// respect to W, P and the phase blocks.
void gradients() {
  const SystemParams params;
  MetaConfig config;
  std::mt19937_64 r(2024);
  const char* names[] = {"R11", "R2", "R12", "sum", "meta-loss"};
  double worst[5][3] = {};
  constexpr double kPi = std::numbers::pi;

  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + trial % 3;
    const ChannelSet ch = generate_channel_set({}, {}, n, 4, static_cast<std::uint64_t>(9000 + trial));
    Eigen::MatrixXcd W0 = oracle::random_complex(r, n, 3);
    for (Eigen::Index k = 0; k < 3; ++k) W0.col(k) *= (0.8 + 0.4 * (trial % 2)) / W0.col(k).norm();
    const Eigen::MatrixXcd P0 = oracle::random_real(r, 3, 1, 0.02, 0.15).cast<cplx>();
    std::vector<Eigen::MatrixXd> th0;
    for (int g = 0; g < 2; ++g) {
      Eigen::MatrixXd a = oracle::random_real(r, 2, 2, 0, 2 * kPi);
      th0.push_back(0.5 * (a + a.transpose()));
    }
    const MagnitudeMode mode = trial % 2 ? MagnitudeMode::ScaledModulus : MagnitudeMode::UnitModulus;

    for (int obj = 0; obj < 5; ++obj) {
      const auto build = [&](ad::Tape& t, const Eigen::MatrixXcd& W, const Eigen::MatrixXcd& P,
                             const std::vector<Eigen::MatrixXd>& th, std::vector<ad::Var>* vars) {
        const bool grad = vars != nullptr;
        const ad::Var Wv = grad ? t.variable(W) : t.constant(W);
        const ad::Var Pv = grad ? t.variable(P) : t.constant(P);
        std::vector<ad::Var> blocks;
        for (const auto& b : th) blocks.push_back(grad ? t.variable(b) : t.constant(b));
        if (grad) *vars = {Wv, Pv, blocks[0], blocks[1]};
        const RealizedPhi phi = realize(blocks, mode);
        const TapeChannels tc = record_channels(t, ch);
        if (obj == 4) return meta_loss_on_tape(Wv, Pv, phi, tc, params, config).total;
        const RateVars rv = rates_on_tape(Wv, Pv, phi.full, tc, params.noise_power);
        return obj == 0 ? rv.r11 : obj == 1 ? rv.r2 : obj == 2 ? rv.r12 : rv.sum;
      };
      ad::Tape t;
      std::vector<ad::Var> vars;
      const ad::Var f = build(t, W0, P0, th0, &vars);
      const auto g = ad::grad(f, vars);
      const auto value = [&](const Eigen::MatrixXcd& W, const Eigen::MatrixXcd& P,
                             const std::vector<Eigen::MatrixXd>& th) {
        ad::Tape s;
        return build(s, W, P, th, nullptr).scalar();
      };
      const auto [fw_re, fw_im] = oracle::central_difference([&](const Eigen::MatrixXcd& W) { return value(W, P0, th0); }, W0);
      const auto [fp_re, fp_im] =
          oracle::central_difference([&](const Eigen::MatrixXcd& P) { return value(W0, P, th0); }, P0, 1e-7);
      double e_w = std::max(oracle::relative_error(g[0].re, fw_re), oracle::relative_error(g[0].im, fw_im));
      double e_p = oracle::relative_error(g[1].re, fp_re);
      double e_phi = 0.0;
      for (int b = 0; b < 2; ++b) {
        const auto [fa_re, fa_im] = oracle::central_difference(
            [&](const Eigen::MatrixXcd& A) {
              std::vector<Eigen::MatrixXd> th = th0;
              th[static_cast<std::size_t>(b)] = A.real();
              return value(W0, P0, th);
            },
            th0[static_cast<std::size_t>(b)].cast<cplx>());
        e_phi = std::max(e_phi, oracle::relative_error(g[2 + b].re, fa_re));
      }
      worst[obj][0] = std::max(worst[obj][0], e_w);
      worst[obj][1] = std::max(worst[obj][1], e_p);
      worst[obj][2] = std::max(worst[obj][2], e_phi);
    }
  }
  bool ok = true;
  std::string detail = "max relative error (W/P/phases):";
  for (int obj = 0; obj < 5; ++obj) {
    for (double e : worst[obj]) ok = ok && e <= 1e-4;
    char buf[160];
    std::snprintf(buf, sizeof buf, " %s %.1e/%.1e/%.1e;", names[obj], worst[obj][0], worst[obj][1], worst[obj][2]);
    detail += buf;
  }
  report(ok, "gradient-fd", detail + " 100 instances");
}

void rate_oracle() {
  const SystemParams params;
  Rng rng = make_rng(31);
  std::mt19937_64 r(31);
  double worst = 0.0, worst_gap = -std::numeric_limits<double>::infinity();
  int bound_violations = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + trial % 6;
    const int m = 4 * (1 + trial % 3);
    const ChannelSet ch = generate_channel_set({}, {}, n, m, static_cast<std::uint64_t>(20000 + trial));
    Solution s;
    s.W = oracle::random_complex(r, n, 3);
    for (Eigen::Index k = 0; k < 3; ++k) s.W.col(k).normalize();
    const double split = uniform(rng, 0.0, 1.0);
    const double used = uniform(rng, 0.0, 1.0);
    s.P << used * split * params.p_max1, used * (1.0 - split) * params.p_max1, uniform(rng, 0.0, params.p_max2);
    s.group_sizes.assign(static_cast<std::size_t>(m / 4), 4);
    s.Phi = Eigen::MatrixXcd::Zero(m, m);
    for (int g = 0; g < m / 4; ++g) s.Phi.block(4 * g, 4 * g, 4, 4) = random_symmetric_unitary(4, rng);

    const Eigen::VectorXcd g1 = oracle::effective(ch.h_1b, ch.H_rb, s.Phi, ch.h_r1);
    const Eigen::VectorXcd g2 = oracle::effective(ch.h_2b, ch.H_rb, s.Phi, ch.h_r2);
    const auto ref =
        oracle::stream_rates(s.W.col(0), s.W.col(1), s.W.col(2), s.P(0), s.P(1), s.P(2), g1, g2, params.noise_power);
    const RateBreakdown got = sum_rate(s, ch, params.noise_power);
    worst = std::max({worst, std::abs(got.r11 - ref.r11), std::abs(got.r2 - ref.r2), std::abs(got.r12 - ref.r12)});
    const double bound = oracle::mac_sum_capacity(g1, g2, s.P(0) + s.P(1), s.P(2), params.noise_power);
    worst_gap = std::max(worst_gap, got.sum - bound);
    if (got.sum > bound + 1e-9) ++bound_violations;
  }
  report(worst <= 1e-12 && bound_violations == 0, "rate-oracle",
         "max |rate - scalar oracle| " + fmt("%.2e", worst) + "; MAC bound violations " +
             std::to_string(bound_violations) + "/1000 (max sum - bound " + fmt("%.3f", worst_gap) + " bit)");
}

void channel_statistics() {
  const FadingParams p;
  const int draws = 10000;

  NodeGeometry near_g;
  near_g.bs_pos = {0, 0, 0};
  near_g.ue1_pos = {10, 0, 0};
  NodeGeometry far_g = near_g;
  far_g.ue1_pos = {100, 0, 0};
  double near_sum = 0.0, far_sum = 0.0;
  for (int s = 0; s < draws; ++s) {
    near_sum += generate_channel_set(near_g, p, 1, 1, static_cast<std::uint64_t>(s)).h_1b.squaredNorm();
    far_sum += generate_channel_set(far_g, p, 1, 1, static_cast<std::uint64_t>(s + draws)).h_1b.squaredNorm();
  }
  const double scaling = (far_sum / near_sum) / std::pow(10.0, -3.5) - 1.0;

  const NodeGeometry g;
  double e[5] = {};
  cplx mean[3] = {};
  for (int s = 0; s < draws; ++s) {
    const ChannelSet ch = generate_channel_set(g, p, 2, 2, static_cast<std::uint64_t>(50000 + s));
    e[0] += std::norm(ch.h_1b(1));
    e[1] += std::norm(ch.h_2b(0));
    e[2] += std::norm(ch.H_rb(1, 0));
    e[3] += std::norm(ch.h_r1(0));
    e[4] += std::norm(ch.h_r2(1));
    mean[0] += ch.H_rb(1, 0);
    mean[1] += ch.h_r1(0);
    mean[2] += ch.h_r2(1);
  }
  const double pl[5] = {
      path_loss(distance(g.ue1_pos, g.bs_pos), p, p.eta_direct),
      path_loss(distance(g.ue2_pos, g.bs_pos), p, p.eta_direct),
      path_loss(distance(g.ris_pos, g.bs_pos), p, p.eta_ris),
      path_loss(distance(g.ris_pos, g.ue1_pos), p, p.eta_ris),
      path_loss(distance(g.ris_pos, g.ue2_pos), p, p.eta_ris),
  };
  double worst_energy = 0.0;
  for (int i = 0; i < 5; ++i) worst_energy = std::max(worst_energy, std::abs(e[i] / draws / pl[i] - 1.0));
  const double k = db_to_linear(p.rician_k_db);
  double worst_fraction = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double fraction = std::norm(mean[i] / static_cast<double>(draws)) / (e[2 + i] / draws);
    worst_fraction = std::max(worst_fraction, std::abs(fraction / (k / (1.0 + k)) - 1.0));
  }
  const bool ok = std::abs(scaling) <= 0.05 && worst_energy <= 0.05 && worst_fraction <= 0.02;
  report(ok, "channel-statistics",
         "10x distance power ratio off by " + fmt("%.2f%%", 100.0 * std::abs(scaling)) + " (tol 5%); link energy vs path loss " +
             fmt("%.2f%%", 100.0 * worst_energy) + " (tol 5%); LoS fraction " + fmt("%.2f%%", 100.0 * worst_fraction) +
             " (tol 2%); 1e4 draws");
}

void complexity() {
  const ChannelSet ch = generate_channel_set({}, {}, 4, 8, 1);
  const SystemParams params;
  const SurfaceLayout layout{Architecture::GroupConnected, {4, 4}, MagnitudeMode::ScaledModulus};
  const auto timed = [&](int inner) {
    MetaConfig c;
    c.inner_iterations = inner;
    c.epochs = 30;
    double best = std::numeric_limits<double>::infinity();
    for (int rep = 0; rep < 3; ++rep) {
      const auto t0 = Clock::now();
      run_algorithm1(ch, params, layout, c, 1);
      best = std::min(best, seconds_since(t0));
    }
    return best;
  };
  const double t10 = timed(10);
  const double t20 = timed(20);
  const double ratio = t20 / t10;
  report(ratio >= 1.4 && ratio <= 2.6, "complexity-scaling",
         "N_i 10 -> 20 wall time " + fmt("%.3f s", t10) + " -> " + fmt("%.3f s", t20) + ", ratio " + fmt("%.2f", ratio) +
             " (accepted 1.4..2.6)");
}

}  // namespace

int main(int argc, char** argv) {
  const std::string out = argc > 1 ? argv[1] : "";
  const auto t0 = Clock::now();
  gradients();
  rate_oracle();
  channel_statistics();
  complexity();
  FeasibilityTally tally;
  const auto m_rows = sweeps(tally, out);
  convergence(m_rows);
  oracle_gate(tally);
  report(tally.ok(), "feasibility",
         std::to_string(tally.runs) + " runs, " + std::to_string(tally.bad) + " not ok; worst norm deviation " +
             fmt("%.1e", tally.worst_norm) + ", power excess " + fmt("%.1e", tally.worst_power) + ", unitarity " +
             fmt("%.1e", tally.worst_unit) + ", symmetry " + fmt("%.1e", tally.worst_sym));
  for (const auto& note : tally.notes) std::printf("  %s\n", note.c_str());
  std::printf("%d criteria failed; total %.0f s\n", failures, seconds_since(t0));
  return failures == 0 ? 0 : 1;
}
