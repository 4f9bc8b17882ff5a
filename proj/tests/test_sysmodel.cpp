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

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "catch_amalgamated.hpp"

#include "bdris/error.hpp"
#include "bdris/sysmodel.hpp"
#include "oracles.hpp"

using namespace bdris;
using cplx = std::complex<double>;

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::MatrixXcd unit_columns(Eigen::MatrixXcd W) {
  for (Eigen::Index i = 0; i < W.cols(); ++i) W.col(i).normalize();
  return W;
}

// Random feasible point: unit beamformers, powers inside the budgets and
// random symmetric unitary blocks of size 4.
Solution random_feasible(Rng& rng, std::mt19937_64& r, int n, int m, const SystemParams& params) {
  Solution s;
  s.W = unit_columns(oracle::random_complex(r, n, 3));
  const double split = uniform(rng, 0.0, 1.0);
  const double used = uniform(rng, 0.0, 1.0);
  s.P << used * split * params.p_max1, used * (1.0 - split) * params.p_max1, uniform(rng, 0.0, params.p_max2);
  s.group_sizes.assign(static_cast<std::size_t>(m / 4), 4);
  s.Phi = Eigen::MatrixXcd::Zero(m, m);
  for (int g = 0; g < m / 4; ++g) s.Phi.block(4 * g, 4 * g, 4, 4) = random_symmetric_unitary(4, rng);
  return s;
}

ChannelSet scalar_channel(cplx h1, cplx h2, cplx H, cplx hr1, cplx hr2) {
  ChannelSet ch;
  ch.h_1b = Eigen::VectorXcd::Constant(1, h1);
  ch.h_2b = Eigen::VectorXcd::Constant(1, h2);
  ch.H_rb = Eigen::MatrixXcd::Constant(1, 1, H);
  ch.h_r1 = Eigen::VectorXcd::Constant(1, hr1);
  ch.h_r2 = Eigen::VectorXcd::Constant(1, hr2);
  return ch;
}

}  // namespace

TEST_CASE("realize places blocks with exact structure") {
  const ScatteringMatrix diag2 = ScatteringMatrix::group_connected(
      {Eigen::MatrixXd::Zero(1, 1), Eigen::MatrixXd::Constant(1, 1, kPi / 2.0)});
  const Eigen::MatrixXcd phi = realize(diag2);
  CHECK(std::abs(phi(0, 0) - cplx(1, 0)) <= 1e-15);
  CHECK(std::abs(phi(1, 1) - cplx(0, 1)) <= 1e-15);
  CHECK(phi(0, 1) == cplx(0, 0));
  CHECK(phi(1, 0) == cplx(0, 0));

  Rng rng = make_rng(4);
  Eigen::VectorXd theta(4);
  for (int i = 0; i < 4; ++i) theta(i) = uniform(rng, 0, 2 * kPi);
  const Eigen::MatrixXcd single = realize(ScatteringMatrix::single_connected(theta));
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      if (i == j) {
        CHECK(std::abs(std::abs(single(i, j)) - 1.0) <= 1e-15);
      } else {
        CHECK(single(i, j) == cplx(0, 0));
      }
    }
  }

  std::mt19937_64 r(5);
  std::vector<Eigen::MatrixXd> blocks;
  for (int g = 0; g < 3; ++g) {
    Eigen::MatrixXd b = oracle::random_real(r, 3, 3, 0, 2 * kPi);
    blocks.push_back(0.5 * (b + b.transpose()));
  }
  const Eigen::MatrixXcd grouped = realize(ScatteringMatrix::group_connected(blocks));
  CHECK((grouped - grouped.transpose()).norm() == 0.0);
  for (int i = 0; i < 9; ++i) {
    for (int j = 0; j < 9; ++j) {
      if (i / 3 != j / 3) {
        CHECK(grouped(i, j) == cplx(0, 0));
      } else {
        CHECK(std::abs(grouped(i, j)) == Catch::Approx(1.0 / std::sqrt(3.0)));
      }
    }
  }
  Eigen::MatrixXd full = oracle::random_real(r, 5, 5, 0, 2 * kPi);
  full = (0.5 * (full + full.transpose())).eval();
  const Eigen::MatrixXcd fully = realize(ScatteringMatrix::fully_connected(full, MagnitudeMode::UnitModulus));
  CHECK((fully - fully.transpose()).norm() == 0.0);
  CHECK((fully.cwiseAbs().array() - 1.0).abs().maxCoeff() <= 1e-15);
}

TEST_CASE("group layouts") {
  CHECK(group_layout(Architecture::SingleConnected, 4, 2) == std::vector<int>{1, 1, 1, 1});
  CHECK(group_layout(Architecture::GroupConnected, 8, 2) == std::vector<int>{4, 4});
  CHECK(group_layout(Architecture::FullyConnected, 6, 3) == std::vector<int>{6});
  CHECK_THROWS_AS(group_layout(Architecture::GroupConnected, 7, 2), Error);
}

TEST_CASE("effective channel examples") {
  std::mt19937_64 r(1);
  const Eigen::VectorXcd h = oracle::random_complex(r, 3, 1);
  const Eigen::MatrixXcd H = oracle::random_complex(r, 3, 4);
  const Eigen::VectorXcd hr = oracle::random_complex(r, 4, 1);
  CHECK(effective_channel(h, H, Eigen::MatrixXcd::Zero(4, 4), hr) == h);
  CHECK(effective_channel(Eigen::VectorXcd::Zero(3), H, Eigen::MatrixXcd::Identity(4, 4), hr).isApprox(H * hr));
  const Eigen::VectorXcd g =
      effective_channel(Eigen::VectorXcd::Constant(1, 2.0), Eigen::MatrixXcd::Constant(1, 1, 3.0),
                        Eigen::MatrixXcd::Constant(1, 1, cplx(0, 1)), Eigen::VectorXcd::Constant(1, 4.0));
  CHECK(g(0) == cplx(2, 12));
  CHECK_THROWS_AS(effective_channel(h, H, Eigen::MatrixXcd::Zero(3, 3), hr), Error);
}

TEST_CASE("stream rates: closed-form cases") {
  const double noise = 1e-11;
  const ChannelSet ch = scalar_channel(1e-3, 1e-3, 0.0, 0.0, 0.0);
  Solution s;
  s.W = Eigen::MatrixXcd::Ones(1, 3);
  s.Phi = Eigen::MatrixXcd::Zero(1, 1);
  s.group_sizes = {1};

  s.P << 0.0, 0.1, 0.1;
  CHECK(rate_r11(s, ch, noise) == 0.0);
  s.P << 0.1, 0.0, 0.1;
  CHECK(rate_r12(s, ch, noise) == 0.0);
  s.P << 0.1, 0.1, 0.0;
  CHECK(rate_r2(s, ch, noise) == 0.0);

  s.P << 0.1, 0.1, 0.1;
  CHECK(rate_r11(s, ch, 1e-30) == Catch::Approx(std::log2(1.5)).epsilon(1e-12));

  // p12 |w12^H g1|^2 / noise = 10
  s.P << 0.1, 10.0 * noise / 1e-6, 0.1;
  CHECK(rate_r12(s, ch, noise) == Catch::Approx(std::log2(11.0)).epsilon(1e-12));

  std::mt19937_64 r(3);
  ChannelSet multi;
  multi.h_1b = oracle::random_complex(r, 4, 1, 1e-4);
  multi.h_2b = oracle::random_complex(r, 4, 1, 1e-4);
  multi.H_rb = oracle::random_complex(r, 4, 2, 1e-4);
  multi.h_r1 = oracle::random_complex(r, 2, 1, 1e-2);
  multi.h_r2 = oracle::random_complex(r, 2, 1, 1e-2);
  Solution m;
  m.Phi = Eigen::MatrixXcd::Identity(2, 2);
  m.group_sizes = {2};
  const Eigen::VectorXcd g2 = effective_channel(multi.h_2b, multi.H_rb, m.Phi, multi.h_r2);
  m.W = oracle::random_complex(r, 4, 3);
  m.W.col(2) = g2 / g2.norm();
  m.P << 0.1, 0.0, 0.15;
  CHECK(rate_r2(m, multi, noise) ==
        Catch::Approx(std::log2(1.0 + 0.15 * g2.squaredNorm() / noise)).epsilon(1e-12));

  m.P.setZero();
  const RateBreakdown zero = sum_rate(m, multi, noise);
  CHECK(zero.sum == 0.0);
  CHECK(zero.r1 == 0.0);
  CHECK(zero.r2 == 0.0);
}

TEST_CASE("rates agree with an independent scalar evaluation") {
  const SystemParams params;
  Rng rng = make_rng(77);
  std::mt19937_64 r(77);
  for (int trial = 0; trial < 200; ++trial) {
    const ChannelSet ch = generate_channel_set({}, {}, 4, 8, static_cast<std::uint64_t>(trial));
    Solution s = random_feasible(rng, r, 4, 8, params);
    s.W = oracle::random_complex(r, 4, 3);
    const Eigen::VectorXcd g1 = oracle::effective(ch.h_1b, ch.H_rb, s.Phi, ch.h_r1);
    const Eigen::VectorXcd g2 = oracle::effective(ch.h_2b, ch.H_rb, s.Phi, ch.h_r2);
    const auto ref = oracle::stream_rates(s.W.col(0), s.W.col(1), s.W.col(2), s.P(0), s.P(1), s.P(2), g1, g2,
                                          params.noise_power);
    const RateBreakdown got = sum_rate(s, ch, params.noise_power);
    CHECK(std::abs(got.r11 - ref.r11) <= 1e-12);
    CHECK(std::abs(got.r2 - ref.r2) <= 1e-12);
    CHECK(std::abs(got.r12 - ref.r12) <= 1e-12);
    CHECK(got.sum == got.r1 + got.r2);
    CHECK(got.r1 == got.r11 + got.r12);
  }
}

TEST_CASE("rate monotonicity properties") {
  const SystemParams params;
  Rng rng = make_rng(8);
  std::mt19937_64 r(8);
  for (int trial = 0; trial < 100; ++trial) {
    const ChannelSet ch = generate_channel_set({}, {}, 4, 8, static_cast<std::uint64_t>(1000 + trial));
    Solution s = random_feasible(rng, r, 4, 8, params);
    Solution t = s;
    t.P(0) *= 1.7;
    t.P(2) *= 0.3;
    CHECK(rate_r12(t, ch, params.noise_power) == rate_r12(s, ch, params.noise_power));
    Solution u = s;
    u.P(1) += 0.05;
    CHECK(rate_r2(u, ch, params.noise_power) < rate_r2(s, ch, params.noise_power));
    Solution v = s;
    v.P(0) += 0.05;
    CHECK(rate_r11(v, ch, params.noise_power) > rate_r11(s, ch, params.noise_power));
    const RateBreakdown rb = sum_rate(s, ch, params.noise_power);
    CHECK(rb.r11 >= 0.0);
    CHECK(rb.r2 >= 0.0);
    CHECK(rb.r12 >= 0.0);
  }
}

TEST_CASE("sum rate stays below the MAC sum capacity") {
  const SystemParams params;
  Rng rng = make_rng(12);
  std::mt19937_64 r(12);
  for (int trial = 0; trial < 100; ++trial) {
    const ChannelSet ch = generate_channel_set({}, {}, 4, 8, static_cast<std::uint64_t>(5000 + trial));
    const Solution s = random_feasible(rng, r, 4, 8, params);
    const Eigen::VectorXcd g1 = oracle::effective(ch.h_1b, ch.H_rb, s.Phi, ch.h_r1);
    const Eigen::VectorXcd g2 = oracle::effective(ch.h_2b, ch.H_rb, s.Phi, ch.h_r2);
    const double bound = oracle::mac_sum_capacity(g1, g2, s.P(0) + s.P(1), s.P(2), params.noise_power);
    CHECK(sum_rate(s, ch, params.noise_power).sum <= bound + 1e-9);
  }
}

TEST_CASE("sum-rate gradients match finite differences") {
  const SystemParams params;
  Rng rng = make_rng(21);
  std::mt19937_64 r(21);
  for (int trial = 0; trial < 20; ++trial) {
    const ChannelSet ch = generate_channel_set({}, {}, 3, 4, static_cast<std::uint64_t>(trial));
    const Eigen::MatrixXcd W0 = oracle::random_complex(r, 3, 3);
    const Eigen::Vector3d P0(0.05, 0.08, 0.1);
    Eigen::MatrixXd th = oracle::random_real(r, 2, 2, 0, 2 * kPi);
    th = (0.5 * (th + th.transpose())).eval();
    const Eigen::MatrixXd th2 = Eigen::MatrixXd::Constant(2, 2, 0.3);

    const auto objective = [&](const Eigen::MatrixXcd& W, const Eigen::MatrixXcd& P, const Eigen::MatrixXd& a,
                               ad::Tape& t, ad::Var* wv, ad::Var* pv, ad::Var* av) {
      const ad::Var Wv = wv ? (*wv = t.variable(W)) : t.constant(W);
      const ad::Var Pv = pv ? (*pv = t.variable(P)) : t.constant(P);
      const ad::Var Av = av ? (*av = t.variable(a)) : t.constant(a);
      const std::vector<ad::Var> blocks = {Av, t.constant(th2)};
      const RealizedPhi phi = realize(blocks, MagnitudeMode::ScaledModulus);
      return rates_on_tape(Wv, Pv, phi.full, record_channels(t, ch), params.noise_power).sum;
    };
    ad::Tape t;
    ad::Var wv, pv, av;
    const Eigen::MatrixXcd Pc = P0.cast<cplx>();
    const ad::Var f = objective(W0, Pc, th, t, &wv, &pv, &av);
    const auto g = ad::grad(f, {wv, pv, av});
    const auto eval_w = [&](const Eigen::MatrixXcd& W) {
      ad::Tape s;
      return objective(W, Pc, th, s, nullptr, nullptr, nullptr).scalar();
    };
    const auto eval_p = [&](const Eigen::MatrixXcd& P) {
      ad::Tape s;
      return objective(W0, P, th, s, nullptr, nullptr, nullptr).scalar();
    };
    const auto eval_a = [&](const Eigen::MatrixXcd& A) {
      ad::Tape s;
      return objective(W0, Pc, A.real(), s, nullptr, nullptr, nullptr).scalar();
    };
    const auto [fw_re, fw_im] = oracle::central_difference(eval_w, W0);
    const auto [fp_re, fp_im] = oracle::central_difference(eval_p, Pc, 1e-7);
    const auto [fa_re, fa_im] = oracle::central_difference(eval_a, th.cast<cplx>());
    CHECK(oracle::relative_error(g[0].re, fw_re) <= 1e-4);
    CHECK(oracle::relative_error(g[0].im, fw_im) <= 1e-4);
    CHECK(oracle::relative_error(g[1].re, fp_re) <= 1e-4);
    CHECK(oracle::relative_error(g[2].re, fa_re) <= 1e-4);
  }
}

TEST_CASE("constraint residual examples") {
  const SystemParams params;
  const ChannelSet ch = generate_channel_set({}, {}, 2, 4, 3);
  Rng rng = make_rng(3);
  Solution s;
  s.W = unit_columns(Eigen::MatrixXcd::Ones(2, 3));
  s.P << params.p_max1 / 2.0, params.p_max1 / 2.0, params.p_max2;
  s.group_sizes = {2, 2};
  s.Phi = Eigen::MatrixXcd::Zero(4, 4);
  s.Phi.block(0, 0, 2, 2) = random_symmetric_unitary(2, rng);
  s.Phi.block(2, 2, 2, 2) = random_symmetric_unitary(2, rng);
  const ConstraintResiduals r = constraint_residuals(s, ch, params);
  CHECK(r.sigma1 <= 1e-12);
  CHECK(r.sigma2 <= 1e-12);
  CHECK(r.upsilon1 == Catch::Approx(0.0).margin(1e-17));
  CHECK(r.upsilon2 == 0.0);
  CHECK(r.max_norm_deviation() <= 1e-15);
  const RateBreakdown rates = sum_rate(s, ch, params.noise_power);
  CHECK(r.xi1 == Catch::Approx(params.r_th1 - rates.r1).margin(1e-14));
  CHECK(r.xi2 == Catch::Approx(params.r_th2 - rates.r2).margin(1e-14));

  std::mt19937_64 rr(6);
  const ChannelSet ch2 = generate_channel_set({}, {}, 2, 2, 3);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXd th = oracle::random_real(rr, 2, 2, 0, 2 * kPi);
    Eigen::MatrixXd sym = th;
    sym(1, 0) = sym(0, 1);
    Solution u = s;
    u.group_sizes = {2};
    u.Phi = realize(ScatteringMatrix::fully_connected(sym, MagnitudeMode::UnitModulus));
    u.W = oracle::random_complex(rr, 2, 3);
    const Eigen::MatrixXcd b = u.Phi;
    const double direct = (b.adjoint() * b - Eigen::MatrixXcd::Identity(2, 2)).norm();
    const ConstraintResiduals ru = constraint_residuals(u, ch2, params);
    CHECK(ru.sigma1 == Catch::Approx(direct).epsilon(1e-12));
    CHECK(ru.sigma1 >= 1.0);
    CHECK(ru.gamma1 == Catch::Approx(std::abs(u.W.col(0).norm() - 1.0)).epsilon(1e-12));
  }
}

TEST_CASE("symmetric unitary sampling") {
  CHECK(symmetric_unitary_exp(Eigen::MatrixXd::Zero(3, 3)).isApprox(Eigen::MatrixXcd::Identity(3, 3), 1e-15));
  Eigen::MatrixXd X(2, 2);
  X << 0, 1, 1, 0;
  const Eigen::MatrixXcd expected = cplx(0, 1) * X.cast<cplx>();
  CHECK((symmetric_unitary_exp(kPi / 2.0 * X) - expected).norm() <= 1e-14);

  Rng rng = make_rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const int m = 1 + trial % 6;
    const Eigen::MatrixXcd phi = random_symmetric_unitary(m, rng);
    CHECK((phi.adjoint() * phi - Eigen::MatrixXcd::Identity(m, m)).norm() <= 1e-10);
    CHECK((phi - phi.transpose()).norm() <= 1e-10);
  }
  std::mt19937_64 r(32);
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::MatrixXd S = oracle::random_real(r, 4, 4, -2, 2);
    S = (0.5 * (S + S.transpose())).eval();
    const Eigen::MatrixXcd ref = oracle::expm_taylor(cplx(0, 1) * S.cast<cplx>());
    CHECK((symmetric_unitary_exp(S) - ref).norm() <= 1e-10);
  }
  CHECK_THROWS_AS(random_symmetric_unitary(0, rng), Error);
}

TEST_CASE("takagi projection") {
  CHECK(takagi_project(Eigen::MatrixXcd::Identity(3, 3)).isApprox(Eigen::MatrixXcd::Identity(3, 3), 1e-14));
  Eigen::MatrixXcd a(2, 2);
  a << 0, cplx(0, 1), cplx(0, 1), 0;
  CHECK((takagi_project(a) - a).norm() <= 1e-14);
  CHECK((takagi_project(2.0 * Eigen::MatrixXcd::Identity(2, 2)) - Eigen::MatrixXcd::Identity(2, 2)).norm() <= 1e-14);

  std::mt19937_64 r(41);
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::MatrixXcd m = oracle::random_complex(r, 4, 4);
    m = 0.5 * (m + m.transpose()).eval();
    const Eigen::MatrixXcd q = takagi_project(m);
    CHECK((q.adjoint() * q - Eigen::MatrixXcd::Identity(4, 4)).norm() <= 1e-8);
    CHECK((q - q.transpose()).norm() <= 1e-8);
    CHECK((takagi_project(q) - q).norm() <= 1e-8);
  }
  try {
    takagi_project(Eigen::MatrixXcd::Zero(2, 2));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateProjection);
    CHECK(std::string(e.what()) == "degenerate projection");
  }
}

TEST_CASE("feasibility projection") {
  const SystemParams params;
  std::mt19937_64 r(51);
  for (int trial = 0; trial < 50; ++trial) {
    Solution s;
    s.W = oracle::random_complex(r, 4, 3, 3.0);
    s.P << 0.3, 0.25, 0.5;
    s.group_sizes = {4, 4};
    s.Phi = Eigen::MatrixXcd::Zero(8, 8);
    for (int g = 0; g < 2; ++g) {
      Eigen::MatrixXd th = oracle::random_real(r, 4, 4, 0, 2 * kPi);
      th = (0.5 * (th + th.transpose())).eval();
      s.Phi.block(4 * g, 4 * g, 4, 4) = realize(ScatteringMatrix::fully_connected(th));
    }
    const Solution p = project_to_feasible(s, params);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(p.W.col(i).norm() - 1.0) <= 1e-9);
    CHECK(p.P(0) + p.P(1) <= params.p_max1 + 1e-12);
    CHECK(p.P(2) <= params.p_max2 + 1e-12);
    CHECK(p.P.minCoeff() >= 0.0);
    for (double d : unitarity_deviation(p)) CHECK(d <= 1e-8);
    for (double d : symmetry_deviation(p)) CHECK(d <= 1e-8);
    CHECK(p.Phi.block(0, 4, 4, 4).isZero(0.0));
    const Solution again = project_to_feasible(p, params);
    CHECK((again.Phi - p.Phi).norm() <= 1e-8);
    CHECK((again.W - p.W).norm() <= 1e-12);
  }
}
