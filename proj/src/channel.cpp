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

#include "bdris/channel.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "bdris/error.hpp"

namespace bdris {

namespace {

enum Stream : std::uint64_t { kDirect1 = 1, kDirect2 = 2, kRisBs = 3, kRisUe1 = 4, kRisUe2 = 5 };

}  // namespace

double distance(const Point3& a, const Point3& b) {
  return std::hypot(a[0] - b[0], a[1] - b[1], a[2] - b[2]);
}

void NodeGeometry::validate() const {
  const std::array<const Point3*, 4> nodes{&bs_pos, &ris_pos, &ue1_pos, &ue2_pos};
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (std::size_t j = i + 1; j < nodes.size(); ++j) {
      if (!(distance(*nodes[i], *nodes[j]) > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "geometry: two nodes share a position");
      }
    }
  }
}

void FadingParams::validate() const {
  if (!(d0 > 0.0)) throw Error(ErrorCode::InvalidArgument, "fading: reference distance must be positive");
  if (!(eta_direct >= 2.0) || !(eta_ris >= 2.0)) {
    throw Error(ErrorCode::InvalidArgument, "fading: path-loss exponents must be >= 2");
  }
}

double path_loss(double distance_m, const FadingParams& params, double exponent) {
  if (!(distance_m > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "path_loss: distance must be positive, got " + std::to_string(distance_m));
  }
  return db_to_linear(params.l0_db) * std::pow(distance_m / params.d0, -exponent);
}

Eigen::MatrixXcd rician_sample(Rng& rng, const Eigen::MatrixXcd& los, double path_loss_linear, double k_db) {
  const double k = std::isinf(k_db) && k_db < 0.0 ? 0.0 : db_to_linear(k_db);
  // For very large k the scattered weight underflows to zero and the LoS
  // weight rounds to one.
  const double w_scatter = std::sqrt(1.0 / (1.0 + k));
  const double w_los = std::isinf(k) ? 1.0 : std::sqrt(k / (1.0 + k));
  Eigen::MatrixXcd out(los.rows(), los.cols());
  for (Eigen::Index j = 0; j < los.cols(); ++j) {
    for (Eigen::Index i = 0; i < los.rows(); ++i) out(i, j) = w_scatter * complex_normal(rng) + w_los * los(i, j);
  }
  return std::sqrt(path_loss_linear) * out;
}

Eigen::VectorXcd steering_vector(int n_elements, double angle) {
  if (n_elements < 1) throw Error(ErrorCode::InvalidArgument, "steering_vector: need at least one element");
  Eigen::VectorXcd a(n_elements);
  const double phase = std::numbers::pi * std::sin(angle);
  for (int m = 0; m < n_elements; ++m) a(m) = std::polar(1.0, phase * m);
  return a;
}

double azimuth(const Point3& from, const Point3& to) { return std::atan2(to[1] - from[1], to[0] - from[0]); }

ChannelSet generate_channel_set(const NodeGeometry& geometry, const FadingParams& params, int n_antennas,
                                int m_elements, std::uint64_t seed) {
  if (n_antennas < 1 || m_elements < 1) {
    throw Error(ErrorCode::InvalidArgument, "generate_channel_set: N and M must be >= 1");
  }
  geometry.validate();
  params.validate();
  constexpr double kRayleigh = -std::numeric_limits<double>::infinity();
  const Eigen::MatrixXcd no_los_n = Eigen::MatrixXcd::Zero(n_antennas, 1);

  ChannelSet ch;
  {
    Rng rng = make_rng(seed, {kDirect1});
    const double pl = path_loss(distance(geometry.ue1_pos, geometry.bs_pos), params, params.eta_direct);
    ch.h_1b = rician_sample(rng, no_los_n, pl, kRayleigh).col(0);
  }
  {
    Rng rng = make_rng(seed, {kDirect2});
    const double pl = path_loss(distance(geometry.ue2_pos, geometry.bs_pos), params, params.eta_direct);
    ch.h_2b = rician_sample(rng, no_los_n, pl, kRayleigh).col(0);
  }
  {
    const double pl = path_loss(distance(geometry.ris_pos, geometry.bs_pos), params, params.eta_ris);
    const Eigen::VectorXcd a_bs = steering_vector(n_antennas, azimuth(geometry.bs_pos, geometry.ris_pos));
    const Eigen::VectorXcd a_ris = steering_vector(m_elements, azimuth(geometry.ris_pos, geometry.bs_pos));
    ch.H_rb.resize(n_antennas, m_elements);
    for (int m = 0; m < m_elements; ++m) {
      Rng rng = make_rng(seed, {kRisBs, static_cast<std::uint64_t>(m)});
      const Eigen::MatrixXcd los = a_bs * a_ris(m);
      ch.H_rb.col(m) = rician_sample(rng, los, pl, params.rician_k_db).col(0);
    }
  }
  auto ris_ue = [&](const Point3& ue, std::uint64_t stream) {
    Rng rng = make_rng(seed, {stream});
    const double pl = path_loss(distance(geometry.ris_pos, ue), params, params.eta_ris);
    const Eigen::MatrixXcd los = steering_vector(m_elements, azimuth(geometry.ris_pos, ue));
    return Eigen::VectorXcd(rician_sample(rng, los, pl, params.rician_k_db).col(0));
  };
  ch.h_r1 = ris_ue(geometry.ue1_pos, kRisUe1);
  ch.h_r2 = ris_ue(geometry.ue2_pos, kRisUe2);
  return ch;
}

}  // namespace bdris
