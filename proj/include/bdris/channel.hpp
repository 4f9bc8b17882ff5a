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

#ifndef BDRIS_CHANNEL_HPP
#define BDRIS_CHANNEL_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

#include <Eigen/Dense>

#include "bdris/random.hpp"

namespace bdris {

using Point3 = std::array<double, 3>;

double distance(const Point3& a, const Point3& b);

// Node positions in meters.
struct NodeGeometry {
  Point3 bs_pos{0.0, 0.0, 10.0};
  Point3 ris_pos{100.0, 2.0, 10.0};
  Point3 ue1_pos{80.0, 0.0, 0.0};
  Point3 ue2_pos{110.0, 0.0, 0.0};

  // Throws InvalidArgument if two nodes coincide.
  void validate() const;
  bool operator==(const NodeGeometry&) const = default;
};

struct FadingParams {
  double l0_db = -30.0;        // path loss at the reference distance
  double d0 = 1.0;             // reference distance, meters
  double eta_direct = 3.5;     // UE-BS exponent
  double eta_ris = 2.2;        // exponent of the links touching the RIS
  double rician_k_db = 5.0;    // RIS links; direct links are Rayleigh
  double noise_power_dbm = -80.0;

  void validate() const;
  bool operator==(const FadingParams&) const = default;
};

// Channels of one realization. N receive antennas, M RIS elements.
struct ChannelSet {
  Eigen::VectorXcd h_1b;  // UE-1 -> BS, N
  Eigen::VectorXcd h_2b;  // UE-2 -> BS, N
  Eigen::MatrixXcd H_rb;  // RIS -> BS, N x M
  Eigen::VectorXcd h_r1;  // UE-1 -> RIS, M
  Eigen::VectorXcd h_r2;  // UE-2 -> RIS, M

  int antennas() const { return static_cast<int>(h_1b.size()); }
  int elements() const { return static_cast<int>(h_r1.size()); }
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

// Linear power gain 10^(L0/10) * (d/d0)^(-exponent). Throws for d <= 0.
double path_loss(double distance_m, const FadingParams& params, double exponent);

// sqrt(PL) * (sqrt(1/(1+k)) g + sqrt(k/(1+k)) los) with g ~ CN(0, I) drawn
// column-major. k_db = -inf gives Rayleigh fading.
Eigen::MatrixXcd rician_sample(Rng& rng, const Eigen::MatrixXcd& los, double path_loss_linear, double k_db);

// Half-wavelength ULA response, entry m = exp(j*pi*m*sin(angle)).
Eigen::VectorXcd steering_vector(int n_elements, double angle);

// Azimuth of `to` seen from `from`, in the horizontal plane.
double azimuth(const Point3& from, const Point3& to);

// Draws all five channels. Every link uses its own random stream, and H_rb
// one stream per RIS column, so a realization with more antennas or elements
// extends (rather than replaces) the smaller one for the same seed.
ChannelSet generate_channel_set(const NodeGeometry& geometry, const FadingParams& params, int n_antennas,
                                int m_elements, std::uint64_t seed);

}  // namespace bdris

#endif  // BDRIS_CHANNEL_HPP
