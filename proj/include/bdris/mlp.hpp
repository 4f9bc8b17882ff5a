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

#ifndef BDRIS_MLP_HPP
#define BDRIS_MLP_HPP

#include <array>

#include <Eigen/Dense>

#include "bdris/adam.hpp"
#include "bdris/autodiff.hpp"
#include "bdris/random.hpp"

namespace bdris {

// Linear -> ReLU -> Linear network used for the beamforming, power and
// scattering-matrix update networks.
class Mlp {
 public:
  // Parameters recorded on a tape for one forward/backward pass.
  struct Bound {
    ad::Var w1, b1, w2, b2;
  };

  Mlp() = default;
  // All weights and biases zero.
  Mlp(int input_size, int hidden_size, int output_size);

  // Hidden layer uniform in +-1/sqrt(fan_in); output layer zero, so a fresh
  // network maps every input to zero.
  static Mlp initialized(int input_size, int hidden_size, int output_size, Rng& rng);

  int input_size() const { return static_cast<int>(w1.cols()); }
  int hidden_size() const { return static_cast<int>(w1.rows()); }
  int output_size() const { return static_cast<int>(w2.rows()); }

  Bound bind(ad::Tape& tape) const;
  // Plain evaluation; one sample per column.
  Eigen::MatrixXd evaluate(const Eigen::MatrixXd& x) const;

  std::array<Eigen::MatrixXd*, 4> parameters() { return {&w1, &b1, &w2, &b2}; }
  std::array<const Eigen::MatrixXd*, 4> parameters() const { return {&w1, &b1, &w2, &b2}; }

  Eigen::MatrixXd w1, b1, w2, b2;
};

// Forward pass on the tape. `x` holds one sample per column and must have
// input_size() rows.
ad::Var mlp_forward(const Mlp::Bound& net, const ad::Var& x);

// Adam states for the four parameter tensors of an Mlp.
class MlpAdam {
 public:
  explicit MlpAdam(double learning_rate);
  // `grads` follows the order of Mlp::parameters().
  void step(Mlp& net, const std::array<Eigen::MatrixXd, 4>& grads);
  long steps() const { return states_[0].step_count; }

 private:
  std::array<AdamState, 4> states_;
};

}  // namespace bdris

#endif  // BDRIS_MLP_HPP
