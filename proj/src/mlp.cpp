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

#include "bdris/mlp.hpp"

#include <cmath>
#include <string>

namespace bdris {

Mlp::Mlp(int input_size, int hidden_size, int output_size)
    : w1(Eigen::MatrixXd::Zero(hidden_size, input_size)),
      b1(Eigen::MatrixXd::Zero(hidden_size, 1)),
      w2(Eigen::MatrixXd::Zero(output_size, hidden_size)),
      b2(Eigen::MatrixXd::Zero(output_size, 1)) {
  if (input_size < 1 || hidden_size < 1 || output_size < 1) {
    throw Error(ErrorCode::InvalidArgument, "Mlp: layer sizes must be positive");
  }
}

Mlp Mlp::initialized(int input_size, int hidden_size, int output_size, Rng& rng) {
  Mlp net(input_size, hidden_size, output_size);
  const double bound = 1.0 / std::sqrt(static_cast<double>(input_size));
  std::uniform_real_distribution<double> u(-bound, bound);
  for (Eigen::Index j = 0; j < net.w1.cols(); ++j) {
    for (Eigen::Index i = 0; i < net.w1.rows(); ++i) net.w1(i, j) = u(rng);
  }
  for (Eigen::Index i = 0; i < net.b1.rows(); ++i) net.b1(i, 0) = u(rng);
  return net;
}

Mlp::Bound Mlp::bind(ad::Tape& tape) const {
  return {tape.variable(w1), tape.variable(b1), tape.variable(w2), tape.variable(b2)};
}

Eigen::MatrixXd Mlp::evaluate(const Eigen::MatrixXd& x) const {
  if (x.rows() != w1.cols()) {
    throw Error(ErrorCode::Dimension, "Mlp: input has " + std::to_string(x.rows()) + " features, expected " +
                                          std::to_string(w1.cols()));
  }
  Eigen::MatrixXd h = w1 * x;
  h.colwise() += b1.col(0);
  h = h.cwiseMax(0.0);
  Eigen::MatrixXd y = w2 * h;
  y.colwise() += b2.col(0);
  return y;
}

ad::Var mlp_forward(const Mlp::Bound& net, const ad::Var& x) {
  return ad::mlp2(x, net.w1, net.b1, net.w2, net.b2);
}

MlpAdam::MlpAdam(double learning_rate) {
  for (auto& s : states_) s.learning_rate = learning_rate;
}

void MlpAdam::step(Mlp& net, const std::array<Eigen::MatrixXd, 4>& grads) {
  auto params = net.parameters();
  for (std::size_t k = 0; k < params.size(); ++k) adam_step(states_[k], *params[k], grads[k]);
}

}  // namespace bdris
