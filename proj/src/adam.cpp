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

#include "bdris/adam.hpp"

#include <cmath>

#include "bdris/error.hpp"

namespace bdris {

void adam_step(AdamState& state, Eigen::MatrixXd& param, const Eigen::MatrixXd& gradient) {
  if (gradient.rows() != param.rows() || gradient.cols() != param.cols()) {
    throw Error(ErrorCode::Dimension, "adam_step: gradient shape differs from parameter");
  }
  if (state.first_moment.size() == 0) {
    state.first_moment = Eigen::MatrixXd::Zero(param.rows(), param.cols());
    state.second_moment = Eigen::MatrixXd::Zero(param.rows(), param.cols());
  }
  if (state.first_moment.rows() != param.rows() || state.first_moment.cols() != param.cols()) {
    throw Error(ErrorCode::Dimension, "adam_step: moment shape differs from parameter");
  }
  if (!gradient.allFinite()) throw Error(ErrorCode::Diverged, "diverged");

  ++state.step_count;
  state.first_moment = state.beta1 * state.first_moment + (1.0 - state.beta1) * gradient;
  state.second_moment =
      state.beta2 * state.second_moment + (1.0 - state.beta2) * gradient.cwiseAbs2();
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step_count));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step_count));
  param.array() -= state.learning_rate * (state.first_moment.array() / c1) /
                   ((state.second_moment.array() / c2).sqrt() + state.epsilon);
}

}  // namespace bdris
