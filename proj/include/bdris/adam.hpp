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

#ifndef BDRIS_ADAM_HPP
#define BDRIS_ADAM_HPP

#include <Eigen/Dense>

namespace bdris {

// Adam moments for one parameter tensor. Moments are sized lazily on the
// first step.
struct AdamState {
  Eigen::MatrixXd first_moment;
  Eigen::MatrixXd second_moment;
  long step_count = 0;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// One bias-corrected Adam step that descends `gradient`. Throws Diverged on a
// non-finite gradient and Dimension on shape mismatch.
void adam_step(AdamState& state, Eigen::MatrixXd& param, const Eigen::MatrixXd& gradient);

}  // namespace bdris

#endif  // BDRIS_ADAM_HPP
