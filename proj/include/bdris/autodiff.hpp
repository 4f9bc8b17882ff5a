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

#ifndef BDRIS_AUTODIFF_HPP
#define BDRIS_AUTODIFF_HPP

// Reverse-mode differentiation of real scalar objectives built from complex
// matrix operations.
//
// Every recorded node holds a complex matrix. The adjoint stored for a node
// is G = df/dRe(X) + j df/dIm(X), i.e. the real and imaginary partials packed
// into one complex matrix. With that convention a holomorphic map Y = h(X)
// propagates G_X = conj(h'(X)) * G_Y, and matrix products propagate
// G_A = G_Y B^H, G_B = A^H G_Y.

#include <complex>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "bdris/error.hpp"

namespace bdris::ad {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using RMat = Eigen::MatrixXd;

class Tape;

// Handle to a complex matrix recorded on a tape. Cheap to copy; only valid
// while the owning tape is alive.
class Var {
 public:
  Var() = default;

  bool valid() const { return tape_ != nullptr; }
  Tape* tape() const { return tape_; }
  std::size_t id() const { return id_; }

  const CMat& value() const;
  RMat re() const { return value().real(); }
  RMat im() const { return value().imag(); }
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  bool requires_grad() const;
  // Real part of a 1x1 value.
  double scalar() const;

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

// Gradient of a real objective with respect to one complex matrix, as the
// pair of partials with respect to the real and imaginary parts.
struct Gradient {
  RMat re;
  RMat im;

  CMat packed() const;
};

class Tape {
 public:
  // Receives the tape and the adjoint of the node being processed.
  using Backward = std::function<void(Tape&, const CMat&)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var variable(CMat value);
  Var variable(const RMat& value);
  Var constant(CMat value);
  Var constant(const RMat& value);
  // Any other Eigen expression, evaluated by its scalar type.
  template <typename Derived>
  Var variable(const Eigen::MatrixBase<Derived>& e) {
    if constexpr (Eigen::NumTraits<typename Derived::Scalar>::IsComplex) return variable(CMat(e));
    else return variable(RMat(e));
  }
  template <typename Derived>
  Var constant(const Eigen::MatrixBase<Derived>& e) {
    if constexpr (Eigen::NumTraits<typename Derived::Scalar>::IsComplex) return constant(CMat(e));
    else return constant(RMat(e));
  }

  // Records an operation result. The node requires a gradient iff any parent
  // does; otherwise the backward closure is dropped.
  Var record(CMat value, std::initializer_list<Var> parents, Backward backward);
  Var record(CMat value, std::span<const Var> parents, Backward backward);

  const CMat& value(std::size_t id) const { return nodes_[id].value; }
  bool requires_grad(std::size_t id) const { return nodes_[id].requires_grad; }

  // Adds to the adjoint of node `id`; a no-op for nodes without gradient.
  template <typename Derived>
  void accumulate(std::size_t id, const Eigen::MatrixBase<Derived>& g) {
    Node& n = nodes_[id];
    if (!n.requires_grad) return;
    if (n.grad.size() == 0) {
      n.grad = g;
    } else {
      n.grad += g;
    }
  }

  std::size_t size() const { return nodes_.size(); }

 private:
  friend std::vector<Gradient> grad(const Var& objective, std::span<const Var> targets);

  struct Node {
    CMat value;
    CMat grad;
    bool requires_grad = false;
    Backward backward;
  };

  Var push(CMat value, bool requires_grad, Backward backward);

  std::vector<Node> nodes_;
};

// Gradients of a real 1x1 objective with respect to each target. Throws
// Error{Disconnected} for targets that live on another tape or were recorded
// after the objective.
std::vector<Gradient> grad(const Var& objective, std::span<const Var> targets);
std::vector<Gradient> grad(const Var& objective, std::initializer_list<Var> targets);

// ---------------------------------------------------------------- operations
//
// Element-wise binary operations accept equal shapes or a 1x1 operand, which
// is broadcast.

Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var cwise_mul(const Var& a, const Var& b);
Var cwise_div(const Var& a, const Var& b);
Var matmul(const Var& a, const Var& b);

Var neg(const Var& a);
Var scale(const Var& a, double s);
Var scale(const Var& a, cplx s);
Var add_constant(const Var& a, cplx c);

Var adjoint(const Var& a);
Var transpose(const Var& a);
Var conj(const Var& a);
Var real_part(const Var& a);
Var imag_part(const Var& a);
// re + j*im from two real-valued inputs of equal shape.
Var make_complex(const Var& re, const Var& im);

// |a|^2 element-wise; real output.
Var abs2(const Var& a);
// Sum of all entries (1x1).
Var sum(const Var& a);
// Frobenius norm (1x1, real). The subgradient at zero is taken as zero.
Var frobenius_norm(const Var& a);

// Real element-wise maps. They act on the real part of the input.
Var log2p1(const Var& a);
Var sigmoid(const Var& a);
Var relu(const Var& a);
Var sqrt_real(const Var& a);
Var abs_real(const Var& a);
Var hinge(const Var& a);
// Reduces into [0, 2*pi); derivative one almost everywhere.
Var wrap_two_pi(const Var& a);
// Element-wise clamp to [lo, hi]. The derivative is zero where clamped,
// unless `straight_through` is set, in which case it is one everywhere.
Var clamp(const Var& a, const RMat& lo, const RMat& hi, bool straight_through = false);

// exp(j*a) for a real-valued input (unit-modulus output).
Var exp_j(const Var& a);

Var slice(const Var& a, Eigen::Index row, Eigen::Index col, Eigen::Index rows, Eigen::Index cols);
Var reshape(const Var& a, Eigen::Index rows, Eigen::Index cols);
Var hstack(std::span<const Var> parts);
Var block_diag(std::span<const Var> blocks);
// Symmetric matrix built from the upper triangle (including diagonal) of a.
Var sym_upper(const Var& a);
// a + b * ones^T, b a column vector with a.rows() entries.
Var add_col_broadcast(const Var& a, const Var& b);

// Fused two-layer perceptron y = w2 * relu(w1 * x + b1) + b2 evaluated in real
// arithmetic; x holds one sample per column.
Var mlp2(const Var& x, const Var& w1, const Var& b1, const Var& w2, const Var& b2);

inline Var operator+(const Var& a, const Var& b) { return add(a, b); }
inline Var operator-(const Var& a, const Var& b) { return sub(a, b); }
inline Var operator-(const Var& a) { return neg(a); }

}  // namespace bdris::ad

#endif  // BDRIS_AUTODIFF_HPP
