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

#include "bdris/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace bdris::ad {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Tape& tape_of(const Var& a) {
  if (!a.valid()) throw Error(ErrorCode::InvalidArgument, "operation on an unbound variable");
  return *a.tape();
}

Tape& tape_of(const Var& a, const Var& b) {
  Tape& t = tape_of(a);
  if (b.tape() != &t) throw Error(ErrorCode::InvalidArgument, "operands recorded on different tapes");
  return t;
}

bool is_scalar(const CMat& m) { return m.rows() == 1 && m.cols() == 1; }

// Output shape of a broadcasting element-wise op.
std::pair<Eigen::Index, Eigen::Index> broadcast_shape(const Var& a, const Var& b, const char* op) {
  const CMat& x = a.value();
  const CMat& y = b.value();
  if (x.rows() == y.rows() && x.cols() == y.cols()) return {x.rows(), x.cols()};
  if (is_scalar(x)) return {y.rows(), y.cols()};
  if (is_scalar(y)) return {x.rows(), x.cols()};
  throw Error(ErrorCode::Dimension, std::string(op) + ": shape mismatch (" + std::to_string(x.rows()) + "x" +
                                        std::to_string(x.cols()) + " vs " + std::to_string(y.rows()) + "x" +
                                        std::to_string(y.cols()) + ")");
}

CMat expand(const CMat& m, Eigen::Index rows, Eigen::Index cols) {
  if (m.rows() == rows && m.cols() == cols) return m;
  return CMat::Constant(rows, cols, m(0, 0));
}

// Sums an adjoint back down to the shape of a broadcast operand.
CMat reduce_to(const CMat& g, Eigen::Index rows, Eigen::Index cols) {
  if (g.rows() == rows && g.cols() == cols) return g;
  return CMat::Constant(1, 1, g.sum());
}

CMat real_only(const CMat& g) { return g.real().cast<cplx>(); }

template <typename F, typename DF>
Var real_map(const Var& a, F f, DF df) {
  Tape& t = tape_of(a);
  const RMat x = a.value().real();
  CMat v = x.unaryExpr(f).template cast<cplx>();
  const std::size_t ia = a.id();
  return t.record(std::move(v), {a}, [ia, df](Tape& t, const CMat& g) {
    const RMat x = t.value(ia).real();
    const RMat d = x.unaryExpr(df);
    t.accumulate(ia, (d.array() * g.real().array()).matrix().cast<cplx>());
  });
}

}  // namespace

// ---------------------------------------------------------------- Var

const CMat& Var::value() const {
  if (!valid()) throw Error(ErrorCode::InvalidArgument, "unbound variable");
  return tape_->value(id_);
}

bool Var::requires_grad() const { return valid() && tape_->requires_grad(id_); }

double Var::scalar() const {
  const CMat& v = value();
  if (!is_scalar(v)) throw Error(ErrorCode::Dimension, "scalar() on a non 1x1 value");
  return v(0, 0).real();
}

CMat Gradient::packed() const {
  CMat out(re.rows(), re.cols());
  out.real() = re;
  out.imag() = im;
  return out;
}

// ---------------------------------------------------------------- Tape

Var Tape::push(CMat value, bool requires_grad, Backward backward) {
  nodes_.push_back(Node{std::move(value), CMat(), requires_grad, std::move(backward)});
  return Var(this, nodes_.size() - 1);
}

Var Tape::variable(CMat value) { return push(std::move(value), true, nullptr); }
Var Tape::variable(const RMat& value) { return push(value.cast<cplx>(), true, nullptr); }
Var Tape::constant(CMat value) { return push(std::move(value), false, nullptr); }
Var Tape::constant(const RMat& value) { return push(value.cast<cplx>(), false, nullptr); }

Var Tape::record(CMat value, std::initializer_list<Var> parents, Backward backward) {
  return record(std::move(value), std::span<const Var>(parents.begin(), parents.size()), std::move(backward));
}

Var Tape::record(CMat value, std::span<const Var> parents, Backward backward) {
  bool needs = false;
  for (const Var& p : parents) {
    if (p.tape() != this) throw Error(ErrorCode::InvalidArgument, "parent recorded on a different tape");
    needs = needs || nodes_[p.id()].requires_grad;
  }
  return push(std::move(value), needs, needs ? std::move(backward) : Backward{});
}

std::vector<Gradient> grad(const Var& objective, std::span<const Var> targets) {
  Tape& t = tape_of(objective);
  const CMat& f = objective.value();
  if (!is_scalar(f)) throw Error(ErrorCode::Dimension, "objective must be 1x1");
  for (const Var& x : targets) {
    if (x.tape() != &t || x.id() > objective.id()) {
      throw Error(ErrorCode::Disconnected, "disconnected variable");
    }
  }

  auto& nodes = t.nodes_;
  if (nodes[objective.id()].requires_grad) {
    nodes[objective.id()].grad = CMat::Constant(1, 1, cplx(1.0, 0.0));
    for (std::size_t i = objective.id() + 1; i-- > 0;) {
      auto& n = nodes[i];
      if (!n.requires_grad || n.grad.size() == 0 || !n.backward) continue;
      // Closures only write to parents, which precede this node.
      n.backward(t, n.grad);
    }
  }

  std::vector<Gradient> out;
  out.reserve(targets.size());
  for (const Var& x : targets) {
    const auto& n = nodes[x.id()];
    if (n.grad.size() == 0) {
      out.push_back({RMat::Zero(n.value.rows(), n.value.cols()), RMat::Zero(n.value.rows(), n.value.cols())});
    } else {
      out.push_back({n.grad.real(), n.grad.imag()});
    }
  }
  for (auto& n : nodes) n.grad.resize(0, 0);
  return out;
}

std::vector<Gradient> grad(const Var& objective, std::initializer_list<Var> targets) {
  return grad(objective, std::span<const Var>(targets.begin(), targets.size()));
}

// ---------------------------------------------------------------- arithmetic

Var add(const Var& a, const Var& b) {
  Tape& t = tape_of(a, b);
  const auto [r, c] = broadcast_shape(a, b, "add");
  CMat v = expand(a.value(), r, c) + expand(b.value(), r, c);
  const std::size_t ia = a.id(), ib = b.id();
  return t.record(std::move(v), {a, b}, [ia, ib](Tape& t, const CMat& g) {
    t.accumulate(ia, reduce_to(g, t.value(ia).rows(), t.value(ia).cols()));
    t.accumulate(ib, reduce_to(g, t.value(ib).rows(), t.value(ib).cols()));
  });
}

Var sub(const Var& a, const Var& b) {
  Tape& t = tape_of(a, b);
  const auto [r, c] = broadcast_shape(a, b, "sub");
  CMat v = expand(a.value(), r, c) - expand(b.value(), r, c);
  const std::size_t ia = a.id(), ib = b.id();
  return t.record(std::move(v), {a, b}, [ia, ib](Tape& t, const CMat& g) {
    t.accumulate(ia, reduce_to(g, t.value(ia).rows(), t.value(ia).cols()));
    t.accumulate(ib, -reduce_to(g, t.value(ib).rows(), t.value(ib).cols()));
  });
}

Var cwise_mul(const Var& a, const Var& b) {
  Tape& t = tape_of(a, b);
  const auto [r, c] = broadcast_shape(a, b, "cwise_mul");
  CMat v = expand(a.value(), r, c).cwiseProduct(expand(b.value(), r, c));
  const std::size_t ia = a.id(), ib = b.id();
  return t.record(std::move(v), {a, b}, [ia, ib](Tape& t, const CMat& g) {
    const CMat& x = t.value(ia);
    const CMat& y = t.value(ib);
    if (t.requires_grad(ia)) {
      t.accumulate(ia, reduce_to(expand(y, g.rows(), g.cols()).conjugate().cwiseProduct(g), x.rows(), x.cols()));
    }
    if (t.requires_grad(ib)) {
      t.accumulate(ib, reduce_to(expand(x, g.rows(), g.cols()).conjugate().cwiseProduct(g), y.rows(), y.cols()));
    }
  });
}

Var cwise_div(const Var& a, const Var& b) {
  Tape& t = tape_of(a, b);
  const auto [r, c] = broadcast_shape(a, b, "cwise_div");
  CMat v = expand(a.value(), r, c).cwiseQuotient(expand(b.value(), r, c));
  const std::size_t ia = a.id(), ib = b.id();
  return t.record(std::move(v), {a, b}, [ia, ib](Tape& t, const CMat& g) {
    const CMat x = expand(t.value(ia), g.rows(), g.cols());
    const CMat y = expand(t.value(ib), g.rows(), g.cols());
    if (t.requires_grad(ia)) {
      t.accumulate(ia, reduce_to(y.cwiseInverse().conjugate().cwiseProduct(g), t.value(ia).rows(),
                                 t.value(ia).cols()));
    }
    if (t.requires_grad(ib)) {
      const CMat d = -x.cwiseQuotient(y.cwiseProduct(y));
      t.accumulate(ib, reduce_to(d.conjugate().cwiseProduct(g), t.value(ib).rows(), t.value(ib).cols()));
    }
  });
}

Var matmul(const Var& a, const Var& b) {
  Tape& t = tape_of(a, b);
  if (a.cols() != b.rows()) {
    throw Error(ErrorCode::Dimension, "matmul: inner dimensions differ (" + std::to_string(a.cols()) + " vs " +
                                          std::to_string(b.rows()) + ")");
  }
  CMat v = a.value() * b.value();
  const std::size_t ia = a.id(), ib = b.id();
  return t.record(std::move(v), {a, b}, [ia, ib](Tape& t, const CMat& g) {
    if (t.requires_grad(ia)) t.accumulate(ia, g * t.value(ib).adjoint());
    if (t.requires_grad(ib)) t.accumulate(ib, t.value(ia).adjoint() * g);
  });
}

Var neg(const Var& a) { return scale(a, -1.0); }

Var scale(const Var& a, double s) {
  Tape& t = tape_of(a);
  CMat v = a.value() * s;
  const std::size_t ia = a.id();
  return t.record(std::move(v), {a}, [ia, s](Tape& t, const CMat& g) { t.accumulate(ia, g * s); });
}

Var scale(const Var& a, cplx s) {
  Tape& t = tape_of(a);
  CMat v = a.value() * s;
  const std::size_t ia = a.id();
  return t.record(std::move(v), {a}, [ia, s](Tape& t, const CMat& g) { t.accumulate(ia, g * std::conj(s)); });
}

Var add_constant(const Var& a, cplx c) {
  Tape& t = tape_of(a);
  CMat v = a.value().array() + c;
  const std::size_t ia = a.id();
  return t.record(std::move(v), {a}, [ia](Tape& t, const CMat& g) { t.accumulate(ia, g); });
}

Var adjoint(const Var& a) {
  Tape& t = tape_of(a);
  CMat v = a.value().adjoint();
  const std::size_t ia = a.id();
  return t.record(std::move(v), {a}, [ia](Tape& t, const CMat& g) { t.accumulate(ia, g.adjoint()); });
}

Var transpose(const Var& a) {
  Tape& t = tape_of(a);
  CMat v = a.value().transpose();
  const std::size_t ia = a.id();
  return t.record(std::move(v), {a}, [ia](Tape& t, const CMat& g) { t.accumulate(ia, g.transpose()); });
}

Var conj(const Var& a) {
  Tape& t = tape_of(a);
  CMat v = a.value().conjugate();
  const std::size_t ia = a.id();
  return t.record(std::move(v), {a}, [ia](Tape& t, const CMat& g) { t.accumulate(ia, g.conjugate()); });
}

Var real_part(const Var& a) {
  Tape& t = tape_of(a);
  CMat v = real_only(a.value());
  const std::size_t ia = a.id();
  return t.record(std::move(v), {a}, [ia](Tape& t, const CMat& g) { t.accumulate(ia, real_only(g)); });
}

Var imag_part(const Var& a) {
  Tape& t = tape_of(a);
  CMat v = a.value().imag().cast<cplx>();
  const std::size_t ia = a.id();
  return t.record(std::move(v), {a}, [ia](Tape& t, const CMat& g) {
    t.accumulate(ia, real_only(g) * cplx(0.0, 1.0));
  });
}

Var make_complex(const Var& re, const Var& im) {
  Tape& t = tape_of(re, im);
  if (re.rows() != im.rows() || re.cols() != im.cols()) {
    throw Error(ErrorCode::Dimension, "make_complex: shape mismatch");
  }
  CMat v(re.rows(), re.cols());
  v.real() = re.value().real();
  v.imag() = im.value().real();
  const std::size_t ir = re.id(), ii = im.id();
  return t.record(std::move(v), {re, im}, [ir, ii](Tape& t, const CMat& g) {
    t.accumulate(ir, real_only(g));
    t.accumulate(ii, g.imag().cast<cplx>());
  });
}

Var abs2(const Var& a) {
  Tape& t = tape_of(a);
  CMat v = a.value().cwiseAbs2().cast<cplx>();
  const std::size_t ia = a.id();
  return t.record(std::move(v), {a}, [ia](Tape& t, const CMat& g) {
    t.accumulate(ia, (2.0 * t.value(ia).array() * g.real().array().cast<cplx>()).matrix());
  });
}

Var sum(const Var& a) {
  Tape& t = tape_of(a);
  CMat v = CMat::Constant(1, 1, a.value().sum());
  const std::size_t ia = a.id();
  return t.record(std::move(v), {a}, [ia](Tape& t, const CMat& g) {
    t.accumulate(ia, CMat::Constant(t.value(ia).rows(), t.value(ia).cols(), g(0, 0)));
  });
}

Var frobenius_norm(const Var& a) {
  Tape& t = tape_of(a);
  const double n = a.value().norm();
  CMat v = CMat::Constant(1, 1, cplx(n, 0.0));
  const std::size_t ia = a.id();
  return t.record(std::move(v), {a}, [ia, n](Tape& t, const CMat& g) {
    if (n == 0.0) return;
    t.accumulate(ia, t.value(ia) * (g(0, 0).real() / n));
  });
}

// ---------------------------------------------------------------- real maps

Var log2p1(const Var& a) {
  return real_map(
      a, [](double x) { return std::log1p(x) / std::numbers::ln2; },
      [](double x) { return 1.0 / ((1.0 + x) * std::numbers::ln2); });
}

Var sigmoid(const Var& a) {
  auto s = [](double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
  };
  return real_map(a, s, [s](double x) {
    const double y = s(x);
    return y * (1.0 - y);
  });
}

Var relu(const Var& a) {
  return real_map(
      a, [](double x) { return x > 0.0 ? x : 0.0; }, [](double x) { return x > 0.0 ? 1.0 : 0.0; });
}

Var sqrt_real(const Var& a) {
  return real_map(
      a, [](double x) { return std::sqrt(x); }, [](double x) { return x > 0.0 ? 0.5 / std::sqrt(x) : 0.0; });
}

Var abs_real(const Var& a) {
  return real_map(
      a, [](double x) { return std::abs(x); },
      [](double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); });
}

Var hinge(const Var& a) {
  return real_map(
      a, [](double x) { return x > 0.0 ? x : 0.0; }, [](double x) { return x > 0.0 ? 1.0 : 0.0; });
}

Var wrap_two_pi(const Var& a) {
  return real_map(
      a,
      [](double x) {
        double y = x - kTwoPi * std::floor(x / kTwoPi);
        if (y >= kTwoPi) y -= kTwoPi;
        return y < 0.0 ? 0.0 : y;
      },
      [](double) { return 1.0; });
}

Var clamp(const Var& a, const RMat& lo, const RMat& hi, bool straight_through) {
  Tape& t = tape_of(a);
  if (lo.rows() != a.rows() || lo.cols() != a.cols() || hi.rows() != a.rows() || hi.cols() != a.cols()) {
    throw Error(ErrorCode::Dimension, "clamp: bound shape mismatch");
  }
  const RMat x = a.value().real();
  CMat v = x.cwiseMax(lo).cwiseMin(hi).cast<cplx>();
  const std::size_t ia = a.id();
  if (straight_through) {
    return t.record(std::move(v), {a}, [ia](Tape& t, const CMat& g) { t.accumulate(ia, real_only(g)); });
  }
  return t.record(std::move(v), {a}, [ia, lo, hi](Tape& t, const CMat& g) {
    const RMat x = t.value(ia).real();
    const RMat mask = ((x.array() >= lo.array()) && (x.array() <= hi.array())).cast<double>();
    t.accumulate(ia, (mask.array() * g.real().array()).matrix().cast<cplx>());
  });
}

Var exp_j(const Var& a) {
  Tape& t = tape_of(a);
  const RMat x = a.value().real();
  CMat v(x.rows(), x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    for (Eigen::Index i = 0; i < x.rows(); ++i) v(i, j) = std::polar(1.0, x(i, j));
  }
  const std::size_t ia = a.id(), iy = t.size();
  return t.record(std::move(v), {a}, [ia, iy](Tape& t, const CMat& g) {
    // d exp(jx)/dx = j exp(jx); real input keeps only the real part.
    const CMat& y = t.value(iy);
    const CMat d = (y * cplx(0.0, 1.0)).conjugate().cwiseProduct(g);
    t.accumulate(ia, real_only(d));
  });
}

// ---------------------------------------------------------------- structure

Var slice(const Var& a, Eigen::Index row, Eigen::Index col, Eigen::Index rows, Eigen::Index cols) {
  Tape& t = tape_of(a);
  if (row < 0 || col < 0 || rows < 0 || cols < 0 || row + rows > a.rows() || col + cols > a.cols()) {
    throw Error(ErrorCode::Dimension, "slice out of range");
  }
  CMat v = a.value().block(row, col, rows, cols);
  const std::size_t ia = a.id();
  return t.record(std::move(v), {a}, [ia, row, col](Tape& t, const CMat& g) {
    CMat full = CMat::Zero(t.value(ia).rows(), t.value(ia).cols());
    full.block(row, col, g.rows(), g.cols()) = g;
    t.accumulate(ia, full);
  });
}

Var reshape(const Var& a, Eigen::Index rows, Eigen::Index cols) {
  Tape& t = tape_of(a);
  if (rows * cols != a.value().size()) throw Error(ErrorCode::Dimension, "reshape: size mismatch");
  CMat v = a.value().reshaped(rows, cols);
  const std::size_t ia = a.id();
  return t.record(std::move(v), {a}, [ia](Tape& t, const CMat& g) {
    t.accumulate(ia, g.reshaped(t.value(ia).rows(), t.value(ia).cols()));
  });
}

Var hstack(std::span<const Var> parts) {
  if (parts.empty()) throw Error(ErrorCode::InvalidArgument, "hstack of nothing");
  Tape& t = tape_of(parts.front());
  const Eigen::Index rows = parts.front().rows();
  Eigen::Index cols = 0;
  for (const Var& p : parts) {
    if (p.rows() != rows) throw Error(ErrorCode::Dimension, "hstack: row count mismatch");
    cols += p.cols();
  }
  CMat v(rows, cols);
  std::vector<std::size_t> ids;
  Eigen::Index c = 0;
  for (const Var& p : parts) {
    v.middleCols(c, p.cols()) = p.value();
    c += p.cols();
    ids.push_back(p.id());
  }
  return t.record(std::move(v), parts, [ids](Tape& t, const CMat& g) {
    Eigen::Index c = 0;
    for (std::size_t id : ids) {
      const Eigen::Index w = t.value(id).cols();
      t.accumulate(id, g.middleCols(c, w));
      c += w;
    }
  });
}

Var block_diag(std::span<const Var> blocks) {
  if (blocks.empty()) throw Error(ErrorCode::InvalidArgument, "block_diag of nothing");
  Tape& t = tape_of(blocks.front());
  Eigen::Index rows = 0, cols = 0;
  for (const Var& b : blocks) {
    rows += b.rows();
    cols += b.cols();
  }
  CMat v = CMat::Zero(rows, cols);
  std::vector<std::size_t> ids;
  Eigen::Index r = 0, c = 0;
  for (const Var& b : blocks) {
    v.block(r, c, b.rows(), b.cols()) = b.value();
    r += b.rows();
    c += b.cols();
    ids.push_back(b.id());
  }
  return t.record(std::move(v), blocks, [ids](Tape& t, const CMat& g) {
    Eigen::Index r = 0, c = 0;
    for (std::size_t id : ids) {
      const Eigen::Index h = t.value(id).rows(), w = t.value(id).cols();
      t.accumulate(id, g.block(r, c, h, w));
      r += h;
      c += w;
    }
  });
}

Var sym_upper(const Var& a) {
  Tape& t = tape_of(a);
  if (a.rows() != a.cols()) throw Error(ErrorCode::Dimension, "sym_upper: matrix must be square");
  const CMat& x = a.value();
  const Eigen::Index n = x.rows();
  CMat v(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) v(i, j) = i <= j ? x(i, j) : x(j, i);
  }
  const std::size_t ia = a.id();
  return t.record(std::move(v), {a}, [ia, n](Tape& t, const CMat& g) {
    CMat d = CMat::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index i = 0; i <= j; ++i) d(i, j) = i == j ? g(i, i) : g(i, j) + g(j, i);
    }
    t.accumulate(ia, d);
  });
}

Var add_col_broadcast(const Var& a, const Var& b) {
  Tape& t = tape_of(a, b);
  if (b.cols() != 1 || b.rows() != a.rows()) throw Error(ErrorCode::Dimension, "add_col_broadcast: bad bias shape");
  CMat v = a.value().colwise() + b.value().col(0);
  const std::size_t ia = a.id(), ib = b.id();
  return t.record(std::move(v), {a, b}, [ia, ib](Tape& t, const CMat& g) {
    t.accumulate(ia, g);
    t.accumulate(ib, g.rowwise().sum());
  });
}

Var mlp2(const Var& x, const Var& w1, const Var& b1, const Var& w2, const Var& b2) {
  Tape& t = tape_of(x);
  for (const Var* p : {&w1, &b1, &w2, &b2}) {
    if (p->tape() != &t) throw Error(ErrorCode::InvalidArgument, "mlp2: operands on different tapes");
  }
  if (w1.cols() != x.rows()) {
    throw Error(ErrorCode::Dimension, "mlp2: input has " + std::to_string(x.rows()) + " features, expected " +
                                          std::to_string(w1.cols()));
  }
  if (b1.rows() != w1.rows() || b1.cols() != 1 || w2.cols() != w1.rows() || b2.rows() != w2.rows() ||
      b2.cols() != 1) {
    throw Error(ErrorCode::Dimension, "mlp2: inconsistent layer shapes");
  }
  const RMat xr = x.value().real();
  const RMat w1r = w1.value().real();
  const RMat w2r = w2.value().real();
  RMat pre = w1r * xr;
  pre.colwise() += b1.value().real().col(0);
  const RMat hidden = pre.cwiseMax(0.0);
  RMat out = w2r * hidden;
  out.colwise() += b2.value().real().col(0);

  const std::size_t ix = x.id(), i1 = w1.id(), ib1 = b1.id(), i2 = w2.id(), ib2 = b2.id();
  return t.record(out.cast<cplx>(), {x, w1, b1, w2, b2},
                  [ix, i1, ib1, i2, ib2, pre = std::move(pre)](Tape& t, const CMat& g) {
                    const RMat gr = g.real();
                    const RMat hidden = pre.cwiseMax(0.0);
                    if (t.requires_grad(i2)) t.accumulate(i2, (gr * hidden.transpose()).cast<cplx>());
                    if (t.requires_grad(ib2)) t.accumulate(ib2, gr.rowwise().sum().cast<cplx>());
                    const RMat dpre = ((t.value(i2).real().transpose() * gr).array() *
                                       (pre.array() > 0.0).cast<double>())
                                          .matrix();
                    if (t.requires_grad(i1)) t.accumulate(i1, (dpre * t.value(ix).real().transpose()).cast<cplx>());
                    if (t.requires_grad(ib1)) t.accumulate(ib1, dpre.rowwise().sum().cast<cplx>());
                    if (t.requires_grad(ix)) t.accumulate(ix, (t.value(i1).real().transpose() * dpre).cast<cplx>());
                  });
}

}  // namespace bdris::ad
