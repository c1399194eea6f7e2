// Copyright 2026 The PRNSFM Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#ifndef PRNSFM_NN_CORE_HPP_
#define PRNSFM_NN_CORE_HPP_

// Dense numerical kernel for the frame models: LSTM step and its backward
// pass, softmax output layer, negative log-likelihood and AdaDelta. Every
// kernel is templated on the scalar type so that the same code runs in
// double for training and in long double for finite-difference checks.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <limits>

#include "prnsfm/common.hpp"

namespace prnsfm {

template <typename Scalar>
using Matrix =
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatrixXd = Matrix<double>;
using VectorXd = Vector<double>;

template <typename Derived>
bool all_finite(const Eigen::DenseBase<Derived> &values) {
  return values.derived().array().isFinite().all();
}

template <typename Derived>
void fill_uniform(const Eigen::DenseBase<Derived> &values_, Rng &rng,
                  double lo, double hi) {
  auto &values = const_cast<Eigen::DenseBase<Derived> &>(values_);
  using Scalar = typename Derived::Scalar;
  // Row-major traversal keeps the draw order independent of storage order.
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    for (Eigen::Index c = 0; c < values.cols(); ++c) {
      values(r, c) = static_cast<Scalar>(rng.uniform(lo, hi));
    }
  }
}

template <typename Scalar>
Scalar sigmoid(Scalar x) {
  using std::exp;
  return x >= 0 ? Scalar(1) / (Scalar(1) + exp(-x))
                : exp(x) / (Scalar(1) + exp(x));
}

// Weights of one LSTM layer. The four gates are stacked row-wise in the order
// input, candidate, forget, output; each block has `hidden` rows.
template <typename Scalar>
struct LstmWeights {
  Matrix<Scalar> input;      // 4m x d
  Matrix<Scalar> recurrent;  // 4m x m
  Vector<Scalar> bias;       // 4m

  static LstmWeights zeros(Eigen::Index input_width, Eigen::Index hidden) {
    return {Matrix<Scalar>::Zero(4 * hidden, input_width),
            Matrix<Scalar>::Zero(4 * hidden, hidden),
            Vector<Scalar>::Zero(4 * hidden)};
  }

  Eigen::Index hidden() const { return recurrent.cols(); }
  Eigen::Index input_width() const { return input.cols(); }

  enum Gate { kInputGate = 0, kCandidate = 1, kForgetGate = 2, kOutputGate = 3 };

  auto input_block(Gate g) { return input.middleRows(g * hidden(), hidden()); }
  auto recurrent_block(Gate g) {
    return recurrent.middleRows(g * hidden(), hidden());
  }
  auto bias_block(Gate g) { return bias.segment(g * hidden(), hidden()); }
};

// Hidden and cell vectors after one step, plus everything the backward pass
// needs from the forward computation.
template <typename Scalar>
struct LstmState {
  Vector<Scalar> h;
  Vector<Scalar> c;
  Vector<Scalar> input_gate;
  Vector<Scalar> candidate;
  Vector<Scalar> forget_gate;
  Vector<Scalar> output_gate;
  Vector<Scalar> tanh_c;
  Vector<Scalar> x;
  Vector<Scalar> h_prev;
  Vector<Scalar> c_prev;

  static LstmState initial(Eigen::Index hidden) {
    LstmState state;
    state.h = Vector<Scalar>::Zero(hidden);
    state.c = Vector<Scalar>::Zero(hidden);
    return state;
  }
};

template <typename Scalar>
LstmState<Scalar> lstm_step(const Vector<Scalar> &x,
                            const LstmState<Scalar> &prev,
                            const LstmWeights<Scalar> &weights) {
  const Eigen::Index m = weights.hidden();
  if (x.size() != weights.input_width() || prev.h.size() != m ||
      prev.c.size() != m) {
    throw Error(ErrorCode::kDimension, "lstm_step: inconsistent shapes");
  }
  if (!all_finite(x)) {
    throw Error(ErrorCode::kNumeric, "lstm_step: non-finite input vector");
  }

  const Vector<Scalar> pre =
      weights.input * x + weights.recurrent * prev.h + weights.bias;

  LstmState<Scalar> next;
  next.input_gate = pre.segment(0, m).unaryExpr(&sigmoid<Scalar>);
  next.candidate = pre.segment(m, m).array().tanh();
  next.forget_gate = pre.segment(2 * m, m).unaryExpr(&sigmoid<Scalar>);
  next.output_gate = pre.segment(3 * m, m).unaryExpr(&sigmoid<Scalar>);
  next.c = next.input_gate.cwiseProduct(next.candidate) +
           next.forget_gate.cwiseProduct(prev.c);
  next.tanh_c = next.c.array().tanh();
  next.h = next.output_gate.cwiseProduct(next.tanh_c);
  next.x = x;
  next.h_prev = prev.h;
  next.c_prev = prev.c;
  return next;
}

// Gradient flowing out of one backward LSTM step.
template <typename Scalar>
struct LstmStepGradient {
  Vector<Scalar> dx;
  Vector<Scalar> dh_prev;
  Vector<Scalar> dc_prev;
};

// Accumulates parameter gradients into `grads` given the loss gradient with
// respect to this step's h and c.
template <typename Scalar>
LstmStepGradient<Scalar> lstm_step_backward(const LstmState<Scalar> &state,
                                            const Vector<Scalar> &dh,
                                            const Vector<Scalar> &dc_next,
                                            const LstmWeights<Scalar> &weights,
                                            LstmWeights<Scalar> &grads) {
  const Eigen::Index m = weights.hidden();
  const auto one = Scalar(1);

  const Vector<Scalar> dc =
      (dh.array() * state.output_gate.array() *
       (one - state.tanh_c.array().square()))
          .matrix() +
      dc_next;

  Vector<Scalar> dpre(4 * m);
  dpre.segment(0, m) = (dc.array() * state.candidate.array() *
                        state.input_gate.array() *
                        (one - state.input_gate.array()))
                           .matrix();
  dpre.segment(m, m) = (dc.array() * state.input_gate.array() *
                        (one - state.candidate.array().square()))
                           .matrix();
  dpre.segment(2 * m, m) = (dc.array() * state.c_prev.array() *
                            state.forget_gate.array() *
                            (one - state.forget_gate.array()))
                               .matrix();
  dpre.segment(3 * m, m) = (dh.array() * state.tanh_c.array() *
                            state.output_gate.array() *
                            (one - state.output_gate.array()))
                               .matrix();

  grads.input.noalias() += dpre * state.x.transpose();
  grads.recurrent.noalias() += dpre * state.h_prev.transpose();
  grads.bias += dpre;

  LstmStepGradient<Scalar> out;
  out.dx.noalias() = weights.input.transpose() * dpre;
  out.dh_prev.noalias() = weights.recurrent.transpose() * dpre;
  out.dc_prev = dc.cwiseProduct(state.forget_gate);
  return out;
}

// Numerically stable softmax (max subtraction).
template <typename Derived>
Vector<typename Derived::Scalar> softmax(const Eigen::MatrixBase<Derived> &logits) {
  using Scalar = typename Derived::Scalar;
  const Scalar shift = logits.maxCoeff();
  Vector<Scalar> out = (logits.array() - shift).exp().matrix();
  out /= out.sum();
  return out;
}

// Output distribution for hidden state h. `weights` is |V_out| x m, so the
// logits are weights * h + bias.
template <typename Scalar>
Vector<Scalar> softmax_layer(const Vector<Scalar> &h,
                             const Matrix<Scalar> &weights,
                             const Vector<Scalar> &bias) {
  if (weights.cols() != h.size() || weights.rows() != bias.size()) {
    throw Error(ErrorCode::kDimension, "softmax_layer: inconsistent shapes");
  }
  return softmax(weights * h + bias);
}

inline constexpr double kProbabilityFloor = 1e-30;

// -ln(dist[target]). Probabilities below the floor are clamped and counted.
template <typename Scalar>
Scalar nll_loss(const Vector<Scalar> &dist, Eigen::Index target,
                std::size_t *clamp_count = nullptr) {
  using std::log;
  if (target < 0 || target >= dist.size()) {
    throw Error(ErrorCode::kContract, "nll_loss: target out of range");
  }
  Scalar p = dist[target];
  if (!(p >= Scalar(kProbabilityFloor))) {
    p = Scalar(kProbabilityFloor);
    if (clamp_count != nullptr) ++*clamp_count;
  }
  return -log(p);
}

inline constexpr double kAdaDeltaRho = 0.95;
inline constexpr double kAdaDeltaEpsilon = 1e-6;

template <typename Scalar>
struct AdaDeltaState {
  Vector<Scalar> mean_sq_grad;
  Vector<Scalar> mean_sq_update;
  Scalar rho = Scalar(kAdaDeltaRho);
  Scalar epsilon = Scalar(kAdaDeltaEpsilon);

  explicit AdaDeltaState(Eigen::Index size, Scalar rho_ = Scalar(kAdaDeltaRho),
                         Scalar epsilon_ = Scalar(kAdaDeltaEpsilon))
      : mean_sq_grad(Vector<Scalar>::Zero(size)),
        mean_sq_update(Vector<Scalar>::Zero(size)),
        rho(rho_),
        epsilon(epsilon_) {}
};

// One AdaDelta step applied in place. `param` and `grad` are viewed as flat
// coefficient vectors of the same size as the state.
template <typename ParamDerived, typename GradDerived>
void adadelta_update(const Eigen::MatrixBase<ParamDerived> &param_,
                     const Eigen::MatrixBase<GradDerived> &grad,
                     AdaDeltaState<typename ParamDerived::Scalar> &state) {
  using Scalar = typename ParamDerived::Scalar;
  auto &param = const_cast<Eigen::MatrixBase<ParamDerived> &>(param_);
  if (param.size() != grad.size() || param.size() != state.mean_sq_grad.size()) {
    throw Error(ErrorCode::kDimension, "adadelta_update: shape mismatch");
  }
  const Scalar rho = state.rho;
  const Scalar eps = state.epsilon;
  auto g = grad.derived().reshaped().array();
  state.mean_sq_grad.array() =
      rho * state.mean_sq_grad.array() + (Scalar(1) - rho) * g.square();
  const Vector<Scalar> delta =
      (-((state.mean_sq_update.array() + eps).sqrt() /
         (state.mean_sq_grad.array() + eps).sqrt()) *
       g)
          .matrix();
  state.mean_sq_update.array() = rho * state.mean_sq_update.array() +
                                 (Scalar(1) - rho) * delta.array().square();
  param.derived().reshaped() += delta;
}

}  // namespace prnsfm

#endif  // PRNSFM_NN_CORE_HPP_
