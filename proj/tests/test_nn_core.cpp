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


#include <cmath>

#include "doctest.h"
#include "prnsfm/nn_core.hpp"

using namespace prnsfm;

namespace {

LstmWeights<double> scalar_weights() {
  auto w = LstmWeights<double>::zeros(1, 1);
  w.input << 0.5, -0.3, 0.8, 0.1;
  w.recurrent << 0.2, 0.4, -0.6, 0.7;
  w.bias << 0.1, 0.0, 0.5, -0.2;
  return w;
}

}  // namespace

TEST_CASE("lstm_step with zero weights and input") {
  const auto w = LstmWeights<double>::zeros(3, 4);
  const auto s = lstm_step(VectorXd(VectorXd::Zero(3)), LstmState<double>::initial(4), w);
  CHECK(s.input_gate.isConstant(0.5));
  CHECK(s.forget_gate.isConstant(0.5));
  CHECK(s.output_gate.isConstant(0.5));
  CHECK(s.candidate.isZero(0));
  CHECK(s.c.isZero(0));
  CHECK(s.h.isZero(0));
}

TEST_CASE("lstm_step scalar hand evaluation") {
  auto prev = LstmState<double>::initial(1);
  prev.h << 0.3;
  prev.c << -0.4;
  VectorXd x(1);
  x << 1.5;
  const auto s = lstm_step(x, prev, scalar_weights());
  CHECK(s.input_gate[0] == doctest::Approx(0.71300016275228162).epsilon(1e-14));
  CHECK(s.candidate[0] == doctest::Approx(-0.31852077690277081).epsilon(1e-14));
  CHECK(s.forget_gate[0] == doctest::Approx(0.82053848059267331).epsilon(1e-14));
  CHECK(s.output_gate[0] == doctest::Approx(0.53991488455556569).epsilon(1e-14));
  CHECK(s.c[0] == doctest::Approx(-0.55532075800872815).epsilon(1e-14));
  CHECK(s.h[0] == doctest::Approx(-0.27238564523181485).epsilon(1e-14));
}

TEST_CASE("lstm_step forget saturation keeps the cell") {
  auto w = scalar_weights();
  w.bias[LstmWeights<double>::kForgetGate] = 60;
  auto prev = LstmState<double>::initial(1);
  prev.c << 0.9;
  VectorXd x(1);
  x << 0.2;
  const auto s = lstm_step(x, prev, w);
  CHECK(s.c[0] == doctest::Approx(s.input_gate[0] * s.candidate[0] + 0.9).epsilon(1e-12));
}

TEST_CASE("lstm_step rejects bad input") {
  const auto w = LstmWeights<double>::zeros(2, 2);
  CHECK_THROWS_AS(lstm_step(VectorXd(VectorXd::Zero(3)), LstmState<double>::initial(2), w), Error);
  VectorXd x(2);
  x << 1, std::nan("");
  try {
    lstm_step(x, LstmState<double>::initial(2), w);
    FAIL("expected an exception");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::kNumeric);
  }
}

TEST_CASE("softmax") {
  const VectorXd uniform = softmax_layer(VectorXd(VectorXd::Zero(3)), MatrixXd(MatrixXd::Zero(4, 3)),
                                         VectorXd(VectorXd::Zero(4)));
  CHECK((uniform.array() - 0.25).abs().maxCoeff() < 1e-15);

  VectorXd logits(2);
  logits << std::log(2.0), 0.0;
  const VectorXd p = softmax(logits);
  CHECK(p[0] == doctest::Approx(2.0 / 3).epsilon(1e-15));
  CHECK(p[1] == doctest::Approx(1.0 / 3).epsilon(1e-15));

  VectorXd random(6);
  random << 0.3, -2.0, 5.5, 0.0, 1.25, -0.75;
  const VectorXd shifted = softmax((random.array() + 1000.0).matrix());
  CHECK((softmax(random) - shifted).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(std::abs(softmax(random).sum() - 1.0) < 1e-12);
}

TEST_CASE("nll_loss") {
  VectorXd d(2);
  d << 1.0, 0.0;
  CHECK(nll_loss(d, 0) == 0.0);
  d << 0.5, 0.5;
  CHECK(nll_loss(d, 1) == doctest::Approx(0.693147180559945).epsilon(1e-14));
  CHECK(nll_loss(VectorXd(VectorXd::Constant(4, 0.25)), 3) ==
        doctest::Approx(std::log(4.0)).epsilon(1e-14));

  d << 1.0, 0.0;
  std::size_t clamped = 0;
  CHECK(nll_loss(d, 1, &clamped) == doctest::Approx(-std::log(kProbabilityFloor)));
  CHECK(clamped == 1);
  CHECK_THROWS_AS(nll_loss(d, 2), Error);
}

TEST_CASE("adadelta first and second step") {
  VectorXd x = VectorXd::Zero(1);
  const VectorXd g = VectorXd::Ones(1);
  AdaDeltaState<double> state(1);
  adadelta_update(x, g, state);
  const double first = x[0];
  CHECK(first == doctest::Approx(-std::sqrt(1e-6) / std::sqrt(0.05 + 1e-6)).epsilon(1e-14));
  CHECK(std::abs(first - -0.0044721) < 1e-7);

  adadelta_update(x, g, state);
  const double second = x[0] - first;
  CHECK(second == doctest::Approx(-0.00452906226553).epsilon(1e-10));
  CHECK(std::abs(second) > std::abs(first));
}

TEST_CASE("adadelta zero gradient is a fixed point") {
  MatrixXd p(2, 2);
  p << 1, 2, 3, 4;
  const MatrixXd before = p;
  AdaDeltaState<double> state(4);
  state.mean_sq_grad.setConstant(2.0);
  state.mean_sq_update.setConstant(3.0);
  adadelta_update(p, MatrixXd::Zero(2, 2), state);
  CHECK(p == before);
  CHECK(state.mean_sq_grad.isConstant(2.0 * 0.95, 1e-15));
  CHECK(state.mean_sq_update.isConstant(3.0 * 0.95, 1e-15));
  CHECK_THROWS_AS(adadelta_update(p, VectorXd::Zero(3), state), Error);
}

TEST_CASE("lstm_step_backward matches finite differences on one step") {
  Rng rng(3);
  auto w = LstmWeights<double>::zeros(3, 2);
  fill_uniform(w.input, rng, -0.5, 0.5);
  fill_uniform(w.recurrent, rng, -0.5, 0.5);
  fill_uniform(w.bias, rng, -0.5, 0.5);
  VectorXd x(3);
  x << 0.2, -0.4, 0.9;
  auto prev = LstmState<double>::initial(2);
  prev.h << 0.1, -0.3;
  prev.c << 0.5, 0.2;

  // Loss = sum(h) + sum(c); gradient wrt x by central differences.
  const auto loss = [&](const VectorXd &input) {
    const auto s = lstm_step(input, prev, w);
    return s.h.sum() + s.c.sum();
  };
  const auto s = lstm_step(x, prev, w);
  auto grads = LstmWeights<double>::zeros(3, 2);
  const auto back =
      lstm_step_backward(s, VectorXd(VectorXd::Ones(2)), VectorXd(VectorXd::Ones(2)), w, grads);
  for (int i = 0; i < 3; ++i) {
    VectorXd plus = x, minus = x;
    plus[i] += 1e-6;
    minus[i] -= 1e-6;
    CHECK(back.dx[i] == doctest::Approx((loss(plus) - loss(minus)) / 2e-6).epsilon(1e-6));
  }
}
