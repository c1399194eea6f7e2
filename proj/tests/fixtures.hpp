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


#ifndef PRNSFM_TESTS_FIXTURES_HPP_
#define PRNSFM_TESTS_FIXTURES_HPP_

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "prnsfm/model.hpp"

namespace prnsfm::testing {

inline FrameSequence frame_of(std::vector<std::pair<std::string, std::string>> units) {
  FrameSequence f;
  for (auto &[w, l] : units) f.units.push_back({w, l});
  f.units.push_back(eos_unit());
  return f;
}

// A model whose LSTM is silenced, so every step emits softmax(bias): the
// next-unit distribution is `probabilities` regardless of the prefix.
inline PrnsfmModel table_model(Vocabulary vocab, const std::vector<double> &probabilities,
                               EncodingMode mode = EncodingMode::kJoint) {
  ModelConfig config;
  config.mode = mode;
  config.joint_dim = 4;
  config.word_dim = 2;
  config.label_dim = 2;
  PrnsfmModel model = new_model(config, std::move(vocab));
  model.params.lstm = LstmWeights<double>::zeros(config.input_width(), config.hidden());
  model.params.output_weights.setZero();
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    model.params.output_bias[static_cast<Eigen::Index>(i)] = std::log(probabilities[i]);
  }
  return model;
}

inline PrnsfmModel zero_model(Vocabulary vocab, EncodingMode mode) {
  ModelConfig config;
  config.mode = mode;
  config.joint_dim = 6;
  config.word_dim = 4;
  config.label_dim = 2;
  PrnsfmModel model = new_model(config, std::move(vocab));
  model.params.set_zero();
  return model;
}

}  // namespace prnsfm::testing

#endif  // PRNSFM_TESTS_FIXTURES_HPP_
