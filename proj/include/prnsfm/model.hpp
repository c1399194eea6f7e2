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


#ifndef PRNSFM_MODEL_HPP_
#define PRNSFM_MODEL_HPP_

// Predictive recurrent frame models. Both variants read a frame left to
// right and predict the next word:label unit (or EOS) through an LSTM and a
// softmax over the joint unit inventory. The joint variant embeds each
// word:label unit as one symbol; the separate variant concatenates a word
// embedding with a label embedding.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "prnsfm/frame_data.hpp"
#include "prnsfm/nn_core.hpp"

namespace prnsfm {

struct ModelConfig {
  EncodingMode mode = EncodingMode::kSeparate;
  int word_dim = 50;
  int label_dim = 16;
  int joint_dim = 64;
  std::uint64_t seed = 1;
  double init_range = 0.08;
  // Filled from the vocabulary by new_model.
  std::uint64_t vocab_checksum = 0;

  int input_width() const {
    return mode == EncodingMode::kJoint ? joint_dim : word_dim + label_dim;
  }
  // The hidden width equals the LSTM input width.
  int hidden() const { return input_width(); }
};

template <typename Scalar>
struct Parameters {
  Matrix<Scalar> joint_embedding;  // |V_joint| x d      (joint mode)
  Matrix<Scalar> word_embedding;   // |V_word| x d_w     (separate mode)
  Matrix<Scalar> label_embedding;  // |V_label| x d_l    (separate mode)
  LstmWeights<Scalar> lstm;
  Matrix<Scalar> output_weights;  // |V_out| x m
  Vector<Scalar> output_bias;     // |V_out|

  // Visits every tensor as a flat coefficient view in the fixed order used by
  // the optimizer, the gradient checker and the model file.
  template <typename Fn>
  void for_each(Fn &&fn) {
    fn(std::string_view("joint_embedding"), flat(joint_embedding));
    fn(std::string_view("word_embedding"), flat(word_embedding));
    fn(std::string_view("label_embedding"), flat(label_embedding));
    fn(std::string_view("lstm.input"), flat(lstm.input));
    fn(std::string_view("lstm.recurrent"), flat(lstm.recurrent));
    fn(std::string_view("lstm.bias"), flat(lstm.bias));
    fn(std::string_view("output.weights"), flat(output_weights));
    fn(std::string_view("output.bias"), flat(output_bias));
  }

  template <typename Fn>
  void for_each(Fn &&fn) const {
    const_cast<Parameters *>(this)->for_each(
        [&](std::string_view name, Eigen::Map<Vector<Scalar>> view) {
          fn(name, Eigen::Map<const Vector<Scalar>>(view.data(), view.size()));
        });
  }

  Parameters zeros_like() const {
    Parameters z;
    z.joint_embedding = Matrix<Scalar>::Zero(joint_embedding.rows(),
                                             joint_embedding.cols());
    z.word_embedding =
        Matrix<Scalar>::Zero(word_embedding.rows(), word_embedding.cols());
    z.label_embedding =
        Matrix<Scalar>::Zero(label_embedding.rows(), label_embedding.cols());
    z.lstm = LstmWeights<Scalar>::zeros(lstm.input_width(), lstm.hidden());
    z.output_weights =
        Matrix<Scalar>::Zero(output_weights.rows(), output_weights.cols());
    z.output_bias = Vector<Scalar>::Zero(output_bias.size());
    return z;
  }

  void set_zero() { *this = zeros_like(); }

  template <typename Target>
  Parameters<Target> cast() const {
    Parameters<Target> out;
    out.joint_embedding = joint_embedding.template cast<Target>();
    out.word_embedding = word_embedding.template cast<Target>();
    out.label_embedding = label_embedding.template cast<Target>();
    out.lstm.input = lstm.input.template cast<Target>();
    out.lstm.recurrent = lstm.recurrent.template cast<Target>();
    out.lstm.bias = lstm.bias.template cast<Target>();
    out.output_weights = output_weights.template cast<Target>();
    out.output_bias = output_bias.template cast<Target>();
    return out;
  }

  std::size_t coefficient_count() const {
    std::size_t n = 0;
    for_each([&](std::string_view, const auto &view) { n += view.size(); });
    return n;
  }

 private:
  template <typename Dense>
  static Eigen::Map<Vector<Scalar>> flat(Dense &m) {
    return Eigen::Map<Vector<Scalar>>(m.data(), m.size());
  }
};

struct PrnsfmModel {
  ModelConfig config;
  Vocabulary vocab;
  Parameters<double> params;

  int output_size() const { return vocab.output_size(); }
};

// Creates a model with parameters drawn from config.seed. Pretrained word
// rows (|V_word| x word_dim) are only accepted in separate mode.
PrnsfmModel new_model(ModelConfig config, Vocabulary vocab,
                      const std::optional<MatrixXd> &pretrained_words = {});

// One input position of a frame.
struct InputToken {
  int joint = 0;
  int word = 0;
  int label = 0;
};

// Input token for an output unit fed back as the next input.
InputToken token_for_joint(const Vocabulary &vocab, int joint);

template <typename Scalar>
Vector<Scalar> embed(const Parameters<Scalar> &params, EncodingMode mode,
                     const InputToken &token);

template <typename Scalar>
struct ForwardTrace {
  std::vector<InputToken> inputs;
  std::vector<int> targets;
  std::vector<LstmState<Scalar>> states;
  std::vector<Vector<Scalar>> distributions;
  Scalar loss = 0;
  std::size_t clamped = 0;
};

template <typename Scalar>
ForwardTrace<Scalar> forward(const Parameters<Scalar> &params,
                             EncodingMode mode, const EncodedSequence &seq);

// Gradient of the summed NLL of `trace` with respect to every parameter.
template <typename Scalar>
Parameters<Scalar> backward(const Parameters<Scalar> &params, EncodingMode mode,
                            const ForwardTrace<Scalar> &trace);

template <typename Scalar>
Scalar sequence_loss(const Parameters<Scalar> &params, EncodingMode mode,
                     const EncodedSequence &seq);

// Incremental decoding: LSTM state after a prefix plus the distribution over
// the next unit.
struct DecoderState {
  LstmState<double> lstm;
  VectorXd distribution;
};

DecoderState begin_sequence(const PrnsfmModel &model, const InputToken &token);
DecoderState extend_sequence(const PrnsfmModel &model, const DecoderState &state,
                             const InputToken &token);

InputToken input_token(const PrnsfmModel &model, const ArgumentUnit &unit);

// Distribution over V_out after the prefix [p:PRED, args...].
VectorXd next_argument_distribution(const PrnsfmModel &model,
                                    const std::vector<ArgumentUnit> &prefix);

// Sum of ln P(unit_t | units_<t) over every step including EOS.
double sequence_log_probability(const PrnsfmModel &model,
                                const FrameSequence &frame);

struct TrainOptions {
  int epochs = 120;
  std::uint64_t shuffle_seed = 1;
  double rho = kAdaDeltaRho;
  double epsilon = kAdaDeltaEpsilon;
  std::optional<double> max_grad_norm;
  bool freeze_word_embeddings = false;
  std::function<void(int epoch, double mean_nll)> on_epoch;
};

struct TrainReport {
  std::vector<double> epoch_mean_nll;
  int epochs_run = 0;
  std::size_t frames_seen = 0;
  std::size_t clamped_probabilities = 0;
  double wall_seconds = 0;
};

TrainReport train(PrnsfmModel &model, const std::vector<EncodedSequence> &frames,
                  const TrainOptions &options);

// Model container: text header (magic, version, config, vocabulary, tensor
// table) followed by little-endian float64 tensors and a payload checksum.
void save_model(const PrnsfmModel &model, std::ostream &out);
PrnsfmModel load_model(std::istream &in,
                       const Vocabulary *expected_vocab = nullptr);

void save_model_file(const PrnsfmModel &model, const std::string &path);
PrnsfmModel load_model_file(const std::string &path,
                            const Vocabulary *expected_vocab = nullptr);

// Checksum over config and parameter bytes.
std::uint64_t model_checksum(const PrnsfmModel &model);

struct GradCheckOptions {
  double epsilon = 1e-5;
  // 0 checks every coordinate; otherwise a seeded sample of this size.
  std::size_t max_coordinates = 0;
  std::uint64_t sample_seed = 0;
  // Applied to the analytic gradient before comparison (mutation testing).
  std::function<void(Parameters<double> &)> tamper;
};

struct GradCheckResult {
  double max_relative_error = 0;
  std::size_t coordinates = 0;
  std::string worst_tensor;
  std::size_t worst_index = 0;
  double analytic_at_worst = 0;
  double numeric_at_worst = 0;
};

// Compares the BPTT gradient with central differences of the loss. The
// perturbed losses are evaluated in extended precision.
GradCheckResult grad_check(const PrnsfmModel &model,
                           const EncodedSequence &seq,
                           const GradCheckOptions &options = {});

}  // namespace prnsfm

#endif  // PRNSFM_MODEL_HPP_
