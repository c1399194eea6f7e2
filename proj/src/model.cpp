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


#include "prnsfm/model.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace prnsfm {

namespace {

void check_config(const ModelConfig &config) {
  if (config.mode == EncodingMode::kJoint && config.joint_dim <= 0) {
    throw Error(ErrorCode::kContract, "joint_dim must be positive");
  }
  if (config.mode == EncodingMode::kSeparate &&
      (config.word_dim <= 0 || config.label_dim <= 0)) {
    throw Error(ErrorCode::kContract, "word_dim and label_dim must be positive");
  }
  if (!(config.init_range >= 0)) {
    throw Error(ErrorCode::kContract, "init_range must be non-negative");
  }
}

InputToken token_at(const EncodedSequence &seq, EncodingMode mode,
                    std::size_t i) {
  InputToken token;
  token.joint = seq.joint[i];
  if (mode == EncodingMode::kSeparate) {
    token.word = seq.words[i];
    token.label = seq.labels[i];
  }
  return token;
}

void check_sequence(const EncodedSequence &seq, EncodingMode mode) {
  if (seq.size() < 2) {
    throw Error(ErrorCode::kContract,
                "sequence " + seq.source_id + " needs predicate and EOS");
  }
  if (mode == EncodingMode::kSeparate &&
      (seq.words.size() != seq.size() || seq.labels.size() != seq.size())) {
    throw Error(ErrorCode::kContract,
                "sequence " + seq.source_id + " lacks separate-mode streams");
  }
}

}  // namespace

PrnsfmModel new_model(ModelConfig config, Vocabulary vocab,
                      const std::optional<MatrixXd> &pretrained_words) {
  check_config(config);
  if (pretrained_words && config.mode != EncodingMode::kSeparate) {
    throw Error(ErrorCode::kContract,
                "pretrained word embeddings require separate mode");
  }
  config.vocab_checksum = vocab.checksum();

  PrnsfmModel model;
  model.config = config;
  model.vocab = std::move(vocab);
  const int m = config.hidden();
  const int v_out = model.vocab.output_size();
  Rng rng(config.seed);
  auto &p = model.params;

  if (config.mode == EncodingMode::kJoint) {
    p.joint_embedding.resize(model.vocab.joints().size(), config.joint_dim);
    fill_uniform(p.joint_embedding, rng, -0.5 / config.joint_dim,
                 0.5 / config.joint_dim);
    p.word_embedding.resize(0, 0);
    p.label_embedding.resize(0, 0);
  } else {
    p.joint_embedding.resize(0, 0);
    p.word_embedding.resize(model.vocab.words().size(), config.word_dim);
    fill_uniform(p.word_embedding, rng, -0.5 / config.word_dim,
                 0.5 / config.word_dim);
    p.label_embedding.resize(model.vocab.labels().size(), config.label_dim);
    fill_uniform(p.label_embedding, rng, -0.5 / config.label_dim,
                 0.5 / config.label_dim);
    if (pretrained_words) {
      if (pretrained_words->rows() != p.word_embedding.rows() ||
          pretrained_words->cols() != p.word_embedding.cols()) {
        throw Error(ErrorCode::kDimension,
                    "pretrained word embeddings must be |V_word| x word_dim");
      }
      p.word_embedding = *pretrained_words;
    }
  }

  const double r = config.init_range;
  p.lstm = LstmWeights<double>::zeros(config.input_width(), m);
  fill_uniform(p.lstm.input, rng, -r, r);
  fill_uniform(p.lstm.recurrent, rng, -r, r);
  fill_uniform(p.lstm.bias, rng, -r, r);
  p.output_weights.resize(v_out, m);
  fill_uniform(p.output_weights, rng, -r, r);
  p.output_bias.resize(v_out);
  fill_uniform(p.output_bias, rng, -r, r);
  return model;
}

InputToken token_for_joint(const Vocabulary &vocab, int joint) {
  return {joint, vocab.joint_word(joint), vocab.joint_label(joint)};
}

template <typename Scalar>
Vector<Scalar> embed(const Parameters<Scalar> &params, EncodingMode mode,
                     const InputToken &token) {
  if (mode == EncodingMode::kJoint) {
    return params.joint_embedding.row(token.joint).transpose();
  }
  const auto dw = params.word_embedding.cols();
  const auto dl = params.label_embedding.cols();
  Vector<Scalar> x(dw + dl);
  x.head(dw) = params.word_embedding.row(token.word).transpose();
  x.tail(dl) = params.label_embedding.row(token.label).transpose();
  return x;
}

template <typename Scalar>
ForwardTrace<Scalar> forward(const Parameters<Scalar> &params,
                             EncodingMode mode, const EncodedSequence &seq) {
  check_sequence(seq, mode);
  ForwardTrace<Scalar> trace;
  const std::size_t steps = seq.size() - 1;
  trace.inputs.reserve(steps);
  trace.states.reserve(steps);
  trace.distributions.reserve(steps);

  auto state = LstmState<Scalar>::initial(params.lstm.hidden());
  for (std::size_t t = 0; t < steps; ++t) {
    const InputToken token = token_at(seq, mode, t);
    state = lstm_step(embed(params, mode, token), state, params.lstm);
    Vector<Scalar> dist =
        softmax_layer(state.h, params.output_weights, params.output_bias);
    const int target = seq.joint[t + 1];
    trace.loss += nll_loss(dist, target, &trace.clamped);
    trace.inputs.push_back(token);
    trace.targets.push_back(target);
    trace.states.push_back(state);
    trace.distributions.push_back(std::move(dist));
  }
  return trace;
}

template <typename Scalar>
Parameters<Scalar> backward(const Parameters<Scalar> &params, EncodingMode mode,
                            const ForwardTrace<Scalar> &trace) {
  Parameters<Scalar> grads = params.zeros_like();
  const auto m = params.lstm.hidden();
  Vector<Scalar> dh_next = Vector<Scalar>::Zero(m);
  Vector<Scalar> dc_next = Vector<Scalar>::Zero(m);

  for (std::size_t t = trace.states.size(); t-- > 0;) {
    const auto &state = trace.states[t];
    Vector<Scalar> dlogits = trace.distributions[t];
    dlogits[trace.targets[t]] -= Scalar(1);

    grads.output_weights.noalias() += dlogits * state.h.transpose();
    grads.output_bias += dlogits;
    Vector<Scalar> dh = dh_next;
    dh.noalias() += params.output_weights.transpose() * dlogits;

    auto step = lstm_step_backward(state, dh, dc_next, params.lstm, grads.lstm);
    dh_next = std::move(step.dh_prev);
    dc_next = std::move(step.dc_prev);

    const InputToken &token = trace.inputs[t];
    if (mode == EncodingMode::kJoint) {
      grads.joint_embedding.row(token.joint) += step.dx.transpose();
    } else {
      const auto dw = params.word_embedding.cols();
      const auto dl = params.label_embedding.cols();
      grads.word_embedding.row(token.word) += step.dx.head(dw).transpose();
      grads.label_embedding.row(token.label) += step.dx.tail(dl).transpose();
    }
  }
  return grads;
}

template <typename Scalar>
Scalar sequence_loss(const Parameters<Scalar> &params, EncodingMode mode,
                     const EncodedSequence &seq) {
  return forward(params, mode, seq).loss;
}

template Vector<double> embed(const Parameters<double> &, EncodingMode,
                              const InputToken &);
template ForwardTrace<double> forward(const Parameters<double> &, EncodingMode,
                                      const EncodedSequence &);
template ForwardTrace<long double> forward(const Parameters<long double> &,
                                           EncodingMode,
                                           const EncodedSequence &);
template Parameters<double> backward(const Parameters<double> &, EncodingMode,
                                     const ForwardTrace<double> &);
template Parameters<long double> backward(const Parameters<long double> &,
                                          EncodingMode,
                                          const ForwardTrace<long double> &);
template double sequence_loss(const Parameters<double> &, EncodingMode,
                              const EncodedSequence &);
template long double sequence_loss(const Parameters<long double> &,
                                   EncodingMode, const EncodedSequence &);

DecoderState begin_sequence(const PrnsfmModel &model, const InputToken &token) {
  DecoderState initial;
  initial.lstm = LstmState<double>::initial(model.params.lstm.hidden());
  return extend_sequence(model, initial, token);
}

DecoderState extend_sequence(const PrnsfmModel &model, const DecoderState &state,
                             const InputToken &token) {
  const auto &p = model.params;
  DecoderState next;
  next.lstm = lstm_step(embed(p, model.config.mode, token), state.lstm, p.lstm);
  next.distribution = softmax_layer(next.lstm.h, p.output_weights, p.output_bias);
  return next;
}

InputToken input_token(const PrnsfmModel &model, const ArgumentUnit &unit) {
  const auto &vocab = model.vocab;
  return {vocab.joint_id(unit.word, unit.label),
          unit.is_eos() ? Vocabulary::kEosWordId : vocab.word_id(unit.word),
          vocab.label_id(unit.label)};
}

namespace {

void check_prefix(const std::vector<ArgumentUnit> &prefix) {
  if (prefix.empty()) {
    throw Error(ErrorCode::kContract, "prefix must not be empty");
  }
  if (!prefix.front().is_predicate()) {
    throw Error(ErrorCode::kContract, "prefix must start with a PRED unit");
  }
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (prefix[i].is_eos()) {
      throw Error(ErrorCode::kContract, "EOS inside prefix");
    }
    if (i > 0 && prefix[i].is_predicate()) {
      throw Error(ErrorCode::kContract, "PRED unit after position 0");
    }
  }
}

}  // namespace

VectorXd next_argument_distribution(const PrnsfmModel &model,
                                    const std::vector<ArgumentUnit> &prefix) {
  check_prefix(prefix);
  DecoderState state = begin_sequence(model, input_token(model, prefix[0]));
  for (std::size_t i = 1; i < prefix.size(); ++i) {
    state = extend_sequence(model, state, input_token(model, prefix[i]));
  }
  return state.distribution;
}

double sequence_log_probability(const PrnsfmModel &model,
                                const FrameSequence &frame) {
  validate_frame(frame);
  DecoderState state = begin_sequence(model, input_token(model, frame.units[0]));
  double log_prob = 0;
  for (std::size_t i = 1; i < frame.units.size(); ++i) {
    const InputToken next = input_token(model, frame.units[i]);
    log_prob += std::log(state.distribution[next.joint]);
    if (i + 1 < frame.units.size()) state = extend_sequence(model, state, next);
  }
  return log_prob;
}

TrainReport train(PrnsfmModel &model, const std::vector<EncodedSequence> &frames,
                  const TrainOptions &options) {
  const auto start = std::chrono::steady_clock::now();
  TrainReport report;
  const EncodingMode mode = model.config.mode;
  const int v_out = model.output_size();
  for (const auto &seq : frames) {
    check_sequence(seq, mode);
    for (int id : seq.joint) {
      if (id < 0 || id >= v_out) {
        throw Error(ErrorCode::kContract,
                    "sequence " + seq.source_id + " not encoded for this model");
      }
    }
  }

  std::vector<Eigen::Map<VectorXd>> param_views;
  std::vector<std::string_view> names;
  model.params.for_each([&](std::string_view name, Eigen::Map<VectorXd> view) {
    names.push_back(name);
    param_views.push_back(view);
  });
  std::vector<AdaDeltaState<double>> optimizer;
  for (const auto &view : param_views) {
    optimizer.emplace_back(view.size(), options.rho, options.epsilon);
  }

  std::vector<std::size_t> order(frames.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(options.shuffle_seed);

  for (int epoch = 0; epoch < options.epochs && !frames.empty(); ++epoch) {
    rng.shuffle(order);
    double total = 0;
    for (std::size_t index : order) {
      const auto &seq = frames[index];
      const auto trace = forward(model.params, mode, seq);
      if (!std::isfinite(trace.loss)) {
        throw Error(ErrorCode::kNumeric,
                    "non-finite loss on frame '" + seq.source_id +
                        "' (index " + std::to_string(index) + ", epoch " +
                        std::to_string(epoch + 1) + ")");
      }
      report.clamped_probabilities += trace.clamped;
      total += trace.loss;

      Parameters<double> grads = backward(model.params, mode, trace);
      std::vector<Eigen::Map<VectorXd>> grad_views;
      grads.for_each([&](std::string_view, Eigen::Map<VectorXd> view) {
        grad_views.push_back(view);
      });
      if (options.max_grad_norm) {
        double sq = 0;
        for (const auto &g : grad_views) sq += g.squaredNorm();
        const double norm = std::sqrt(sq);
        if (norm > *options.max_grad_norm) {
          const double scale = *options.max_grad_norm / norm;
          for (auto &g : grad_views) g *= scale;
        }
      }
      for (std::size_t k = 0; k < param_views.size(); ++k) {
        if (options.freeze_word_embeddings && names[k] == "word_embedding") {
          continue;
        }
        adadelta_update(param_views[k], grad_views[k], optimizer[k]);
      }
      ++report.frames_seen;
    }
    const double mean = total / static_cast<double>(frames.size());
    report.epoch_mean_nll.push_back(mean);
    ++report.epochs_run;
    if (options.on_epoch) options.on_epoch(epoch + 1, mean);
  }
  if (report.clamped_probabilities > 0) {
    spdlog::warn("{} target probabilities clamped at {}",
                 report.clamped_probabilities, kProbabilityFloor);
  }
  report.wall_seconds = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - start)
                            .count();
  return report;
}

namespace {

constexpr std::string_view kModelMagic = "PRNSFM-MODEL";
constexpr int kModelVersion = 1;

std::string format_double(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

void write_le_double(std::ostream &out, double value, Fnv1a &hash) {
  auto bits = std::bit_cast<std::uint64_t>(value);
  unsigned char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(bits >> (8 * i));
  out.write(reinterpret_cast<const char *>(bytes), 8);
  hash.update(bytes, 8);
}

std::string config_header(const ModelConfig &config) {
  std::ostringstream out;
  out << "mode " << mode_name(config.mode) << '\n'
      << "word_dim " << config.word_dim << '\n'
      << "label_dim " << config.label_dim << '\n'
      << "joint_dim " << config.joint_dim << '\n'
      << "seed " << config.seed << '\n'
      << "init_range " << format_double(config.init_range) << '\n'
      << "vocab_checksum " << to_hex(config.vocab_checksum) << '\n';
  return out.str();
}

[[noreturn]] void truncated() {
  throw Error(ErrorCode::kIo, "model file truncated or corrupt");
}

std::string read_line(std::istream &in) {
  std::string line;
  if (!std::getline(in, line)) truncated();
  return line;
}

std::string expect_key(std::istream &in, std::string_view key) {
  const std::string line = read_line(in);
  if (line.size() <= key.size() || line.compare(0, key.size(), key) != 0 ||
      line[key.size()] != ' ') {
    throw Error(ErrorCode::kParse, "model header: expected '" +
                                       std::string(key) + "', got '" + line +
                                       "'");
  }
  return line.substr(key.size() + 1);
}

template <typename T>
T parse_number(const std::string &text) {
  std::istringstream in(text);
  T value{};
  if (!(in >> value) || !in.eof()) {
    throw Error(ErrorCode::kParse, "model header: bad number '" + text + "'");
  }
  return value;
}

}  // namespace

void save_model(const PrnsfmModel &model, std::ostream &out) {
  std::ostringstream vocab_text;
  model.vocab.write(vocab_text);
  const std::string vocab_bytes = vocab_text.str();

  out << kModelMagic << '\n' << "version " << kModelVersion << '\n';
  out << config_header(model.config);
  out << "vocabulary " << vocab_bytes.size() << '\n' << vocab_bytes;

  std::size_t tensors = 0;
  std::size_t coefficients = 0;
  std::ostringstream table;
  model.params.for_each([&](std::string_view name, const auto &view) {
    ++tensors;
    coefficients += view.size();
    table << name << ' ' << view.size() << '\n';
  });
  out << "tensors " << tensors << '\n' << table.str();
  out << "payload " << coefficients << '\n';

  Fnv1a hash;
  model.params.for_each([&](std::string_view, const auto &view) {
    for (Eigen::Index i = 0; i < view.size(); ++i) {
      write_le_double(out, view[i], hash);
    }
  });
  out << "\npayload_checksum " << to_hex(hash.digest()) << '\n';
  if (!out) throw Error(ErrorCode::kIo, "failed writing model");
}

PrnsfmModel load_model(std::istream &in, const Vocabulary *expected_vocab) {
  if (read_line(in) != kModelMagic) {
    throw Error(ErrorCode::kParse, "not a model file (bad magic)");
  }
  if (parse_number<int>(expect_key(in, "version")) != kModelVersion) {
    throw Error(ErrorCode::kVersion, "unsupported model format version");
  }
  ModelConfig config;
  config.mode = parse_mode(expect_key(in, "mode"));
  config.word_dim = parse_number<int>(expect_key(in, "word_dim"));
  config.label_dim = parse_number<int>(expect_key(in, "label_dim"));
  config.joint_dim = parse_number<int>(expect_key(in, "joint_dim"));
  config.seed = parse_number<std::uint64_t>(expect_key(in, "seed"));
  config.init_range = parse_number<double>(expect_key(in, "init_range"));
  const std::string stored_checksum = expect_key(in, "vocab_checksum");
  check_config(config);

  const auto vocab_size = parse_number<std::size_t>(expect_key(in, "vocabulary"));
  std::string vocab_bytes(vocab_size, '\0');
  if (!in.read(vocab_bytes.data(), static_cast<std::streamsize>(vocab_size))) {
    truncated();
  }
  std::istringstream vocab_in(vocab_bytes);
  Vocabulary vocab = Vocabulary::read(vocab_in);
  if (to_hex(vocab.checksum()) != stored_checksum) {
    throw Error(ErrorCode::kChecksum, "embedded vocabulary checksum mismatch");
  }
  if (expected_vocab != nullptr &&
      expected_vocab->checksum() != vocab.checksum()) {
    throw Error(ErrorCode::kChecksum,
                "model was trained with a different vocabulary");
  }

  // Shapes follow from the config and vocabulary; a zero-initialized model
  // provides them and the payload overwrites every coefficient.
  ModelConfig shape_config = config;
  shape_config.init_range = 0;
  PrnsfmModel model = new_model(shape_config, std::move(vocab));
  model.config = config;
  model.config.vocab_checksum = model.vocab.checksum();

  const auto tensors = parse_number<std::size_t>(expect_key(in, "tensors"));
  std::vector<std::pair<std::string, std::size_t>> table;
  for (std::size_t i = 0; i < tensors; ++i) {
    const auto fields = split(read_line(in), ' ');
    if (fields.size() != 2) throw Error(ErrorCode::kParse, "bad tensor entry");
    table.emplace_back(fields[0], parse_number<std::size_t>(fields[1]));
  }
  std::size_t index = 0;
  model.params.for_each([&](std::string_view name, const auto &view) {
    if (index >= table.size() || table[index].first != name ||
        table[index].second != static_cast<std::size_t>(view.size())) {
      throw Error(ErrorCode::kParse,
                  "tensor table does not match config for '" +
                      std::string(name) + "'");
    }
    ++index;
  });
  if (index != table.size()) throw Error(ErrorCode::kParse, "extra tensors");

  const auto payload = parse_number<std::size_t>(expect_key(in, "payload"));
  if (payload != model.params.coefficient_count()) {
    throw Error(ErrorCode::kParse, "payload size does not match tensors");
  }
  Fnv1a hash;
  model.params.for_each([&](std::string_view, Eigen::Map<VectorXd> view) {
    for (Eigen::Index i = 0; i < view.size(); ++i) {
      unsigned char bytes[8];
      if (!in.read(reinterpret_cast<char *>(bytes), 8)) truncated();
      hash.update(bytes, 8);
      std::uint64_t bits = 0;
      for (int b = 0; b < 8; ++b) bits |= std::uint64_t{bytes[b]} << (8 * b);
      view[i] = std::bit_cast<double>(bits);
    }
  });
  if (read_line(in) != "") truncated();
  if (expect_key(in, "payload_checksum") != to_hex(hash.digest())) {
    throw Error(ErrorCode::kChecksum, "model payload checksum mismatch");
  }
  model.params.for_each([](std::string_view name, const auto &view) {
    if (!all_finite(view)) {
      throw Error(ErrorCode::kNumeric,
                  "non-finite values in tensor " + std::string(name));
    }
  });
  return model;
}

void save_model_file(const PrnsfmModel &model, const std::string &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  save_model(model, out);
}

PrnsfmModel load_model_file(const std::string &path,
                            const Vocabulary *expected_vocab) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path);
  return load_model(in, expected_vocab);
}

std::uint64_t model_checksum(const PrnsfmModel &model) {
  Fnv1a hash;
  hash.update(config_header(model.config));
  model.params.for_each([&](std::string_view name, const auto &view) {
    hash.update(name);
    hash.update(view.data(), sizeof(double) * view.size());
  });
  return hash.digest();
}

GradCheckResult grad_check(const PrnsfmModel &model, const EncodedSequence &seq,
                           const GradCheckOptions &options) {
  if (!(options.epsilon > 0)) {
    throw Error(ErrorCode::kContract, "grad_check: epsilon must be positive");
  }
  const EncodingMode mode = model.config.mode;
  Parameters<double> analytic =
      backward(model.params, mode, forward(model.params, mode, seq));
  if (options.tamper) options.tamper(analytic);

  std::vector<std::pair<std::string_view, Eigen::Map<const VectorXd>>> grads;
  analytic.for_each([&](std::string_view name, const auto &view) {
    grads.emplace_back(name,
                       Eigen::Map<const VectorXd>(view.data(), view.size()));
  });

  Parameters<long double> probe = model.params.cast<long double>();
  std::vector<Eigen::Map<Vector<long double>>> probe_views;
  probe.for_each([&](std::string_view, Eigen::Map<Vector<long double>> view) {
    probe_views.push_back(view);
  });

  std::vector<std::pair<std::size_t, Eigen::Index>> coords;
  for (std::size_t t = 0; t < probe_views.size(); ++t) {
    for (Eigen::Index i = 0; i < probe_views[t].size(); ++i) {
      coords.emplace_back(t, i);
    }
  }
  if (options.max_coordinates > 0 && options.max_coordinates < coords.size()) {
    Rng rng(options.sample_seed);
    rng.shuffle(coords);
    coords.resize(options.max_coordinates);
  }

  const long double eps = options.epsilon;
  GradCheckResult result;
  for (const auto &[t, i] : coords) {
    long double &value = probe_views[t][i];
    const long double saved = value;
    value = saved + eps;
    const long double plus = sequence_loss(probe, mode, seq);
    value = saved - eps;
    const long double minus = sequence_loss(probe, mode, seq);
    value = saved;

    const double numeric = static_cast<double>((plus - minus) / (2 * eps));
    const double exact = grads[t].second[i];
    const double denom =
        std::max({std::abs(exact), std::abs(numeric), 1e-8});
    const double rel = std::abs(exact - numeric) / denom;
    ++result.coordinates;
    if (rel > result.max_relative_error || !std::isfinite(rel)) {
      result.max_relative_error = rel;
      result.worst_tensor = std::string(grads[t].first);
      result.worst_index = static_cast<std::size_t>(i);
      result.analytic_at_worst = exact;
      result.numeric_at_worst = numeric;
    }
  }
  return result;
}

}  // namespace prnsfm
