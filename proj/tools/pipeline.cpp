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


#include "pipeline.hpp"

#include <spdlog/spdlog.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <sstream>

#include "json.hpp"
#include "prnsfm/evaluator.hpp"
#include "prnsfm/synthetic.hpp"

namespace prnsfm::cli {

namespace {

using nlohmann::ordered_json;

constexpr std::string_view kToolVersion = "1.0.0";

std::ifstream open_in(const std::string &path, std::string_view what) {
  if (path.empty()) {
    throw Error(ErrorCode::kContract, std::string(what) + " path is required");
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  return in;
}

std::ofstream open_out(const std::string &path, std::string_view what) {
  if (path.empty()) {
    throw Error(ErrorCode::kContract, std::string(what) + " path is required");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  return out;
}

std::string file_checksum(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  const std::string bytes{std::istreambuf_iterator<char>(in),
                          std::istreambuf_iterator<char>()};
  Fnv1a hash;
  hash.update(bytes);
  return to_hex(hash.digest());
}

ordered_json config_snapshot(const PipelineConfig &c) {
  const ModelConfig &m = c.model_config;
  const ResolverConfig &r = c.resolver;
  ordered_json j;
  j["paths"] = {{"corpus", c.corpus},       {"corpus_format", c.corpus_format},
                {"frames", c.frames},       {"vocab", c.vocab},
                {"embeddings", c.embeddings}, {"lexicon", c.lexicon},
                {"model", c.model},         {"documents", c.documents},
                {"queries", c.queries},     {"gold", c.gold},
                {"triples", c.triples},     {"predictions", c.predictions},
                {"output", c.output},       {"output_vocab", c.output_vocab},
                {"report", c.report}};
  j["ingest"] = {{"max_arguments", c.ingest.max_arguments},
                 {"length_filter", c.ingest.length_filter},
                 {"max_sentence_tokens", c.ingest.max_sentence_tokens},
                 {"min_count", c.min_count}};
  j["model"] = {{"mode", mode_name(m.mode)},   {"word_dim", m.word_dim},
                {"label_dim", m.label_dim},    {"joint_dim", m.joint_dim},
                {"seed", m.seed},              {"init_range", m.init_range}};
  j["train"] = {{"epochs", c.epochs},
                {"shuffle_seed", c.shuffle_seed},
                {"rho", kAdaDeltaRho},
                {"epsilon", kAdaDeltaEpsilon},
                {"max_grad_norm", c.max_grad_norm ? ordered_json(*c.max_grad_norm)
                                                  : ordered_json(nullptr)},
                {"freeze_embeddings", c.freeze_embeddings}};
  j["selpref"] = {{"k", r.selpref.k},
                  {"depth", r.selpref.depth},
                  {"eos_dead_ends", r.selpref.eos_dead_ends},
                  {"oracle", c.oracle}};
  j["resolver"] = {{"threshold", r.threshold},
                   {"recency_z", r.recency_z},
                   {"recency_alpha", r.recency_alpha},
                   {"window", r.window},
                   {"baseline_only", r.baseline_only},
                   {"candidates", candidate_filter_name(r.candidates)},
                   {"threshold_raw_scores", r.threshold_raw_scores}};
  j["verify"] = {{"seeds", c.verify_seeds},    {"dim", c.verify_dim},
                 {"output_size", c.verify_output}, {"cases", c.verify_cases},
                 {"seed", c.verify_seed},      {"corrupt_gradient", c.corrupt_gradient}};
  return j;
}

// Run manifest: everything needed to rerun the command and compare outputs.
class Manifest {
 public:
  explicit Manifest(const PipelineConfig &config) : config_(config) {
    json_["tool"] = "prnsfm";
    json_["version"] = kToolVersion;
    json_["command"] = config.command;
    json_["config_file"] = config.config_file;
    json_["config"] = config_snapshot(config);
    json_["seeds"] = {{"model", config.model_config.seed},
                      {"shuffle", config.shuffle_seed},
                      {"verify", config.verify_seed}};
    json_["inputs"] = ordered_json::object();
    json_["outputs"] = ordered_json::object();
    json_["summary"] = ordered_json::object();
  }

  void input(const std::string &path) {
    if (!path.empty()) json_["inputs"][path] = file_checksum(path);
  }
  void output(const std::string &path) {
    if (!path.empty()) json_["outputs"][path] = file_checksum(path);
  }
  ordered_json &summary() { return json_["summary"]; }

  void write(const std::string &primary_output) const {
    std::string path = config_.manifest;
    if (path.empty()) {
      if (primary_output.empty()) return;
      path = primary_output + ".manifest.json";
    }
    auto out = open_out(path, "manifest");
    out << json_.dump(2) << '\n';
  }

 private:
  const PipelineConfig &config_;
  ordered_json json_;
};

IngestResult read_frame_file(const std::string &path) {
  auto in = open_in(path, "frames");
  IngestOptions options;
  options.max_arguments = static_cast<std::size_t>(-1);
  options.length_filter = false;
  return parse_frames(in, CorpusFormat::kFrameRecords, options);
}

CorpusFormat parse_format(const std::string &name) {
  if (name == "records") return CorpusFormat::kFrameRecords;
  if (name == "columns" || name == "conll09") return CorpusFormat::kColumns;
  throw Error(ErrorCode::kContract, "unknown corpus format '" + name + "'");
}

VerbMap load_verb_map(const PipelineConfig &config) {
  auto lexicon = open_in(config.lexicon, "lexicon");
  std::vector<FrameSequence> frames;
  if (!config.frames.empty()) frames = read_frame_file(config.frames).frames;
  return build_verb_map(lexicon, frames);
}

std::string format_score(double value) {
  char buffer[48];
  std::snprintf(buffer, sizeof(buffer), "%.10f", value);
  return buffer;
}

}  // namespace

int cmd_ingest(const PipelineConfig &config) {
  Manifest manifest(config);
  auto in = open_in(config.corpus, "corpus");
  const IngestResult result =
      parse_frames(in, parse_format(config.corpus_format), config.ingest);
  if (result.frames.empty()) {
    throw Error(ErrorCode::kContract, "ingest: no frames found in " + config.corpus);
  }
  {
    auto out = open_out(config.output, "output");
    write_frame_records(out, result.frames, result.convention);
  }
  const Vocabulary vocab =
      Vocabulary::build(result.frames, config.min_count, result.convention);
  if (!config.output_vocab.empty()) {
    auto out = open_out(config.output_vocab, "vocabulary");
    vocab.write(out);
  }

  std::size_t units = 0;
  std::size_t folded = 0;
  for (const auto &frame : result.frames) {
    for (const auto &unit : frame.units) {
      if (unit.is_eos()) continue;
      ++units;
      if (!vocab.find_joint(unit.word, unit.label)) ++folded;
    }
  }

  manifest.input(config.corpus);
  manifest.output(config.output);
  manifest.output(config.output_vocab);
  auto &s = manifest.summary();
  s["frames"] = result.frames.size();
  s["sentences"] = result.sentences;
  s["sentences_skipped"] = result.sentences_skipped;
  s["frames_truncated"] = result.frames_truncated;
  s["convention"] = convention_name(result.convention);
  s["words"] = vocab.words().size();
  s["labels"] = vocab.labels().size();
  s["joint_units"] = vocab.output_size();
  s["units"] = units;
  s["units_folded_to_unk"] = folded;
  s["vocab_checksum"] = to_hex(vocab.checksum());
  manifest.write(config.output);

  for (const auto &[key, value] : s.items()) {
    std::cout << key << '=' << (value.is_string() ? value.get<std::string>()
                                                  : value.dump())
              << '\n';
  }
  return 0;
}

int cmd_train(const PipelineConfig &config) {
  Manifest manifest(config);
  const IngestResult data = read_frame_file(config.frames);
  if (data.frames.empty()) {
    throw Error(ErrorCode::kContract, "train: no frames in " + config.frames);
  }
  Vocabulary vocab;
  if (!config.vocab.empty()) {
    auto in = open_in(config.vocab, "vocabulary");
    vocab = Vocabulary::read(in);
  } else {
    vocab = Vocabulary::build(data.frames, config.min_count, data.convention);
  }

  std::optional<MatrixXd> pretrained;
  if (!config.embeddings.empty()) {
    auto in = open_in(config.embeddings, "embeddings");
    Rng rng(config.model_config.seed);
    EmbeddingLoad load =
        load_pretrained_embeddings(in, vocab, config.model_config.word_dim, rng);
    manifest.summary()["embedding_coverage"] = load.coverage();
    pretrained = std::move(load.rows);
  }
  PrnsfmModel model = new_model(config.model_config, vocab, pretrained);

  std::vector<EncodedSequence> encoded;
  encoded.reserve(data.frames.size());
  for (const auto &frame : data.frames) {
    encoded.push_back(encode_frame(frame, vocab, config.model_config.mode));
  }

  TrainOptions options;
  options.epochs = config.epochs;
  options.shuffle_seed = config.shuffle_seed;
  options.max_grad_norm = config.max_grad_norm;
  options.freeze_word_embeddings = config.freeze_embeddings;
  options.on_epoch = [](int epoch, double nll) {
    spdlog::info("epoch {} mean_nll {:.6f}", epoch, nll);
  };
  const TrainReport report = train(model, encoded, options);
  save_model_file(model, config.output);

  ordered_json r;
  r["epochs_run"] = report.epochs_run;
  r["frames"] = encoded.size();
  r["frames_seen"] = report.frames_seen;
  r["clamped_probabilities"] = report.clamped_probabilities;
  r["wall_seconds"] = report.wall_seconds;
  r["model_checksum"] = to_hex(model_checksum(model));
  r["epoch_mean_nll"] = report.epoch_mean_nll;
  const std::string report_path =
      config.report.empty() ? config.output + ".report.json" : config.report;
  {
    auto out = open_out(report_path, "report");
    out << r.dump(2) << '\n';
  }

  manifest.input(config.frames);
  manifest.input(config.vocab);
  manifest.input(config.embeddings);
  manifest.output(config.output);
  auto &s = manifest.summary();
  s["frames"] = encoded.size();
  s["epochs_run"] = report.epochs_run;
  s["first_epoch_nll"] = report.epoch_mean_nll.front();
  s["final_epoch_nll"] = report.epoch_mean_nll.back();
  s["model_checksum"] = to_hex(model_checksum(model));
  manifest.write(config.output);

  std::cout << "frames=" << encoded.size() << "\nepochs=" << report.epochs_run
            << "\nfirst_epoch_nll=" << report.epoch_mean_nll.front()
            << "\nfinal_epoch_nll=" << report.epoch_mean_nll.back()
            << "\nmodel_checksum=" << to_hex(model_checksum(model)) << '\n';
  return 0;
}

int cmd_selpref(const PipelineConfig &config) {
  Manifest manifest(config);
  const PrnsfmModel model = load_model_file(config.model);
  SelPrefTreeCache cache(model, config.resolver.selpref);
  validate(config.resolver.selpref);

  auto in = open_in(config.triples, "triples");
  auto out = open_out(config.output, "output");
  std::string line;
  std::size_t line_number = 0;
  std::size_t scored = 0;
  double worst_gap = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || line.front() == '#') {
      out << line << '\n';
      continue;
    }
    const auto fields = split(line, '\t');
    if (fields.size() < 3) {
      throw ParseError(line_number, "expected predicate<TAB>word<TAB>label");
    }
    const ArgumentUnit target{fields[1], fields[2]};
    double score = 0;
    if (const auto target_id = model.vocab.find_joint(target.word, target.label)) {
      if (const auto tree = cache.get(fields[0])) score = tree->score(*target_id);
    }
    out << line << '\t' << format_score(score);
    if (config.oracle) {
      const double exact = selectional_preference_exhaustive(
          model, fields[0], target, config.resolver.selpref.depth);
      out << '\t' << format_score(exact) << '\t' << format_score(score - exact);
      worst_gap = std::max(worst_gap, std::abs(score - exact));
    }
    out << '\n';
    ++scored;
  }
  out.close();

  manifest.input(config.model);
  manifest.input(config.triples);
  manifest.output(config.output);
  manifest.summary()["scored"] = scored;
  if (config.oracle) manifest.summary()["max_abs_oracle_gap"] = worst_gap;
  manifest.write(config.output);
  std::cout << "scored=" << scored << '\n';
  if (config.oracle) std::cout << "max_abs_oracle_gap=" << worst_gap << '\n';
  return 0;
}

int cmd_resolve(const PipelineConfig &config) {
  Manifest manifest(config);
  validate(config.resolver);
  if (!config.resolver.baseline_only && config.model.empty()) {
    throw Error(ErrorCode::kContract,
                "resolve: --model is required unless --baseline-only is set");
  }
  std::optional<PrnsfmModel> model;
  if (!config.resolver.baseline_only) model = load_model_file(config.model);
  const VerbMap verb_map = load_verb_map(config);

  std::map<std::string, Document> documents;
  {
    auto in = open_in(config.documents, "documents");
    for (auto &document : read_documents(in)) {
      const std::string id = document.id;
      documents.emplace(id, std::move(document));
    }
  }
  std::vector<ResolverQuery> queries;
  {
    auto in = open_in(config.queries, "queries");
    queries = read_queries(in);
  }

  std::optional<SelPrefTreeCache> cache;
  if (model) cache.emplace(*model, config.resolver.selpref);

  auto out = open_out(config.output, "output");
  write_prediction_header(out);
  std::size_t fallback = 0;
  std::size_t predicted = 0;
  std::size_t unfilled = 0;
  for (const auto &query : queries) {
    const auto it = documents.find(query.doc_id);
    if (it == documents.end()) {
      throw Error(ErrorCode::kContract,
                  "query references unknown document '" + query.doc_id + "'");
    }
    const auto prediction =
        resolve(it->second, query, cache ? &*cache : nullptr, verb_map, config.resolver);
    write_prediction(out, query, prediction);
    if (!prediction) {
      ++unfilled;
    } else if (prediction->provenance == Provenance::kFallback) {
      ++fallback;
    } else {
      ++predicted;
    }
  }
  out.close();

  manifest.input(config.model);
  manifest.input(config.lexicon);
  manifest.input(config.frames);
  manifest.input(config.documents);
  manifest.input(config.queries);
  manifest.output(config.output);
  auto &s = manifest.summary();
  s["queries"] = queries.size();
  s["fallback"] = fallback;
  s["model"] = predicted;
  s["unfilled"] = unfilled;
  manifest.write(config.output);
  std::cout << "queries=" << queries.size() << "\nfallback=" << fallback
            << "\nmodel=" << predicted << "\nunfilled=" << unfilled << '\n';
  return 0;
}

int cmd_evaluate(const PipelineConfig &config) {
  Manifest manifest(config);
  GoldSet gold;
  {
    auto in = open_in(config.gold, "gold");
    gold = read_gold(in);
  }
  std::vector<PredictionRecord> predictions;
  {
    auto in = open_in(config.predictions, "predictions");
    predictions = read_predictions(in);
  }
  const Evaluation evaluation = evaluate(predictions, gold);
  write_metrics_table(std::cout, evaluation);
  if (!config.output.empty()) {
    auto out = open_out(config.output, "output");
    write_metrics_kv(out, evaluation);
  }

  manifest.input(config.gold);
  manifest.input(config.predictions);
  manifest.output(config.output);
  auto &s = manifest.summary();
  s["precision"] = evaluation.overall.precision;
  s["recall"] = evaluation.overall.recall;
  s["f1"] = evaluation.overall.f1;
  s["predicted"] = evaluation.overall.n_predicted;
  s["gold_filled"] = evaluation.overall.n_gold_filled;
  manifest.write(config.output);
  return 0;
}

int cmd_verify(const PipelineConfig &config) {
  Manifest manifest(config);
  if (config.verify_seeds < 1 || config.verify_cases < 1 ||
      config.verify_output < 4 || config.verify_output > kExhaustiveMaxOutput ||
      config.verify_dim < 2) {
    throw Error(ErrorCode::kContract,
                "verify: seeds, cases >= 1; 4 <= output-size <= 16; dim >= 2");
  }

  GradCheckOptions grad_options;
  if (config.corrupt_gradient) {
    grad_options.tamper = [](Parameters<double> &g) {
      auto block = g.lstm.recurrent_block(LstmWeights<double>::kForgetGate);
      block = block * 1.5 + Matrix<double>::Constant(block.rows(), block.cols(), 1e-3);
    };
  }
  double grad_worst = 0;
  std::string grad_worst_where;
  std::size_t coordinates = 0;
  for (const EncodingMode mode : {EncodingMode::kJoint, EncodingMode::kSeparate}) {
    for (int i = 0; i < config.verify_seeds; ++i) {
      const std::uint64_t seed = config.verify_seed + static_cast<std::uint64_t>(i);
      const PrnsfmModel model = random_model(mode, config.verify_output,
                                             config.verify_dim, seed, 0.5);
      Rng rng(seed);
      const auto result = grad_check(model, random_sequence(model, 5, rng), grad_options);
      coordinates += result.coordinates;
      if (result.max_relative_error > grad_worst || std::isnan(result.max_relative_error)) {
        grad_worst = result.max_relative_error;
        grad_worst_where = std::string(mode_name(mode)) + " seed " +
                           std::to_string(seed) + " " + result.worst_tensor + "[" +
                           std::to_string(result.worst_index) + "]";
      }
    }
  }
  const bool grad_ok = grad_worst < 1e-4;

  Rng rng(config.verify_seed);
  double oracle_worst = 0;
  std::size_t oracle_violations = 0;
  for (int i = 0; i < config.verify_cases; ++i) {
    const int v = 4 + static_cast<int>(rng.below(config.verify_output - 3));
    const EncodingMode mode = rng.below(2) ? EncodingMode::kJoint : EncodingMode::kSeparate;
    const PrnsfmModel model = random_model(mode, v, config.verify_dim, rng.next(), 0.5);
    const int depth = 1 + static_cast<int>(rng.below(kExhaustiveMaxDepth));
    int target = 0;
    do {
      target = static_cast<int>(rng.below(v));
    } while (target == Vocabulary::kEosJointId);
    const ArgumentUnit unit = model.vocab.joint_unit(target);
    const double exact = selectional_preference_exhaustive(model, "p", unit, depth);
    const double full = selectional_preference(model, "p", unit, {v - 1, depth, false});
    oracle_worst = std::max(oracle_worst, std::abs(full - exact));
    for (int k = 1; k < v - 1; ++k) {
      if (selectional_preference(model, "p", unit, {k, depth, false}) > exact) {
        ++oracle_violations;
      }
    }
  }
  const bool oracle_ok = oracle_worst <= 1e-10 && oracle_violations == 0;

  auto &s = manifest.summary();
  s["grad_max_relative_error"] = grad_worst;
  s["grad_worst"] = grad_worst_where;
  s["grad_coordinates"] = coordinates;
  s["grad_pass"] = grad_ok;
  s["oracle_max_abs_diff"] = oracle_worst;
  s["oracle_pruned_violations"] = oracle_violations;
  s["oracle_pass"] = oracle_ok;
  if (!config.output.empty()) {
    auto out = open_out(config.output, "output");
    out << s.dump(2) << '\n';
    out.close();
    manifest.output(config.output);
  }
  manifest.write(config.output);

  std::cout << "grad_check " << (grad_ok ? "PASS" : "FAIL")
            << " max_relative_error=" << grad_worst << " at " << grad_worst_where
            << " coordinates=" << coordinates << '\n'
            << "oracle " << (oracle_ok ? "PASS" : "FAIL")
            << " max_abs_diff=" << oracle_worst
            << " pruned_violations=" << oracle_violations << '\n'
            << "result=" << (grad_ok && oracle_ok ? "pass" : "fail") << '\n';
  return grad_ok && oracle_ok ? 0 : 1;
}

}  // namespace prnsfm::cli
