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


#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "pipeline.hpp"

namespace {

using prnsfm::cli::PipelineConfig;

void add_model_options(CLI::App &sub, PipelineConfig &c, std::string &mode) {
  sub.add_option("--mode", mode, "Architecture: joint (word:label units) or separate")
      ->check(CLI::IsMember({"joint", "separate"}))
      ->capture_default_str();
  sub.add_option("--word-dim", c.model_config.word_dim, "Word embedding width (separate)")
      ->capture_default_str();
  sub.add_option("--label-dim", c.model_config.label_dim, "Label embedding width (separate)")
      ->capture_default_str();
  sub.add_option("--joint-dim", c.model_config.joint_dim, "Unit embedding width (joint)")
      ->capture_default_str();
  sub.add_option("--seed", c.model_config.seed, "Parameter initialization seed")
      ->capture_default_str();
  sub.add_option("--init-range", c.model_config.init_range,
                 "Weights drawn from U(-r, r)")
      ->capture_default_str();
}

void add_selpref_options(CLI::App &sub, PipelineConfig &c) {
  sub.add_option("-k,--top-k", c.resolver.selpref.k, "Branches kept per tree node")
      ->capture_default_str();
  sub.add_option("-T,--depth", c.resolver.selpref.depth, "Tree depth T")
      ->capture_default_str();
  sub.add_flag("--eos-dead-ends", c.resolver.selpref.eos_dead_ends,
               "Let EOS occupy a branch slot as a dead end");
}

void add_manifest_option(CLI::App &sub, PipelineConfig &c) {
  sub.add_option("--manifest", c.manifest, "Run manifest path (default: <output>.manifest.json)");
}

}  // namespace

int main(int argc, char **argv) {
  PipelineConfig c;
  std::string mode = "separate";
  std::string candidates = "nominal_heads";
  bool verbose = false;
  bool no_length_filter = false;
  double max_grad_norm = 0;

  CLI::App app{"Recurrent semantic frame models, selectional preferences and implicit role resolution"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "INI/TOML file; [section] names match subcommands")
      ->check(CLI::ExistingFile);
  app.add_flag("-v,--verbose", verbose, "Log progress");

  auto *ingest = app.add_subcommand("ingest", "Extract frame records and a vocabulary");
  ingest->add_option("--corpus", c.corpus, "Input corpus")->required()->check(CLI::ExistingFile);
  ingest->add_option("--format", c.corpus_format, "records or columns (CoNLL-2009)")
      ->check(CLI::IsMember({"records", "columns", "conll09"}))
      ->capture_default_str();
  ingest->add_option("-o,--output", c.output, "Frame record output")->required();
  ingest->add_option("--vocab-out", c.output_vocab, "Vocabulary output");
  ingest->add_option("--max-arguments", c.ingest.max_arguments, "Arguments kept per frame")
      ->capture_default_str();
  ingest->add_flag("--no-length-filter", no_length_filter,
                   "Keep sentences of any length (default: skip >= 100 tokens)");
  ingest->add_option("--min-count", c.min_count, "Joint units rarer than this fold into <unk>:label")
      ->capture_default_str();
  add_manifest_option(*ingest, c);

  auto *train = app.add_subcommand("train", "Train a frame model with AdaDelta");
  train->add_option("--frames", c.frames, "Frame records")->required()->check(CLI::ExistingFile);
  train->add_option("--vocab", c.vocab, "Vocabulary (default: built from frames)")
      ->check(CLI::ExistingFile);
  train->add_option("--embeddings", c.embeddings, "Pre-trained word vectors (separate mode)")
      ->check(CLI::ExistingFile);
  train->add_option("-o,--output", c.output, "Model file")->required();
  train->add_option("--report", c.report, "Training report (default: <output>.report.json)");
  train->add_option("--epochs", c.epochs, "Training epochs")->capture_default_str();
  train->add_option("--shuffle-seed", c.shuffle_seed, "Per-epoch shuffle seed")
      ->capture_default_str();
  train->add_option("--max-grad-norm", max_grad_norm, "Clip the global gradient norm (0: off)")
      ->capture_default_str();
  train->add_flag("--freeze-embeddings", c.freeze_embeddings, "Keep word embeddings fixed");
  train->add_option("--min-count", c.min_count, "Used when --vocab is absent")
      ->capture_default_str();
  add_model_options(*train, c, mode);
  add_manifest_option(*train, c);

  auto *selpref = app.add_subcommand("selpref", "Score predicate/word/label triples");
  selpref->add_option("--model", c.model, "Model file")->required()->check(CLI::ExistingFile);
  selpref->add_option("--triples", c.triples, "Lines: predicate<TAB>word<TAB>label")
      ->required()
      ->check(CLI::ExistingFile);
  selpref->add_option("-o,--output", c.output, "Scored triples")->required();
  selpref->add_flag("--oracle", c.oracle, "Also print the exhaustive score (small models only)");
  add_selpref_options(*selpref, c);
  add_manifest_option(*selpref, c);

  auto *resolve = app.add_subcommand("resolve", "Fill implicit roles of nominal predicates");
  resolve->add_option("--model", c.model, "Model file")->check(CLI::ExistingFile);
  resolve->add_option("--lexicon", c.lexicon, "Lines: nominal<TAB>verb,verb,...")
      ->required()
      ->check(CLI::ExistingFile);
  resolve->add_option("--frames", c.frames, "Frame records (marks verbal forms seen in training)")
      ->check(CLI::ExistingFile);
  resolve->add_option("--documents", c.documents, "Document file")->required()->check(CLI::ExistingFile);
  resolve->add_option("--queries", c.queries, "Query file")->required()->check(CLI::ExistingFile);
  resolve->add_option("-o,--output", c.output, "Predictions")->required();
  resolve->add_option("-s,--threshold", c.resolver.threshold, "Minimum score s for a prediction")
      ->capture_default_str();
  resolve->add_option("-z,--recency-z", c.resolver.recency_z, "Recency offset z")
      ->capture_default_str();
  resolve->add_option("--alpha", c.resolver.recency_alpha, "Recency decay alpha")
      ->capture_default_str();
  resolve->add_option("--window", c.resolver.window, "Sentences searched, including the current one")
      ->capture_default_str();
  resolve->add_option("--candidates", candidates, "nominal_heads (NN*/PRP* tokens) or all_tokens")
      ->check(CLI::IsMember({"nominal_heads", "all_tokens"}))
      ->capture_default_str();
  resolve->add_flag("--threshold-raw", c.resolver.threshold_raw_scores,
                    "Compare s with scores before the recency adjustment");
  resolve->add_flag("--baseline-only", c.resolver.baseline_only,
                    "Only use explicit instances of the same predicate");
  add_selpref_options(*resolve, c);
  add_manifest_option(*resolve, c);

  auto *evaluate = app.add_subcommand("evaluate", "Dice-based precision, recall and F1");
  evaluate->add_option("--predictions", c.predictions, "Output of resolve")
      ->required()
      ->check(CLI::ExistingFile);
  evaluate->add_option("--gold", c.gold, "Lines: key<TAB>s:t,s:t;s:t")->required()->check(CLI::ExistingFile);
  evaluate->add_option("-o,--output", c.output, "key=value metrics");
  add_manifest_option(*evaluate, c);

  auto *verify = app.add_subcommand("verify", "Gradient and marginalization self-checks");
  verify->add_option("--seeds", c.verify_seeds, "Random models per architecture")
      ->capture_default_str();
  verify->add_option("--dim", c.verify_dim, "Hidden width of the random models")
      ->capture_default_str();
  verify->add_option("--output-size", c.verify_output, "Largest |V_out| of the random models")
      ->capture_default_str();
  verify->add_option("--cases", c.verify_cases, "Random selectional preference cases")
      ->capture_default_str();
  verify->add_option("--seed", c.verify_seed, "First seed")->capture_default_str();
  verify->add_flag("--corrupt-gradient", c.corrupt_gradient,
                   "Perturb the forget-gate recurrent gradient (must fail)");
  verify->add_option("-o,--output", c.output, "Report file");
  add_manifest_option(*verify, c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) return app.exit(e);
    std::cerr << "error: code=usage message=" << e.what() << '\n';
    return 2;
  }

  spdlog::set_default_logger(spdlog::stderr_color_mt("prnsfm"));
  spdlog::set_level(verbose ? spdlog::level::info : spdlog::level::warn);
  c.ingest.length_filter = !no_length_filter;
  if (max_grad_norm > 0) c.max_grad_norm = max_grad_norm;
  if (auto *opt = app.get_option("--config"); opt->count() > 0) {
    c.config_file = opt->as<std::string>();
  }

  try {
    c.model_config.mode = prnsfm::parse_mode(mode);
    c.resolver.candidates = prnsfm::parse_candidate_filter(candidates);
    CLI::App *sub = app.get_subcommands().front();
    c.command = sub->get_name();
    if (sub == ingest) return prnsfm::cli::cmd_ingest(c);
    if (sub == train) return prnsfm::cli::cmd_train(c);
    if (sub == selpref) return prnsfm::cli::cmd_selpref(c);
    if (sub == resolve) return prnsfm::cli::cmd_resolve(c);
    if (sub == evaluate) return prnsfm::cli::cmd_evaluate(c);
    return prnsfm::cli::cmd_verify(c);
  } catch (const prnsfm::Error &e) {
    std::cerr << "error: code=" << prnsfm::error_code_name(e.code())
              << " message=" << e.what() << '\n';
    return 2;
  } catch (const std::exception &e) {
    std::cerr << "error: code=internal message=" << e.what() << '\n';
    return 3;
  }
}
