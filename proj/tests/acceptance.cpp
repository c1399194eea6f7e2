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


// Acceptance checks. Prints one PASS/FAIL line per criterion; `--only N`
// runs a single criterion. Exit status is nonzero when any selected
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "prnsfm/evaluator.hpp"
#include "prnsfm/model.hpp"
#include "prnsfm/resolver.hpp"
#include "prnsfm/selpref.hpp"
#include "prnsfm/synthetic.hpp"

using namespace prnsfm;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(const char *format, auto... args) {
  char buffer[512];
  std::snprintf(buffer, sizeof(buffer), format, args...);
  return buffer;
}

SelPrefConfig selpref_config(int k, int depth) {
  SelPrefConfig c;
  c.k = k;
  c.depth = depth;
  return c;
}

std::vector<ArgumentUnit> random_prefix(const PrnsfmModel &model, int max_arguments, Rng &rng) {
  std::vector<ArgumentUnit> prefix{{"p", std::string(kPredLabel)}};
  const int n = static_cast<int>(rng.below(max_arguments + 1));
  while (static_cast<int>(prefix.size()) <= n) {
    const int id = static_cast<int>(rng.below(model.output_size()));
    const ArgumentUnit unit = model.vocab.joint_unit(id);
    if (unit.is_eos() || unit.is_predicate()) continue;
    prefix.push_back(unit);
  }
  return prefix;
}

Outcome gradient_fidelity() {
  Stopwatch clock;
  double worst = 0;
  std::size_t coordinates = 0;
  int runs = 0;
  for (const auto mode : {EncodingMode::kJoint, EncodingMode::kSeparate}) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const auto model = random_model(mode, 12, 8, seed, 0.5);
      Rng rng(seed);
      const auto result = grad_check(model, random_sequence(model, 5, rng));
      worst = std::max(worst, result.max_relative_error);
      coordinates += result.coordinates;
      ++runs;
    }
  }
  const double t = clock.seconds();
  return {worst < 1e-4 && t < 120,
          fmt("runs=%d coordinates=%zu max_rel_error=%.3e seconds=%.1f", runs, coordinates,
              worst, t)};
}

struct OracleCase {
  PrnsfmModel model;
  int target = 0;
  int depth = 1;
};

std::vector<OracleCase> oracle_cases() {
  Rng rng(2024);
  std::vector<OracleCase> cases;
  for (int c = 0; c < 100; ++c) {
    const int v = 4 + static_cast<int>(rng.below(9));
    const auto mode = rng.below(2) ? EncodingMode::kJoint : EncodingMode::kSeparate;
    const int dim = 2 + static_cast<int>(rng.below(7));
    OracleCase oc{random_model(mode, v, dim, 1000 + c, 0.5), 0, 0};
    oc.target = static_cast<int>(rng.below(v));
    oc.depth = 1 + static_cast<int>(rng.below(4));
    cases.push_back(std::move(oc));
  }
  return cases;
}

Outcome oracle_equivalence() {
  Stopwatch clock;
  double worst = 0;
  int exceed = 0, checked = 0;
  for (const auto &c : oracle_cases()) {
    const int v = c.model.output_size();
    const ArgumentUnit target = c.model.vocab.joint_unit(c.target);
    const double exact = selectional_preference_exhaustive(c.model, "p", target, c.depth);
    const double full = selectional_preference(c.model, "p", target, selpref_config(v - 1, c.depth));
    worst = std::max(worst, std::abs(full - exact));
    for (int k = 1; k < v - 1; ++k) {
      const double pruned = selectional_preference(c.model, "p", target, selpref_config(k, c.depth));
      exceed += pruned > exact;
      ++checked;
    }
  }
  const double t = clock.seconds();
  return {worst <= 1e-10 && exceed == 0 && t < 60,
          fmt("cases=100 max_diff=%.3e pruned_checks=%d pruned_above_oracle=%d seconds=%.1f",
              worst, checked, exceed, t)};
}

Outcome monotonicity() {
  Stopwatch clock;
  int violations = 0, comparisons = 0;
  for (const auto &c : oracle_cases()) {
    const int v = c.model.output_size();
    // score[T][k], k = 1 .. v-1
    std::vector<std::vector<double>> score(5, std::vector<double>(v, 0.0));
    for (int depth = 1; depth <= 4; ++depth) {
      for (int k = 1; k <= v - 1; ++k) {
        const auto tree = SelPrefTree::build(c.model, "p", selpref_config(k, depth));
        score[depth][k] = tree->score(c.target);
        if (k > 1) {
          violations += score[depth][k] < score[depth][k - 1];
          ++comparisons;
        }
        if (depth > 1) {
          violations += score[depth][k] < score[depth - 1][k];
          ++comparisons;
        }
      }
    }
  }
  return {violations == 0,
          fmt("cases=100 comparisons=%d violations=%d seconds=%.1f", comparisons, violations,
              clock.seconds())};
}

Outcome normalization() {
  Rng rng(77);
  double worst_dist = 0, worst_t1 = 0;
  int prefixes = 0;
  for (int m = 0; m < 10; ++m) {
    const auto mode = m % 2 ? EncodingMode::kJoint : EncodingMode::kSeparate;
    const auto model = random_model(mode, 6 + 3 * m, 4 + m, 500 + m, 0.5);
    for (int i = 0; i < 100; ++i) {
      const VectorXd d = next_argument_distribution(model, random_prefix(model, 6, rng));
      worst_dist = std::max(worst_dist, std::abs(d.sum() - 1));
      ++prefixes;
    }
    const auto tree = SelPrefTree::build(model, "p", selpref_config(1, 1));
    double total = 0;
    for (int j = 0; j < model.output_size(); ++j) total += tree->score(j);
    worst_t1 = std::max(worst_t1, std::abs(total - 1));
  }
  return {worst_dist <= 1e-9 && worst_t1 <= 1e-8,
          fmt("prefixes=%d max_sum_error=%.3e t1_models=10 max_t1_sum_error=%.3e", prefixes,
              worst_dist, worst_t1)};
}

Outcome closed_forms() {
  const double r1 = recency_adjust(0.001, 1, 0.00005, 0.5);
  const double r2 = recency_adjust(0.001, 2, 0.00005, 0.5);
  const double d = dice({{0, 7}, {0, 8}}, {{0, 8}, {0, 9}});

  GoldSet gold;
  gold["a"] = {"a", {{{0, 7}, {0, 8}}}};
  gold["b"] = {"b", {{{0, 3}}}};
  const auto e = evaluate({{"a", "x", TokenSet{{0, 8}, {0, 9}}}, {"b", "x", std::nullopt}}, gold);

  VectorXd x = VectorXd::Zero(1);
  AdaDeltaState<double> state(1);
  adadelta_update(x, VectorXd::Ones(1), state);

  const bool recency_ok = std::abs(r1 - 0.000975) <= 1e-18 && std::abs(r2 - 0.0009625) <= 1e-18;
  const bool dice_ok = d == 0.5;
  const bool evaluate_ok = e.overall.precision == 0.5 && e.overall.recall == 0.25 &&
                           std::abs(e.overall.f1 - 1.0 / 3) <= 1e-16;
  const bool adadelta_ok = std::abs(x[0] - -0.0044719) <= 1e-7;
  return {recency_ok && dice_ok && evaluate_ok && adadelta_ok,
          fmt("recency=%.10g,%.10g(%s) dice=%g(%s) P=%g R=%g F1=%.17g(%s) "
              "adadelta=%.10f(%s, |x+0.0044719|=%.3e)",
              r1, r2, recency_ok ? "ok" : "off", d, dice_ok ? "ok" : "off",
              e.overall.precision, e.overall.recall, e.overall.f1, evaluate_ok ? "ok" : "off",
              x[0], adadelta_ok ? "ok" : "off", std::abs(x[0] + 0.0044719))};
}

Outcome synthetic_learning() {
  Stopwatch clock;
  const auto grammar = default_grammar();
  Rng rng(7);
  const auto frames = generate_frames(grammar, 2000, rng);
  const auto corpus = generate_documents(grammar, 50, rng);
  const auto vocab = Vocabulary::build(frames, 2);
  const auto probes = make_probes(grammar, vocab, 200, rng);
  Rng held_rng(8);
  const auto held_out = generate_frames(grammar, 500, held_rng);

  auto model = new_model(ModelConfig{}, vocab);
  std::vector<EncodedSequence> data;
  for (const auto &f : frames) data.push_back(encode_frame(f, vocab, model.config.mode));
  const auto report = train(model, data, TrainOptions{});
  const double first = report.epoch_mean_nll.front();
  const double last = report.epoch_mean_nll.back();
  const bool halved = last < 0.5 * first;

  int ranked = 0;
  for (const auto &p : probes) {
    const std::string &form = grammar.find(p.predicate).forms.front();
    ranked += selectional_preference(model, form, p.consistent, {}) >
              selectional_preference(model, form, p.inconsistent, {});
  }
  const double probe_rate = static_cast<double>(ranked) / probes.size();

  std::istringstream lexicon(lexicon_text(grammar));
  const VerbMap verbs = build_verb_map(lexicon, frames);
  SelPrefTreeCache cache(model, {});
  std::map<std::string, const Document *> docs;
  for (const auto &d : corpus.documents) docs[d.id] = &d;
  std::vector<PredictionRecord> predictions;
  for (const auto &q : corpus.queries) {
    const auto p = resolve(*docs.at(q.doc_id), q, &cache, verbs, ResolverConfig{});
    PredictionRecord record{q.key(), q.nominal, std::nullopt};
    if (p) record.filler = TokenSet{p->position};
    predictions.push_back(std::move(record));
  }
  const double f1 = evaluate(predictions, corpus.gold).overall.f1;

  // Module invariant, reported alongside: EOS is likelier after the full
  // argument set than at any earlier point of the frame.
  int eos_ok = 0, eos_frames = 0;
  for (const auto &f : held_out) {
    std::vector<ArgumentUnit> prefix(f.units.begin(), f.units.end() - 1);
    const double complete = next_argument_distribution(model, prefix)[Vocabulary::kEosJointId];
    double mid = 0;
    for (std::size_t n = 1; n < prefix.size(); ++n) {
      const std::vector<ArgumentUnit> part(prefix.begin(), prefix.begin() + n);
      mid = std::max(mid, next_argument_distribution(model, part)[Vocabulary::kEosJointId]);
    }
    eos_ok += complete > mid;
    ++eos_frames;
  }
  const VectorXd eat = next_argument_distribution(model, {{"eat", "PRED"}});
  const auto a1 = vocab.find_joint("apple", "A1");
  const auto a0 = vocab.find_joint("apple", "A0");
  const double p_a1 = a1 ? eat[*a1] : 0.0;
  const double p_a0 = a0 ? eat[*a0] : 0.0;

  const double t = clock.seconds();
  return {halved && probe_rate >= 0.9 && f1 >= 0.8 && t < 600,
          fmt("first_nll=%.4f final_nll=%.4f ratio=%.4f probes=%d/%zu resolve_f1=%.4f "
              "eos_after_complete=%d/%d p(apple:A1|eat)=%.3e p(apple:A0|eat)=%.3e seconds=%.1f",
              first, last, last / first, ranked, probes.size(), f1, eos_ok, eos_frames, p_a1,
              p_a0, t)};
}

bool same_params(const Parameters<double> &a, const Parameters<double> &b) {
  std::vector<VectorXd> flat;
  a.for_each([&](std::string_view, const auto &v) { flat.push_back(v); });
  std::size_t i = 0;
  bool same = true;
  b.for_each([&](std::string_view, const auto &v) {
    same = same && flat[i].size() == v.size() && flat[i] == v;
    ++i;
  });
  return same;
}

Outcome determinism_and_persistence() {
  const auto grammar = default_grammar();
  Rng rng(3);
  const auto frames = generate_frames(grammar, 300, rng);
  const auto vocab = Vocabulary::build(frames, 1);
  bool identical = true;
  double worst = 0;
  bool params_equal = true;
  for (const auto mode : {EncodingMode::kJoint, EncodingMode::kSeparate}) {
    ModelConfig config;
    config.mode = mode;
    config.joint_dim = 16;
    config.word_dim = 10;
    config.label_dim = 6;
    std::vector<EncodedSequence> data;
    for (const auto &f : frames) data.push_back(encode_frame(f, vocab, mode));
    TrainOptions options;
    options.epochs = 3;
    auto a = new_model(config, vocab);
    auto b = new_model(config, vocab);
    const auto ra = train(a, data, options);
    const auto rb = train(b, data, options);
    identical = identical && same_params(a.params, b.params) &&
                ra.epoch_mean_nll == rb.epoch_mean_nll && model_checksum(a) == model_checksum(b);

    std::stringstream buffer;
    save_model(a, buffer);
    const auto loaded = load_model(buffer, &vocab);
    params_equal = params_equal && same_params(a.params, loaded.params);
    Rng prefix_rng(9);
    for (int i = 0; i < 200; ++i) {
      auto prefix = random_prefix(a, 4, prefix_rng);
      prefix.front().word = grammar.predicates[i % grammar.predicates.size()].forms.front();
      const VectorXd d = next_argument_distribution(a, prefix);
      const VectorXd e = next_argument_distribution(loaded, prefix);
      worst = std::max(worst, (d - e).cwiseAbs().maxCoeff());
    }
  }
  return {identical && params_equal && worst <= 1e-12,
          fmt("retrain_identical=%d load_params_identical=%d max_distribution_diff=%.3e",
              identical, params_equal, worst)};
}

Outcome resolver_contract() {
  std::istringstream text(
      "d1\t0\tThe|the|DT firm|firm|NN said|say|VBD it|it|PRP had|have|VBD heavy|heavy|JJ "
      "trading|trading|NN losses|loss|NNS on|on|IN its|its|PRP$ bond|bond|NN "
      "investments|investment|NNS .|.|.\t7:A0=1,A1=11\n"
      "d1\t1\tThe|the|DT losses|loss|NNS forced|force|VBD cuts|cut|NNS .|.|.\n");
  const auto losses = read_documents(text);
  ResolverConfig baseline;
  baseline.baseline_only = true;
  const auto fallback = resolve(losses.front(), {"d1", 1, 1, "loss", "A1"},
                                static_cast<const PrnsfmModel *>(nullptr), VerbMap{}, baseline);
  const bool losses_ok = fallback && fallback->position == TokenPosition{0, 11} &&
                         fallback->provenance == Provenance::kFallback;

  const auto grammar = default_grammar();
  Rng rng(11);
  const auto frames = generate_frames(grammar, 300, rng);
  const auto corpus = generate_documents(grammar, 50, rng);
  ModelConfig config;
  config.mode = EncodingMode::kJoint;
  config.joint_dim = 8;
  const auto model = new_model(config, Vocabulary::build(frames, 1));
  std::istringstream lexicon(lexicon_text(grammar));
  const VerbMap verbs = build_verb_map(lexicon, frames);
  std::map<std::string, const Document *> docs;
  for (const auto &d : corpus.documents) docs[d.id] = &d;

  int baseline_model = 0, baseline_filled = 0, inf_model = 0, inf_filled = 0, zero_filled = 0;
  ResolverConfig infinite;
  infinite.threshold = std::numeric_limits<double>::infinity();
  ResolverConfig zero;
  zero.threshold = 0;
  for (const auto &q : corpus.queries) {
    const Document &doc = *docs.at(q.doc_id);
    const auto b = resolve(doc, q, &model, verbs, baseline);
    baseline_filled += b.has_value();
    baseline_model += b && b->provenance == Provenance::kModel;
    const auto i = resolve(doc, q, &model, verbs, infinite);
    inf_filled += i.has_value();
    inf_model += i && i->provenance == Provenance::kModel;
    zero_filled += resolve(doc, q, &model, verbs, zero).has_value();
  }
  const int n = static_cast<int>(corpus.queries.size());
  const bool pass = losses_ok && baseline_model == 0 && inf_model == 0 &&
                    inf_filled == baseline_filled &&
                    baseline_filled == static_cast<int>(corpus.fallback_queries) &&
                    zero_filled == n;
  return {pass, fmt("losses_fallback=%d baseline_filled=%d baseline_model=%d inf_filled=%d "
                    "inf_model=%d zero_filled=%d/%d",
                    losses_ok, baseline_filled, baseline_model, inf_filled, inf_model,
                    zero_filled, n)};
}

}  // namespace

int main(int argc, char **argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::string(argv[i]) == "--only" && i + 1 < argc) only = std::atoi(argv[++i]);
  }
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"gradient fidelity", gradient_fidelity},
      {"marginalization oracle", oracle_equivalence},
      {"monotonicity", monotonicity},
      {"normalization", normalization},
      {"closed forms", closed_forms},
      {"synthetic grammar learning", synthetic_learning},
      {"determinism and persistence", determinism_and_persistence},
      {"resolver contract", resolver_contract},
  };
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only && static_cast<int>(i) + 1 != only) continue;
    Outcome outcome;
    try {
      outcome = criteria[i].second();
    } catch (const std::exception &e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    all = all && outcome.pass;
    std::printf("criterion %zu %s: %s %s\n", i + 1, criteria[i].first.c_str(),
                outcome.pass ? "PASS" : "FAIL", outcome.detail.c_str());
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
