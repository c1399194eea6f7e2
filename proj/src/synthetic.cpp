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


#include "prnsfm/synthetic.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace prnsfm {

namespace {

template <typename T>
const T &pick(const std::vector<T> &items, Rng &rng) {
  return items[rng.below(items.size())];
}

Token noun(const std::string &word) { return {word, word, "NN"}; }
Token function_word(const std::string &word, const std::string &pos) {
  return {word, word, pos};
}

// "the x <verb> the y ." with nouns at positions 1 and 4.
Sentence pair_sentence(const std::string &x, const std::string &verb,
                       const std::string &y) {
  Sentence s;
  s.tokens = {function_word("the", "DT"), noun(x),
              function_word(verb, "VBD"), function_word("the", "DT"), noun(y),
              function_word(".", ".")};
  return s;
}

// The head word with probability head_share, else a uniform tail word.
const std::string &draw_word(const SyntheticGrammar &grammar,
                             const std::vector<std::string> &words, Rng &rng) {
  if (words.size() == 1 || rng.uniform() < grammar.head_share) return words.front();
  return words[1 + rng.below(words.size() - 1)];
}

}  // namespace

const SyntheticPredicate &SyntheticGrammar::find(const std::string &verb) const {
  for (const auto &p : predicates) {
    if (p.verb == verb) return p;
  }
  throw Error(ErrorCode::kContract, "unknown synthetic predicate " + verb);
}

bool SyntheticGrammar::consistent(const SyntheticPredicate &predicate,
                                  const std::string &word,
                                  const std::string &label) const {
  const auto it = predicate.lexicon.find(label);
  if (it == predicate.lexicon.end()) return false;
  return std::find(it->second.begin(), it->second.end(), word) != it->second.end();
}

SyntheticGrammar default_grammar() {
  SyntheticGrammar g;
  g.label_order = {"A0", "A1", "A2", "AM-LOC"};
  g.presence = {{"A0", 1.0}, {"A1", 1.0}, {"A2", 0.15}, {"AM-LOC", 0.1}};
  g.head_share = 0.95;
  g.predicates = {
      {"sell",
       {"sell", "sold", "sells"},
       "sale",
       {{"A0", {"company", "dealer"}},
        {"A1", {"house", "car"}},
        {"A2", {"buyer", "bank"}},
        {"AM-LOC", {"market", "city"}}}},
      {"buy",
       {"buy", "bought"},
       "purchase",
       {{"A0", {"investor", "family"}},
        {"A1", {"share", "house"}},
        {"AM-LOC", {"store", "market"}}}},
      {"eat",
       {"eat", "ate"},
       "meal",
       {{"A0", {"child", "dog"}},
        {"A1", {"apple", "bread"}},
        {"AM-LOC", {"kitchen", "park"}}}},
      {"lose",
       {"lose", "lost"},
       "loss",
       {{"A0", {"team", "player"}},
        {"A1", {"money", "game"}},
        {"AM-LOC", {"court", "stadium"}}}},
      {"build",
       {"build", "built"},
       "construction",
       {{"A0", {"builder", "city"}},
        {"A1", {"bridge", "tower"}},
        {"AM-LOC", {"river", "town"}}}},
  };
  return g;
}

std::vector<FrameSequence> generate_frames(const SyntheticGrammar &grammar,
                                           std::size_t count, Rng &rng) {
  std::vector<FrameSequence> frames;
  frames.reserve(count);
  for (std::size_t n = 0; n < count; ++n) {
    const auto &predicate = pick(grammar.predicates, rng);
    FrameSequence frame;
    frame.source_id = "syn" + std::to_string(n);
    frame.units.push_back({pick(predicate.forms, rng), std::string(kPredLabel), 0});
    int position = 1;
    for (const auto &label : grammar.label_order) {
      const auto it = predicate.lexicon.find(label);
      if (it == predicate.lexicon.end()) continue;
      if (rng.uniform() >= grammar.presence.at(label)) continue;
      frame.units.push_back({draw_word(grammar, it->second, rng), label, position++});
    }
    frame.units.push_back(eos_unit());
    frames.push_back(std::move(frame));
  }
  return frames;
}

std::string lexicon_text(const SyntheticGrammar &grammar) {
  std::ostringstream out;
  for (const auto &p : grammar.predicates) {
    out << p.nominal << '\t';
    for (std::size_t i = 0; i < p.forms.size(); ++i) {
      out << (i ? "," : "") << p.forms[i];
    }
    out << '\n';
  }
  return out.str();
}

std::vector<ProbePair> make_probes(const SyntheticGrammar &grammar,
                                   const Vocabulary &vocab, std::size_t count,
                                   Rng &rng) {
  std::vector<ProbePair> probes;
  std::size_t attempts = 0;
  while (probes.size() < count && attempts++ < 100 * count) {
    const auto &predicate = pick(grammar.predicates, rng);
    std::vector<std::string> labels;
    for (const auto &[label, words] : predicate.lexicon) labels.push_back(label);
    const std::string &label = pick(labels, rng);
    const std::string &word = pick(predicate.lexicon.at(label), rng);

    std::vector<std::string> foreign;
    for (const auto &other : grammar.predicates) {
      const auto it = other.lexicon.find(label);
      if (it == other.lexicon.end()) continue;
      for (const auto &w : it->second) {
        if (!grammar.consistent(predicate, w, label) &&
            vocab.find_joint(w, label) &&
            std::find(foreign.begin(), foreign.end(), w) == foreign.end()) {
          foreign.push_back(w);
        }
      }
    }
    if (foreign.empty() || !vocab.find_joint(word, label)) continue;
    probes.push_back({predicate.verb,
                      {word, label},
                      {pick(foreign, rng), label}});
  }
  return probes;
}

SyntheticDocuments generate_documents(const SyntheticGrammar &grammar,
                                      std::size_t count, Rng &rng) {
  SyntheticDocuments out;
  const std::vector<std::string> roles = {"A0", "A1"};
  const std::vector<std::string> fillers_verbs = {"met", "saw", "joined"};

  for (std::size_t n = 0; n < count; ++n) {
    const auto &predicate = pick(grammar.predicates, rng);
    const std::string &role = pick(roles, rng);

    // Distractors: nouns that fill this role for other predicates only.
    std::vector<std::string> distractors;
    for (const auto &other : grammar.predicates) {
      for (const auto &w : other.lexicon.at(role)) {
        if (!grammar.consistent(predicate, w, role) && w != predicate.nominal &&
            std::find(distractors.begin(), distractors.end(), w) ==
                distractors.end()) {
          distractors.push_back(w);
        }
      }
    }
    rng.shuffle(distractors);

    Document document;
    document.id = "doc" + std::to_string(n);
    ResolverQuery query;
    query.doc_id = document.id;
    query.sentence = 2;
    query.token = 1;
    query.nominal = predicate.nominal;
    query.label = role;

    GoldPosition gold;
    gold.key = query.key();

    const bool with_fallback = rng.uniform() < 1.0 / 3.0;
    if (with_fallback) {
      const std::string a0 = draw_word(grammar, predicate.lexicon.at("A0"), rng);
      const std::string a1 = draw_word(grammar, predicate.lexicon.at("A1"), rng);
      const std::string &form = pick(predicate.forms, rng);
      document.sentences.push_back(
          pair_sentence(distractors[0], pick(fillers_verbs, rng), distractors[1]));
      Sentence explicit_sentence = pair_sentence(a0, form, a1);
      explicit_sentence.tokens[2] = {form, predicate.verb, "VBD"};
      explicit_sentence.frames.push_back({2, {{"A0", 1}, {"A1", 4}}});
      document.sentences.push_back(std::move(explicit_sentence));
      Sentence last;
      last.tokens = {function_word("the", "DT"), noun(predicate.nominal),
                     function_word("was", "VBD"), function_word("announced", "VBN"),
                     function_word(".", ".")};
      document.sentences.push_back(std::move(last));
      gold.fillers.push_back({{1, role == "A0" ? 1 : 4}});
      ++out.fallback_queries;
    } else {
      const std::string filler = draw_word(grammar, predicate.lexicon.at(role), rng);
      const auto where = rng.below(3);  // sentence holding the filler
      const bool filler_left = rng.below(2) == 0;
      for (int s = 0; s < 2; ++s) {
        const std::string &d0 = distractors[2 * s];
        const std::string &d1 = distractors[2 * s + 1];
        if (static_cast<int>(where) == s) {
          document.sentences.push_back(
              filler_left ? pair_sentence(filler, pick(fillers_verbs, rng), d0)
                          : pair_sentence(d0, pick(fillers_verbs, rng), filler));
          gold.fillers.push_back({{s, filler_left ? 1 : 4}});
        } else {
          document.sentences.push_back(
              pair_sentence(d0, pick(fillers_verbs, rng), d1));
        }
      }
      Sentence last;
      last.tokens = {function_word("the", "DT"), noun(predicate.nominal),
                     function_word("near", "IN"), function_word("the", "DT"),
                     noun(where == 2 ? filler : distractors[4]),
                     function_word("was", "VBD"), function_word("announced", "VBN"),
                     function_word(".", ".")};
      if (where == 2) gold.fillers.push_back({{2, 4}});
      document.sentences.push_back(std::move(last));
    }

    out.documents.push_back(std::move(document));
    out.gold.emplace(gold.key, gold);
    out.queries.push_back(std::move(query));
  }
  return out;
}

Vocabulary toy_vocabulary(int output_size, int labels) {
  if (output_size < 4 || labels < 1) {
    throw Error(ErrorCode::kContract, "toy_vocabulary: output_size >= 4 required");
  }
  FrameSequence frame;
  frame.units.push_back({"p", std::string(kPredLabel)});
  for (int i = 0; i < output_size - 3; ++i) {
    frame.units.push_back(
        {"w" + std::to_string(i), "L" + std::to_string(i % labels)});
  }
  frame.units.push_back(eos_unit());
  return Vocabulary::build({frame}, 1);
}

PrnsfmModel random_model(EncodingMode mode, int output_size, int dim,
                         std::uint64_t seed, double init_range) {
  ModelConfig config;
  config.mode = mode;
  config.joint_dim = dim;
  config.word_dim = dim - dim / 2;
  config.label_dim = dim / 2;
  config.seed = seed;
  config.init_range = init_range;
  return new_model(config, toy_vocabulary(output_size, 3));
}

EncodedSequence random_sequence(const PrnsfmModel &model, int max_arguments,
                                Rng &rng) {
  const Vocabulary &vocab = model.vocab;
  FrameSequence frame;
  frame.units.push_back({"p", std::string(kPredLabel)});
  const int n = 1 + static_cast<int>(rng.below(max_arguments));
  for (int i = 0; i < n; ++i) {
    // Skip <unk>:<unk>, <eos>:EOS and the predicate unit.
    int joint = 0;
    do {
      joint = static_cast<int>(rng.below(vocab.output_size()));
    } while (joint == Vocabulary::kUnkJointId ||
             joint == Vocabulary::kEosJointId ||
             vocab.joint_unit(joint).is_predicate());
    frame.units.push_back(vocab.joint_unit(joint));
  }
  frame.units.push_back(eos_unit());
  return encode_frame(frame, vocab, model.config.mode);
}

}  // namespace prnsfm
