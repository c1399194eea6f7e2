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


#ifndef PRNSFM_SYNTHETIC_HPP_
#define PRNSFM_SYNTHETIC_HPP_

// A small generative frame grammar used as a learnable fixture: every
// predicate emits its arguments in a fixed label order, each drawn from a
// per-predicate lexicon. Also plants implicit arguments in short documents
// for end-to-end resolution runs.

#include <map>
#include <string>
#include <vector>

#include "prnsfm/evaluator.hpp"
#include "prnsfm/frame_data.hpp"
#include "prnsfm/model.hpp"
#include "prnsfm/resolver.hpp"

namespace prnsfm {

struct SyntheticPredicate {
  std::string verb;                // base form
  std::vector<std::string> forms;  // surface forms used as PRED words
  std::string nominal;
  std::map<std::string, std::vector<std::string>> lexicon;  // label -> words
};

struct SyntheticGrammar {
  std::vector<SyntheticPredicate> predicates;
  std::vector<std::string> label_order;
  std::map<std::string, double> presence;  // label -> P(argument present)
  // Share of frames that draw the first lexicon word; the rest is uniform.
  double head_share = 0.95;

  const SyntheticPredicate &find(const std::string &verb) const;
  bool consistent(const SyntheticPredicate &predicate, const std::string &word,
                  const std::string &label) const;
};

// Five predicates (sell, buy, eat, lose, build) over A0, A1, A2, AM-LOC.
SyntheticGrammar default_grammar();

std::vector<FrameSequence> generate_frames(const SyntheticGrammar &grammar,
                                           std::size_t count, Rng &rng);

// nominal \t form,form,... for every predicate.
std::string lexicon_text(const SyntheticGrammar &grammar);

struct ProbePair {
  std::string predicate;
  ArgumentUnit consistent;
  ArgumentUnit inconsistent;
};

// Pairs (w:l, w':l) where w fills l for the predicate and w' does not,
// restricted to units present in `vocab`.
std::vector<ProbePair> make_probes(const SyntheticGrammar &grammar,
                                   const Vocabulary &vocab, std::size_t count,
                                   Rng &rng);

struct SyntheticDocuments {
  std::vector<Document> documents;
  std::vector<ResolverQuery> queries;
  GoldSet gold;
  std::size_t fallback_queries = 0;
};

// Three-sentence documents ending in a nominal predicate whose A0 or A1 is
// missing; the filler occurs earlier in the window among distractor nouns.
// About a third of the documents also contain an explicit verbal instance
// that carries the role.
SyntheticDocuments generate_documents(const SyntheticGrammar &grammar,
                                      std::size_t count, Rng &rng);

// Vocabulary with |V_out| == output_size: the predicate unit "p:PRED" plus
// units w<i>:L<i % labels>. output_size must be at least 4.
Vocabulary toy_vocabulary(int output_size, int labels);

// Random model over toy_vocabulary. The hidden width is `dim`; in separate
// mode it is split into word and label halves.
PrnsfmModel random_model(EncodingMode mode, int output_size, int dim,
                         std::uint64_t seed, double init_range = 0.08);

// A random frame over toy_vocabulary with 1..max_arguments arguments.
EncodedSequence random_sequence(const PrnsfmModel &model, int max_arguments,
                                Rng &rng);

}  // namespace prnsfm

#endif  // PRNSFM_SYNTHETIC_HPP_
