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


#ifndef PRNSFM_RESOLVER_HPP_
#define PRNSFM_RESOLVER_HPP_

// Implicit role filling for nominal predicate instances. An explicit
// argument of the same role on a nearby instance of the nominal (or one of
// its verbal forms) is taken as is; otherwise every candidate token in the
// context window is scored by selectional preference, discounted by sentence
// distance, and the best one is kept if it clears the threshold.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "prnsfm/common.hpp"
#include "prnsfm/frame_data.hpp"
#include "prnsfm/model.hpp"
#include "prnsfm/selpref.hpp"

namespace prnsfm {

struct Token {
  std::string word;
  std::string lemma;
  std::string pos;  // empty when the input carries no tag
};

struct ExplicitArgument {
  std::string label;
  int token = 0;
};

struct ExplicitFrame {
  int predicate = 0;
  std::vector<ExplicitArgument> arguments;
};

struct Sentence {
  std::vector<Token> tokens;
  std::vector<ExplicitFrame> frames;
};

struct Document {
  std::string id;
  std::vector<Sentence> sentences;

  // Token offset of the sentence in the linearized document.
  std::size_t offset(int sentence) const;
  std::size_t linear(TokenPosition position) const {
    return offset(position.sentence) + static_cast<std::size_t>(position.token);
  }
};

struct ResolverQuery {
  std::string doc_id;
  int sentence = 0;
  int token = 0;
  std::string nominal;
  std::string label;

  std::string key() const;
};

enum class CandidateFilter { kAllTokens, kNominalHeads };

std::string_view candidate_filter_name(CandidateFilter filter);
CandidateFilter parse_candidate_filter(std::string_view name);

struct ResolverConfig {
  double threshold = 0.0003;     // s
  double recency_z = 0.00005;    // z
  double recency_alpha = 0.5;    // alpha
  int window = 3;                // current sentence + 2 previous
  SelPrefConfig selpref;
  bool baseline_only = false;
  CandidateFilter candidates = CandidateFilter::kNominalHeads;
  // Apply the threshold to raw scores before the recency adjustment.
  bool threshold_raw_scores = false;
};

void validate(const ResolverConfig &config);

enum class Provenance { kFallback, kModel };

std::string_view provenance_name(Provenance provenance);

struct FillerPrediction {
  TokenPosition position;
  std::string word;
  double raw_score = 0;
  double adjusted_score = 0;
  int sentence_distance = 0;
  Provenance provenance = Provenance::kModel;
};

// Sentence indices of the window, oldest first.
std::vector<int> context_window(const Document &document,
                                const ResolverQuery &query, int window_size);

std::optional<FillerPrediction> explicit_fallback(
    const Document &document, const std::vector<int> &window,
    const ResolverQuery &query, const VerbMap &verb_map);

// x - z + z * alpha^d
double recency_adjust(double x, int distance, double z, double alpha);

// `cache` may be null only in baseline mode.
std::optional<FillerPrediction> resolve(const Document &document,
                                        const ResolverQuery &query,
                                        SelPrefTreeCache *cache,
                                        const VerbMap &verb_map,
                                        const ResolverConfig &config);

std::optional<FillerPrediction> resolve(const Document &document,
                                        const ResolverQuery &query,
                                        const PrnsfmModel *model,
                                        const VerbMap &verb_map,
                                        const ResolverConfig &config);

// Document lines: doc_id \t sentence_idx \t tokens \t frames, with tokens as
// space-separated word|lemma|POS and frames as pred:LABEL=tok,LABEL=tok;...
std::vector<Document> read_documents(std::istream &in);
void write_documents(std::ostream &out, const std::vector<Document> &documents);

// Query lines: doc_id \t sentence_idx \t token_idx \t np_lemma \t label
std::vector<ResolverQuery> read_queries(std::istream &in);
void write_queries(std::ostream &out, const std::vector<ResolverQuery> &queries);

void write_prediction_header(std::ostream &out);
void write_prediction(std::ostream &out, const ResolverQuery &query,
                      const std::optional<FillerPrediction> &prediction);

}  // namespace prnsfm

#endif  // PRNSFM_RESOLVER_HPP_
