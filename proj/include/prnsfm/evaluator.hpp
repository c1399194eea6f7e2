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


#ifndef PRNSFM_EVALUATOR_HPP_
#define PRNSFM_EVALUATOR_HPP_

// Dice-based scoring of implicit argument predictions. A prediction earns
// its best Dice overlap with any annotated filler of the position; precision
// divides the summed credit by the positions the system filled, recall by
// the positions filled in the gold data.

#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "prnsfm/common.hpp"

namespace prnsfm {

using TokenSet = std::set<TokenPosition>;

struct GoldPosition {
  std::string key;
  std::vector<TokenSet> fillers;  // AF; empty when the position is unfilled

  bool filled() const { return !fillers.empty(); }
};

double dice(const TokenSet &predicted, const TokenSet &truth);

double score_prediction(const TokenSet &predicted, const GoldPosition &gold);

struct PredictionRecord {
  std::string key;
  std::string predicate;
  std::optional<TokenSet> filler;  // nullopt when left unfilled
};

struct Metrics {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  double summed_scores = 0;
  std::size_t n_predicted = 0;
  std::size_t n_gold_filled = 0;
  // Set when nothing was predicted and precision defaulted to 0.
  bool no_predictions = false;
};

struct Evaluation {
  Metrics overall;
  std::map<std::string, Metrics> per_predicate;
};

using GoldSet = std::map<std::string, GoldPosition>;

Evaluation evaluate(const std::vector<PredictionRecord> &predictions,
                    const GoldSet &gold);

// Gold lines: query_key \t s:t,s:t;s:t   (one ';'-group per filler)
GoldSet read_gold(std::istream &in);
void write_gold(std::ostream &out, const GoldSet &gold);
// Reads files written by write_prediction.
std::vector<PredictionRecord> read_predictions(std::istream &in);

void write_metrics_table(std::ostream &out, const Evaluation &evaluation);
void write_metrics_kv(std::ostream &out, const Evaluation &evaluation);

}  // namespace prnsfm

#endif  // PRNSFM_EVALUATOR_HPP_
