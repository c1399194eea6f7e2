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


#include "prnsfm/evaluator.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>

namespace prnsfm {

namespace {

TokenPosition parse_position(std::string_view text, std::size_t line) {
  const auto colon = text.find(':');
  TokenPosition position;
  const auto parse = [&](std::string_view part, int &out) {
    const auto *end = part.data() + part.size();
    const auto result = std::from_chars(part.data(), end, out);
    return result.ec == std::errc() && result.ptr == end && out >= 0;
  };
  if (colon == std::string_view::npos ||
      !parse(text.substr(0, colon), position.sentence) ||
      !parse(text.substr(colon + 1), position.token)) {
    throw ParseError(line, "bad position '" + std::string(text) + "'");
  }
  return position;
}

TokenSet parse_token_set(std::string_view text, std::size_t line) {
  TokenSet set;
  for (const auto &part : split(text, ',')) {
    const auto trimmed = trim(part);
    if (!trimmed.empty()) set.insert(parse_position(trimmed, line));
  }
  if (set.empty()) throw ParseError(line, "empty filler");
  return set;
}

void finish(Metrics &m) {
  m.no_predictions = m.n_predicted == 0;
  m.precision = m.n_predicted == 0 ? 0.0 : m.summed_scores / m.n_predicted;
  m.recall = m.n_gold_filled == 0 ? 0.0 : m.summed_scores / m.n_gold_filled;
  m.f1 = m.precision + m.recall > 0
             ? 2 * m.precision * m.recall / (m.precision + m.recall)
             : 0.0;
}

std::string fixed4(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.4f", value);
  return buffer;
}

}  // namespace

double dice(const TokenSet &predicted, const TokenSet &truth) {
  if (predicted.empty() || truth.empty()) {
    throw Error(ErrorCode::kContract, "dice: token sets must be non-empty");
  }
  std::size_t overlap = 0;
  for (const auto &position : predicted) overlap += truth.count(position);
  return 2.0 * static_cast<double>(overlap) /
         static_cast<double>(predicted.size() + truth.size());
}

double score_prediction(const TokenSet &predicted, const GoldPosition &gold) {
  double best = 0.0;
  for (const auto &filler : gold.fillers) {
    best = std::max(best, dice(predicted, filler));
  }
  return best;
}

Evaluation evaluate(const std::vector<PredictionRecord> &predictions,
                    const GoldSet &gold) {
  Evaluation evaluation;
  std::map<std::string, std::string> predicate_of;
  for (const auto &record : predictions) {
    if (!gold.count(record.key)) {
      throw Error(ErrorCode::kContract,
                  "prediction key '" + record.key + "' missing from gold");
    }
    predicate_of[record.key] = record.predicate;
  }

  // Fixed reduction order: gold keys, then prediction order.
  for (const auto &[key, position] : gold) {
    if (!position.filled()) continue;
    const auto it = predicate_of.find(key);
    const std::string predicate = it == predicate_of.end() ? "?" : it->second;
    ++evaluation.overall.n_gold_filled;
    ++evaluation.per_predicate[predicate].n_gold_filled;
  }
  for (const auto &record : predictions) {
    if (!record.filler) continue;
    const double score = score_prediction(*record.filler, gold.at(record.key));
    Metrics &group = evaluation.per_predicate[record.predicate];
    ++evaluation.overall.n_predicted;
    ++group.n_predicted;
    evaluation.overall.summed_scores += score;
    group.summed_scores += score;
  }

  if (evaluation.overall.n_gold_filled == 0) {
    throw Error(ErrorCode::kContract, "gold set has no filled positions");
  }
  finish(evaluation.overall);
  for (auto &[predicate, metrics] : evaluation.per_predicate) finish(metrics);
  return evaluation;
}

GoldSet read_gold(std::istream &in) {
  GoldSet gold;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || line.front() == '#') continue;
    const auto fields = split(line, '\t');
    if (fields.size() > 2 || fields[0].empty()) {
      throw ParseError(line_number, "expected query_key<TAB>fillers");
    }
    GoldPosition position;
    position.key = fields[0];
    if (fields.size() == 2) {
      for (const auto &filler : split(fields[1], ';')) {
        if (trim(filler).empty()) continue;
        position.fillers.push_back(parse_token_set(filler, line_number));
      }
    }
    if (!gold.emplace(position.key, position).second) {
      throw ParseError(line_number, "duplicate gold key '" + position.key + "'");
    }
  }
  return gold;
}

void write_gold(std::ostream &out, const GoldSet &gold) {
  for (const auto &[key, position] : gold) {
    out << key << '\t';
    for (std::size_t f = 0; f < position.fillers.size(); ++f) {
      if (f) out << ';';
      bool first = true;
      for (const auto &p : position.fillers[f]) {
        out << (first ? "" : ",") << p.sentence << ':' << p.token;
        first = false;
      }
    }
    out << '\n';
  }
}

std::vector<PredictionRecord> read_predictions(std::istream &in) {
  std::vector<PredictionRecord> records;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || line.front() == '#') continue;
    const auto fields = split(line, '\t');
    if (fields.size() < 5) {
      throw ParseError(line_number,
                       "expected key, doc_id, nominal, label, filler, ...");
    }
    PredictionRecord record;
    record.key = fields[0];
    record.predicate = fields[2];
    if (fields[4] != "UNFILLED") {
      record.filler = parse_token_set(fields[4], line_number);
    }
    records.push_back(std::move(record));
  }
  return records;
}

void write_metrics_table(std::ostream &out, const Evaluation &evaluation) {
  char row[160];
  std::snprintf(row, sizeof(row), "%-16s %9s %9s %9s %9s %9s\n", "predicate",
                "P", "R", "F1", "#pred", "#gold");
  out << row;
  const auto print = [&](const std::string &name, const Metrics &m) {
    std::snprintf(row, sizeof(row), "%-16s %9.4f %9.4f %9.4f %9zu %9zu\n",
                  name.c_str(), m.precision, m.recall, m.f1, m.n_predicted,
                  m.n_gold_filled);
    out << row;
  };
  for (const auto &[predicate, metrics] : evaluation.per_predicate) {
    print(predicate, metrics);
  }
  print("overall", evaluation.overall);
  if (evaluation.overall.no_predictions) {
    out << "note: no positions were filled; precision reported as 0\n";
  }
}

void write_metrics_kv(std::ostream &out, const Evaluation &evaluation) {
  const auto print = [&](const std::string &prefix, const Metrics &m) {
    out << prefix << ".precision=" << fixed4(m.precision) << '\n'
        << prefix << ".recall=" << fixed4(m.recall) << '\n'
        << prefix << ".f1=" << fixed4(m.f1) << '\n'
        << prefix << ".predicted=" << m.n_predicted << '\n'
        << prefix << ".gold_filled=" << m.n_gold_filled << '\n'
        << prefix << ".no_predictions=" << (m.no_predictions ? 1 : 0) << '\n';
  };
  print("overall", evaluation.overall);
  for (const auto &[predicate, metrics] : evaluation.per_predicate) {
    print("predicate." + predicate, metrics);
  }
}

}  // namespace prnsfm
