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


#include "prnsfm/resolver.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace prnsfm {

namespace {

int parse_index(std::string_view text, std::size_t line, std::string_view what) {
  int value = -1;
  const auto *end = text.data() + text.size();
  const auto result = std::from_chars(text.data(), end, value);
  if (result.ec != std::errc() || result.ptr != end || value < 0) {
    throw ParseError(line, "bad " + std::string(what) + " '" +
                               std::string(text) + "'");
  }
  return value;
}

std::string field_or_empty(const std::string &field) {
  return field == "_" ? std::string() : field;
}

bool nominal_tag(std::string_view pos) {
  return pos.rfind("NN", 0) == 0 || pos.rfind("PRP", 0) == 0;
}

// Word form matching the vocabulary convention.
std::string candidate_form(const Token &token, WordConvention convention) {
  if (convention == WordConvention::kLemma && !token.lemma.empty()) {
    return token.lemma;
  }
  return to_lower(token.word);
}

std::string predicate_form(const Token &token) {
  return token.lemma.empty() ? to_lower(token.word) : to_lower(token.lemma);
}

std::string format_score(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.10f", value);
  return buffer;
}

}  // namespace

std::size_t Document::offset(int sentence) const {
  std::size_t total = 0;
  for (int s = 0; s < sentence; ++s) total += sentences.at(s).tokens.size();
  return total;
}

std::string ResolverQuery::key() const {
  return doc_id + ":" + std::to_string(sentence) + ":" + std::to_string(token) +
         ":" + label;
}

std::string_view candidate_filter_name(CandidateFilter filter) {
  return filter == CandidateFilter::kAllTokens ? "all_tokens" : "nominal_heads";
}

CandidateFilter parse_candidate_filter(std::string_view name) {
  if (name == "all_tokens") return CandidateFilter::kAllTokens;
  if (name == "nominal_heads") return CandidateFilter::kNominalHeads;
  throw Error(ErrorCode::kContract,
              "unknown candidate filter '" + std::string(name) + "'");
}

std::string_view provenance_name(Provenance provenance) {
  return provenance == Provenance::kFallback ? "fallback" : "model";
}

void validate(const ResolverConfig &config) {
  if (!(config.threshold >= 0)) {
    throw Error(ErrorCode::kContract, "threshold s must be >= 0");
  }
  if (!(config.recency_alpha > 0 && config.recency_alpha < 1)) {
    throw Error(ErrorCode::kContract, "alpha must lie in (0, 1)");
  }
  if (config.window < 1) {
    throw Error(ErrorCode::kContract, "window must be >= 1");
  }
  validate(config.selpref);
}

std::vector<int> context_window(const Document &document,
                                const ResolverQuery &query, int window_size) {
  if (query.sentence < 0 ||
      query.sentence >= static_cast<int>(document.sentences.size())) {
    throw Error(ErrorCode::kContract,
                "query " + query.key() + " addresses a missing sentence");
  }
  if (query.token < 0 ||
      query.token >= static_cast<int>(
                         document.sentences[query.sentence].tokens.size())) {
    throw Error(ErrorCode::kContract,
                "query " + query.key() + " addresses a missing token");
  }
  std::vector<int> window;
  for (int s = std::max(0, query.sentence - window_size + 1);
       s <= query.sentence; ++s) {
    window.push_back(s);
  }
  return window;
}

std::optional<FillerPrediction> explicit_fallback(
    const Document &document, const std::vector<int> &window,
    const ResolverQuery &query, const VerbMap &verb_map) {
  std::set<std::string, std::less<>> forms{to_lower(query.nominal)};
  for (const auto &form : verb_map.forms(to_lower(query.nominal))) {
    forms.insert(form.form);
  }

  const auto query_linear =
      static_cast<long long>(document.linear({query.sentence, query.token}));
  std::optional<FillerPrediction> best;
  long long best_distance = 0;
  long long best_linear = 0;

  for (int s : window) {
    const Sentence &sentence = document.sentences[s];
    for (const auto &frame : sentence.frames) {
      if (s == query.sentence && frame.predicate == query.token) continue;
      if (!forms.count(predicate_form(sentence.tokens.at(frame.predicate)))) {
        continue;
      }
      const auto argument = std::find_if(
          frame.arguments.begin(), frame.arguments.end(),
          [&](const ExplicitArgument &a) { return a.label == query.label; });
      if (argument == frame.arguments.end()) continue;

      const auto linear =
          static_cast<long long>(document.linear({s, frame.predicate}));
      const long long distance = std::llabs(linear - query_linear);
      if (best && (distance > best_distance ||
                   (distance == best_distance && linear >= best_linear))) {
        continue;
      }
      FillerPrediction prediction;
      prediction.position = {s, argument->token};
      prediction.word = sentence.tokens.at(argument->token).word;
      prediction.raw_score = 1.0;
      prediction.adjusted_score = 1.0;
      prediction.sentence_distance = query.sentence - s;
      prediction.provenance = Provenance::kFallback;
      best = prediction;
      best_distance = distance;
      best_linear = linear;
    }
  }
  return best;
}

double recency_adjust(double x, int distance, double z, double alpha) {
  return x - z + z * std::pow(alpha, distance);
}

std::optional<FillerPrediction> resolve(const Document &document,
                                        const ResolverQuery &query,
                                        SelPrefTreeCache *cache,
                                        const VerbMap &verb_map,
                                        const ResolverConfig &config) {
  validate(config);
  const auto window = context_window(document, query, config.window);
  if (auto fallback = explicit_fallback(document, window, query, verb_map)) {
    return fallback;
  }
  if (config.baseline_only) return std::nullopt;
  if (cache == nullptr) {
    throw Error(ErrorCode::kContract, "resolve: model required outside baseline mode");
  }

  const WordConvention convention = cache->model().vocab.convention();
  const std::string nominal = to_lower(query.nominal);

  struct Candidate {
    FillerPrediction prediction;
    std::size_t linear;
  };
  std::optional<Candidate> best;

  for (int s : window) {
    const Sentence &sentence = document.sentences[s];
    const bool tagged = std::any_of(sentence.tokens.begin(), sentence.tokens.end(),
                                    [](const Token &t) { return !t.pos.empty(); });
    std::set<std::string, std::less<>> seen;
    for (int i = 0; i < static_cast<int>(sentence.tokens.size()); ++i) {
      if (s == query.sentence && i == query.token) continue;
      const Token &token = sentence.tokens[i];
      if (config.candidates == CandidateFilter::kNominalHeads && tagged &&
          !nominal_tag(token.pos)) {
        continue;
      }
      std::string word = candidate_form(token, convention);
      if (!seen.insert(word).second) continue;

      const int distance = query.sentence - s;
      const double raw = nominal_selectional_preference(
          *cache, nominal, ArgumentUnit{word, query.label}, verb_map);
      const double adjusted = recency_adjust(raw, distance, config.recency_z,
                                             config.recency_alpha);
      if (config.threshold_raw_scores && raw < config.threshold) continue;

      const std::size_t linear = document.linear({s, i});
      const bool better =
          !best || adjusted > best->prediction.adjusted_score ||
          (adjusted == best->prediction.adjusted_score &&
           (distance < best->prediction.sentence_distance ||
            (distance == best->prediction.sentence_distance &&
             linear < best->linear)));
      if (!better) continue;
      FillerPrediction prediction;
      prediction.position = {s, i};
      prediction.word = token.word;
      prediction.raw_score = raw;
      prediction.adjusted_score = adjusted;
      prediction.sentence_distance = distance;
      prediction.provenance = Provenance::kModel;
      best = Candidate{prediction, linear};
    }
  }

  if (!best) return std::nullopt;
  // s = 0 disables the threshold; adjusted scores can dip below zero.
  if (!config.threshold_raw_scores && config.threshold > 0 &&
      !(best->prediction.adjusted_score >= config.threshold)) {
    return std::nullopt;
  }
  return best->prediction;
}

std::optional<FillerPrediction> resolve(const Document &document,
                                        const ResolverQuery &query,
                                        const PrnsfmModel *model,
                                        const VerbMap &verb_map,
                                        const ResolverConfig &config) {
  if (model == nullptr) {
    return resolve(document, query, static_cast<SelPrefTreeCache *>(nullptr),
                   verb_map, config);
  }
  SelPrefTreeCache cache(*model, config.selpref);
  return resolve(document, query, &cache, verb_map, config);
}

std::vector<Document> read_documents(std::istream &in) {
  std::vector<Document> documents;
  std::map<std::string, std::size_t> index;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || line.front() == '#') continue;
    const auto fields = split(line, '\t');
    if (fields.size() < 3 || fields.size() > 4) {
      throw ParseError(line_number,
                       "expected doc_id, sentence_idx, tokens[, frames]");
    }
    auto [it, inserted] = index.emplace(fields[0], documents.size());
    if (inserted) documents.push_back({fields[0], {}});
    Document &document = documents[it->second];
    const int sentence_index = parse_index(fields[1], line_number, "sentence index");
    if (sentence_index != static_cast<int>(document.sentences.size())) {
      throw ParseError(line_number, "sentences of " + document.id +
                                        " must be numbered 0, 1, 2, ...");
    }

    Sentence sentence;
    std::istringstream tokens(fields[2]);
    std::string raw;
    while (tokens >> raw) {
      const auto parts = split(raw, '|');
      if (parts.size() > 3 || parts[0].empty()) {
        throw ParseError(line_number, "bad token '" + raw + "'");
      }
      Token token;
      token.word = parts[0];
      if (parts.size() > 1) token.lemma = field_or_empty(parts[1]);
      if (parts.size() > 2) token.pos = field_or_empty(parts[2]);
      sentence.tokens.push_back(std::move(token));
    }
    if (sentence.tokens.empty()) throw ParseError(line_number, "empty sentence");

    const int n = static_cast<int>(sentence.tokens.size());
    if (fields.size() == 4 && !trim(fields[3]).empty() && fields[3] != "_") {
      for (const auto &spec : split(fields[3], ';')) {
        if (trim(spec).empty()) continue;
        const auto colon = spec.find(':');
        ExplicitFrame frame;
        frame.predicate = parse_index(
            std::string_view(spec).substr(0, colon), line_number, "predicate index");
        if (frame.predicate >= n) {
          throw ParseError(line_number, "predicate index out of range");
        }
        if (colon != std::string::npos && colon + 1 < spec.size()) {
          for (const auto &arg : split(spec.substr(colon + 1), ',')) {
            const auto eq = arg.rfind('=');
            if (eq == std::string::npos || eq == 0) {
              throw ParseError(line_number, "bad argument '" + arg + "'");
            }
            ExplicitArgument argument;
            argument.label = arg.substr(0, eq);
            argument.token = parse_index(std::string_view(arg).substr(eq + 1),
                                         line_number, "argument index");
            if (argument.token >= n) {
              throw ParseError(line_number, "argument index out of range");
            }
            frame.arguments.push_back(std::move(argument));
          }
        }
        sentence.frames.push_back(std::move(frame));
      }
    }
    document.sentences.push_back(std::move(sentence));
  }
  return documents;
}

void write_documents(std::ostream &out, const std::vector<Document> &documents) {
  for (const auto &document : documents) {
    for (std::size_t s = 0; s < document.sentences.size(); ++s) {
      const Sentence &sentence = document.sentences[s];
      out << document.id << '\t' << s << '\t';
      for (std::size_t i = 0; i < sentence.tokens.size(); ++i) {
        const Token &t = sentence.tokens[i];
        if (i > 0) out << ' ';
        out << t.word << '|' << (t.lemma.empty() ? "_" : t.lemma) << '|'
            << (t.pos.empty() ? "_" : t.pos);
      }
      out << '\t';
      if (sentence.frames.empty()) out << '_';
      for (std::size_t f = 0; f < sentence.frames.size(); ++f) {
        const auto &frame = sentence.frames[f];
        if (f > 0) out << ';';
        out << frame.predicate << ':';
        for (std::size_t a = 0; a < frame.arguments.size(); ++a) {
          if (a > 0) out << ',';
          out << frame.arguments[a].label << '=' << frame.arguments[a].token;
        }
      }
      out << '\n';
    }
  }
}

std::vector<ResolverQuery> read_queries(std::istream &in) {
  std::vector<ResolverQuery> queries;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || line.front() == '#') continue;
    const auto fields = split(line, '\t');
    if (fields.size() != 5 || fields[0].empty() || fields[3].empty() ||
        fields[4].empty()) {
      throw ParseError(line_number,
                       "expected doc_id, sentence_idx, token_idx, np, label");
    }
    ResolverQuery query;
    query.doc_id = fields[0];
    query.sentence = parse_index(fields[1], line_number, "sentence index");
    query.token = parse_index(fields[2], line_number, "token index");
    query.nominal = fields[3];
    query.label = fields[4];
    queries.push_back(std::move(query));
  }
  return queries;
}

void write_queries(std::ostream &out, const std::vector<ResolverQuery> &queries) {
  for (const auto &q : queries) {
    out << q.doc_id << '\t' << q.sentence << '\t' << q.token << '\t'
        << q.nominal << '\t' << q.label << '\n';
  }
}

void write_prediction_header(std::ostream &out) {
  out << "#key\tdoc_id\tnominal\tlabel\tfiller\traw_score\tadjusted_score\t"
         "provenance\tword\n";
}

void write_prediction(std::ostream &out, const ResolverQuery &query,
                      const std::optional<FillerPrediction> &prediction) {
  out << query.key() << '\t' << query.doc_id << '\t' << query.nominal << '\t'
      << query.label << '\t';
  if (!prediction) {
    out << "UNFILLED\t-\t-\t-\t-\n";
    return;
  }
  out << prediction->position.sentence << ':' << prediction->position.token
      << '\t' << format_score(prediction->raw_score) << '\t'
      << format_score(prediction->adjusted_score) << '\t'
      << provenance_name(prediction->provenance) << '\t' << prediction->word
      << '\n';
}

}  // namespace prnsfm
