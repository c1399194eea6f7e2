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


#include "prnsfm/frame_data.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace prnsfm {

namespace {

std::optional<long long> parse_integer(std::string_view text) {
  long long value = 0;
  const auto *end = text.data() + text.size();
  const auto result = std::from_chars(text.data(), end, value);
  if (result.ec != std::errc() || result.ptr != end) return std::nullopt;
  return value;
}

std::vector<std::string> split_whitespace(std::string_view line) {
  std::vector<std::string> tokens;
  std::istringstream stream{std::string(line)};
  std::string token;
  while (stream >> token) tokens.push_back(std::move(token));
  return tokens;
}

bool reserved_label(std::string_view label) {
  return label == kPredLabel || label == kEosLabel || label == kUnkLabel;
}

void truncate_arguments(FrameSequence &frame, std::size_t max_arguments,
                        IngestResult &result) {
  // units = predicate + arguments (EOS not yet appended).
  if (frame.units.size() - 1 > max_arguments) {
    spdlog::warn("frame {}: {} arguments truncated to {}", frame.source_id,
                 frame.units.size() - 1, max_arguments);
    frame.units.resize(max_arguments + 1);
    ++result.frames_truncated;
  }
  frame.units.push_back(eos_unit());
}

std::string normalize_word(std::string_view word, WordConvention convention) {
  return convention == WordConvention::kLemma ? std::string(word)
                                              : to_lower(word);
}

IngestResult parse_frame_records(std::istream &in,
                                 const IngestOptions &options) {
  IngestResult result;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    if (line.front() == '#') {
      constexpr std::string_view kConventionTag = "#convention=";
      if (line.rfind(kConventionTag, 0) == 0) {
        try {
          result.convention =
              parse_convention(trim(line.substr(kConventionTag.size())));
        } catch (const Error &e) {
          throw ParseError(line_number, e.what());
        }
      }
      continue;
    }

    const auto fields = split(line, '\t');
    if (fields.size() < 2 || fields[0].empty() || fields[1].empty()) {
      throw ParseError(line_number,
                       "expected source_id and predicate word fields");
    }
    FrameSequence frame;
    frame.source_id = fields[0];
    frame.units.push_back(
        {normalize_word(fields[1], result.convention), std::string(kPredLabel)});

    std::vector<ArgumentUnit> arguments;
    for (std::size_t i = 2; i < fields.size(); ++i) {
      const std::string &triple = fields[i];
      if (triple.empty()) continue;
      const auto index_sep = triple.rfind(':');
      if (index_sep == std::string::npos || index_sep == 0) {
        throw ParseError(line_number, "malformed argument '" + triple + "'");
      }
      const auto label_sep = triple.rfind(':', index_sep - 1);
      if (label_sep == std::string::npos || label_sep == 0 ||
          label_sep + 1 == index_sep) {
        throw ParseError(line_number, "malformed argument '" + triple + "'");
      }
      const auto index =
          parse_integer(std::string_view(triple).substr(index_sep + 1));
      if (!index || *index < 0) {
        throw ParseError(line_number, "bad token index in '" + triple + "'");
      }
      std::string label = triple.substr(label_sep + 1, index_sep - label_sep - 1);
      if (reserved_label(label)) {
        throw ParseError(line_number, "reserved label '" + label + "'");
      }
      arguments.push_back(
          {normalize_word(std::string_view(triple).substr(0, label_sep),
                          result.convention),
           std::move(label), static_cast<int>(*index)});
    }
    std::stable_sort(arguments.begin(), arguments.end(),
                     [](const ArgumentUnit &a, const ArgumentUnit &b) {
                       return a.token_index < b.token_index;
                     });
    frame.units.insert(frame.units.end(), arguments.begin(), arguments.end());
    truncate_arguments(frame, options.max_arguments, result);
    ++result.sentences;
    result.frames.push_back(std::move(frame));
  }
  return result;
}

struct ColumnRow {
  std::size_t line;
  std::vector<std::string> fields;
};

constexpr std::size_t kColumnForm = 1;
constexpr std::size_t kColumnLemma = 2;
constexpr std::size_t kColumnPlemma = 3;
constexpr std::size_t kColumnFillPred = 12;
constexpr std::size_t kColumnPred = 13;
constexpr std::size_t kColumnFirstArg = 14;

void convert_sentence(const std::vector<ColumnRow> &rows,
                      std::size_t sentence_index, const IngestOptions &options,
                      IngestResult &result) {
  ++result.sentences;
  if (options.length_filter && rows.size() >= options.max_sentence_tokens) {
    ++result.sentences_skipped;
    return;
  }

  std::vector<std::size_t> predicates;
  bool has_fillpred = false;
  for (const auto &row : rows) {
    if (row.fields[kColumnFillPred] == "Y") has_fillpred = true;
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto &f = rows[i].fields;
    if (has_fillpred ? f[kColumnFillPred] == "Y" : f[kColumnPred] != "_") {
      predicates.push_back(i);
    }
  }

  std::vector<std::string> words;
  for (const auto &row : rows) {
    const auto &f = row.fields;
    if (f.size() != kColumnFirstArg + predicates.size()) {
      throw ParseError(row.line,
                       "expected " +
                           std::to_string(kColumnFirstArg + predicates.size()) +
                           " columns, found " + std::to_string(f.size()));
    }
    if (f[kColumnLemma] != "_") {
      words.push_back(f[kColumnLemma]);
    } else if (f[kColumnPlemma] != "_") {
      words.push_back(f[kColumnPlemma]);
    } else {
      words.push_back(to_lower(f[kColumnForm]));
    }
  }

  for (std::size_t p = 0; p < predicates.size(); ++p) {
    const std::size_t pred_row = predicates[p];
    FrameSequence frame;
    frame.source_id = "s" + std::to_string(sentence_index) + ":" +
                      rows[pred_row].fields[0];
    frame.units.push_back({words[pred_row], std::string(kPredLabel),
                           static_cast<int>(pred_row)});
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const std::string &label = rows[i].fields[kColumnFirstArg + p];
      if (label == "_") continue;
      if (reserved_label(label) || label.find(':') != std::string::npos) {
        throw ParseError(rows[i].line, "unusable label '" + label + "'");
      }
      frame.units.push_back({words[i], label, static_cast<int>(i)});
    }
    truncate_arguments(frame, options.max_arguments, result);
    result.frames.push_back(std::move(frame));
  }
}

IngestResult parse_columns(std::istream &in, const IngestOptions &options) {
  IngestResult result;
  result.convention = WordConvention::kLemma;
  bool any_lemma = false;
  std::vector<ColumnRow> rows;
  std::size_t sentence_index = 0;
  std::string line;
  std::size_t line_number = 0;

  auto flush = [&] {
    if (rows.empty()) return;
    convert_sentence(rows, sentence_index++, options, result);
    rows.clear();
  };

  while (std::getline(in, line)) {
    ++line_number;
    if (trim(line).empty()) {
      flush();
      continue;
    }
    if (line.front() == '#') continue;
    auto fields = split_whitespace(line);
    if (fields.size() < kColumnFirstArg) {
      throw ParseError(line_number, "expected at least 14 columns, found " +
                                        std::to_string(fields.size()));
    }
    const auto id = parse_integer(fields[0]);
    if (!id || *id != static_cast<long long>(rows.size()) + 1) {
      throw ParseError(line_number, "token ids must count up from 1");
    }
    if (fields[kColumnLemma] != "_" || fields[kColumnPlemma] != "_") {
      any_lemma = true;
    }
    rows.push_back({line_number, std::move(fields)});
  }
  flush();
  if (!any_lemma) result.convention = WordConvention::kLowercaseSurface;
  return result;
}

}  // namespace

std::string joint_key(std::string_view word, std::string_view label) {
  std::string key;
  key.reserve(word.size() + label.size() + 1);
  key.append(word).append(":").append(label);
  return key;
}

ArgumentUnit eos_unit() {
  return {std::string(kEosWord), std::string(kEosLabel)};
}

void validate_frame(const FrameSequence &frame) {
  const auto &units = frame.units;
  if (units.size() < 2) {
    throw Error(ErrorCode::kContract,
                "frame " + frame.source_id + ": needs predicate and EOS");
  }
  if (!units.front().is_predicate()) {
    throw Error(ErrorCode::kContract,
                "frame " + frame.source_id + ": first unit must be PRED");
  }
  if (!units.back().is_eos()) {
    throw Error(ErrorCode::kContract,
                "frame " + frame.source_id + ": last unit must be EOS");
  }
  for (std::size_t i = 1; i + 1 < units.size(); ++i) {
    if (units[i].is_eos() || units[i].is_predicate()) {
      throw Error(ErrorCode::kContract,
                  "frame " + frame.source_id +
                      ": PRED/EOS inside the argument list");
    }
  }
}

std::string_view convention_name(WordConvention convention) {
  return convention == WordConvention::kLemma ? "lemma" : "lowercase_surface";
}

WordConvention parse_convention(std::string_view name) {
  if (name == "lemma") return WordConvention::kLemma;
  if (name == "lowercase_surface") return WordConvention::kLowercaseSurface;
  throw Error(ErrorCode::kContract,
              "unknown word convention '" + std::string(name) + "'");
}

IngestResult parse_frames(std::istream &in, CorpusFormat format,
                          const IngestOptions &options) {
  return format == CorpusFormat::kFrameRecords
             ? parse_frame_records(in, options)
             : parse_columns(in, options);
}

void write_frame_records(std::ostream &out,
                         const std::vector<FrameSequence> &frames,
                         WordConvention convention) {
  out << "#convention=" << convention_name(convention) << '\n';
  for (const auto &frame : frames) {
    out << frame.source_id << '\t' << frame.predicate().word;
    for (std::size_t i = 1; i + 1 < frame.units.size(); ++i) {
      const auto &unit = frame.units[i];
      out << '\t' << unit.word << ':' << unit.label << ':'
          << (unit.token_index >= 0 ? unit.token_index : static_cast<int>(i));
    }
    out << '\n';
  }
}

int SymbolTable::add(std::string symbol, std::int64_t count) {
  if (auto existing = find(symbol)) {
    counts_[*existing] += count;
    return *existing;
  }
  const int id = size();
  index_.emplace(symbol, id);
  symbols_.push_back(std::move(symbol));
  counts_.push_back(count);
  return id;
}

std::optional<int> SymbolTable::find(std::string_view symbol) const {
  const auto it = index_.find(std::string(symbol));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Vocabulary Vocabulary::build(const std::vector<FrameSequence> &frames,
                             int min_count, WordConvention convention) {
  std::map<std::string, std::int64_t> word_counts;
  std::map<std::string, std::int64_t> label_counts;
  std::map<std::pair<std::string, std::string>, std::int64_t> joint_counts;
  for (const auto &frame : frames) {
    for (const auto &unit : frame.units) {
      if (unit.is_eos()) continue;
      ++word_counts[unit.word];
      ++label_counts[unit.label];
      ++joint_counts[{unit.word, unit.label}];
    }
  }

  Vocabulary vocab;
  vocab.min_count_ = std::max(min_count, 1);
  vocab.convention_ = convention;

  vocab.words_.add(std::string(kUnkWord));
  vocab.words_.add(std::string(kEosWord));
  for (const auto &[word, count] : word_counts) {
    if (count >= vocab.min_count_) {
      vocab.words_.add(word, count);
    } else {
      vocab.words_.add(std::string(kUnkWord), count);
    }
  }

  vocab.labels_.add(std::string(kUnkLabel));
  vocab.labels_.add(std::string(kPredLabel));
  vocab.labels_.add(std::string(kEosLabel));
  for (const auto &[label, count] : label_counts) vocab.labels_.add(label, count);

  // Joint units: rare pairs fold into <unk>:label.
  std::map<std::string, std::pair<std::pair<std::string, std::string>,
                                  std::int64_t>>
      kept;
  for (const auto &[pair, count] : joint_counts) {
    const auto &[word, label] = pair;
    const bool rare = count < vocab.min_count_ || !vocab.words_.find(word);
    std::string w = rare ? std::string(kUnkWord) : word;
    auto &slot = kept[joint_key(w, label)];
    slot.first = {std::move(w), label};
    slot.second += count;
  }
  vocab.joints_.add(joint_key(kUnkWord, kUnkLabel));
  vocab.joints_.add(joint_key(kEosWord, kEosLabel),
                    static_cast<std::int64_t>(frames.size()));
  for (const auto &[key, entry] : kept) vocab.joints_.add(key, entry.second);
  vocab.finalize();
  return vocab;
}

void Vocabulary::finalize() {
  joint_parts_.clear();
  for (int j = 0; j < joints_.size(); ++j) {
    const std::string &key = joints_.symbol(j);
    const auto sep = key.rfind(':');
    if (sep == std::string::npos) {
      throw Error(ErrorCode::kParse, "joint unit without label: " + key);
    }
    const auto word = words_.find(std::string_view(key).substr(0, sep));
    const auto label = labels_.find(std::string_view(key).substr(sep + 1));
    if (!word || !label) {
      throw Error(ErrorCode::kParse,
                  "joint unit with unknown word or label: " + key);
    }
    joint_parts_.emplace_back(*word, *label);
  }
}

int Vocabulary::word_id(std::string_view word) const {
  return words_.find(word).value_or(kUnkWordId);
}

int Vocabulary::label_id(std::string_view label) const {
  return labels_.find(label).value_or(kUnkLabelId);
}

std::optional<int> Vocabulary::find_joint(std::string_view word,
                                          std::string_view label) const {
  return joints_.find(joint_key(word, label));
}

int Vocabulary::joint_id(std::string_view word, std::string_view label) const {
  if (label == kEosLabel) return kEosJointId;
  if (auto exact = find_joint(word, label)) return *exact;
  if (auto unk = find_joint(kUnkWord, label)) return *unk;
  return kUnkJointId;
}

ArgumentUnit Vocabulary::joint_unit(int joint) const {
  return {words_.symbol(joint_word(joint)), labels_.symbol(joint_label(joint))};
}

std::uint64_t Vocabulary::checksum() const {
  Fnv1a hash;
  hash.update(convention_name(convention_));
  for (const SymbolTable *table : {&words_, &labels_, &joints_}) {
    hash.update("\x1f", 1);
    for (int i = 0; i < table->size(); ++i) {
      hash.update(table->symbol(i));
      hash.update("\n", 1);
    }
  }
  return hash.digest();
}

namespace {
constexpr std::string_view kVocabularyMagic = "prnsfm-vocabulary";
constexpr int kVocabularyVersion = 1;

void write_table(std::ostream &out, std::string_view name,
                 const SymbolTable &table) {
  out << name << ' ' << table.size() << '\n';
  for (int i = 0; i < table.size(); ++i) {
    out << table.symbol(i) << '\t' << table.count(i) << '\n';
  }
}

SymbolTable read_table(std::istream &in, std::string_view name,
                       std::size_t &line_number) {
  std::string line;
  if (!std::getline(in, line)) {
    throw ParseError(line_number + 1, "missing table '" + std::string(name) + "'");
  }
  ++line_number;
  const auto header = split_whitespace(line);
  std::optional<long long> size;
  if (header.size() == 2 && header[0] == name) size = parse_integer(header[1]);
  if (!size || *size < 0) {
    throw ParseError(line_number, "expected '" + std::string(name) + " <n>'");
  }
  SymbolTable table;
  for (long long i = 0; i < *size; ++i) {
    if (!std::getline(in, line)) {
      throw ParseError(line_number + 1, "truncated table '" + std::string(name) + "'");
    }
    ++line_number;
    const auto tab = line.rfind('\t');
    const auto count =
        tab == std::string::npos ? std::nullopt
                                 : parse_integer(std::string_view(line).substr(tab + 1));
    if (!count) throw ParseError(line_number, "expected symbol<TAB>count");
    std::string symbol = line.substr(0, tab);
    if (table.find(symbol)) {
      throw ParseError(line_number, "duplicate symbol '" + symbol + "'");
    }
    table.add(std::move(symbol), *count);
  }
  return table;
}
}  // namespace

void Vocabulary::write(std::ostream &out) const {
  out << kVocabularyMagic << ' ' << kVocabularyVersion << '\n';
  out << "convention " << convention_name(convention_) << '\n';
  out << "min_count " << min_count_ << '\n';
  write_table(out, "words", words_);
  write_table(out, "labels", labels_);
  write_table(out, "joints", joints_);
  out << "checksum " << to_hex(checksum()) << '\n';
}

Vocabulary Vocabulary::read(std::istream &in) {
  std::size_t line_number = 0;
  std::string line;
  auto next_fields = [&](std::string_view key) {
    if (!std::getline(in, line)) {
      throw ParseError(line_number + 1, "missing '" + std::string(key) + "'");
    }
    ++line_number;
    auto fields = split_whitespace(line);
    if (fields.size() != 2 || fields[0] != key) {
      throw ParseError(line_number, "expected '" + std::string(key) + " <value>'");
    }
    return fields[1];
  };

  if (next_fields(kVocabularyMagic) != std::to_string(kVocabularyVersion)) {
    throw Error(ErrorCode::kVersion, "unsupported vocabulary version");
  }
  Vocabulary vocab;
  vocab.convention_ = parse_convention(next_fields("convention"));
  const auto min_count = parse_integer(next_fields("min_count"));
  if (!min_count || *min_count < 1) {
    throw ParseError(line_number, "bad min_count");
  }
  vocab.min_count_ = static_cast<int>(*min_count);
  vocab.words_ = read_table(in, "words", line_number);
  vocab.labels_ = read_table(in, "labels", line_number);
  vocab.joints_ = read_table(in, "joints", line_number);
  const std::string stored = next_fields("checksum");

  const auto check_reserved = [](const SymbolTable &table, int id,
                                 std::string_view symbol) {
    if (table.size() <= id || table.symbol(id) != symbol) {
      throw Error(ErrorCode::kParse,
                  "reserved entry '" + std::string(symbol) + "' misplaced");
    }
  };
  check_reserved(vocab.words_, kUnkWordId, kUnkWord);
  check_reserved(vocab.words_, kEosWordId, kEosWord);
  check_reserved(vocab.labels_, kUnkLabelId, kUnkLabel);
  check_reserved(vocab.labels_, kPredLabelId, kPredLabel);
  check_reserved(vocab.labels_, kEosLabelId, kEosLabel);
  check_reserved(vocab.joints_, kUnkJointId, joint_key(kUnkWord, kUnkLabel));
  check_reserved(vocab.joints_, kEosJointId, joint_key(kEosWord, kEosLabel));
  vocab.finalize();
  if (stored != to_hex(vocab.checksum())) {
    throw Error(ErrorCode::kChecksum, "vocabulary checksum mismatch");
  }
  return vocab;
}

std::string_view mode_name(EncodingMode mode) {
  return mode == EncodingMode::kJoint ? "joint" : "separate";
}

EncodingMode parse_mode(std::string_view name) {
  if (name == "joint") return EncodingMode::kJoint;
  if (name == "separate") return EncodingMode::kSeparate;
  throw Error(ErrorCode::kContract, "unknown mode '" + std::string(name) + "'");
}

EncodedSequence encode_frame(const FrameSequence &frame,
                             const Vocabulary &vocab, EncodingMode mode) {
  EncodedSequence encoded;
  encoded.mode = mode;
  encoded.source_id = frame.source_id;
  for (const auto &unit : frame.units) {
    encoded.joint.push_back(vocab.joint_id(unit.word, unit.label));
    if (mode == EncodingMode::kSeparate) {
      encoded.words.push_back(unit.is_eos() ? Vocabulary::kEosWordId
                                            : vocab.word_id(unit.word));
      encoded.labels.push_back(vocab.label_id(unit.label));
    }
  }
  return encoded;
}

FrameSequence decode_frame(const EncodedSequence &encoded,
                           const Vocabulary &vocab) {
  FrameSequence frame;
  frame.source_id = encoded.source_id;
  for (std::size_t i = 0; i < encoded.size(); ++i) {
    if (encoded.mode == EncodingMode::kJoint) {
      frame.units.push_back(vocab.joint_unit(encoded.joint[i]));
    } else {
      frame.units.push_back({vocab.words().symbol(encoded.words[i]),
                             vocab.labels().symbol(encoded.labels[i])});
    }
  }
  return frame;
}

EmbeddingLoad load_pretrained_embeddings(std::istream &in,
                                         const Vocabulary &vocab, int dim,
                                         Rng &rng) {
  if (dim <= 0) throw Error(ErrorCode::kContract, "embedding dim must be > 0");
  EmbeddingLoad load;
  load.rows.resize(vocab.words().size(), dim);
  fill_uniform(load.rows, rng, -0.5 / dim, 0.5 / dim);
  load.total = static_cast<std::size_t>(vocab.words().size()) - 2;

  std::string line;
  std::size_t line_number = 0;
  bool header_seen = false;
  std::vector<bool> assigned(vocab.words().size(), false);
  while (std::getline(in, line)) {
    ++line_number;
    const auto fields = split_whitespace(line);
    if (fields.empty()) continue;
    if (!header_seen) {
      header_seen = true;
      const auto file_dim = fields.size() == 2 ? parse_integer(fields[1])
                                               : std::nullopt;
      if (!file_dim || !parse_integer(fields[0])) {
        throw ParseError(line_number, "expected '<count> <dim>' header");
      }
      if (*file_dim != dim) {
        throw Error(ErrorCode::kDimension,
                    "embedding file has dim " + std::to_string(*file_dim) +
                        ", expected " + std::to_string(dim));
      }
      continue;
    }
    if (fields.size() != static_cast<std::size_t>(dim) + 1) {
      throw Error(ErrorCode::kDimension,
                  "line " + std::to_string(line_number) + ": expected " +
                      std::to_string(dim) + " values");
    }
    const auto id = vocab.find_word(fields[0]);
    if (!id || *id == Vocabulary::kUnkWordId || *id == Vocabulary::kEosWordId) {
      continue;
    }
    for (int c = 0; c < dim; ++c) {
      try {
        load.rows(*id, c) = std::stod(fields[c + 1]);
      } catch (const std::exception &) {
        throw ParseError(line_number, "bad value '" + fields[c + 1] + "'");
      }
    }
    if (assigned[*id]) {
      ++load.duplicates;
      spdlog::warn("embedding for '{}' repeated at line {}; last one wins",
                   fields[0], line_number);
    } else {
      assigned[*id] = true;
      ++load.covered;
    }
  }
  if (!all_finite(load.rows)) {
    throw Error(ErrorCode::kNumeric, "non-finite embedding value");
  }
  return load;
}

void VerbMap::add(const std::string &nominal, VerbForm form) {
  auto &forms = entries_[nominal];
  for (auto &existing : forms) {
    if (existing.form == form.form) {
      existing.seen = existing.seen || form.seen;
      return;
    }
  }
  forms.push_back(std::move(form));
}

const std::vector<VerbForm> &VerbMap::forms(std::string_view nominal) const {
  static const std::vector<VerbForm> kEmpty;
  const auto it = entries_.find(nominal);
  return it == entries_.end() ? kEmpty : it->second;
}

bool VerbMap::contains(std::string_view nominal) const {
  return entries_.find(nominal) != entries_.end();
}

bool VerbMap::all_unseen(std::string_view nominal) const {
  const auto &list = forms(nominal);
  return std::none_of(list.begin(), list.end(),
                      [](const VerbForm &f) { return f.seen; });
}

VerbMap build_verb_map(std::istream &lexicon,
                       const std::vector<FrameSequence> &frames) {
  std::set<std::string, std::less<>> predicates;
  for (const auto &frame : frames) {
    if (!frame.units.empty()) predicates.insert(frame.predicate().word);
  }

  VerbMap map;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(lexicon, line)) {
    ++line_number;
    const auto content = trim(line);
    if (content.empty() || content.front() == '#') continue;
    const auto fields = split(content, '\t');
    if (fields.size() != 2 || trim(fields[0]).empty()) {
      throw ParseError(line_number, "expected nominal<TAB>verb,verb,...");
    }
    const std::string nominal = to_lower(trim(fields[0]));
    for (const auto &verb : split(fields[1], ',')) {
      const std::string form = to_lower(trim(verb));
      if (form.empty()) continue;
      map.add(nominal, {form, predicates.count(form) > 0});
    }
  }
  return map;
}

}  // namespace prnsfm
