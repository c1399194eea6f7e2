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


#ifndef PRNSFM_FRAME_DATA_HPP_
#define PRNSFM_FRAME_DATA_HPP_

// Semantic frames as unit sequences [predicate:PRED, arg:LABEL, ..., EOS],
// the vocabularies the models index them with, and the auxiliary resources
// (pre-trained word vectors, nominal-to-verbal lexicon).

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "prnsfm/common.hpp"
#include "prnsfm/nn_core.hpp"

namespace prnsfm {

inline constexpr std::string_view kPredLabel = "PRED";
inline constexpr std::string_view kEosLabel = "EOS";
inline constexpr std::string_view kEosWord = "<eos>";
inline constexpr std::string_view kUnkWord = "<unk>";
inline constexpr std::string_view kUnkLabel = "<unk>";

std::string joint_key(std::string_view word, std::string_view label);

struct ArgumentUnit {
  std::string word;
  std::string label;
  // Token position in the source sentence; -1 when unknown.
  int token_index = -1;

  bool is_eos() const { return label == kEosLabel; }
  bool is_predicate() const { return label == kPredLabel; }
  std::string joint() const { return joint_key(word, label); }

  friend bool operator==(const ArgumentUnit &a, const ArgumentUnit &b) {
    return a.word == b.word && a.label == b.label;
  }
};

ArgumentUnit eos_unit();

struct FrameSequence {
  std::vector<ArgumentUnit> units;
  std::string source_id;

  std::size_t argument_count() const {
    return units.size() < 2 ? 0 : units.size() - 2;
  }
  const ArgumentUnit &predicate() const { return units.front(); }
};

// Throws kContract unless the frame is [x:PRED, ..., EOS] with no other PRED
// or EOS unit.
void validate_frame(const FrameSequence &frame);

enum class WordConvention { kLemma, kLowercaseSurface };

std::string_view convention_name(WordConvention convention);
WordConvention parse_convention(std::string_view name);

enum class CorpusFormat { kFrameRecords, kColumns };

struct IngestOptions {
  std::size_t max_arguments = 9;
  bool length_filter = true;
  // Sentences with at least this many tokens are skipped when filtering.
  std::size_t max_sentence_tokens = 100;
};

struct IngestResult {
  std::vector<FrameSequence> frames;
  WordConvention convention = WordConvention::kLowercaseSurface;
  std::size_t sentences = 0;
  std::size_t sentences_skipped = 0;
  std::size_t frames_truncated = 0;
};

// Frame-record lines:  source_id \t pred_word \t word:LABEL:idx \t ...
// Column files: CoNLL-2009 layout (ID FORM LEMMA PLEMMA POS PPOS FEAT PFEAT
// HEAD PHEAD DEPREL PDEPREL FILLPRED PRED APRED...), blank-line separated.
IngestResult parse_frames(std::istream &in, CorpusFormat format,
                          const IngestOptions &options = {});

// Writes frame records, preceded by a `#convention=` header line.
void write_frame_records(std::ostream &out,
                         const std::vector<FrameSequence> &frames,
                         WordConvention convention);

// Bidirectional symbol <-> index table with frequency counts.
class SymbolTable {
 public:
  int add(std::string symbol, std::int64_t count = 0);
  std::optional<int> find(std::string_view symbol) const;
  const std::string &symbol(int id) const { return symbols_.at(id); }
  std::int64_t count(int id) const { return counts_.at(id); }
  int size() const { return static_cast<int>(symbols_.size()); }

 private:
  std::vector<std::string> symbols_;
  std::vector<std::int64_t> counts_;
  std::unordered_map<std::string, int> index_;
};

class Vocabulary {
 public:
  static constexpr int kUnkWordId = 0;
  static constexpr int kEosWordId = 1;
  static constexpr int kUnkLabelId = 0;
  static constexpr int kPredLabelId = 1;
  static constexpr int kEosLabelId = 2;
  static constexpr int kUnkJointId = 0;
  static constexpr int kEosJointId = 1;

  static Vocabulary build(const std::vector<FrameSequence> &frames,
                          int min_count,
                          WordConvention convention =
                              WordConvention::kLowercaseSurface);

  // Lookups with UNK fallback.
  int word_id(std::string_view word) const;
  int label_id(std::string_view label) const;
  // Exact pair, else <unk>:label if that unit exists, else <unk>:<unk>.
  int joint_id(std::string_view word, std::string_view label) const;

  std::optional<int> find_word(std::string_view word) const {
    return words_.find(word);
  }
  std::optional<int> find_label(std::string_view label) const {
    return labels_.find(label);
  }
  std::optional<int> find_joint(std::string_view word,
                                std::string_view label) const;

  const SymbolTable &words() const { return words_; }
  const SymbolTable &labels() const { return labels_; }
  const SymbolTable &joints() const { return joints_; }

  // Word and label ids composing a joint unit.
  int joint_word(int joint) const { return joint_parts_.at(joint).first; }
  int joint_label(int joint) const { return joint_parts_.at(joint).second; }
  ArgumentUnit joint_unit(int joint) const;

  int output_size() const { return joints_.size(); }
  int min_count() const { return min_count_; }
  WordConvention convention() const { return convention_; }

  std::uint64_t checksum() const;

  void write(std::ostream &out) const;
  static Vocabulary read(std::istream &in);

 private:
  void finalize();

  SymbolTable words_;
  SymbolTable labels_;
  SymbolTable joints_;
  std::vector<std::pair<int, int>> joint_parts_;
  int min_count_ = 1;
  WordConvention convention_ = WordConvention::kLowercaseSurface;
};

enum class EncodingMode { kJoint, kSeparate };

std::string_view mode_name(EncodingMode mode);
EncodingMode parse_mode(std::string_view name);

// Index streams for one frame. `joint` is always filled because it supplies
// the output targets; `words` and `labels` are filled in separate mode.
struct EncodedSequence {
  EncodingMode mode = EncodingMode::kJoint;
  std::vector<int> joint;
  std::vector<int> words;
  std::vector<int> labels;
  std::string source_id;

  std::size_t size() const { return joint.size(); }
};

EncodedSequence encode_frame(const FrameSequence &frame,
                             const Vocabulary &vocab, EncodingMode mode);

FrameSequence decode_frame(const EncodedSequence &encoded,
                           const Vocabulary &vocab);

struct EmbeddingLoad {
  MatrixXd rows;  // |V_word| x dim
  std::size_t covered = 0;
  std::size_t total = 0;  // non-reserved vocabulary words
  std::size_t duplicates = 0;

  double coverage() const {
    return total == 0 ? 0.0 : static_cast<double>(covered) / total;
  }
};

// Word-vector text format: `<count> <dim>` header, then `word v1 ... vd`.
// Words absent from the file keep a uniform draw in [-0.5/dim, 0.5/dim].
EmbeddingLoad load_pretrained_embeddings(std::istream &in,
                                         const Vocabulary &vocab, int dim,
                                         Rng &rng);

struct VerbForm {
  std::string form;
  bool seen = false;
};

// V(np): nominal lemma -> verbal forms.
class VerbMap {
 public:
  void add(const std::string &nominal, VerbForm form);
  const std::vector<VerbForm> &forms(std::string_view nominal) const;
  bool contains(std::string_view nominal) const;
  bool all_unseen(std::string_view nominal) const;
  std::size_t size() const { return entries_.size(); }

  const std::map<std::string, std::vector<VerbForm>, std::less<>> &entries()
      const {
    return entries_;
  }

 private:
  std::map<std::string, std::vector<VerbForm>, std::less<>> entries_;
};

// Lexicon lines: nominal_lemma \t verb1,verb2,...
VerbMap build_verb_map(std::istream &lexicon,
                       const std::vector<FrameSequence> &frames);

}  // namespace prnsfm

#endif  // PRNSFM_FRAME_DATA_HPP_
