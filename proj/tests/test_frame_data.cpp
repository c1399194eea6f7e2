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


#include <set>
#include <sstream>

#include "doctest.h"
#include "prnsfm/frame_data.hpp"

using namespace prnsfm;

namespace {

// CoNLL-2009 rows: ID FORM LEMMA PLEMMA POS PPOS FEAT PFEAT HEAD PHEAD DEPREL
// PDEPREL FILLPRED PRED APRED...
const char *kPhelps =
    "1 Michael _ _ NNP NNP _ _ 2 2 NAME NAME _ _ _\n"
    "2 Phelps _ _ NNP NNP _ _ 3 3 SBJ SBJ _ _ A0\n"
    "3 swam _ _ VBD VBD _ _ 0 0 ROOT ROOT Y swim.01 _\n"
    "4 at _ _ IN IN _ _ 3 3 LOC LOC _ _ _\n"
    "5 the _ _ DT DT _ _ 6 6 NMOD NMOD _ _ _\n"
    "6 Olympics _ _ NNPS NNPS _ _ 4 4 PMOD PMOD _ _ AM-LOC\n"
    "\n";

std::vector<std::string> render(const FrameSequence &frame) {
  std::vector<std::string> out;
  for (const auto &u : frame.units) out.push_back(u.joint());
  return out;
}

FrameSequence frame_of(std::vector<std::pair<std::string, std::string>> units) {
  FrameSequence f;
  for (auto &[w, l] : units) f.units.push_back({w, l});
  f.units.push_back(eos_unit());
  return f;
}

}  // namespace

TEST_CASE("column corpus yields the swam frame") {
  std::istringstream in(kPhelps);
  const auto result = parse_frames(in, CorpusFormat::kColumns);
  REQUIRE(result.frames.size() == 1);
  CHECK(result.convention == WordConvention::kLowercaseSurface);
  CHECK(render(result.frames[0]) ==
        std::vector<std::string>{"swam:PRED", "phelps:A0", "olympics:AM-LOC", "<eos>:EOS"});
}

TEST_CASE("column corpus with two predicates and lemmas") {
  const char *text =
      "1 John john john NNP NNP _ _ 2 2 SBJ SBJ _ _ A0 _\n"
      "2 bought buy buy VBD VBD _ _ 0 0 ROOT ROOT Y buy.01 _ _\n"
      "3 and and and CC CC _ _ 2 2 COORD COORD _ _ _ _\n"
      "4 ate eat eat VBD VBD _ _ 3 3 CONJ CONJ Y eat.01 _ _\n"
      "5 apples apple apple NNS NNS _ _ 4 4 OBJ OBJ _ _ A1 A1\n"
      "\n";
  std::istringstream in(text);
  const auto result = parse_frames(in, CorpusFormat::kColumns);
  CHECK(result.convention == WordConvention::kLemma);
  REQUIRE(result.frames.size() == 2);
  CHECK(render(result.frames[0]) ==
        std::vector<std::string>{"buy:PRED", "john:A0", "apple:A1", "<eos>:EOS"});
  CHECK(render(result.frames[1]) ==
        std::vector<std::string>{"eat:PRED", "apple:A1", "<eos>:EOS"});
}

TEST_CASE("column length filter") {
  std::ostringstream text;
  for (int i = 1; i <= 100; ++i) {
    text << i << " w" << i << " _ _ NN NN _ _ 0 0 X X " << (i == 1 ? "Y p.01" : "_ _")
         << " _\n";
  }
  text << "\n" << kPhelps;
  {
    std::istringstream in(text.str());
    const auto result = parse_frames(in, CorpusFormat::kColumns);
    CHECK(result.frames.size() == 1);
    CHECK(result.sentences_skipped == 1);
  }
  {
    std::istringstream in(text.str());
    IngestOptions options;
    options.length_filter = false;
    CHECK(parse_frames(in, CorpusFormat::kColumns, options).frames.size() == 2);
  }
}

TEST_CASE("frame records are re-sorted by token position") {
  std::istringstream in(
      "s1\tswam\tOlympics:AM-LOC:5\tPhelps:A0:1\n"
      "s2\tslept\n");
  const auto result = parse_frames(in, CorpusFormat::kFrameRecords);
  REQUIRE(result.frames.size() == 2);
  CHECK(render(result.frames[0]) ==
        std::vector<std::string>{"swam:PRED", "phelps:A0", "olympics:AM-LOC", "<eos>:EOS"});
  // Zero-argument frames are kept.
  CHECK(render(result.frames[1]) == std::vector<std::string>{"slept:PRED", "<eos>:EOS"});
}

TEST_CASE("frame record errors carry line numbers") {
  std::istringstream in("s1\tswam\tPhelps:A0:1\ns2\tswam\tPhelps-A0\n");
  try {
    parse_frames(in, CorpusFormat::kFrameRecords);
    FAIL("expected parse error");
  } catch (const ParseError &e) {
    CHECK(e.line() == 2);
  }
  std::istringstream reserved("s1\tswam\tx:EOS:1\n");
  CHECK_THROWS_AS(parse_frames(reserved, CorpusFormat::kFrameRecords), ParseError);
}

TEST_CASE("long frames are truncated") {
  std::ostringstream line;
  line << "s\tp";
  for (int i = 0; i < 12; ++i) line << "\tw" << i << ":A1:" << i + 1;
  std::istringstream in(line.str());
  const auto result = parse_frames(in, CorpusFormat::kFrameRecords);
  CHECK(result.frames[0].argument_count() == 9);
  CHECK(result.frames_truncated == 1);
}

TEST_CASE("frame records round-trip with the convention header") {
  std::istringstream in(kPhelps);
  const auto parsed = parse_frames(in, CorpusFormat::kColumns);
  std::ostringstream out;
  write_frame_records(out, parsed.frames, WordConvention::kLemma);
  std::istringstream back(out.str());
  const auto reread = parse_frames(back, CorpusFormat::kFrameRecords);
  CHECK(reread.convention == WordConvention::kLemma);
  CHECK(render(reread.frames[0]) == render(parsed.frames[0]));
}

TEST_CASE("validate_frame") {
  CHECK_NOTHROW(validate_frame(frame_of({{"p", "PRED"}})));
  FrameSequence bad = frame_of({{"p", "PRED"}, {"q", "PRED"}});
  CHECK_THROWS_AS(validate_frame(bad), Error);
  FrameSequence no_eos;
  no_eos.units.push_back({"p", "PRED"});
  CHECK_THROWS_AS(validate_frame(no_eos), Error);
}

TEST_CASE("vocabulary of three words and two labels") {
  const std::vector<FrameSequence> frames = {
      frame_of({{"swam", "PRED"}, {"phelps", "A0"}}),
      frame_of({{"swam", "PRED"}, {"olympics", "AM-LOC"}})};
  const auto vocab = Vocabulary::build(frames, 1);
  std::set<std::string> joints;
  for (int i = 0; i < vocab.joints().size(); ++i) joints.insert(vocab.joints().symbol(i));
  CHECK(joints == std::set<std::string>{"<unk>:<unk>", "<eos>:EOS", "phelps:A0",
                                        "olympics:AM-LOC", "swam:PRED"});
  CHECK(vocab.words().size() == 5);
  CHECK(vocab.joints().symbol(Vocabulary::kUnkJointId) == "<unk>:<unk>");
  CHECK(vocab.joints().symbol(Vocabulary::kEosJointId) == "<eos>:EOS");
  CHECK(vocab.labels().symbol(Vocabulary::kPredLabelId) == "PRED");
  CHECK(vocab.labels().symbol(Vocabulary::kEosLabelId) == "EOS");

  // Bijectivity and composition.
  for (int i = 0; i < vocab.joints().size(); ++i) {
    CHECK(*vocab.joints().find(vocab.joints().symbol(i)) == i);
    const auto unit = vocab.joint_unit(i);
    CHECK(vocab.words().symbol(vocab.joint_word(i)) == unit.word);
    CHECK(vocab.labels().symbol(vocab.joint_label(i)) == unit.label);
  }
  for (int i = 0; i < vocab.words().size(); ++i) {
    CHECK(*vocab.words().find(vocab.words().symbol(i)) == i);
  }
}

TEST_CASE("min_count folds rare words into UNK") {
  const std::vector<FrameSequence> frames = {
      frame_of({{"swam", "PRED"}, {"phelps", "A0"}}),
      frame_of({{"swam", "PRED"}, {"bolt", "A0"}}),
      frame_of({{"swam", "PRED"}, {"bolt", "A0"}})};
  const auto vocab = Vocabulary::build(frames, 2);
  CHECK(vocab.word_id("phelps") == Vocabulary::kUnkWordId);
  CHECK(vocab.word_id("bolt") != Vocabulary::kUnkWordId);
  CHECK(vocab.find_joint("<unk>", "A0"));
  CHECK(!vocab.find_joint("phelps", "A0"));
  CHECK(Vocabulary::build(frames, 1).word_id("phelps") != Vocabulary::kUnkWordId);

  // Unseen pairs: <unk>:label when that unit exists, else the global UNK.
  const FrameSequence probe = frame_of({{"swam", "PRED"}, {"lochte", "A0"}, {"lochte", "A1"}});
  const auto encoded = encode_frame(probe, vocab, EncodingMode::kJoint);
  CHECK(encoded.joint == std::vector<int>{*vocab.find_joint("swam", "PRED"),
                                          *vocab.find_joint("<unk>", "A0"),
                                          Vocabulary::kUnkJointId,
                                          Vocabulary::kEosJointId});
  CHECK(vocab.label_id("A1") == Vocabulary::kUnkLabelId);
}

TEST_CASE("encode and decode in both modes") {
  const std::vector<FrameSequence> frames = {frame_of({{"swam", "PRED"}, {"phelps", "A0"}})};
  const auto vocab = Vocabulary::build(frames, 1);
  const auto joint = encode_frame(frames[0], vocab, EncodingMode::kJoint);
  CHECK(joint.joint == std::vector<int>{*vocab.find_joint("swam", "PRED"),
                                        *vocab.find_joint("phelps", "A0"),
                                        Vocabulary::kEosJointId});
  CHECK(joint.words.empty());

  const auto separate = encode_frame(frames[0], vocab, EncodingMode::kSeparate);
  CHECK(separate.joint == joint.joint);
  CHECK(separate.words == std::vector<int>{*vocab.find_word("swam"), *vocab.find_word("phelps"),
                                           Vocabulary::kEosWordId});
  CHECK(separate.labels == std::vector<int>{Vocabulary::kPredLabelId, *vocab.find_label("A0"),
                                            Vocabulary::kEosLabelId});
  CHECK(render(decode_frame(joint, vocab)) == render(frames[0]));
  CHECK(render(decode_frame(separate, vocab)) == render(frames[0]));

  const auto oov = frame_of({{"swam", "PRED"}, {"bolt", "A0"}});
  CHECK(render(decode_frame(encode_frame(oov, vocab, EncodingMode::kSeparate), vocab)) ==
        std::vector<std::string>{"swam:PRED", "<unk>:A0", "<eos>:EOS"});
}

TEST_CASE("vocabulary file round-trip and checksum") {
  const std::vector<FrameSequence> frames = {
      frame_of({{"swam", "PRED"}, {"phelps", "A0"}, {"pool", "AM-LOC"}})};
  const auto vocab = Vocabulary::build(frames, 1, WordConvention::kLemma);
  std::stringstream buffer;
  vocab.write(buffer);
  const auto back = Vocabulary::read(buffer);
  CHECK(back.checksum() == vocab.checksum());
  CHECK(back.convention() == WordConvention::kLemma);
  CHECK(back.output_size() == vocab.output_size());

  std::string text;
  {
    std::ostringstream out;
    vocab.write(out);
    text = out.str();
  }
  const auto pos = text.find("phelps");
  text.replace(pos, 6, "phelpz");
  std::istringstream corrupted(text);
  CHECK_THROWS_AS(Vocabulary::read(corrupted), Error);
}

TEST_CASE("pretrained embeddings") {
  const std::vector<FrameSequence> frames = {frame_of({{"swam", "PRED"}, {"phelps", "A0"}})};
  const auto vocab = Vocabulary::build(frames, 1);
  Rng rng(1);

  std::istringstream full("2 3\nswam 1 2 3\nphelps 4 5 6\n");
  const auto load = load_pretrained_embeddings(full, vocab, 3, rng);
  CHECK(load.coverage() == 1.0);
  CHECK(load.rows.row(*vocab.find_word("phelps")) == Eigen::RowVector3d(4, 5, 6));

  std::istringstream empty("");
  const auto none = load_pretrained_embeddings(empty, vocab, 50, rng);
  CHECK(none.coverage() == 0.0);
  CHECK(none.rows.cwiseAbs().maxCoeff() <= 0.5 / 50);

  std::istringstream small("1 3\nswam 1 2 3\n");
  try {
    load_pretrained_embeddings(small, vocab, 50, rng);
    FAIL("expected dimension error");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::kDimension);
  }

  std::istringstream dup("2 2\nswam 1 1\nswam 2 2\n");
  const auto last = load_pretrained_embeddings(dup, vocab, 2, rng);
  CHECK(last.duplicates == 1);
  CHECK(last.rows.row(*vocab.find_word("swam")) == Eigen::RowVector2d(2, 2));
}

TEST_CASE("verb map for funds") {
  const std::vector<FrameSequence> frames = {
      frame_of({{"funds", "PRED"}}), frame_of({{"fund", "PRED"}}),
      frame_of({{"funding", "PRED"}}), frame_of({{"funded", "PRED"}}),
      frame_of({{"buy", "PRED"}})};
  std::istringstream lexicon(
      "funds\tfunds,fund,funding,funded\n"
      "purchase\tbuy,acquire\n"
      "acquisition\tacquire,buy\n"
      "grant\tbestow\n");
  const auto map = build_verb_map(lexicon, frames);
  std::set<std::string> forms;
  for (const auto &f : map.forms("funds")) {
    forms.insert(f.form);
    CHECK(f.seen);
  }
  CHECK(forms == std::set<std::string>{"funds", "fund", "funding", "funded"});
  CHECK(map.all_unseen("grant"));
  CHECK(!map.all_unseen("purchase"));
  CHECK(map.forms("purchase").size() == 2);
  CHECK(map.forms("acquisition").size() == 2);
  CHECK(map.forms("missing").empty());
  CHECK(!map.contains("missing"));
}
