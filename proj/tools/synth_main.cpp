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


// Writes the synthetic fixture used by the pipeline tests: frame records,
// nominal lexicon, documents with planted implicit arguments, queries, gold
// and probe triples.

#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "prnsfm/synthetic.hpp"

namespace fs = std::filesystem;

int main(int argc, char **argv) {
  std::string dir = "synthetic";
  std::size_t frame_count = 2000;
  std::size_t document_count = 50;
  std::size_t probe_count = 200;
  std::uint64_t seed = 7;

  CLI::App app{"Generate the synthetic frame grammar fixture"};
  app.add_option("-o,--out", dir, "Output directory")->capture_default_str();
  app.add_option("--frames", frame_count, "Training frames")->capture_default_str();
  app.add_option("--documents", document_count, "Documents")->capture_default_str();
  app.add_option("--probes", probe_count, "Probe pairs")->capture_default_str();
  app.add_option("--seed", seed, "Generator seed")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  try {
    fs::create_directories(dir);
    const auto grammar = prnsfm::default_grammar();
    prnsfm::Rng rng(seed);
    const auto frames = prnsfm::generate_frames(grammar, frame_count, rng);
    const auto docs = prnsfm::generate_documents(grammar, document_count, rng);
    const auto vocab = prnsfm::Vocabulary::build(frames, 1);
    const auto probes = prnsfm::make_probes(grammar, vocab, probe_count, rng);

    auto open = [&](const char *name) {
      std::ofstream out(fs::path(dir) / name);
      if (!out) throw prnsfm::Error(prnsfm::ErrorCode::kIo, std::string("cannot write ") + name);
      return out;
    };
    {
      auto out = open("frames.txt");
      prnsfm::write_frame_records(out, frames, prnsfm::WordConvention::kLowercaseSurface);
    }
    open("lexicon.tsv") << prnsfm::lexicon_text(grammar);
    {
      auto out = open("documents.tsv");
      prnsfm::write_documents(out, docs.documents);
    }
    {
      auto out = open("queries.tsv");
      prnsfm::write_queries(out, docs.queries);
    }
    {
      auto out = open("gold.tsv");
      prnsfm::write_gold(out, docs.gold);
    }
    {
      auto out = open("probes.tsv");
      for (const auto &p : probes) {
        const auto &forms = grammar.find(p.predicate).forms;
        out << forms.front() << '\t' << p.consistent.word << '\t' << p.consistent.label << '\n'
            << forms.front() << '\t' << p.inconsistent.word << '\t' << p.inconsistent.label << '\n';
      }
    }
    std::cout << "frames=" << frames.size() << "\ndocuments=" << docs.documents.size()
              << "\nfallback_queries=" << docs.fallback_queries
              << "\nprobes=" << probes.size() << '\n';
  } catch (const prnsfm::Error &e) {
    std::cerr << "error: code=" << prnsfm::error_code_name(e.code())
              << " message=" << e.what() << '\n';
    return 2;
  }
  return 0;
}
