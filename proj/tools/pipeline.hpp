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


#ifndef PRNSFM_TOOLS_PIPELINE_HPP_
#define PRNSFM_TOOLS_PIPELINE_HPP_

#include <cstdint>
#include <optional>
#include <string>

#include "prnsfm/frame_data.hpp"
#include "prnsfm/model.hpp"
#include "prnsfm/resolver.hpp"
#include "prnsfm/selpref.hpp"

namespace prnsfm::cli {

struct PipelineConfig {
  std::string command;

  // Paths.
  std::string corpus;
  std::string corpus_format = "records";  // records | columns
  std::string frames;
  std::string vocab;
  std::string embeddings;
  std::string lexicon;
  std::string model;
  std::string documents;
  std::string queries;
  std::string gold;
  std::string triples;
  std::string predictions;
  std::string output;
  std::string output_vocab;
  std::string report;
  std::string manifest;  // default: <output>.manifest.json
  std::string config_file;

  IngestOptions ingest;
  int min_count = 2;

  ModelConfig model_config;
  int epochs = 120;
  std::uint64_t shuffle_seed = 1;
  std::optional<double> max_grad_norm;
  bool freeze_embeddings = false;

  ResolverConfig resolver;  // carries the SelPrefConfig
  bool oracle = false;

  int verify_seeds = 20;
  int verify_dim = 8;
  int verify_output = 12;
  int verify_cases = 100;
  std::uint64_t verify_seed = 1;
  bool corrupt_gradient = false;
};

int cmd_ingest(const PipelineConfig &config);
int cmd_train(const PipelineConfig &config);
int cmd_selpref(const PipelineConfig &config);
int cmd_resolve(const PipelineConfig &config);
int cmd_evaluate(const PipelineConfig &config);
int cmd_verify(const PipelineConfig &config);

}  // namespace prnsfm::cli

#endif  // PRNSFM_TOOLS_PIPELINE_HPP_
