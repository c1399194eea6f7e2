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


#ifndef PRNSFM_SELPREF_HPP_
#define PRNSFM_SELPREF_HPP_

// Selectional preferences P(w:l | p:PRED) from a frame model by summing
// P(w:l | q) P(q) over a tree of likely argument prefixes q rooted at the
// predicate. Each level keeps the k most probable non-EOS continuations of
// every prefix, down to T-1 arguments.

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "prnsfm/frame_data.hpp"
#include "prnsfm/model.hpp"

namespace prnsfm {

inline constexpr int kMaxSelPrefDepth = 8;

struct SelPrefConfig {
  int k = 1;
  int depth = 4;  // T
  // Let EOS take one of the k slots as a dead-end branch instead of ranking
  // only argument units.
  bool eos_dead_ends = false;
};

void validate(const SelPrefConfig &config);

// A partial argument sequence rooted at the predicate.
struct Prefix {
  std::vector<int> units;  // joint ids; units[0] is the predicate
  double probability = 1;  // P(q)
  double log_prob = 0;
  int depth = 0;           // arguments after the predicate
};

struct ScoredUnit {
  int joint = 0;
  ArgumentUnit unit;
  double probability = 0;
};

// The k most probable entries of `distribution`, ties by ascending index.
// Predicate units are never arguments and are skipped; EOS is skipped
// unless `include_eos`.
std::vector<ScoredUnit> top_k(const VectorXd &distribution,
                              const Vocabulary &vocab, int k, bool include_eos);

// top_k over next_argument_distribution(prefix), EOS excluded; k is clamped
// to |V_out| - 1.
std::vector<ScoredUnit> top_k_next(const PrnsfmModel &model,
                                   const std::vector<ArgumentUnit> &prefix,
                                   int k);

// The expanded tree for one predicate. Target-independent, so one tree
// serves any number of targets.
class SelPrefTree {
 public:
  struct Node {
    Prefix prefix;
    VectorXd distribution;  // P(. | q)
  };

  // nullopt when p:PRED is not a unit of the model's vocabulary.
  static std::optional<SelPrefTree> build(const PrnsfmModel &model,
                                          std::string_view predicate,
                                          const SelPrefConfig &config);

  double score(int target_joint) const;
  const std::vector<Node> &nodes() const { return nodes_; }

 private:
  std::vector<Node> nodes_;
};

// Score of target word:label; 0 when predicate or target is out of
// vocabulary.
double selectional_preference(const PrnsfmModel &model,
                              std::string_view predicate,
                              const ArgumentUnit &target,
                              const SelPrefConfig &config);

std::vector<double> selectional_preference_batch(
    const PrnsfmModel &model, std::string_view predicate,
    const std::vector<ArgumentUnit> &targets, const SelPrefConfig &config);

inline constexpr int kExhaustiveMaxOutput = 16;
inline constexpr int kExhaustiveMaxDepth = 4;

// Unpruned reference: every argument sequence (no EOS or PRED units) of up to depth-1
// arguments, each prefix re-run from scratch.
double selectional_preference_exhaustive(const PrnsfmModel &model,
                                         std::string_view predicate,
                                         const ArgumentUnit &target, int depth);

// Caches one tree per predicate form. Safe for concurrent callers.
class SelPrefTreeCache {
 public:
  SelPrefTreeCache(const PrnsfmModel &model, SelPrefConfig config)
      : model_(model), config_(config) {}

  std::shared_ptr<const SelPrefTree> get(std::string_view predicate);
  const PrnsfmModel &model() const { return model_; }

 private:
  const PrnsfmModel &model_;
  SelPrefConfig config_;
  std::mutex mutex_;
  std::map<std::string, std::shared_ptr<const SelPrefTree>, std::less<>> trees_;
};

// max over p in V(np) of P(w:l | p:PRED); 0 when no form is usable.
double nominal_selectional_preference(const PrnsfmModel &model,
                                      std::string_view nominal,
                                      const ArgumentUnit &target,
                                      const VerbMap &verb_map,
                                      const SelPrefConfig &config);

double nominal_selectional_preference(SelPrefTreeCache &cache,
                                      std::string_view nominal,
                                      const ArgumentUnit &target,
                                      const VerbMap &verb_map);

}  // namespace prnsfm

#endif  // PRNSFM_SELPREF_HPP_
