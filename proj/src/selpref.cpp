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


#include "prnsfm/selpref.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace prnsfm {

namespace {

// Terms are summed in ascending order. The sum is then monotone under
// insertion of further non-negative terms, so a pruned tree never scores
// above a larger tree built from the same distributions.
double ordered_sum(std::vector<double> &terms) {
  std::sort(terms.begin(), terms.end());
  double total = 0;
  for (double t : terms) total += t;
  return total;
}

std::optional<int> predicate_joint(const Vocabulary &vocab,
                                   std::string_view predicate) {
  return vocab.find_joint(predicate, kPredLabel);
}

}  // namespace

void validate(const SelPrefConfig &config) {
  if (config.k < 1) throw Error(ErrorCode::kContract, "k must be >= 1");
  if (config.depth < 1 || config.depth > kMaxSelPrefDepth) {
    throw Error(ErrorCode::kContract,
                "T must lie in [1, " + std::to_string(kMaxSelPrefDepth) + "]");
  }
}

std::vector<ScoredUnit> top_k(const VectorXd &distribution,
                              const Vocabulary &vocab, int k, bool include_eos) {
  std::vector<int> candidates;
  candidates.reserve(distribution.size());
  for (int j = 0; j < distribution.size(); ++j) {
    if (vocab.joint_label(j) == Vocabulary::kPredLabelId) continue;
    if (include_eos || j != Vocabulary::kEosJointId) candidates.push_back(j);
  }
  const auto take = std::min<std::size_t>(std::max(k, 0), candidates.size());
  std::partial_sort(candidates.begin(), candidates.begin() + take,
                    candidates.end(), [&](int a, int b) {
                      if (distribution[a] != distribution[b]) {
                        return distribution[a] > distribution[b];
                      }
                      return a < b;
                    });
  std::vector<ScoredUnit> out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) {
    const int j = candidates[i];
    out.push_back({j, vocab.joint_unit(j), distribution[j]});
  }
  return out;
}

std::vector<ScoredUnit> top_k_next(const PrnsfmModel &model,
                                   const std::vector<ArgumentUnit> &prefix,
                                   int k) {
  const int limit = model.output_size() - 1;
  if (k > limit) {
    spdlog::warn("top_k_next: k={} clamped to {}", k, limit);
    k = limit;
  }
  return top_k(next_argument_distribution(model, prefix), model.vocab, k,
               false);
}

std::optional<SelPrefTree> SelPrefTree::build(const PrnsfmModel &model,
                                              std::string_view predicate,
                                              const SelPrefConfig &config) {
  validate(config);
  const auto root = predicate_joint(model.vocab, predicate);
  if (!root) return std::nullopt;

  const int limit = model.output_size() - (config.eos_dead_ends ? 0 : 1);
  const int k = std::min(config.k, limit);

  SelPrefTree tree;
  std::vector<DecoderState> frontier_states;
  std::vector<std::size_t> frontier;

  DecoderState root_state =
      begin_sequence(model, token_for_joint(model.vocab, *root));
  tree.nodes_.push_back({Prefix{{*root}, 1.0, 0.0, 0}, root_state.distribution});
  frontier.push_back(0);
  frontier_states.push_back(std::move(root_state));

  for (int t = 1; t < config.depth; ++t) {
    std::vector<std::size_t> next;
    std::vector<DecoderState> next_states;
    for (std::size_t f = 0; f < frontier.size(); ++f) {
      const std::size_t parent_index = frontier[f];
      const auto children =
          top_k(tree.nodes_[parent_index].distribution, model.vocab, k,
                config.eos_dead_ends);
      for (const auto &child : children) {
        if (child.joint == Vocabulary::kEosJointId) continue;
        const Prefix &parent = tree.nodes_[parent_index].prefix;
        Prefix prefix;
        prefix.units = parent.units;
        prefix.units.push_back(child.joint);
        prefix.probability = parent.probability * child.probability;
        prefix.log_prob = std::log(prefix.probability);
        prefix.depth = parent.depth + 1;
        DecoderState state = extend_sequence(
            model, frontier_states[f], token_for_joint(model.vocab, child.joint));
        tree.nodes_.push_back({std::move(prefix), state.distribution});
        next.push_back(tree.nodes_.size() - 1);
        next_states.push_back(std::move(state));
      }
    }
    frontier = std::move(next);
    frontier_states = std::move(next_states);
  }
  return tree;
}

double SelPrefTree::score(int target_joint) const {
  std::vector<double> terms;
  terms.reserve(nodes_.size());
  for (const auto &node : nodes_) {
    terms.push_back(node.prefix.probability * node.distribution[target_joint]);
  }
  return ordered_sum(terms);
}

double selectional_preference(const PrnsfmModel &model,
                              std::string_view predicate,
                              const ArgumentUnit &target,
                              const SelPrefConfig &config) {
  return selectional_preference_batch(model, predicate, {target}, config)[0];
}

std::vector<double> selectional_preference_batch(
    const PrnsfmModel &model, std::string_view predicate,
    const std::vector<ArgumentUnit> &targets, const SelPrefConfig &config) {
  std::vector<double> scores(targets.size(), 0.0);
  const auto tree = SelPrefTree::build(model, predicate, config);
  if (!tree) return scores;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const auto joint = model.vocab.find_joint(targets[i].word, targets[i].label);
    if (joint) scores[i] = tree->score(*joint);
  }
  return scores;
}

namespace {

void enumerate_prefixes(const PrnsfmModel &model,
                        std::vector<ArgumentUnit> &prefix, double probability,
                        int remaining_depth, int target,
                        std::vector<double> &terms) {
  const VectorXd dist = next_argument_distribution(model, prefix);
  terms.push_back(probability * dist[target]);
  if (remaining_depth <= 1) return;
  for (int j = 0; j < dist.size(); ++j) {
    if (j == Vocabulary::kEosJointId ||
        model.vocab.joint_label(j) == Vocabulary::kPredLabelId) {
      continue;
    }
    prefix.push_back(model.vocab.joint_unit(j));
    enumerate_prefixes(model, prefix, probability * dist[j],
                       remaining_depth - 1, target, terms);
    prefix.pop_back();
  }
}

}  // namespace

double selectional_preference_exhaustive(const PrnsfmModel &model,
                                         std::string_view predicate,
                                         const ArgumentUnit &target,
                                         int depth) {
  if (model.output_size() > kExhaustiveMaxOutput ||
      depth > kExhaustiveMaxDepth || depth < 1) {
    throw Error(ErrorCode::kContract,
                "exhaustive marginalization needs |V_out| <= 16 and 1 <= T <= 4");
  }
  const auto root = predicate_joint(model.vocab, predicate);
  const auto target_joint = model.vocab.find_joint(target.word, target.label);
  if (!root || !target_joint) return 0.0;

  std::vector<ArgumentUnit> prefix{model.vocab.joint_unit(*root)};
  std::vector<double> terms;
  enumerate_prefixes(model, prefix, 1.0, depth, *target_joint, terms);
  return ordered_sum(terms);
}

std::shared_ptr<const SelPrefTree> SelPrefTreeCache::get(
    std::string_view predicate) {
  {
    std::lock_guard lock(mutex_);
    if (auto it = trees_.find(predicate); it != trees_.end()) return it->second;
  }
  auto built = SelPrefTree::build(model_, predicate, config_);
  std::shared_ptr<const SelPrefTree> tree =
      built ? std::make_shared<const SelPrefTree>(std::move(*built)) : nullptr;
  std::lock_guard lock(mutex_);
  return trees_.emplace(std::string(predicate), std::move(tree)).first->second;
}

double nominal_selectional_preference(SelPrefTreeCache &cache,
                                      std::string_view nominal,
                                      const ArgumentUnit &target,
                                      const VerbMap &verb_map) {
  const auto joint = cache.model().vocab.find_joint(target.word, target.label);
  if (!joint) return 0.0;
  double best = 0.0;
  for (const auto &form : verb_map.forms(nominal)) {
    const auto tree = cache.get(form.form);
    if (tree) best = std::max(best, tree->score(*joint));
  }
  return best;
}

double nominal_selectional_preference(const PrnsfmModel &model,
                                      std::string_view nominal,
                                      const ArgumentUnit &target,
                                      const VerbMap &verb_map,
                                      const SelPrefConfig &config) {
  SelPrefTreeCache cache(model, config);
  return nominal_selectional_preference(cache, nominal, target, verb_map);
}

}  // namespace prnsfm
