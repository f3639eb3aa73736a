// Copyright 2026 The caprank Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "caprank/corpus.hpp"
#include "caprank/experts.hpp"

namespace caprank {

enum class TieBreak { kBeamOrder };

struct FusionConfig {
  std::vector<ExpertId> experts{ExpertId::kWord};  // product factors
  bool include_prior_factor = false;
  double epsilon_floor = 1e-12;
  int visual_slot = 1;
  // Extension: fuse against every visual slot and keep each candidate's
  // largest product.
  bool slot_max = false;
  TieBreak tie_break = TieBreak::kBeamOrder;

  bool uses(ExpertId id) const;
  void validate() const;  // throws std::invalid_argument
  bool operator==(const FusionConfig&) const = default;
};

using ExpertScoreLists = std::map<ExpertId, std::vector<double>>;

// Unnormalized product of experts:
//   raw[i] = prod_e max(score_e[i], eps) [* max(prior[i], eps)]
// Factors are multiplied in ExpertId order, then the prior. Throws
// std::invalid_argument on missing experts, length mismatches, and
// negative or non-finite scores.
std::vector<double> fuse(const ExpertScoreLists& scores, const std::vector<double>* prior,
                         const FusionConfig& cfg);

// raw / sum(raw); uniform with a warning when the sum is 0. Throws
// std::invalid_argument for empty input or negative entries.
std::vector<double> normalize(std::span<const double> raw);

// Candidate indices by descending score; ties keep beam order.
std::vector<int> rank_order(std::span<const double> scores);

struct FusedBeam {
  std::string image_id;
  std::vector<double> raw_products;
  std::vector<double> normalized;
  std::vector<int> order;
};

FusedBeam fuse_beam(const std::string& image_id, const ExpertScoreLists& scores,
                    const std::vector<double>* prior, const FusionConfig& cfg);

// Scores every candidate with the enabled experts against the configured
// visual slot, fuses, and re-ranks. delta = normalized - original
// probability (softmax of logprobs, or uniform without them). Throws
// DataError when the slot is missing.
RerankResult rerank_beam(const BeamSet& beam, const VisualContext& visual, ExpertEngine& engine,
                         const FusionConfig& cfg);

// Counts of deltas per original beam position and bin. With edges
// e_0 < ... < e_{k-1} the bins are (-inf, e_0], (e_0, e_1], ...,
// (e_{k-1}, inf).
struct ChangeHistogram {
  std::vector<double> edges;
  std::vector<std::vector<long>> counts;  // [position][bin]
};

inline const std::vector<double> kDefaultChangeBins{0.0, 0.4, 0.8};

ChangeHistogram bin_probability_changes(const std::vector<RerankResult>& results,
                                        const std::vector<double>& edges = kDefaultChangeBins);

// "position,bin_le_0,bin_le_0.4,bin_le_0.8,bin_gt_0.8" plus one row per
// position.
std::string format_changes_csv(const ChangeHistogram& hist);

}  // namespace caprank
