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

#include "caprank/fusion.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "caprank/error.hpp"
#include "caprank/log.hpp"

namespace caprank {

namespace {

std::string format_edge(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

bool FusionConfig::uses(ExpertId id) const {
  return std::find(experts.begin(), experts.end(), id) != experts.end();
}

void FusionConfig::validate() const {
  if (experts.empty() && !include_prior_factor) {
    throw std::invalid_argument("no experts enabled and the prior factor is off");
  }
  if (!(epsilon_floor > 0.0 && epsilon_floor <= 1e-3)) {
    throw std::invalid_argument("epsilon floor must lie in (0, 1e-3]");
  }
  if (visual_slot < 1) throw std::invalid_argument("visual slot must be >= 1");
}

std::vector<double> fuse(const ExpertScoreLists& scores, const std::vector<double>* prior,
                         const FusionConfig& cfg) {
  cfg.validate();
  std::optional<std::size_t> n;
  auto check_list = [&](const std::vector<double>& list, std::string_view what) {
    if (n && list.size() != *n) {
      throw std::invalid_argument("score list '" + std::string(what) + "' has length " +
                                  std::to_string(list.size()) + ", expected " +
                                  std::to_string(*n));
    }
    n = list.size();
    for (double v : list) {
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw std::invalid_argument("score list '" + std::string(what) +
                                    "' has a negative or non-finite entry");
      }
    }
  };

  std::vector<const std::vector<double>*> factors;
  for (const auto& [id, list] : scores) {
    if (!cfg.uses(id)) continue;
    check_list(list, expert_name(id));
    factors.push_back(&list);
  }
  for (auto id : cfg.experts) {
    if (!scores.contains(id)) {
      throw std::invalid_argument("enabled expert '" + std::string(expert_name(id)) +
                                  "' has no scores");
    }
  }
  if (cfg.include_prior_factor) {
    if (!prior) throw std::invalid_argument("prior factor enabled but no prior given");
    check_list(*prior, "prior");
    factors.push_back(prior);
  }

  std::vector<double> raw(n.value_or(0), 1.0);
  for (const auto* list : factors) {
    for (std::size_t i = 0; i < raw.size(); ++i) {
      raw[i] *= std::max((*list)[i], cfg.epsilon_floor);
    }
  }
  return raw;
}

std::vector<double> normalize(std::span<const double> raw) {
  if (raw.empty()) throw std::invalid_argument("normalize: empty input");
  double sum = 0.0;
  for (double v : raw) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("normalize: negative or non-finite entry");
    }
    sum += v;
  }
  std::vector<double> out(raw.size());
  if (sum == 0.0) {
    logger()->warn("all fused scores are 0; falling back to a uniform distribution");
    std::fill(out.begin(), out.end(), 1.0 / static_cast<double>(raw.size()));
    return out;
  }
  for (std::size_t i = 0; i < raw.size(); ++i) out[i] = raw[i] / sum;
  return out;
}

std::vector<int> rank_order(std::span<const double> scores) {
  std::vector<int> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return scores[a] > scores[b]; });
  return order;
}

FusedBeam fuse_beam(const std::string& image_id, const ExpertScoreLists& scores,
                    const std::vector<double>* prior, const FusionConfig& cfg) {
  FusedBeam fb;
  fb.image_id = image_id;
  fb.raw_products = fuse(scores, prior, cfg);
  fb.normalized = normalize(fb.raw_products);
  fb.order = rank_order(fb.raw_products);
  return fb;
}

RerankResult rerank_beam(const BeamSet& beam, const VisualContext& visual, ExpertEngine& engine,
                         const FusionConfig& cfg) {
  cfg.validate();
  const auto n = beam.candidates.size();
  if (n == 0) throw DataError("beam '" + beam.image_id + "' is empty");

  std::vector<const VisualObject*> objects;
  if (cfg.slot_max) {
    for (const auto& o : visual.objects) objects.push_back(&o);
  } else if (const auto* o = visual.find_slot(cfg.visual_slot)) {
    objects.push_back(o);
  }
  if (objects.empty()) {
    throw DataError("image '" + beam.image_id + "' has no visual object in slot " +
                    std::to_string(cfg.visual_slot));
  }

  std::optional<std::vector<double>> prior;
  if (cfg.uses(ExpertId::kWord) || cfg.include_prior_factor) {
    prior = compute_prior(beam, engine.config().prior_mode);
  }

  std::vector<double> raw;
  for (const auto* object : objects) {
    ExpertScoreLists scores;
    for (auto id : cfg.experts) {
      auto& list = scores[id];
      list.reserve(n);
      for (std::size_t i = 0; i < n; ++i) {
        list.push_back(
            engine.score(id, beam, static_cast<int>(i), *object, prior ? (*prior)[i] : 0.0).score);
      }
    }
    auto products = fuse(scores, prior ? &*prior : nullptr, cfg);
    if (raw.empty()) {
      raw = std::move(products);
    } else {
      for (std::size_t i = 0; i < n; ++i) raw[i] = std::max(raw[i], products[i]);
    }
  }

  const auto normalized = normalize(raw);
  const auto order = rank_order(raw);
  const auto original = original_probabilities(beam);

  RerankResult result;
  result.image_id = beam.image_id;
  result.entries.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& e = result.entries[i];
    e.candidate_index = static_cast<int>(i);
    e.text = beam.candidates[i].text;
    e.fused_score = raw[i];
    e.normalized_score = normalized[i];
    e.original_prob = original[i];
    e.delta = normalized[i] - original[i];
  }
  for (std::size_t r = 0; r < n; ++r) result.entries[order[r]].new_rank = static_cast<int>(r);
  result.winner_index = order.front();

  if (auto err = check_invariants(result)) {
    throw InvariantError("rerank result for '" + beam.image_id + "': " + *err);
  }
  return result;
}

ChangeHistogram bin_probability_changes(const std::vector<RerankResult>& results,
                                        const std::vector<double>& edges) {
  if (edges.empty()) throw std::invalid_argument("bin edges must not be empty");
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (!(edges[i] > edges[i - 1])) throw std::invalid_argument("bin edges must increase strictly");
  }
  ChangeHistogram hist;
  hist.edges = edges;
  for (const auto& r : results) {
    if (hist.counts.size() < r.entries.size()) {
      hist.counts.resize(r.entries.size(), std::vector<long>(edges.size() + 1, 0));
    }
    for (std::size_t pos = 0; pos < r.entries.size(); ++pos) {
      const double d = r.entries[pos].delta;
      const auto bin = static_cast<std::size_t>(
          std::lower_bound(edges.begin(), edges.end(), d) - edges.begin());
      ++hist.counts[pos][bin];
    }
  }
  return hist;
}

std::string format_changes_csv(const ChangeHistogram& hist) {
  std::string out = "position";
  for (double e : hist.edges) out += ",bin_le_" + format_edge(e);
  out += ",bin_gt_" + format_edge(hist.edges.back()) + "\n";
  for (std::size_t pos = 0; pos < hist.counts.size(); ++pos) {
    out += std::to_string(pos);
    for (long c : hist.counts[pos]) out += "," + std::to_string(c);
    out += "\n";
  }
  return out;
}

}  // namespace caprank
