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

#include <cstdint>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "caprank/corpus.hpp"
#include "caprank/embeddings.hpp"
#include "caprank/text.hpp"

namespace caprank {

class ExternalExpertClient;

enum class ExpertId { kWord, kSentenceBuiltin, kSentenceExternal };

// "word", "sentence_builtin", "sentence_external".
std::string_view expert_name(ExpertId id);
std::optional<ExpertId> parse_expert_name(std::string_view name);

struct ExpertScore {
  ExpertId expert = ExpertId::kWord;
  std::string image_id;
  int candidate_index = 0;
  int visual_slot = 1;
  double score = 0.0;
};

// Inputs of the similarity-to-probability conversion.
struct BeliefRevisionParams {
  double hypothesis_prior = 0.0;    // P(w) in [0, 1]
  double similarity = 0.0;          // sim in [0, 1]
  double context_confidence = 1.0;  // P(c) in (0, 1]
};

// alpha = ((1 - sim) / (1 + sim)) ^ (1 - P(c)); alpha is taken as 0 when
// sim == 1, whatever P(c) is.
double revision_exponent(double similarity, double context_confidence);

// P(w) ^ alpha, with P(w) == 0 -> 0 and (sim == 1, P(w) > 0) -> 1.
// Throws std::invalid_argument for out-of-range or non-finite inputs.
double belief_revision(const BeliefRevisionParams& p);

enum class PriorMode { kBeamSoftmax, kUniform };

struct ExpertConfig {
  int keyphrase_count = 2;
  PriorMode prior_mode = PriorMode::kBeamSoftmax;
  std::optional<std::string> external_command;
  int timeout_ms = 30000;
  std::optional<std::string> cache_path;

  void validate() const;  // throws std::invalid_argument
  bool operator==(const ExpertConfig&) const = default;
};

// Softmax over the beam's logprobs, or 1/n each. Softmax without logprobs
// throws DataError.
std::vector<double> compute_prior(const BeamSet& beam, PriorMode mode);

// The reference distribution for probability-change statistics: softmax of
// the logprobs when present, otherwise uniform.
std::vector<double> original_probabilities(const BeamSet& beam);

// Keyphrase-vs-label similarity: max over the caption's top keyphrases of
// word_similarity(keyphrase, tokens(label)); 0 when there are no keyphrases.
double keyphrase_similarity(std::span<const std::string> caption, std::string_view label,
                            const WordVectorTable& table, int keyphrase_count,
                            const StopwordList& stopwords = StopwordList::english(),
                            const IdfTable* idf = nullptr);

// belief_revision(prior, keyphrase_similarity, visual.confidence).
double word_expert_score(std::span<const std::string> caption, const VisualObject& visual,
                         double prior, const WordVectorTable& table, const ExpertConfig& cfg,
                         const StopwordList& stopwords = StopwordList::english(),
                         const IdfTable* idf = nullptr);

// Cosine between the mean vector of the caption's non-stopword tokens and
// the label's phrase vector, clamped to [0, 1].
double sentence_builtin_score(std::span<const std::string> caption, const VisualObject& visual,
                              const WordVectorTable& table,
                              const StopwordList& stopwords = StopwordList::english());

// Append-only JSONL store of expert scores keyed by
// (expert, image_id, candidate_index, visual_slot). Later lines win.
// One writer per file; put() is internally synchronized.
class ScoreCache {
 public:
  using Key = std::tuple<ExpertId, std::string, int, int>;

  // Loads existing entries (corrupt lines are skipped with a warning) and
  // opens the file for appending. Throws DataError if it cannot be opened.
  explicit ScoreCache(const std::string& path);

  std::optional<double> get(const Key& key) const;
  void put(const Key& key, double score);
  std::size_t size() const;
  std::size_t skipped_lines() const { return skipped_; }

 private:
  std::string path_;
  mutable std::mutex mutex_;
  std::map<Key, double> entries_;
  std::ofstream out_;
  std::size_t skipped_ = 0;
};

// Scores (candidate, visual object) pairs with any expert. Not thread-safe
// when an external client is attached: use one engine per worker.
class ExpertEngine {
 public:
  ExpertEngine(const WordVectorTable* table, ExpertConfig cfg,
               const StopwordList* stopwords = &StopwordList::english(),
               const IdfTable* idf = nullptr, ExternalExpertClient* client = nullptr,
               ScoreCache* cache = nullptr);

  const ExpertConfig& config() const { return cfg_; }

  // prior is only consulted by the word expert. Throws DataError when an
  // embedding-backed expert has no table, AdapterError when the external
  // expert has no client or fails.
  ExpertScore score(ExpertId expert, const BeamSet& beam, int candidate_index,
                    const VisualObject& visual, double prior);

 private:
  const WordVectorTable* table_;
  ExpertConfig cfg_;
  const StopwordList* stopwords_;
  const IdfTable* idf_;
  ExternalExpertClient* client_;
  ScoreCache* cache_;
};

}  // namespace caprank
