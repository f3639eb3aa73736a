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

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace caprank {

inline constexpr int kDefaultBeamCap = 20;
inline constexpr int kDefaultVisualObjects = 3;

struct CaptionCandidate {
  std::string text;
  std::optional<double> logprob;  // <= 0 when present
  int beam_rank = 0;              // 0 is the decoder's top hypothesis
};

// One image's beam, sorted by beam_rank (0..n-1). Either every candidate
// carries a logprob or none does.
struct BeamSet {
  std::string image_id;
  std::vector<CaptionCandidate> candidates;

  bool has_logprobs() const {
    return !candidates.empty() && candidates.front().logprob.has_value();
  }
};

struct VisualObject {
  std::string label;
  double confidence = 0.0;  // (0, 1]
  int slot = 0;             // 1 = most confident
};

struct VisualContext {
  std::string image_id;
  std::vector<VisualObject> objects;  // slot order, non-increasing confidence

  const VisualObject* find_slot(int slot) const;
};

struct ReferenceSet {
  std::string image_id;
  std::vector<std::string> references;
};

struct RerankEntry {
  int candidate_index = 0;
  std::string text;
  double fused_score = 0.0;
  double normalized_score = 0.0;
  double original_prob = 0.0;
  double delta = 0.0;  // normalized_score - original_prob
  int new_rank = 0;
};

// Entries are stored in candidate_index order (0..n-1).
struct RerankResult {
  std::string image_id;
  std::vector<RerankEntry> entries;
  int winner_index = 0;

  const std::string& winner_text() const { return entries.at(winner_index).text; }
  bool winner_changed() const { return winner_index != 0; }
};

// Returns a description of the first violated invariant, or nullopt.
std::optional<std::string> check_invariants(const RerankResult& r);

// JSONL readers. Errors are DataError with "path:line:" prefixes. Blank
// lines are skipped.
std::vector<BeamSet> read_beams(const std::string& path, int beam_cap = kDefaultBeamCap);
std::vector<VisualContext> read_visual(const std::string& path,
                                       int max_objects = kDefaultVisualObjects);
std::vector<ReferenceSet> read_references(const std::string& path);
std::vector<RerankResult> read_rerank_results(const std::string& path);

// Parsers for a single JSONL record, used by the readers above.
BeamSet parse_beam_line(const std::string& line, int beam_cap);
VisualContext parse_visual_line(const std::string& line, int max_objects);
ReferenceSet parse_reference_line(const std::string& line);
RerankResult parse_rerank_line(const std::string& line);

std::string format_rerank_line(const RerankResult& r);
void write_rerank_results(const std::vector<RerankResult>& results, const std::string& path);

enum class JoinMode { kStrict, kLenient };

struct CorpusItem {
  BeamSet beam;
  VisualContext visual;
};

struct JoinResult {
  std::vector<CorpusItem> items;  // beams input order
  std::vector<std::string> skipped;  // lenient mode only
};

// Strict mode throws DataError listing every beam image_id with no visual
// context; lenient mode skips them and logs one warning with the count.
JoinResult join_corpus(const std::vector<BeamSet>& beams,
                       const std::vector<VisualContext>& visual,
                       JoinMode mode = JoinMode::kStrict);

}  // namespace caprank
