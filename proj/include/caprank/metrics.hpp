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

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "caprank/text.hpp"

namespace caprank {

struct EvalPair {
  std::string image_id;
  Tokens hypothesis;               // may be empty
  std::vector<Tokens> references;  // at least one
};

enum class BleuSmoothing {
  kNone,
  // (matches + 1) / (total + 1) for n >= 2; unigram precision unchanged.
  kAdd1,
};

// Corpus-level clipped n-gram statistics, the BLEU sufficient statistics.
struct BleuCounts {
  std::array<double, 4> matches{};
  std::array<double, 4> totals{};
  double hypothesis_length = 0.0;
  double reference_length = 0.0;  // sum of closest reference lengths
};

BleuCounts bleu_counts(std::span<const EvalPair> pairs);

// BLEU-1..4: geometric mean of the first n clipped precisions times the
// brevity penalty exp(1 - r/c) (applied when c < r).
std::array<double, 4> corpus_bleu(std::span<const EvalPair> pairs,
                                  BleuSmoothing smoothing = BleuSmoothing::kNone);

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b);

inline constexpr double kRougeBeta = 1.2;

// Best F-beta over the references for one pair.
double rouge_l_pair(const EvalPair& pair, double beta = kRougeBeta);

// Mean of rouge_l_pair over the corpus.
double rouge_l(std::span<const EvalPair> pairs, double beta = kRougeBeta);

// Plain CIDEr (no length penalty, no clipping): 10 x mean over n = 1..4 of
// the per-pair average TF-IDF cosine to each reference. Document frequency
// counts images whose references contain the n-gram. Logs a warning for a
// single-image corpus, where every IDF is 0.
double cider(std::span<const EvalPair> pairs);

struct Diversity {
  std::size_t voc = 0;  // distinct tokens over all captions
  double ttr = 0.0;     // mean per-caption unique/total, empty captions skipped
  double uniq = 0.0;    // mean unique tokens per caption
  double wpc = 0.0;     // mean tokens per caption
};

// Throws DataError for an empty list or one where every caption is empty.
Diversity diversity(std::span<const Tokens> hypotheses);

struct MetricReport {
  std::array<double, 4> bleu{};
  double rouge_l = 0.0;
  double cider = 0.0;
  Diversity diversity;
  std::size_t n_images = 0;
};

MetricReport evaluate(std::span<const EvalPair> pairs,
                      BleuSmoothing smoothing = BleuSmoothing::kNone);

// Fixed six decimals, ties to even (on the exact binary value).
std::string format_fixed6(double v);

using NamedReport = std::pair<std::string, MetricReport>;

// Column-aligned table, one column per system.
std::string format_report_table(const std::vector<NamedReport>& reports);

// "metric,value" CSV. With more than one system the metric names carry a
// "<system>." prefix.
std::string format_report_csv(const std::vector<NamedReport>& reports);

std::string format_diversity_table(const Diversity& d, std::size_t captions);
std::string format_diversity_csv(const Diversity& d, std::size_t captions);

}  // namespace caprank
