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

#include "caprank/experts.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "caprank/error.hpp"
#include "caprank/external_expert.hpp"
#include "caprank/log.hpp"

namespace caprank {

namespace {

void require_unit(double v, const char* what, bool open_low) {
  const bool ok = std::isfinite(v) && (open_low ? v > 0.0 : v >= 0.0) && v <= 1.0;
  if (!ok) {
    throw std::invalid_argument(std::string(what) + " = " + std::to_string(v) + " outside " +
                                (open_low ? "(0, 1]" : "[0, 1]"));
  }
}

std::vector<double> softmax(std::span<const double> logits) {
  const double peak = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - peak);
    sum += out[i];
  }
  for (auto& v : out) v /= sum;
  return out;
}

}  // namespace

std::string_view expert_name(ExpertId id) {
  switch (id) {
    case ExpertId::kWord: return "word";
    case ExpertId::kSentenceBuiltin: return "sentence_builtin";
    case ExpertId::kSentenceExternal: return "sentence_external";
  }
  return "unknown";
}

std::optional<ExpertId> parse_expert_name(std::string_view name) {
  for (auto id : {ExpertId::kWord, ExpertId::kSentenceBuiltin, ExpertId::kSentenceExternal}) {
    if (expert_name(id) == name) return id;
  }
  return std::nullopt;
}

double revision_exponent(double similarity, double context_confidence) {
  require_unit(similarity, "similarity", false);
  require_unit(context_confidence, "context confidence", true);
  if (similarity == 1.0) return 0.0;
  return std::pow((1.0 - similarity) / (1.0 + similarity), 1.0 - context_confidence);
}

double belief_revision(const BeliefRevisionParams& p) {
  require_unit(p.hypothesis_prior, "hypothesis prior", false);
  const double alpha = revision_exponent(p.similarity, p.context_confidence);
  if (p.hypothesis_prior == 0.0) return 0.0;
  if (alpha == 0.0) return 1.0;
  return std::pow(p.hypothesis_prior, alpha);
}

void ExpertConfig::validate() const {
  if (keyphrase_count < 1) throw std::invalid_argument("keyphrase count must be >= 1");
  if (timeout_ms <= 0) throw std::invalid_argument("timeout_ms must be > 0");
}

std::vector<double> compute_prior(const BeamSet& beam, PriorMode mode) {
  const auto n = beam.candidates.size();
  if (n == 0) throw DataError("beam '" + beam.image_id + "' is empty");
  if (mode == PriorMode::kUniform) return std::vector<double>(n, 1.0 / static_cast<double>(n));
  if (!beam.has_logprobs()) {
    throw DataError("beam '" + beam.image_id +
                    "' has no logprobs; the softmax prior needs them (use the uniform prior)");
  }
  std::vector<double> logits;
  logits.reserve(n);
  for (const auto& c : beam.candidates) logits.push_back(*c.logprob);
  return softmax(logits);
}

std::vector<double> original_probabilities(const BeamSet& beam) {
  return compute_prior(beam, beam.has_logprobs() ? PriorMode::kBeamSoftmax : PriorMode::kUniform);
}

double keyphrase_similarity(std::span<const std::string> caption, std::string_view label,
                            const WordVectorTable& table, int keyphrase_count,
                            const StopwordList& stopwords, const IdfTable* idf) {
  const auto label_tokens = tokenize(label);
  double best = 0.0;
  for (const auto& kp : extract_keyphrases(caption, idf, keyphrase_count, stopwords)) {
    best = std::max(best, word_similarity(kp.words, label_tokens, table));
  }
  return best;
}

double word_expert_score(std::span<const std::string> caption, const VisualObject& visual,
                         double prior, const WordVectorTable& table, const ExpertConfig& cfg,
                         const StopwordList& stopwords, const IdfTable* idf) {
  const double sim =
      keyphrase_similarity(caption, visual.label, table, cfg.keyphrase_count, stopwords, idf);
  return belief_revision({prior, sim, visual.confidence});
}

double sentence_builtin_score(std::span<const std::string> caption, const VisualObject& visual,
                              const WordVectorTable& table, const StopwordList& stopwords) {
  Tokens content;
  for (const auto& t : caption) {
    if (!stopwords.contains(t)) content.push_back(t);
  }
  auto cv = phrase_vector(content, table);
  auto lv = phrase_vector(tokenize(visual.label), table);
  if (!cv || !lv) return 0.0;
  return std::clamp(cosine(*cv, *lv), 0.0, 1.0);
}

ScoreCache::ScoreCache(const std::string& path) : path_(path) {
  {
    std::ifstream in(path);
    std::string line;
    std::size_t line_no = 0;
    while (in && std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      try {
        auto j = nlohmann::json::parse(line);
        auto expert = parse_expert_name(j.at("expert").get<std::string>());
        double score = j.at("score").get<double>();
        if (!expert || !std::isfinite(score)) throw std::runtime_error("bad expert or score");
        entries_[{*expert, j.at("image_id").get<std::string>(),
                  j.at("candidate_index").get<int>(), j.at("visual_slot").get<int>()}] = score;
      } catch (const std::exception& e) {
        ++skipped_;
        logger()->warn("{}:{}: skipping corrupt score cache line ({})", path, line_no, e.what());
      }
    }
  }
  out_.open(path, std::ios::app);
  if (!out_) throw DataError("cannot open score cache '" + path + "' for appending");
}

std::optional<double> ScoreCache::get(const Key& key) const {
  std::lock_guard lock(mutex_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void ScoreCache::put(const Key& key, double score) {
  nlohmann::ordered_json j;
  j["expert"] = expert_name(std::get<0>(key));
  j["image_id"] = std::get<1>(key);
  j["candidate_index"] = std::get<2>(key);
  j["visual_slot"] = std::get<3>(key);
  j["score"] = score;
  std::lock_guard lock(mutex_);
  out_ << j.dump() << '\n';
  out_.flush();
  if (!out_) throw DataError("failed appending to score cache '" + path_ + "'");
  entries_[key] = score;
}

std::size_t ScoreCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

ExpertEngine::ExpertEngine(const WordVectorTable* table, ExpertConfig cfg,
                           const StopwordList* stopwords, const IdfTable* idf,
                           ExternalExpertClient* client, ScoreCache* cache)
    : table_(table),
      cfg_(std::move(cfg)),
      stopwords_(stopwords),
      idf_(idf),
      client_(client),
      cache_(cache) {
  cfg_.validate();
}

ExpertScore ExpertEngine::score(ExpertId expert, const BeamSet& beam, int candidate_index,
                                const VisualObject& visual, double prior) {
  ExpertScore out{expert, beam.image_id, candidate_index, visual.slot, 0.0};
  const auto& text = beam.candidates.at(candidate_index).text;

  if (expert == ExpertId::kSentenceExternal) {
    ScoreCache::Key key{expert, beam.image_id, candidate_index, visual.slot};
    if (cache_) {
      if (auto hit = cache_->get(key)) {
        out.score = std::clamp(*hit, 0.0, 1.0);
        return out;
      }
    }
    if (!client_) throw AdapterError("external expert enabled but no adapter is running");
    out.score = external_expert_score(text, visual.label, *client_);
    if (cache_) cache_->put(key, out.score);
    return out;
  }

  if (!table_) {
    throw DataError(std::string("expert '") + std::string(expert_name(expert)) +
                    "' needs an embedding table");
  }
  const auto tokens = tokenize(text);
  if (expert == ExpertId::kWord) {
    out.score = word_expert_score(tokens, visual, prior, *table_, cfg_, *stopwords_, idf_);
  } else {
    out.score = sentence_builtin_score(tokens, visual, *table_, *stopwords_);
  }
  return out;
}

}  // namespace caprank
