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

#include "caprank/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "caprank/error.hpp"
#include "caprank/log.hpp"

namespace caprank {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

bool blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(),
                     [](unsigned char c) { return c == ' ' || c == '\t' || c == '\r'; });
}

std::string trim(const std::string& s) {
  const char* ws = " \t\r\n\f\v";
  auto b = s.find_first_not_of(ws);
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

json parse_object(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw DataError("record is not a JSON object");
  return j;
}

const json& field(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw DataError(std::string("missing field \"") + key + "\"");
  return *it;
}

std::string string_field(const json& obj, const char* key) {
  const auto& v = field(obj, key);
  if (!v.is_string()) throw DataError(std::string("field \"") + key + "\" must be a string");
  return v.get<std::string>();
}

double number_field(const json& obj, const char* key) {
  const auto& v = field(obj, key);
  if (!v.is_number()) throw DataError(std::string("field \"") + key + "\" must be a number");
  double d = v.get<double>();
  if (!std::isfinite(d)) throw DataError(std::string("field \"") + key + "\" is not finite");
  return d;
}

int int_field(const json& obj, const char* key) {
  const auto& v = field(obj, key);
  if (!v.is_number_integer()) {
    throw DataError(std::string("field \"") + key + "\" must be an integer");
  }
  return v.get<int>();
}

const json& array_field(const json& obj, const char* key) {
  const auto& v = field(obj, key);
  if (!v.is_array()) throw DataError(std::string("field \"") + key + "\" must be an array");
  return v;
}

std::string image_id_field(const json& obj) {
  auto id = string_field(obj, "image_id");
  if (id.empty()) throw DataError("empty image_id");
  return id;
}

// Calls parse(line) for every non-blank line, prefixing errors with
// path:line, and rejects duplicate image ids.
template <typename T, typename Parse>
std::vector<T> read_jsonl(const std::string& path, Parse parse) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::vector<T> out;
  std::unordered_map<std::string, std::size_t> first_line;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    try {
      T rec = parse(line);
      auto [it, inserted] = first_line.emplace(rec.image_id, line_no);
      if (!inserted) {
        throw DataError("duplicate image_id \"" + rec.image_id + "\" (first seen at line " +
                        std::to_string(it->second) + ")");
      }
      out.push_back(std::move(rec));
    } catch (const DataError& e) {
      throw DataError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace

const VisualObject* VisualContext::find_slot(int slot) const {
  for (const auto& o : objects) {
    if (o.slot == slot) return &o;
  }
  return nullptr;
}

std::optional<std::string> check_invariants(const RerankResult& r) {
  const auto n = r.entries.size();
  if (n == 0) return "no entries";
  std::vector<int> rank_seen(n, 0);
  double norm_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& e = r.entries[i];
    if (e.candidate_index != static_cast<int>(i)) return "entries out of candidate order";
    if (!(e.fused_score >= 0.0) || !std::isfinite(e.fused_score)) return "fused_score < 0";
    if (!(e.normalized_score >= 0.0 && e.normalized_score <= 1.0)) {
      return "normalized_score outside [0,1]";
    }
    if (!(e.original_prob >= 0.0 && e.original_prob <= 1.0)) return "original_prob outside [0,1]";
    if (!(e.delta >= -1.0 && e.delta <= 1.0)) return "delta outside [-1,1]";
    if (e.new_rank < 0 || e.new_rank >= static_cast<int>(n) || rank_seen[e.new_rank]++) {
      return "new_rank is not a permutation";
    }
    norm_sum += e.normalized_score;
  }
  if (std::abs(norm_sum - 1.0) > 1e-9) return "normalized scores do not sum to 1";
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const auto& a = r.entries[i];
      const auto& b = r.entries[j];
      if (a.new_rank < b.new_rank &&
          (a.fused_score < b.fused_score ||
           (a.fused_score == b.fused_score && a.candidate_index > b.candidate_index))) {
        return "new_rank inconsistent with fused_score order";
      }
    }
  }
  if (r.winner_index < 0 || r.winner_index >= static_cast<int>(n) ||
      r.entries[r.winner_index].new_rank != 0) {
    return "winner_index does not hold new_rank 0";
  }
  return std::nullopt;
}

BeamSet parse_beam_line(const std::string& line, int beam_cap) {
  if (beam_cap < 1) throw std::invalid_argument("beam_cap must be >= 1");
  auto j = parse_object(line);
  BeamSet beam;
  beam.image_id = image_id_field(j);
  const auto& cands = array_field(j, "candidates");
  if (cands.empty()) throw DataError("beam has no candidates");

  std::size_t with_logprob = 0;
  for (std::size_t i = 0; i < cands.size(); ++i) {
    const auto& c = cands[i];
    if (!c.is_object()) throw DataError("candidate " + std::to_string(i) + " is not an object");
    CaptionCandidate cand;
    cand.text = string_field(c, "text");
    if (trim(cand.text).empty()) {
      throw DataError("candidate " + std::to_string(i) + " has empty text");
    }
    if (c.contains("logprob") && !c["logprob"].is_null()) {
      double lp = number_field(c, "logprob");
      if (lp > 0.0) throw DataError("candidate " + std::to_string(i) + " has logprob > 0");
      cand.logprob = lp;
      ++with_logprob;
    }
    cand.beam_rank = static_cast<int>(i);
    if (static_cast<int>(i) < beam_cap) beam.candidates.push_back(std::move(cand));
  }
  if (with_logprob != 0 && with_logprob != cands.size()) {
    throw DataError("logprob present on some candidates but not all");
  }
  return beam;
}

VisualContext parse_visual_line(const std::string& line, int max_objects) {
  if (max_objects < 1) throw std::invalid_argument("max_objects must be >= 1");
  auto j = parse_object(line);
  VisualContext ctx;
  ctx.image_id = image_id_field(j);
  const auto& objs = array_field(j, "objects");
  if (objs.empty()) throw DataError("visual context has no objects");
  for (std::size_t i = 0; i < objs.size(); ++i) {
    const auto& o = objs[i];
    if (!o.is_object()) throw DataError("object " + std::to_string(i) + " is not an object");
    VisualObject obj;
    obj.label = string_field(o, "label");
    if (trim(obj.label).empty()) throw DataError("object " + std::to_string(i) + " has empty label");
    obj.confidence = number_field(o, "confidence");
    if (!(obj.confidence > 0.0 && obj.confidence <= 1.0)) {
      throw DataError("object " + std::to_string(i) + " confidence " +
                      std::to_string(obj.confidence) + " outside (0, 1]");
    }
    ctx.objects.push_back(std::move(obj));
  }
  std::stable_sort(ctx.objects.begin(), ctx.objects.end(),
                   [](const VisualObject& a, const VisualObject& b) {
                     return a.confidence > b.confidence;
                   });
  if (ctx.objects.size() > static_cast<std::size_t>(max_objects)) ctx.objects.resize(max_objects);
  for (std::size_t i = 0; i < ctx.objects.size(); ++i) ctx.objects[i].slot = static_cast<int>(i) + 1;
  return ctx;
}

ReferenceSet parse_reference_line(const std::string& line) {
  auto j = parse_object(line);
  ReferenceSet refs;
  refs.image_id = image_id_field(j);
  const auto& arr = array_field(j, "references");
  if (arr.empty()) throw DataError("references array is empty");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_string()) throw DataError("reference " + std::to_string(i) + " is not a string");
    auto s = arr[i].get<std::string>();
    if (trim(s).empty()) throw DataError("reference " + std::to_string(i) + " is empty");
    refs.references.push_back(std::move(s));
  }
  return refs;
}

RerankResult parse_rerank_line(const std::string& line) {
  auto j = parse_object(line);
  RerankResult r;
  r.image_id = image_id_field(j);
  const auto winner = string_field(j, "winner");
  const auto& entries = array_field(j, "entries");
  for (const auto& e : entries) {
    if (!e.is_object()) throw DataError("entry is not an object");
    RerankEntry entry;
    entry.candidate_index = int_field(e, "candidate_index");
    entry.text = string_field(e, "text");
    entry.fused_score = number_field(e, "fused_score");
    entry.normalized_score = number_field(e, "normalized_score");
    entry.original_prob = number_field(e, "original_prob");
    entry.delta = number_field(e, "delta");
    entry.new_rank = int_field(e, "new_rank");
    r.entries.push_back(std::move(entry));
  }
  std::sort(r.entries.begin(), r.entries.end(), [](const RerankEntry& a, const RerankEntry& b) {
    return a.candidate_index < b.candidate_index;
  });
  for (const auto& e : r.entries) {
    if (e.new_rank == 0) r.winner_index = e.candidate_index;
  }
  if (auto err = check_invariants(r)) throw DataError("invalid rerank record: " + *err);
  if (r.winner_text() != winner) throw DataError("\"winner\" does not match the new_rank 0 entry");
  return r;
}

std::string format_rerank_line(const RerankResult& r) {
  ordered_json j;
  j["image_id"] = r.image_id;
  j["winner"] = r.winner_text();
  auto entries = ordered_json::array();
  for (const auto& e : r.entries) {
    ordered_json o;
    o["candidate_index"] = e.candidate_index;
    o["text"] = e.text;
    o["fused_score"] = e.fused_score;
    o["normalized_score"] = e.normalized_score;
    o["original_prob"] = e.original_prob;
    o["delta"] = e.delta;
    o["new_rank"] = e.new_rank;
    entries.push_back(std::move(o));
  }
  j["entries"] = std::move(entries);
  return j.dump();
}

std::vector<BeamSet> read_beams(const std::string& path, int beam_cap) {
  return read_jsonl<BeamSet>(path, [&](const std::string& l) { return parse_beam_line(l, beam_cap); });
}

std::vector<VisualContext> read_visual(const std::string& path, int max_objects) {
  return read_jsonl<VisualContext>(
      path, [&](const std::string& l) { return parse_visual_line(l, max_objects); });
}

std::vector<ReferenceSet> read_references(const std::string& path) {
  return read_jsonl<ReferenceSet>(path, parse_reference_line);
}

std::vector<RerankResult> read_rerank_results(const std::string& path) {
  return read_jsonl<RerankResult>(path, parse_rerank_line);
}

void write_rerank_results(const std::vector<RerankResult>& results, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write '" + path + "'");
  for (const auto& r : results) out << format_rerank_line(r) << '\n';
  out.flush();
  if (!out) throw DataError("failed writing '" + path + "'");
}

JoinResult join_corpus(const std::vector<BeamSet>& beams,
                       const std::vector<VisualContext>& visual, JoinMode mode) {
  std::unordered_map<std::string_view, const VisualContext*> by_id;
  for (const auto& v : visual) by_id.emplace(v.image_id, &v);

  JoinResult result;
  for (const auto& b : beams) {
    auto it = by_id.find(b.image_id);
    if (it == by_id.end()) {
      result.skipped.push_back(b.image_id);
      continue;
    }
    result.items.push_back({b, *it->second});
  }
  if (!result.skipped.empty()) {
    if (mode == JoinMode::kStrict) {
      std::string ids;
      for (const auto& id : result.skipped) ids += (ids.empty() ? "" : ", ") + id;
      throw DataError("no visual context for " + std::to_string(result.skipped.size()) +
                      " image(s): " + ids);
    }
    logger()->warn("skipped {} image(s) with no visual context", result.skipped.size());
  }
  return result;
}

}  // namespace caprank
