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

#include <doctest.h>

#include <random>

#include "caprank/corpus.hpp"
#include "caprank/error.hpp"
#include "test_support.hpp"

using namespace caprank;
using caprank::testing::LogCapture;
using caprank::testing::TempDir;

TEST_CASE("read_beams parses a single record") {
  TempDir dir;
  auto path = dir.write("b.jsonl", R"({"image_id":"i1","candidates":[{"text":"a dog","logprob":-1.2}]})" "\n");
  auto beams = read_beams(path, 20);
  REQUIRE(beams.size() == 1);
  CHECK(beams[0].image_id == "i1");
  REQUIRE(beams[0].candidates.size() == 1);
  CHECK(beams[0].candidates[0].text == "a dog");
  CHECK(beams[0].candidates[0].beam_rank == 0);
  CHECK(*beams[0].candidates[0].logprob == -1.2);
  CHECK(beams[0].has_logprobs());
}

TEST_CASE("read_beams truncates to the beam cap from the tail") {
  std::string line = R"({"image_id":"i1","candidates":[)";
  for (int i = 0; i < 25; ++i) {
    line += (i ? "," : "") + std::string(R"({"text":"caption )") + std::to_string(i) + "\"}";
  }
  line += "]}\n";
  TempDir dir;
  auto beams = read_beams(dir.write("b.jsonl", line), 20);
  REQUIRE(beams[0].candidates.size() == 20);
  for (int i = 0; i < 20; ++i) {
    CHECK(beams[0].candidates[i].beam_rank == i);
    CHECK(beams[0].candidates[i].text == "caption " + std::to_string(i));
  }
  CHECK(!beams[0].has_logprobs());
}

TEST_CASE("read_beams rejects bad records with the line number") {
  TempDir dir;
  const std::string good = R"({"image_id":"i1","candidates":[{"text":"a dog"}]})";
  auto missing_text = dir.write("a.jsonl", good + "\n" + R"({"image_id":"i2","candidates":[{"logprob":-1}]})" "\n");
  CHECK_THROWS_WITH_AS(read_beams(missing_text), doctest::Contains("a.jsonl:2:"), DataError);
  CHECK_THROWS_WITH_AS(read_beams(missing_text), doctest::Contains("\"text\""), DataError);

  auto dup = dir.write("b.jsonl", good + "\n" + good + "\n");
  CHECK_THROWS_WITH_AS(read_beams(dup), doctest::Contains("duplicate image_id"), DataError);

  auto empty_text = dir.write("c.jsonl", R"({"image_id":"i1","candidates":[{"text":"   "}]})");
  CHECK_THROWS_WITH_AS(read_beams(empty_text), doctest::Contains("empty text"), DataError);

  auto malformed = dir.write("d.jsonl", "\n{not json\n");
  CHECK_THROWS_WITH_AS(read_beams(malformed), doctest::Contains("d.jsonl:2:"), DataError);

  auto mixed = dir.write("e.jsonl", R"({"image_id":"i1","candidates":[{"text":"a","logprob":-1},{"text":"b"}]})");
  CHECK_THROWS_WITH_AS(read_beams(mixed), doctest::Contains("some candidates"), DataError);

  auto positive = dir.write("f.jsonl", R"({"image_id":"i1","candidates":[{"text":"a","logprob":0.5}]})");
  CHECK_THROWS_AS(read_beams(positive), DataError);

  auto none = dir.write("g.jsonl", R"({"image_id":"i1","candidates":[]})");
  CHECK_THROWS_AS(read_beams(none), DataError);

  CHECK_THROWS_AS(read_beams(dir.file("nope.jsonl")), DataError);
}

TEST_CASE("read_visual sorts by confidence and assigns slots") {
  TempDir dir;
  auto one = dir.write("v1.jsonl", R"({"image_id":"i1","objects":[{"label":"baseball","confidence":0.91}]})");
  auto v = read_visual(one);
  REQUIRE(v[0].objects.size() == 1);
  CHECK(v[0].objects[0].slot == 1);
  CHECK(v[0].objects[0].confidence == 0.91);

  auto unsorted = dir.write("v2.jsonl",
      R"({"image_id":"i1","objects":[{"label":"bat","confidence":0.3},{"label":"person","confidence":0.8},)"
      R"({"label":"glove","confidence":0.5},{"label":"ball","confidence":0.1}]})");
  v = read_visual(unsorted);
  REQUIRE(v[0].objects.size() == 3);  // capped at 3
  CHECK(v[0].objects[0].label == "person");
  CHECK(v[0].objects[1].label == "glove");
  CHECK(v[0].objects[2].label == "bat");
  for (int s = 1; s <= 3; ++s) CHECK(v[0].objects[s - 1].slot == s);
  CHECK(v[0].find_slot(2)->label == "glove");
  CHECK(v[0].find_slot(4) == nullptr);

  auto all = read_visual(unsorted, 10);
  CHECK(all[0].objects.size() == 4);
}

TEST_CASE("read_visual range and label checks") {
  TempDir dir;
  auto high = dir.write("a.jsonl", R"({"image_id":"i1","objects":[{"label":"dog","confidence":1.3}]})");
  CHECK_THROWS_WITH_AS(read_visual(high), doctest::Contains("outside (0, 1]"), DataError);
  auto zero = dir.write("b.jsonl", R"({"image_id":"i1","objects":[{"label":"dog","confidence":0}]})");
  CHECK_THROWS_AS(read_visual(zero), DataError);
  auto label = dir.write("c.jsonl", R"({"image_id":"i1","objects":[{"label":"","confidence":0.5}]})");
  CHECK_THROWS_WITH_AS(read_visual(label), doctest::Contains("empty label"), DataError);
  auto no_objects = dir.write("d.jsonl", R"({"image_id":"i1","objects":[]})");
  CHECK_THROWS_AS(read_visual(no_objects), DataError);
  auto no_id = dir.write("e.jsonl", R"({"image_id":"","objects":[{"label":"dog","confidence":0.5}]})");
  CHECK_THROWS_AS(read_visual(no_id), DataError);
}

TEST_CASE("read_references") {
  TempDir dir;
  auto ok = dir.write("r.jsonl", R"({"image_id":"i1","references":["a dog runs"]})");
  auto refs = read_references(ok);
  REQUIRE(refs.size() == 1);
  CHECK(refs[0].references == std::vector<std::string>{"a dog runs"});
  auto empty = dir.write("e.jsonl", R"({"image_id":"i1","references":[]})");
  CHECK_THROWS_AS(read_references(empty), DataError);
  auto dup = dir.write("d.jsonl", R"({"image_id":"i1","references":["a"]})" "\n" R"({"image_id":"i1","references":["b"]})");
  CHECK_THROWS_WITH_AS(read_references(dup), doctest::Contains("d.jsonl:2: duplicate"), DataError);
}

TEST_CASE("join_corpus strict and lenient") {
  auto beam = [](std::string id) { return BeamSet{std::move(id), {{"a dog", std::nullopt, 0}}}; };
  auto vis = [](std::string id) { return VisualContext{std::move(id), {{"dog", 0.9, 1}}}; };
  std::vector<BeamSet> beams{beam("i1"), beam("i2")};

  auto both = join_corpus(beams, {vis("i2"), vis("i1")});
  REQUIRE(both.items.size() == 2);
  CHECK(both.items[0].beam.image_id == "i1");
  CHECK(both.items[0].visual.image_id == "i1");
  CHECK(both.items[1].visual.image_id == "i2");

  CHECK_THROWS_WITH_AS(join_corpus(beams, {vis("i1")}, JoinMode::kStrict),
                       doctest::Contains("i2"), DataError);

  LogCapture log;
  auto lenient = join_corpus(beams, {vis("i1")}, JoinMode::kLenient);
  CHECK(lenient.items.size() == 1);
  CHECK(lenient.skipped == std::vector<std::string>{"i2"});
  CHECK(log.contains("skipped 1 image"));
}

namespace {

RerankResult random_result(std::mt19937_64& rng, int idx) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int n = 1 + static_cast<int>(rng() % 6);
  std::vector<double> raw(n), orig(n);
  double rs = 0, os = 0;
  for (int i = 0; i < n; ++i) {
    raw[i] = u(rng) * 1e-3;
    orig[i] = u(rng) + 1e-6;
    rs += raw[i];
    os += orig[i];
  }
  RerankResult r;
  r.image_id = "img\"" + std::to_string(idx) + "\xc3\xa9";
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return raw[a] > raw[b]; });
  for (int i = 0; i < n; ++i) {
    RerankEntry e;
    e.candidate_index = i;
    e.text = "caption \\ " + std::to_string(i);
    e.fused_score = raw[i];
    e.normalized_score = raw[i] / rs;
    e.original_prob = orig[i] / os;
    e.delta = e.normalized_score - e.original_prob;
    r.entries.push_back(e);
  }
  for (int k = 0; k < n; ++k) r.entries[order[k]].new_rank = k;
  r.winner_index = order[0];
  return r;
}

}  // namespace

TEST_CASE("rerank results survive write then read") {
  std::mt19937_64 rng(42);
  std::vector<RerankResult> results;
  for (int i = 0; i < 50; ++i) results.push_back(random_result(rng, i));
  for (const auto& r : results) REQUIRE(!check_invariants(r));

  TempDir dir;
  write_rerank_results(results, dir.file("out.jsonl"));
  auto back = read_rerank_results(dir.file("out.jsonl"));
  REQUIRE(back.size() == results.size());
  for (std::size_t i = 0; i < results.size(); ++i) {
    CHECK(back[i].image_id == results[i].image_id);
    CHECK(back[i].winner_index == results[i].winner_index);
    REQUIRE(back[i].entries.size() == results[i].entries.size());
    for (std::size_t k = 0; k < back[i].entries.size(); ++k) {
      const auto& a = back[i].entries[k];
      const auto& b = results[i].entries[k];
      CHECK(a.text == b.text);
      CHECK(a.new_rank == b.new_rank);
      CHECK(std::abs(a.fused_score - b.fused_score) <= 1e-9);
      CHECK(std::abs(a.normalized_score - b.normalized_score) <= 1e-9);
      CHECK(std::abs(a.original_prob - b.original_prob) <= 1e-9);
      CHECK(std::abs(a.delta - b.delta) <= 1e-9);
    }
  }
  // Second write is byte-identical.
  write_rerank_results(back, dir.file("again.jsonl"));
  CHECK(caprank::testing::read_file(dir.file("again.jsonl")) ==
        caprank::testing::read_file(dir.file("out.jsonl")));
}

TEST_CASE("rerank line layout is fixed") {
  RerankResult r{"i1", {{0, "a dog", 0.5, 1.0 / 3.0, 0.5, 1.0 / 3.0 - 0.5, 1},
                        {1, "a cat", 1.0, 2.0 / 3.0, 0.5, 2.0 / 3.0 - 0.5, 0}}, 1};
  const auto line = format_rerank_line(r);
  CHECK(line.rfind(R"({"image_id":"i1","winner":"a cat","entries":[{"candidate_index":0,"text":"a dog","fused_score":0.5,"normalized_score":)", 0) == 0);
  // delta keeps at least 9 significant digits
  CHECK(line.find("-0.16666666666666") != std::string::npos);
  CHECK(std::abs(parse_rerank_line(line).entries[0].delta - (1.0 / 3.0 - 0.5)) <= 1e-9);
}

TEST_CASE("empty result list writes an empty file") {
  TempDir dir;
  write_rerank_results({}, dir.file("empty.jsonl"));
  CHECK(caprank::testing::read_file(dir.file("empty.jsonl")).empty());
  CHECK(read_rerank_results(dir.file("empty.jsonl")).empty());
}

TEST_CASE("reading rerank results validates invariants") {
  TempDir dir;
  auto bad_rank = dir.write("a.jsonl",
      R"({"image_id":"i1","winner":"a","entries":[{"candidate_index":0,"text":"a","fused_score":1,"normalized_score":1,"original_prob":1,"delta":0,"new_rank":1}]})");
  CHECK_THROWS_WITH_AS(read_rerank_results(bad_rank), doctest::Contains("permutation"), DataError);
  auto bad_winner = dir.write("b.jsonl",
      R"({"image_id":"i1","winner":"zzz","entries":[{"candidate_index":0,"text":"a","fused_score":1,"normalized_score":1,"original_prob":1,"delta":0,"new_rank":0}]})");
  CHECK_THROWS_WITH_AS(read_rerank_results(bad_winner), doctest::Contains("winner"), DataError);
  auto bad_order = dir.write("c.jsonl",
      R"({"image_id":"i1","winner":"a","entries":[{"candidate_index":0,"text":"a","fused_score":0.2,"normalized_score":0.2,"original_prob":0.5,"delta":-0.3,"new_rank":0},)"
      R"({"candidate_index":1,"text":"b","fused_score":0.8,"normalized_score":0.8,"original_prob":0.5,"delta":0.3,"new_rank":1}]})");
  CHECK_THROWS_WITH_AS(read_rerank_results(bad_order), doctest::Contains("fused_score order"), DataError);
}
