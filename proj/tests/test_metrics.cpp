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

#include <algorithm>
#include <cmath>
#include <random>

#include "caprank/error.hpp"
#include "caprank/metrics.hpp"
#include "oracles/metric_oracles.hpp"
#include "oracles/random_corpus.hpp"
#include "test_support.hpp"

using namespace caprank;
using caprank::testing::LogCapture;

namespace {

EvalPair pair(std::string_view hyp, std::vector<std::string_view> refs, std::string id = "i") {
  EvalPair p{std::move(id), tokenize(hyp), {}};
  for (auto r : refs) p.references.push_back(tokenize(r));
  return p;
}

}  // namespace

TEST_CASE("BLEU examples") {
  std::vector<EvalPair> same{pair("a man on a field", {"a man on a field"}),
                             pair("a dog with a red ball", {"a dog with a red ball"})};
  for (double b : corpus_bleu(same)) CHECK(b == doctest::Approx(1.0));

  std::vector<EvalPair> short_hyp{pair("a b c d", {"a b c d e"})};
  CHECK(std::abs(corpus_bleu(short_hyp)[0] - 0.7788007830714049) <= 1e-6);

  std::vector<EvalPair> disjoint{pair("x y z w", {"a b c d"})};
  for (double b : corpus_bleu(disjoint)) CHECK(b == 0.0);
}

TEST_CASE("BLEU clipping and closest reference length") {
  // "the" appears once in the reference: 7 hypothesis "the" clip to 1.
  std::vector<EvalPair> clip{pair("the the the the the the the", {"the cat is on the mat", "there is a cat on the mat"})};
  CHECK(bleu_counts(clip).matches[0] == 2.0);
  CHECK(bleu_counts(clip).totals[0] == 7.0);
  // closest length ties go to the shorter reference
  std::vector<EvalPair> tie{pair("a b c d", {"a b c", "a b c d e"})};
  CHECK(bleu_counts(tie).reference_length == 3.0);
}

TEST_CASE("BLEU add1 smoothing only touches n >= 2") {
  std::vector<EvalPair> p{pair("a b x y", {"a b c d"})};
  auto plain = corpus_bleu(p);
  auto smooth = corpus_bleu(p, BleuSmoothing::kAdd1);
  CHECK(plain[0] == doctest::Approx(0.5));
  CHECK(smooth[0] == doctest::Approx(0.5));
  CHECK(plain[2] == 0.0);
  // p2 = (1+1)/(3+1), p3 = (0+1)/(2+1)
  CHECK(smooth[2] == doctest::Approx(std::cbrt(0.5 * 0.5 * (1.0 / 3.0))));
}

TEST_CASE("ROUGE-L examples") {
  CHECK(rouge_l_pair(pair("a man on a field", {"a man on a field"})) == doctest::Approx(1.0));
  CHECK(std::abs(rouge_l_pair(pair("a b c", {"a c"})) - 0.8299319727891156) <= 1e-4);
  CHECK(rouge_l_pair(pair("a b c", {"x y"})) == 0.0);
  CHECK(rouge_l_pair(pair("a b c", {"x y", "a b c"})) == doctest::Approx(1.0));
  CHECK(rouge_l_pair(pair("", {"a b"})) == 0.0);
  auto a = tokenize("a b c b d a b");
  auto b = tokenize("b d c a b a");
  CHECK(lcs_length(a, b) == 4);
}

TEST_CASE("CIDEr examples") {
  std::vector<EvalPair> distinct{pair("a man on a field", {"a man on a field"}, "1"),
                                 pair("dog with red ball", {"dog with red ball"}, "2"),
                                 pair("cat sits near window", {"cat sits near window"}, "3")};
  CHECK(cider(distinct) == doctest::Approx(10.0));

  std::vector<EvalPair> disjoint{pair("x y z", {"a b c"}, "1"), pair("u v w", {"d e f"}, "2")};
  CHECK(cider(disjoint) == 0.0);

  LogCapture log;
  std::vector<EvalPair> single{pair("a man", {"a man"})};
  CHECK(cider(single) == 0.0);
  CHECK(log.contains("single-image corpus"));
}

TEST_CASE("CIDEr ignores duplicated reference lists") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 50; ++t) {
    auto c = caprank::testing::random_corpus(rng);
    auto doubled = c.pairs;
    for (auto& p : doubled) {
      auto copy = p.references;
      p.references.insert(p.references.end(), copy.begin(), copy.end());
    }
    REQUIRE(std::abs(cider(doubled) - cider(c.pairs)) <= 1e-12);
  }
}

TEST_CASE("metrics match the naive oracles on random corpora") {
  std::mt19937_64 rng(20260101);
  for (int t = 0; t < 200; ++t) {
    auto c = caprank::testing::random_corpus(rng);
    const auto got = corpus_bleu(c.pairs);
    const auto want = oracle::bleu(c.oracle_pairs);
    for (int n = 0; n < 4; ++n) {
      REQUIRE(std::abs(got[n] - want[n]) <= 1e-9);
      REQUIRE(got[n] >= 0.0);
      REQUIRE(got[n] <= 1.0);
    }
    REQUIRE(std::abs(rouge_l(c.pairs) - oracle::rouge_l(c.oracle_pairs)) <= 1e-9);
    if (c.pairs.size() > 1) {
      const double ci = cider(c.pairs);
      REQUIRE(std::abs(ci - oracle::cider(c.oracle_pairs)) <= 1e-9);
      REQUIRE(ci >= 0.0);
      REQUIRE(ci <= 10.0 + 1e-9);
    }
  }
}

TEST_CASE("metrics are invariant to pair and reference order") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 100; ++t) {
    auto c = caprank::testing::random_corpus(rng);
    auto shuffled = c.pairs;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    for (auto& p : shuffled) std::shuffle(p.references.begin(), p.references.end(), rng);
    auto a = corpus_bleu(c.pairs);
    auto b = corpus_bleu(shuffled);
    for (int n = 0; n < 4; ++n) REQUIRE(std::abs(a[n] - b[n]) <= 1e-12);
    REQUIRE(std::abs(rouge_l(c.pairs) - rouge_l(shuffled)) <= 1e-12);
    REQUIRE(std::abs(cider(c.pairs) - cider(shuffled)) <= 1e-12);
  }
}

TEST_CASE("diversity examples") {
  std::vector<Tokens> one{{"a", "a", "a"}};
  auto d = diversity(one);
  CHECK(d.ttr == doctest::Approx(1.0 / 3.0));
  CHECK(d.uniq == 1.0);
  CHECK(d.wpc == 3.0);
  CHECK(d.voc == 1);

  std::vector<Tokens> two{{"a", "b"}, {"b", "c"}};
  d = diversity(two);
  CHECK(d.voc == 3);
  CHECK(d.wpc == 2.0);
  CHECK(d.uniq == 2.0);
  CHECK(d.ttr == 1.0);

  // empty captions count for wpc but not for ttr
  std::vector<Tokens> with_empty{{"a", "b"}, {}};
  d = diversity(with_empty);
  CHECK(d.wpc == 1.0);
  CHECK(d.ttr == 1.0);

  CHECK_THROWS_AS(diversity(std::vector<Tokens>{}), DataError);
  CHECK_THROWS_AS(diversity(std::vector<Tokens>{{}, {}}), DataError);
}

TEST_CASE("diversity bounds on random captions") {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 200; ++t) {
    auto c = caprank::testing::random_corpus(rng);
    std::vector<Tokens> caps;
    std::size_t total = 0;
    for (const auto& p : c.pairs) {
      caps.push_back(p.hypothesis);
      total += p.hypothesis.size();
    }
    auto d = diversity(caps);
    REQUIRE(d.voc <= total);
    REQUIRE(d.uniq <= d.wpc);
    REQUIRE(d.ttr > 0.0);
    REQUIRE(d.ttr <= 1.0);
  }
}

TEST_CASE("format_fixed6") {
  CHECK(format_fixed6(0.0) == "0.000000");
  CHECK(format_fixed6(1.0 / 128.0) == "0.007812");  // exact tie rounds to even
  CHECK(format_fixed6(0.7788007830714049) == "0.778801");
  CHECK(format_fixed6(10.0) == "10.000000");
}

TEST_CASE("report formatting") {
  std::vector<EvalPair> p{pair("a man on a field", {"a man on a field"}, "1"),
                          pair("a dog", {"a cat"}, "2")};
  auto r = evaluate(p);
  CHECK(r.n_images == 2);
  const auto csv = format_report_csv({{"winner", r}});
  CHECK(csv.rfind("metric,value\nbleu_1,", 0) == 0);
  CHECK(csv.find("\nn_images,2\n") != std::string::npos);
  const auto multi = format_report_csv({{"winner", r}, {"baseline", r}});
  CHECK(multi.find("winner.bleu_1,") != std::string::npos);
  CHECK(multi.find("baseline.cider,") != std::string::npos);
  const auto table = format_report_table({{"winner", r}, {"baseline", r}});
  CHECK(table.find("winner") != std::string::npos);
  CHECK(table.find("rouge_l") != std::string::npos);
  CHECK(format_diversity_csv(r.diversity, 2).find("voc,") != std::string::npos);
}
