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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace caprank {

// Lowercase caption tokens. Every token is non-empty and free of whitespace.
using Tokens = std::vector<std::string>;

// Splits on every maximal run of non-alphanumeric ASCII characters and
// lowercases ASCII letters. Bytes >= 0x80 are kept inside tokens, so UTF-8
// letters survive intact (they are not case-folded).
Tokens tokenize(std::string_view text);

std::string join(std::span<const std::string> tokens, char sep = ' ');

// n-gram multiset. Keys are the n tokens joined by a single space, which is
// unambiguous because tokens never contain whitespace.
using NgramCounts = std::map<std::string, int>;

// Throws std::invalid_argument when n < 1.
NgramCounts ngrams(std::span<const std::string> tokens, int n);

class StopwordList {
 public:
  // The built-in English list (resources/stopwords_en.txt carries the same
  // words).
  static const StopwordList& english();

  // One word per line; blank lines and lines starting with '#' are ignored.
  // Throws DataError when the file cannot be read.
  static StopwordList load(const std::string& path);

  explicit StopwordList(std::vector<std::string> words);

  bool contains(std::string_view word) const;
  std::size_t size() const { return words_.size(); }
  const std::vector<std::string>& words() const { return sorted_; }

 private:
  std::unordered_set<std::string> words_;
  std::vector<std::string> sorted_;
};

// Inverse document frequency over a caption collection:
// idf(w) = log(N / df(w)), with df floored at 1 for unseen words.
class IdfTable {
 public:
  static IdfTable build(std::span<const Tokens> documents);

  double weight(std::string_view word) const;
  std::size_t documents() const { return documents_; }

 private:
  std::unordered_map<std::string, double> idf_;
  double unseen_ = 0.0;
  std::size_t documents_ = 0;
};

struct Keyphrase {
  Tokens words;  // one or two tokens
  double salience = 0.0;
};

// Heuristic keyphrase extractor. Candidates are distinct non-stopword
// unigrams and adjacent non-stopword bigrams. Salience is the idf weight
// when a table is given (mean over the words of a bigram), otherwise the
// character length (mean for bigrams). Sorted by salience descending, then
// leftmost position, then unigrams before bigrams. Returns at most m.
std::vector<Keyphrase> extract_keyphrases(std::span<const std::string> caption,
                                          const IdfTable* idf, int m,
                                          const StopwordList& stopwords =
                                              StopwordList::english());

}  // namespace caprank
