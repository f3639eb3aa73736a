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

#include "caprank/text.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "caprank/error.hpp"

namespace caprank {

namespace {

#include "stopwords_en.inc"

bool is_word_byte(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
         (c >= 'A' && c <= 'Z') || c >= 0x80;
}

std::vector<std::string> parse_word_list(std::istream& in) {
  std::vector<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    auto toks = tokenize(line.starts_with('#') ? std::string_view{} : line);
    for (auto& t : toks) words.push_back(std::move(t));
  }
  return words;
}

}  // namespace

Tokens tokenize(std::string_view text) {
  Tokens out;
  std::string cur;
  for (unsigned char c : text) {
    if (is_word_byte(c)) {
      cur.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a')
                                         : static_cast<char>(c));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::string join(std::span<const std::string> tokens, char sep) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(sep);
    out += tokens[i];
  }
  return out;
}

NgramCounts ngrams(std::span<const std::string> tokens, int n) {
  if (n < 1) throw std::invalid_argument("ngrams: n must be >= 1");
  NgramCounts counts;
  const auto len = static_cast<std::size_t>(n);
  for (std::size_t i = 0; i + len <= tokens.size(); ++i) {
    ++counts[join(tokens.subspan(i, len))];
  }
  return counts;
}

const StopwordList& StopwordList::english() {
  static const StopwordList list = [] {
    std::istringstream in{std::string(kEnglishStopwords)};
    return StopwordList(parse_word_list(in));
  }();
  return list;
}

StopwordList StopwordList::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read stopword list '" + path + "'");
  return StopwordList(parse_word_list(in));
}

StopwordList::StopwordList(std::vector<std::string> words)
    : words_(words.begin(), words.end()), sorted_(words_.begin(), words_.end()) {
  std::sort(sorted_.begin(), sorted_.end());
}

bool StopwordList::contains(std::string_view word) const {
  return words_.find(std::string(word)) != words_.end();
}

IdfTable IdfTable::build(std::span<const Tokens> documents) {
  std::unordered_map<std::string, std::size_t> df;
  for (const auto& doc : documents) {
    std::unordered_set<std::string_view> seen(doc.begin(), doc.end());
    for (auto w : seen) ++df[std::string(w)];
  }
  IdfTable table;
  table.documents_ = documents.size();
  const double n = static_cast<double>(documents.size());
  table.unseen_ = n > 0 ? std::log(n) : 0.0;
  for (const auto& [word, count] : df) {
    table.idf_.emplace(word, std::log(n / static_cast<double>(count)));
  }
  return table;
}

double IdfTable::weight(std::string_view word) const {
  auto it = idf_.find(std::string(word));
  return it == idf_.end() ? unseen_ : it->second;
}

std::vector<Keyphrase> extract_keyphrases(std::span<const std::string> caption,
                                          const IdfTable* idf, int m,
                                          const StopwordList& stopwords) {
  if (m < 1) throw std::invalid_argument("extract_keyphrases: m must be >= 1");

  auto word_salience = [&](const std::string& w) {
    return idf ? idf->weight(w) : static_cast<double>(w.size());
  };

  struct Candidate {
    Keyphrase phrase;
    std::size_t position;
  };
  std::vector<Candidate> candidates;
  std::unordered_set<std::string> seen;

  for (std::size_t i = 0; i < caption.size(); ++i) {
    if (stopwords.contains(caption[i])) continue;
    if (seen.insert(caption[i]).second) {
      candidates.push_back({{{caption[i]}, word_salience(caption[i])}, i});
    }
    if (i + 1 < caption.size() && !stopwords.contains(caption[i + 1])) {
      std::string key = caption[i] + ' ' + caption[i + 1];
      if (seen.insert(key).second) {
        double s = 0.5 * (word_salience(caption[i]) + word_salience(caption[i + 1]));
        candidates.push_back({{{caption[i], caption[i + 1]}, s}, i});
      }
    }
  }

  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) {
                     if (a.phrase.salience != b.phrase.salience)
                       return a.phrase.salience > b.phrase.salience;
                     if (a.position != b.position) return a.position < b.position;
                     return a.phrase.words.size() < b.phrase.words.size();
                   });

  std::vector<Keyphrase> out;
  for (auto& c : candidates) {
    if (out.size() == static_cast<std::size_t>(m)) break;
    out.push_back(std::move(c.phrase));
  }
  return out;
}

}  // namespace caprank
