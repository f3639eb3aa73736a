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
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace caprank {

// Immutable token -> vector table loaded from the standard whitespace
// separated text format (GloVe, word2vec text without header line).
class WordVectorTable {
 public:
  WordVectorTable() = default;
  WordVectorTable(std::size_t dim, std::vector<std::string> tokens,
                  std::vector<float> data);

  std::size_t dim() const { return dim_; }
  std::size_t vocab_size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  // Empty span when the token is out of vocabulary.
  std::span<const float> lookup(std::string_view token) const;
  bool contains(std::string_view token) const { return !lookup(token).empty(); }

 private:
  std::size_t dim_ = 0;
  std::vector<std::string> tokens_;
  std::vector<float> data_;  // row-major, vocab_size x dim
  std::unordered_map<std::string, std::size_t> index_;
};

// Parses the text format. The first line fixes the dimension; every later
// line must match it (DataError naming the line otherwise). A repeated token
// replaces the earlier vector and logs a warning. With a filter, only listed
// tokens are kept.
WordVectorTable load_vectors(const std::string& path,
                             const std::unordered_set<std::string>* vocab_filter = nullptr);

// Binary snapshot of a (usually filtered) table.
// Layout, little-endian: "CPRKEMB\0" magic, u32 version (=1), u32 dim,
// u64 count, then per entry u32 byte length, token bytes, dim x f32.
inline constexpr std::uint32_t kEmbeddingCacheVersion = 1;
void write_embedding_cache(const WordVectorTable& table, const std::string& path);
WordVectorTable read_embedding_cache(const std::string& path);

// dot(a,b) / (|a||b|), clamped to [-1, 1]; 0 when either norm is 0.
// Throws std::invalid_argument on length mismatch or empty input.
double cosine(std::span<const double> a, std::span<const double> b);

// Mean of the in-vocabulary token vectors; nullopt when none is known.
std::optional<std::vector<double>> phrase_vector(std::span<const std::string> phrase,
                                                 const WordVectorTable& table);

// Cosine of the two phrase vectors clamped to [0, 1]; 0 when either side is
// entirely out of vocabulary.
double word_similarity(std::span<const std::string> a, std::span<const std::string> b,
                       const WordVectorTable& table);

}  // namespace caprank
