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

#include "caprank/embeddings.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "caprank/error.hpp"
#include "caprank/log.hpp"
#include "caprank/simd/kernels.hpp"

namespace caprank {

namespace {

constexpr char kCacheMagic[8] = {'C', 'P', 'R', 'K', 'E', 'M', 'B', '\0'};

static_assert(std::endian::native == std::endian::little,
              "embedding cache I/O assumes a little-endian host");

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

std::string_view next_field(std::string_view& rest) {
  std::size_t b = 0;
  while (b < rest.size() && is_space(rest[b])) ++b;
  std::size_t e = b;
  while (e < rest.size() && !is_space(rest[e])) ++e;
  auto field = rest.substr(b, e - b);
  rest.remove_prefix(e);
  return field;
}

template <typename T>
void write_pod(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T read_pod(std::ifstream& in, const std::string& path) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) {
    throw DataError("embedding cache '" + path + "' is truncated");
  }
  return v;
}

}  // namespace

WordVectorTable::WordVectorTable(std::size_t dim, std::vector<std::string> tokens,
                                 std::vector<float> data)
    : dim_(dim), tokens_(std::move(tokens)), data_(std::move(data)) {
  if (data_.size() != dim_ * tokens_.size()) {
    throw std::invalid_argument("WordVectorTable: data size does not match dim x vocab");
  }
  index_.reserve(tokens_.size());
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (!index_.emplace(tokens_[i], i).second) {
      throw std::invalid_argument("WordVectorTable: duplicate token '" + tokens_[i] + "'");
    }
  }
}

std::span<const float> WordVectorTable::lookup(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return {};
  return {data_.data() + it->second * dim_, dim_};
}

WordVectorTable load_vectors(const std::string& path,
                             const std::unordered_set<std::string>* vocab_filter) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open embeddings file '" + path + "'");

  std::size_t dim = 0;
  std::vector<std::string> tokens;
  std::vector<float> data;
  std::unordered_map<std::string, std::size_t> row_of;
  std::vector<float> row;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view rest = line;
    auto token = next_field(rest);
    if (token.empty()) continue;

    row.clear();
    for (auto field = next_field(rest); !field.empty(); field = next_field(rest)) {
      float v = 0.0f;
      auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (ec != std::errc{} || ptr != field.data() + field.size() || !std::isfinite(v)) {
        throw DataError(path + ":" + std::to_string(line_no) + ": non-numeric field '" +
                        std::string(field) + "'");
      }
      row.push_back(v);
    }
    if (dim == 0) {
      if (row.empty()) {
        throw DataError(path + ":" + std::to_string(line_no) + ": vector has no components");
      }
      dim = row.size();
    } else if (row.size() != dim) {
      throw DataError(path + ":" + std::to_string(line_no) + ": dimension " +
                      std::to_string(row.size()) + " does not match " + std::to_string(dim));
    }

    std::string key(token);
    if (vocab_filter && !vocab_filter->contains(key)) continue;
    if (auto it = row_of.find(key); it != row_of.end()) {
      logger()->warn("{}:{}: duplicate token '{}', keeping the later vector", path, line_no, key);
      std::copy(row.begin(), row.end(), data.begin() + static_cast<std::ptrdiff_t>(it->second * dim));
      continue;
    }
    row_of.emplace(key, tokens.size());
    tokens.push_back(std::move(key));
    data.insert(data.end(), row.begin(), row.end());
  }
  if (dim == 0) throw DataError("embeddings file '" + path + "' is empty");
  return WordVectorTable(dim, std::move(tokens), std::move(data));
}

void write_embedding_cache(const WordVectorTable& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write embedding cache '" + path + "'");
  out.write(kCacheMagic, sizeof kCacheMagic);
  write_pod<std::uint32_t>(out, kEmbeddingCacheVersion);
  write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(table.dim()));
  write_pod<std::uint64_t>(out, table.vocab_size());
  for (const auto& token : table.tokens()) {
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(token.size()));
    out.write(token.data(), static_cast<std::streamsize>(token.size()));
    auto vec = table.lookup(token);
    out.write(reinterpret_cast<const char*>(vec.data()),
              static_cast<std::streamsize>(vec.size() * sizeof(float)));
  }
  if (!out) throw DataError("failed writing embedding cache '" + path + "'");
}

WordVectorTable read_embedding_cache(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open embedding cache '" + path + "'");
  char magic[sizeof kCacheMagic];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kCacheMagic, sizeof magic) != 0) {
    throw DataError("'" + path + "' is not an embedding cache");
  }
  auto version = read_pod<std::uint32_t>(in, path);
  if (version != kEmbeddingCacheVersion) {
    throw DataError("embedding cache '" + path + "' has version " + std::to_string(version) +
                    ", expected " + std::to_string(kEmbeddingCacheVersion));
  }
  const auto dim = read_pod<std::uint32_t>(in, path);
  const auto count = read_pod<std::uint64_t>(in, path);
  if (dim == 0) throw DataError("embedding cache '" + path + "' has dimension 0");

  std::vector<std::string> tokens;
  std::vector<float> data;
  tokens.reserve(count);
  data.reserve(count * dim);
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto len = read_pod<std::uint32_t>(in, path);
    std::string token(len, '\0');
    std::vector<float> vec(dim);
    if (!in.read(token.data(), len) ||
        !in.read(reinterpret_cast<char*>(vec.data()),
                 static_cast<std::streamsize>(dim * sizeof(float)))) {
      throw DataError("embedding cache '" + path + "' is truncated");
    }
    tokens.push_back(std::move(token));
    data.insert(data.end(), vec.begin(), vec.end());
  }
  return WordVectorTable(dim, std::move(tokens), std::move(data));
}

double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("cosine: length mismatch (" + std::to_string(a.size()) +
                                " vs " + std::to_string(b.size()) + ")");
  }
  if (a.empty()) throw std::invalid_argument("cosine: empty vectors");
  const auto p = simd::cosine_parts(a, b);
  if (p.norm2_a == 0.0 || p.norm2_b == 0.0) return 0.0;
  const double c = p.dot / (std::sqrt(p.norm2_a) * std::sqrt(p.norm2_b));
  return std::clamp(c, -1.0, 1.0);
}

std::optional<std::vector<double>> phrase_vector(std::span<const std::string> phrase,
                                                 const WordVectorTable& table) {
  std::vector<double> sum(table.dim(), 0.0);
  std::size_t found = 0;
  for (const auto& token : phrase) {
    auto vec = table.lookup(token);
    if (vec.empty()) continue;
    simd::accumulate(sum, vec);
    ++found;
  }
  if (found == 0) return std::nullopt;
  const double n = static_cast<double>(found);
  for (auto& v : sum) v /= n;
  return sum;
}

double word_similarity(std::span<const std::string> a, std::span<const std::string> b,
                       const WordVectorTable& table) {
  auto va = phrase_vector(a, table);
  auto vb = phrase_vector(b, table);
  if (!va || !vb) return 0.0;
  return std::clamp(cosine(*va, *vb), 0.0, 1.0);
}

}  // namespace caprank
