// Copyright 2026 The mate Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "mate/bit_array.hpp"
#include "mate/corpus.hpp"
#include "mate/xash.hpp"

namespace mate {

inline constexpr uint64_t kDefaultSeed = 0x5EED0F3A7E5B1A5EULL;

/// Seeded 64-bit MurmurHash64A.
uint64_t uniform_hash64(std::string_view data, uint64_t seed);

enum class HasherKind { kXash, kBloom, kLessHashingBloom, kHashTable, kUniform };

/// Name tokens: xash | bf | lhbf | ht | uniform.
std::string_view to_token(HasherKind kind);
HasherKind parse_hasher_token(std::string_view token);

/// Everything needed to reconstruct a hasher bit-for-bit.
struct HasherConfig {
  HasherKind kind = HasherKind::kXash;
  std::size_t bits = 128;
  uint64_t seed = kDefaultSeed;
  std::size_t hash_count = 1;  // bf / lhbf only
  xash::Params xash;           // xash only
  xash::FrequencyRanking ranking = xash::FrequencyRanking::english();
  xash::Components components;

  /// Params derived from corpus statistics: alpha from the unique-value
  /// count for XASH, H from the average column count for the Bloom variants.
  static HasherConfig for_corpus(HasherKind kind, std::size_t bits, const CorpusStats& stats,
                                 uint64_t seed = kDefaultSeed);
};

/// Maps one normalized cell value to a fixed-width bit array.
class RowValueHasher {
 public:
  virtual ~RowValueHasher() = default;

  virtual std::string_view name() const = 0;
  virtual BitArray hash(const NormalizedValue& value) const = 0;

  std::size_t bits() const { return config_.bits; }
  const HasherConfig& config() const noexcept { return config_; }

  /// Hash of an already-normalized string.
  BitArray hash_text(std::string_view text) const {
    return hash(NormalizedValue{std::string(text), utf8_length(text)});
  }

 protected:
  explicit RowValueHasher(HasherConfig config) : config_(std::move(config)) {}

 private:
  HasherConfig config_;
};

std::unique_ptr<RowValueHasher> make_hasher(const HasherConfig& config);

/// H = max(1, round(bits / V * ln 2)).
std::size_t optimal_bf_hash_count(std::size_t bits, double avg_columns);

/// Closed-form Bloom false-positive probability (1 - e^{-V H / bits})^H.
double bloom_false_positive_rate(std::size_t bits, double values, std::size_t hash_count);

/// g_i = (h1 + i * h2) mod bits for i in [0, hash_count).
std::vector<std::size_t> lhbf_positions(uint64_t h1, uint64_t h2, std::size_t hash_count,
                                        std::size_t bits);

BitArray bloom_hash(std::string_view value, std::size_t bits, std::size_t hash_count,
                    uint64_t seed);
BitArray lhbf_hash(std::string_view value, std::size_t bits, std::size_t hash_count,
                   uint64_t seed);
BitArray ht_hash(std::string_view value, std::size_t bits, uint64_t seed);
BitArray uniform_hash(std::string_view value, std::size_t bits, uint64_t seed);

/// OR of the hashes of `values`; all-zero for an empty row.
template <typename Range>
BitArray super_key(const Range& values, const RowValueHasher& hasher) {
  BitArray key(hasher.bits());
  for (const auto& v : values) key |= hasher.hash(v);
  return key;
}

}  // namespace mate
