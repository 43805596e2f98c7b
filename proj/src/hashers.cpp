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

#include "mate/hashers.hpp"

#include <cmath>
#include <cstring>

namespace mate {

uint64_t uniform_hash64(std::string_view data, uint64_t seed) {
  constexpr uint64_t m = 0xc6a4a7935bd1e995ULL;
  constexpr int r = 47;
  uint64_t h = seed ^ (data.size() * m);

  const std::size_t blocks = data.size() / 8;
  for (std::size_t i = 0; i < blocks; ++i) {
    uint64_t k;
    std::memcpy(&k, data.data() + 8 * i, 8);
    k *= m;
    k ^= k >> r;
    k *= m;
    h ^= k;
    h *= m;
  }
  const auto* tail = reinterpret_cast<const unsigned char*>(data.data() + 8 * blocks);
  switch (data.size() & 7) {
    case 7: h ^= uint64_t{tail[6]} << 48; [[fallthrough]];
    case 6: h ^= uint64_t{tail[5]} << 40; [[fallthrough]];
    case 5: h ^= uint64_t{tail[4]} << 32; [[fallthrough]];
    case 4: h ^= uint64_t{tail[3]} << 24; [[fallthrough]];
    case 3: h ^= uint64_t{tail[2]} << 16; [[fallthrough]];
    case 2: h ^= uint64_t{tail[1]} << 8; [[fallthrough]];
    case 1: h ^= uint64_t{tail[0]}; h *= m;
  }
  h ^= h >> r;
  h *= m;
  h ^= h >> r;
  return h;
}

namespace {

uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Seeds for the i-th member of a hash family.
uint64_t family_seed(uint64_t seed, uint64_t i) {
  uint64_t s = seed + i;
  return splitmix64(s);
}

}  // namespace

std::string_view to_token(HasherKind kind) {
  switch (kind) {
    case HasherKind::kXash: return "xash";
    case HasherKind::kBloom: return "bf";
    case HasherKind::kLessHashingBloom: return "lhbf";
    case HasherKind::kHashTable: return "ht";
    case HasherKind::kUniform: return "uniform";
  }
  return "?";
}

HasherKind parse_hasher_token(std::string_view token) {
  for (auto kind : {HasherKind::kXash, HasherKind::kBloom, HasherKind::kLessHashingBloom,
                    HasherKind::kHashTable, HasherKind::kUniform}) {
    if (to_token(kind) == token) return kind;
  }
  throw Error(ErrorKind::kInvalidInput,
              "unknown hasher '" + std::string(token) + "' (expected xash|bf|lhbf|ht|uniform)");
}

std::size_t optimal_bf_hash_count(std::size_t bits, double avg_columns) {
  if (!(avg_columns >= 1.0)) {
    throw Error(ErrorKind::kParameter, "average column count must be >= 1");
  }
  const double h = std::round(static_cast<double>(bits) / avg_columns * std::log(2.0));
  return std::max<std::size_t>(1, static_cast<std::size_t>(h));
}

double bloom_false_positive_rate(std::size_t bits, double values, std::size_t hash_count) {
  const double h = static_cast<double>(hash_count);
  return std::pow(1.0 - std::exp(-values * h / static_cast<double>(bits)), h);
}

std::vector<std::size_t> lhbf_positions(uint64_t h1, uint64_t h2, std::size_t hash_count,
                                        std::size_t bits) {
  std::vector<std::size_t> out;
  out.reserve(hash_count);
  const uint64_t a = h1 % bits;
  const uint64_t b = h2 % bits;
  for (std::size_t i = 0; i < hash_count; ++i) out.push_back((a + i * b) % bits);
  return out;
}

BitArray bloom_hash(std::string_view value, std::size_t bits, std::size_t hash_count,
                    uint64_t seed) {
  BitArray out(bits);
  for (std::size_t i = 0; i < hash_count; ++i) {
    out.set(uniform_hash64(value, family_seed(seed, i)) % bits);
  }
  return out;
}

BitArray lhbf_hash(std::string_view value, std::size_t bits, std::size_t hash_count,
                   uint64_t seed) {
  BitArray out(bits);
  const uint64_t h1 = uniform_hash64(value, family_seed(seed, 0));
  const uint64_t h2 = uniform_hash64(value, family_seed(seed, 1));
  for (std::size_t p : lhbf_positions(h1, h2, hash_count, bits)) out.set(p);
  return out;
}

BitArray ht_hash(std::string_view value, std::size_t bits, uint64_t seed) {
  return bloom_hash(value, bits, 1, seed);
}

BitArray uniform_hash(std::string_view value, std::size_t bits, uint64_t seed) {
  BitArray out(bits);
  uint64_t state = uniform_hash64(value, seed);
  for (std::size_t base = 0; base < bits; base += 64) {
    const uint64_t word = splitmix64(state);
    for (std::size_t i = 0; i < 64 && base + i < bits; ++i) {
      if ((word >> (63 - i)) & 1u) out.set(base + i);
    }
  }
  return out;
}

HasherConfig HasherConfig::for_corpus(HasherKind kind, std::size_t bits, const CorpusStats& stats,
                                      uint64_t seed) {
  HasherConfig c;
  c.kind = kind;
  c.bits = bits;
  c.seed = seed;
  if (kind == HasherKind::kXash) {
    c.xash = xash::compute_params(bits, std::max<std::size_t>(1, stats.unique_value_count));
  } else if (kind == HasherKind::kBloom || kind == HasherKind::kLessHashingBloom) {
    c.hash_count = optimal_bf_hash_count(bits, stats.avg_columns);
  }
  return c;
}

namespace {

class XashHasher final : public RowValueHasher {
 public:
  explicit XashHasher(HasherConfig c) : RowValueHasher(std::move(c)) {
    if (config().xash.bits != config().bits) {
      throw Error(ErrorKind::kParameter, "xash params width differs from hasher width");
    }
  }
  std::string_view name() const override { return "xash"; }
  BitArray hash(const NormalizedValue& v) const override {
    return xash::hash(v, config().xash, config().ranking, config().components);
  }
};

class BloomHasher final : public RowValueHasher {
 public:
  explicit BloomHasher(HasherConfig c) : RowValueHasher(std::move(c)) {}
  std::string_view name() const override { return "bf"; }
  BitArray hash(const NormalizedValue& v) const override {
    return bloom_hash(v.text, bits(), config().hash_count, config().seed);
  }
};

class LessHashingBloomHasher final : public RowValueHasher {
 public:
  explicit LessHashingBloomHasher(HasherConfig c) : RowValueHasher(std::move(c)) {}
  std::string_view name() const override { return "lhbf"; }
  BitArray hash(const NormalizedValue& v) const override {
    return lhbf_hash(v.text, bits(), config().hash_count, config().seed);
  }
};

class HashTableHasher final : public RowValueHasher {
 public:
  explicit HashTableHasher(HasherConfig c) : RowValueHasher(std::move(c)) {}
  std::string_view name() const override { return "ht"; }
  BitArray hash(const NormalizedValue& v) const override {
    return ht_hash(v.text, bits(), config().seed);
  }
};

class UniformHasher final : public RowValueHasher {
 public:
  explicit UniformHasher(HasherConfig c) : RowValueHasher(std::move(c)) {}
  std::string_view name() const override { return "uniform"; }
  BitArray hash(const NormalizedValue& v) const override {
    return uniform_hash(v.text, bits(), config().seed);
  }
};

}  // namespace

std::unique_ptr<RowValueHasher> make_hasher(const HasherConfig& config) {
  if (config.bits == 0 || config.bits > BitArray::kMaxBits) {
    throw Error(ErrorKind::kParameter, "unsupported hash width " + std::to_string(config.bits));
  }
  switch (config.kind) {
    case HasherKind::kXash: return std::make_unique<XashHasher>(config);
    case HasherKind::kBloom:
    case HasherKind::kLessHashingBloom:
      if (config.hash_count < 1 || config.hash_count > config.bits) {
        throw Error(ErrorKind::kParameter, "hash count must be in [1, bits]");
      }
      if (config.kind == HasherKind::kBloom) return std::make_unique<BloomHasher>(config);
      return std::make_unique<LessHashingBloomHasher>(config);
    case HasherKind::kHashTable: return std::make_unique<HashTableHasher>(config);
    case HasherKind::kUniform: return std::make_unique<UniformHasher>(config);
  }
  throw Error(ErrorKind::kParameter, "unknown hasher kind");
}

}  // namespace mate
