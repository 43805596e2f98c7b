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

#include "mate/xash.hpp"

#include <algorithm>
#include <fstream>

#include <nlohmann/json.hpp>

#include "mate/checksum.hpp"

namespace mate::xash {

// ---------------------------------------------------------------------------
// Frequency ranking

const FrequencyRanking& FrequencyRanking::english() {
  static const FrequencyRanking ranking =
      from_order(" etaoinsrhldcumfpgwybvkxjqz0123456789");
  return ranking;
}

FrequencyRanking FrequencyRanking::from_order(std::string_view order) {
  if (order.size() != kAlphabetSize) {
    throw Error(ErrorKind::kInvalidInput, "frequency table must list exactly 37 characters");
  }
  FrequencyRanking out;
  std::array<bool, kAlphabetSize> seen{};
  for (std::size_t r = 0; r < order.size(); ++r) {
    const auto idx = alphabet_index(order[r]);
    if (!idx) {
      throw Error(ErrorKind::kInvalidInput,
                  std::string("frequency table contains '") + order[r] + "', not in alphabet");
    }
    if (seen[*idx]) {
      throw Error(ErrorKind::kInvalidInput,
                  std::string("frequency table repeats '") + order[r] + "'");
    }
    seen[*idx] = true;
    out.rank_[*idx] = static_cast<uint8_t>(r);
  }
  out.order_ = std::string(order);
  out.digest_ = fnv1a64(out.order_);
  return out;
}

FrequencyRanking FrequencyRanking::load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot read " + path.string());
  std::string order;
  try {
    const auto j = nlohmann::json::parse(in);
    if (!j.is_array()) throw Error(ErrorKind::kInvalidInput, "frequency table must be an array");
    for (const auto& e : j) {
      const auto s = e.get<std::string>();
      if (s.size() != 1) {
        throw Error(ErrorKind::kInvalidInput, "frequency table entries must be single characters");
      }
      order.push_back(s[0]);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kInvalidInput, path.string() + ": " + e.what());
  }
  return from_order(order);
}

// ---------------------------------------------------------------------------
// Parameters

uint64_t binomial_saturated(uint64_t n, uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 c = 1;
  for (uint64_t i = 1; i <= k; ++i) {
    // c * (n - k + i) / i is exact at every step.
    c = c * (n - k + i) / i;
    if (c > UINT64_MAX) return UINT64_MAX;
  }
  return static_cast<uint64_t>(c);
}

namespace {

void check_width(std::size_t bits) {
  if (bits != 128 && bits != 256 && bits != 512) {
    throw Error(ErrorKind::kParameter,
                "hash width must be 128, 256 or 512, got " + std::to_string(bits));
  }
}

Params layout(std::size_t bits) {
  Params p;
  p.bits = bits;
  p.segment_width = (bits - 1) / kAlphabetSize;
  p.length_bits = bits - kAlphabetSize * p.segment_width;
  return p;
}

}  // namespace

Params compute_params(std::size_t bits, uint64_t unique_values) {
  check_width(bits);
  if (unique_values == 0) {
    throw Error(ErrorKind::kParameter, "corpus must contain at least one unique value");
  }
  Params p = layout(bits);
  for (std::size_t alpha = 2; alpha <= bits; ++alpha) {
    // C(bits, alpha) saturates only far beyond any representable count, and
    // a saturated value already exceeds unique_values < UINT64_MAX.
    if (binomial_saturated(bits, alpha) > unique_values) {
      p.ones_budget = alpha;
      return p;
    }
  }
  throw Error(ErrorKind::kParameter, "no ones budget up to " + std::to_string(bits) +
                                         " distinguishes " + std::to_string(unique_values) +
                                         " values");
}

Params params_with_budget(std::size_t bits, std::size_t ones_budget) {
  check_width(bits);
  if (ones_budget < 2 || ones_budget > bits) {
    throw Error(ErrorKind::kParameter, "ones budget must be in [2, bits]");
  }
  Params p = layout(bits);
  p.ones_budget = ones_budget;
  return p;
}

// ---------------------------------------------------------------------------
// Features

FeatureSet select_features(const NormalizedValue& value, const Params& params,
                           const FrequencyRanking& ranking) {
  FeatureSet out;
  out.value_length = value.length;

  std::array<Location, kAlphabetSize> locations{};
  std::size_t position = 0;
  for (char c : value.text) {
    if ((static_cast<unsigned char>(c) & 0xC0) == 0x80) continue;  // UTF-8 continuation
    ++position;
    if (const auto idx = alphabet_index(c)) {
      locations[*idx].position_sum += position;
      locations[*idx].occurrences += 1;
    }
  }

  std::vector<std::size_t> present;
  for (std::size_t i = 0; i < kAlphabetSize; ++i) {
    if (locations[i].occurrences) present.push_back(i);
  }
  // Least frequent first; the ranking is total, so the character tie-break
  // only matters for rankings built from counts with equal frequencies.
  std::sort(present.begin(), present.end(), [&](std::size_t a, std::size_t b) {
    if (ranking.rank(a) != ranking.rank(b)) return ranking.rank(a) > ranking.rank(b);
    return kAlphabet[a] < kAlphabet[b];
  });
  const std::size_t take = std::min(present.size(), params.ones_budget - 1);
  out.selected.reserve(take);
  for (std::size_t i = 0; i < take; ++i) {
    out.selected.push_back({kAlphabet[present[i]], locations[present[i]]});
  }
  return out;
}

std::size_t position_bit(const Location& location, std::size_t length, std::size_t beta) {
  if (length == 0) throw Error(ErrorKind::kInvalidInput, "position of a character in an empty value");
  if (location.occurrences == 0) throw Error(ErrorKind::kInvalidInput, "character has no occurrences");
  const uint64_t num = location.position_sum * beta;
  const uint64_t den = location.occurrences * length;
  return static_cast<std::size_t>((num + den - 1) / den);
}

BitArray hash(const NormalizedValue& value, const Params& params, const FrequencyRanking& ranking,
              const Components& components) {
  BitArray out(params.bits);
  const std::size_t lv = value.length;
  if (components.length) out.set(lv % params.length_bits);
  if (!components.characters) return out;

  const std::size_t region = params.char_region_bits();
  const std::size_t shift = components.rotation ? lv % region : 0;
  for (const Feature& f : select_features(value, params, ranking).selected) {
    const std::size_t offset =
        components.positions ? position_bit(f.location, lv, params.segment_width) - 1 : 0;
    const std::size_t bit = *alphabet_index(f.character) * params.segment_width + offset;
    out.set(params.length_bits + (bit + region - shift) % region);
  }
  return out;
}

}  // namespace mate::xash
