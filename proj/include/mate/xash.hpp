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

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include "mate/bit_array.hpp"
#include "mate/corpus.hpp"

namespace mate::xash {

inline constexpr std::size_t kAlphabetSize = 37;

/// Segment order of the character region: digits, then a-z, then space.
inline constexpr std::string_view kAlphabet = "0123456789abcdefghijklmnopqrstuvwxyz ";

/// Alphabet index of `c`, or nullopt for characters that never become features.
constexpr std::optional<std::size_t> alphabet_index(char c) {
  if (c >= '0' && c <= '9') return static_cast<std::size_t>(c - '0');
  if (c >= 'a' && c <= 'z') return static_cast<std::size_t>(c - 'a' + 10);
  if (c == ' ') return 36;
  return std::nullopt;
}

/// Total order over the alphabet, most frequent first. The same ranking must
/// be used to build an index and to query it; `digest()` identifies it.
class FrequencyRanking {
 public:
  /// English-text ordering followed by the digits.
  static const FrequencyRanking& english();
  /// `order` must be a permutation of kAlphabet.
  static FrequencyRanking from_order(std::string_view order);
  /// JSON array of 37 one-character strings, most frequent first.
  static FrequencyRanking load_json(const std::filesystem::path& path);

  /// 0 = most frequent, 36 = least frequent.
  std::size_t rank(std::size_t alphabet_idx) const { return rank_[alphabet_idx]; }
  const std::string& order() const noexcept { return order_; }
  uint64_t digest() const noexcept { return digest_; }

  friend bool operator==(const FrequencyRanking& a, const FrequencyRanking& b) {
    return a.order_ == b.order_;
  }

 private:
  std::string order_;
  std::array<uint8_t, kAlphabetSize> rank_{};
  uint64_t digest_ = 0;
};

/// Bit layout constants for one hash width.
struct Params {
  std::size_t bits = 128;          // |a|
  std::size_t ones_budget = 2;     // alpha: one length bit + (alpha - 1) character bits
  std::size_t segment_width = 3;   // beta: bits per alphabet character
  std::size_t length_bits = 17;    // |a_l|: width of the left-most length segment

  std::size_t char_region_bits() const { return kAlphabetSize * segment_width; }

  friend bool operator==(const Params&, const Params&) = default;
};

/// Smallest alpha >= 2 with C(bits, alpha) > unique_values, and the largest
/// beta with 37 * beta < bits. Throws kParameter for unsupported widths, for
/// unique_values == 0, or when no alpha <= bits qualifies.
Params compute_params(std::size_t bits, uint64_t unique_values);

/// Same layout as compute_params but with a caller-chosen ones budget.
Params params_with_budget(std::size_t bits, std::size_t ones_budget);

/// C(n, k), saturated at UINT64_MAX.
uint64_t binomial_saturated(uint64_t n, uint64_t k);

/// Average 1-based location of a character, kept as an exact fraction.
struct Location {
  uint64_t position_sum = 0;
  uint64_t occurrences = 0;

  friend bool operator==(const Location&, const Location&) = default;
};

struct Feature {
  char character = 0;
  Location location;

  friend bool operator==(const Feature&, const Feature&) = default;
};

struct FeatureSet {
  std::vector<Feature> selected;  // least frequent first
  std::size_t value_length = 0;
};

/// Picks up to alpha - 1 distinct in-alphabet characters of `value`, least
/// frequent (by `ranking`) first, with their mean positions.
FeatureSet select_features(const NormalizedValue& value, const Params& params,
                           const FrequencyRanking& ranking = FrequencyRanking::english());

/// ceil(location * beta / length), computed on integers. Result is in [1, beta].
std::size_t position_bit(const Location& location, std::size_t length, std::size_t beta);

/// Which parts of the layout are emitted; used by the component ablation.
struct Components {
  bool length = true;
  bool characters = true;
  bool positions = true;  // without it every character uses the first bit of its segment
  bool rotation = true;

  static Components full() { return {}; }
  friend bool operator==(const Components&, const Components&) = default;
};

/// Hashes one normalized value.
///
/// Layout, left to right: the length segment (|a_l| bits, one bit at
/// l_v mod |a_l|), then 37 character segments of beta bits each in alphabet
/// order. Each selected character sets one bit inside its segment at its
/// relative position. Finally the character region, taken as a ring of
/// 37 * beta bits, is rotated left by l_v.
BitArray hash(const NormalizedValue& value, const Params& params,
              const FrequencyRanking& ranking = FrequencyRanking::english(),
              const Components& components = Components::full());

}  // namespace mate::xash
