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
#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "mate/error.hpp"

namespace mate {

/// Fixed-width bit vector used for single-value hashes and row super keys.
///
/// Bit 0 is the left-most bit. Storage is inline (no allocation), so widths
/// are capped at kMaxBits; the index only ever uses 128, 256 or 512, but any
/// width in [1, kMaxBits] is accepted so small hand-written examples work.
class BitArray {
 public:
  static constexpr std::size_t kMaxBits = 512;
  static constexpr std::size_t kWords = kMaxBits / 64;

  BitArray() = default;
  explicit BitArray(std::size_t width) : width_(static_cast<uint16_t>(width)) {
    if (width == 0 || width > kMaxBits) {
      throw Error(ErrorKind::kParameter,
                  "bit array width must be in [1, 512], got " + std::to_string(width));
    }
  }

  /// Parses a string of '0'/'1' characters; the first character is bit 0.
  static BitArray from_string(std::string_view bits);

  std::size_t width() const noexcept { return width_; }

  bool test(std::size_t i) const noexcept {
    return (words_[i / 64] >> (63 - i % 64)) & 1u;
  }
  void set(std::size_t i) noexcept { words_[i / 64] |= uint64_t{1} << (63 - i % 64); }
  void reset(std::size_t i) noexcept { words_[i / 64] &= ~(uint64_t{1} << (63 - i % 64)); }

  std::size_t popcount() const noexcept {
    std::size_t n = 0;
    for (std::size_t w = 0; w < used_words(); ++w) n += std::popcount(words_[w]);
    return n;
  }
  bool none() const noexcept { return popcount() == 0; }

  BitArray& operator|=(const BitArray& other) {
    check_width(other);
    for (std::size_t w = 0; w < used_words(); ++w) words_[w] |= other.words_[w];
    return *this;
  }
  BitArray& operator&=(const BitArray& other) {
    check_width(other);
    for (std::size_t w = 0; w < used_words(); ++w) words_[w] &= other.words_[w];
    return *this;
  }
  friend BitArray operator|(BitArray a, const BitArray& b) { return a |= b; }
  friend BitArray operator&(BitArray a, const BitArray& b) { return a &= b; }

  /// True iff every bit set in `sub` is also set here, i.e. sub | *this == *this.
  bool covers(const BitArray& sub) const {
    check_width(sub);
    for (std::size_t w = 0; w < used_words(); ++w) {
      if ((sub.words_[w] & ~words_[w]) != 0) return false;
    }
    return true;
  }

  friend bool operator==(const BitArray& a, const BitArray& b) noexcept {
    return a.width_ == b.width_ && a.words_ == b.words_;
  }

  std::string to_string() const;

  /// Serialized form: width/8 bytes (rounded up), bit 0 = MSB of byte 0.
  std::size_t byte_size() const noexcept { return (width_ + 7) / 8; }
  void write_bytes(std::span<uint8_t> out) const;
  static BitArray from_bytes(std::size_t width, std::span<const uint8_t> in);

 private:
  std::size_t used_words() const noexcept { return (width_ + 63) / 64; }
  void check_width(const BitArray& other) const {
    if (other.width_ != width_) {
      throw Error(ErrorKind::kParameter, "bit array width mismatch: " +
                                             std::to_string(width_) + " vs " +
                                             std::to_string(other.width_));
    }
  }

  // Bits past width_ are always zero, so word-wise equality is exact.
  std::array<uint64_t, kWords> words_{};
  uint16_t width_ = 0;
};

/// Circular left rotation of bits [start, start + len) by `amount` (mod len).
/// Bits outside the region are untouched.
BitArray rotate_region(const BitArray& bits, std::size_t start, std::size_t len,
                       std::size_t amount);

}  // namespace mate
