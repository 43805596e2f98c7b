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

#include "mate/bit_array.hpp"

namespace mate {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidInput: return "invalid input";
    case ErrorKind::kNotFound: return "not found";
    case ErrorKind::kParameter: return "parameter error";
    case ErrorKind::kIo: return "i/o error";
    case ErrorKind::kFormat: return "format error";
    case ErrorKind::kChecksum: return "checksum error";
    case ErrorKind::kCompatibility: return "compatibility error";
    case ErrorKind::kBudget: return "budget exceeded";
    case ErrorKind::kConsistency: return "consistency failure";
  }
  return "error";
}

BitArray BitArray::from_string(std::string_view bits) {
  BitArray out(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] == '1') {
      out.set(i);
    } else if (bits[i] != '0') {
      throw Error(ErrorKind::kInvalidInput, "bit string may only contain '0' and '1'");
    }
  }
  return out;
}

std::string BitArray::to_string() const {
  std::string s(width_, '0');
  for (std::size_t i = 0; i < width_; ++i) {
    if (test(i)) s[i] = '1';
  }
  return s;
}

void BitArray::write_bytes(std::span<uint8_t> out) const {
  for (std::size_t b = 0; b < byte_size(); ++b) {
    out[b] = static_cast<uint8_t>(words_[b / 8] >> (56 - 8 * (b % 8)));
  }
}

BitArray BitArray::from_bytes(std::size_t width, std::span<const uint8_t> in) {
  BitArray out(width);
  if (in.size() < out.byte_size()) {
    throw Error(ErrorKind::kFormat, "truncated bit array");
  }
  for (std::size_t b = 0; b < out.byte_size(); ++b) {
    out.words_[b / 8] |= uint64_t{in[b]} << (56 - 8 * (b % 8));
  }
  for (std::size_t i = width; i < out.used_words() * 64; ++i) {
    if (out.test(i)) throw Error(ErrorKind::kFormat, "padding bits set in bit array");
  }
  return out;
}

BitArray rotate_region(const BitArray& bits, std::size_t start, std::size_t len,
                       std::size_t amount) {
  if (start > bits.width() || len > bits.width() - start) {
    throw Error(ErrorKind::kParameter, "rotation region out of bounds");
  }
  if (len == 0) return bits;
  const std::size_t shift = amount % len;
  if (shift == 0) return bits;
  BitArray out = bits;
  for (std::size_t p = 0; p < len; ++p) out.reset(start + p);
  for (std::size_t p = 0; p < len; ++p) {
    if (bits.test(start + p)) out.set(start + (p + len - shift) % len);
  }
  return out;
}

}  // namespace mate
