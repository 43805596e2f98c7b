#!/usr/bin/env python3
# Straight-line reference for the XASH bit layout. Used to freeze the golden
# vectors in tests/xash_test.cpp; it shares no code with the C++ build.
from fractions import Fraction
from math import ceil, comb
import sys

ALPHABET = "0123456789abcdefghijklmnopqrstuvwxyz "
RANKING = " etaoinsrhldcumfpgwybvkxjqz0123456789"  # most frequent first


def params(bits, c_unique):
    beta = max(b for b in range(1, bits) if 37 * b < bits)
    alpha = next(a for a in range(2, bits + 1) if comb(bits, a) > c_unique)
    return alpha, beta, bits - 37 * beta


def xash(text, bits, c_unique):
    alpha, beta, len_bits = params(bits, c_unique)
    lv = len(text)
    out = [0] * bits
    out[lv % len_bits] = 1
    chars = sorted({c for c in text if c in ALPHABET},
                   key=lambda c: (-RANKING.index(c), c))[: alpha - 1]
    region = [0] * (37 * beta)
    for c in chars:
        pos = [i + 1 for i, ch in enumerate(text) if ch == c]
        lam = Fraction(sum(pos), len(pos))
        x = ceil(lam * beta / lv)
        region[ALPHABET.index(c) * beta + x - 1] = 1
    shift = lv % len(region)
    region = region[shift:] + region[:shift]
    out[len_bits:] = region
    return "".join(map(str, out))


if __name__ == "__main__":
    c_unique = int(sys.argv[1]) if len(sys.argv) > 1 else 1_000_000
    for word in ["muhammad", "lee", "us", ""]:
        print(repr(word), params(128, c_unique), xash(word, 128, c_unique))
