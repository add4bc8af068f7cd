#pragma once

// Delta-binary set encodings over trits and the reversible programs acting
// on them. A basic encoding of S = {y1 < ... < yk} ⊂ [1, N] is the string
// bin(y1) 2 bin(y2-y1) 2 ... bin(yk-y(k-1)) 2 followed by zero padding, where
// bin() has no leading zero. Cell 0 holds the most significant digit of y1.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "hfchc/revcore.hpp"

namespace hfchc {

using TritString = std::vector<uint8_t>;

// Ancilla budget constants: peak cells of union_prog(N, k1, k2) stay below
// union_alpha*(K log2(N/K) + K + log2 N) + union_beta with K = k1 + k2, and
// peak cells of eff_contains_prog stay below eff_alpha*log2 N + eff_beta.
struct EncodingConstants {
    double union_alpha;
    double union_beta;
    double eff_alpha;
    double eff_beta;
};
const EncodingConstants& encoding_constants();

uint32_t bitlen(uint64_t v);
uint32_t capacity(uint32_t N, uint32_t k);
// Upper bound on the total trits of an efficient encoding of k elements.
uint64_t eff_bound(uint32_t N, uint32_t k);

TritString encode_basic(uint32_t N, std::vector<uint32_t> S);
std::vector<uint32_t> decode_basic(uint32_t N, uint32_t k, const TritString& t);
std::string to_string(const TritString& t);
TritString trits_from_string(std::string_view s);

// Block sizes of an efficient encoding: the powers of two of k, largest first.
std::vector<uint32_t> eff_block_sizes(uint32_t k);
uint32_t eff_width(uint32_t N, uint32_t k);

struct EffEncoding {
    uint32_t N = 0;
    std::vector<uint32_t> sizes;
    std::vector<TritString> blocks;

    uint32_t total_trits() const;
    TritString flat() const;
};

EffEncoding encode_eff(uint32_t N, const std::vector<uint32_t>& Z);
// Elements block by block, each block in increasing order.
std::vector<uint32_t> decode_eff(uint32_t N, uint32_t k, const TritString& flat);

// What the reversible scan computes on arbitrary trit content: membership of
// x among the running prefix sums (mod 2^w) at separator positions, using
// delta blocks of at most w digits.
bool scan_contains(std::span<const uint8_t> enc, uint32_t w, uint64_t x);
// Prefix sum and used length after a full scan.
std::pair<uint64_t, uint64_t> scan_totals(std::span<const uint8_t> enc, uint32_t w);

// Register layouts:
//   contains_prog:     (enc: capacity(N,k) trits, x: bitlen(N) bits, out: 1 bit)
//   convert_prog:      (x: bitlen(N) bits, out: capacity(N,1) trits)
//   union_prog:        (enc1, enc2, out: capacity(N,k1+k2) trits)
//   eff_contains_prog: (one register per block, x, out)
//   scan_prog:         (enc: cap trits, y: bitlen(N) bits, used: bitlen(cap) bits)
// count_only builds return opaque programs with identical static stats.
ProgramPtr contains_prog(uint32_t N, uint32_t k, bool count_only = false);
ProgramPtr convert_prog(uint32_t N, bool count_only = false);
ProgramPtr union_prog(uint32_t N, uint32_t k1, uint32_t k2, bool count_only = false);
ProgramPtr eff_contains_prog(uint32_t N, uint32_t k, bool count_only = false);
ProgramPtr scan_prog(uint32_t N, uint32_t cap, bool count_only = false);

}  // namespace hfchc
