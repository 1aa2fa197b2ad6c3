#pragma once

#include "mdlrnn/rational.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mdlrnn {

using BitLength = std::uint64_t;
using BitString = std::vector<bool>;

// Prefix-free code for nonnegative integers: n = 0 is the 1-bit word "0";
// n >= 1 is 1^len(b) 0 b with b the binary form of n, so
// |code(n)| = 2*ceil(log2(n+1)) + 1.
BitLength encode_int_length(const BigInt& n);
BitLength encode_int_length(std::uint64_t n);

// Signed fraction in lowest terms: sign bit, |numerator| code, denominator code.
BitLength encode_fraction_length(const Rational& q);

// Actual codewords, for the decode audit path.
BitString encode_int_bits(const BigInt& n);
void append_int_bits(BitString& out, const BigInt& n);
void append_fraction_bits(BitString& out, const Rational& q);

// Greedy decode of one integer codeword starting at `pos`; advances `pos`.
// Returns nullopt on truncated input.
std::optional<BigInt> decode_int(const BitString& bits, std::size_t& pos);

}  // namespace mdlrnn
