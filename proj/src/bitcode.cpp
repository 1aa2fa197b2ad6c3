#include "mdlrnn/bitcode.hpp"

#include <stdexcept>

namespace mdlrnn {

namespace {

std::size_t bit_width(const BigInt& n) {
    // Number of binary digits of n >= 1.
    return boost::multiprecision::msb(n) + 1;
}

}  // namespace

BitLength encode_int_length(const BigInt& n) {
    if (n < 0) {
        throw std::runtime_error("encode_int: negative argument");
    }
    if (n == 0) {
        return 1;
    }
    return 2 * static_cast<BitLength>(bit_width(n)) + 1;
}

BitLength encode_int_length(std::uint64_t n) {
    return encode_int_length(BigInt(n));
}

BitLength encode_fraction_length(const Rational& q) {
    const BigInt num = boost::multiprecision::numerator(q);
    const BigInt den = boost::multiprecision::denominator(q);
    return 1 + encode_int_length(BigInt(boost::multiprecision::abs(num))) + encode_int_length(den);
}

BitString encode_int_bits(const BigInt& n) {
    BitString out;
    append_int_bits(out, n);
    return out;
}

void append_int_bits(BitString& out, const BigInt& n) {
    if (n < 0) {
        throw std::runtime_error("encode_int: negative argument");
    }
    if (n == 0) {
        out.push_back(false);
        return;
    }
    const std::size_t width = bit_width(n);
    for (std::size_t i = 0; i < width; ++i) {
        out.push_back(true);
    }
    out.push_back(false);
    for (std::size_t i = width; i-- > 0;) {
        out.push_back(boost::multiprecision::bit_test(n, static_cast<unsigned>(i)));
    }
}

void append_fraction_bits(BitString& out, const Rational& q) {
    out.push_back(q < 0);
    append_int_bits(out, BigInt(boost::multiprecision::abs(boost::multiprecision::numerator(q))));
    append_int_bits(out, boost::multiprecision::denominator(q));
}

std::optional<BigInt> decode_int(const BitString& bits, std::size_t& pos) {
    std::size_t width = 0;
    while (pos < bits.size() && bits[pos]) {
        ++width;
        ++pos;
    }
    if (pos >= bits.size()) {
        return std::nullopt;  // missing terminator
    }
    ++pos;  // consume the 0
    if (width == 0) {
        return BigInt(0);
    }
    if (pos + width > bits.size()) {
        return std::nullopt;
    }
    BigInt value = 0;
    for (std::size_t i = 0; i < width; ++i) {
        value <<= 1;
        if (bits[pos + i]) {
            value += 1;
        }
    }
    pos += width;
    return value;
}

}  // namespace mdlrnn
