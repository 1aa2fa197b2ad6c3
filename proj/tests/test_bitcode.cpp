#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mdlrnn/bitcode.hpp"
#include "mdlrnn/rational.hpp"

#include <random>

using namespace mdlrnn;

TEST_CASE("integer code lengths") {
    CHECK(encode_int_length(std::uint64_t{0}) == 1);
    CHECK(encode_int_length(std::uint64_t{1}) == 3);
    CHECK(encode_int_length(std::uint64_t{5}) == 7);  // b=101 -> 1110101
    CHECK(encode_int_length(std::uint64_t{10}) == 9);
    // 50000 has a 16-bit binary form, so 2*16+1.
    CHECK(encode_int_length(std::uint64_t{50000}) == 33);
    // Length formula 2*ceil(log2(n+1))+1 holds across the boundary cases.
    for (std::uint64_t n : {1ull, 2ull, 3ull, 4ull, 7ull, 8ull, 255ull, 256ull, 65535ull, 65536ull}) {
        std::uint64_t width = 0;
        while ((1ull << width) <= n) {
            ++width;
        }
        CHECK(encode_int_length(n) == 2 * width + 1);
    }
}

TEST_CASE("codeword bits match lengths and decode back") {
    for (std::uint64_t n = 0; n <= 3000; ++n) {
        const auto bits = encode_int_bits(BigInt(n));
        CHECK(bits.size() == encode_int_length(n));
        std::size_t pos = 0;
        const auto decoded = decode_int(bits, pos);
        REQUIRE(decoded.has_value());
        CHECK(*decoded == BigInt(n));
        CHECK(pos == bits.size());
    }
    CHECK(encode_int_bits(BigInt(5)) == BitString{true, true, true, false, true, false, true});
}

TEST_CASE("prefix-free greedy decode of concatenated codewords") {
    std::mt19937_64 rng(7);
    BitString stream;
    std::vector<std::uint64_t> values;
    for (int i = 0; i < 10'000; ++i) {
        const std::uint64_t n = rng() % 10'000;
        values.push_back(n);
        append_int_bits(stream, BigInt(n));
    }
    std::size_t pos = 0;
    for (const std::uint64_t expected : values) {
        const auto decoded = decode_int(stream, pos);
        REQUIRE(decoded.has_value());
        CHECK(*decoded == BigInt(expected));
    }
    CHECK(pos == stream.size());
}

TEST_CASE("fraction code") {
    // sign + code(1) + code(10) = 1 + 3 + 9
    CHECK(encode_fraction_length(make_rational(1, 10)) == 13);
    CHECK(encode_fraction_length(make_rational(0)) == 1 + 1 + 3);  // 0/1
    CHECK(encode_fraction_length(make_rational(1, 10)) < encode_fraction_length(make_rational(1117, 50000)));
    // Representation invariance: inputs are reduced before encoding.
    CHECK(encode_fraction_length(make_rational(2, 20)) == encode_fraction_length(make_rational(1, 10)));
    CHECK(encode_fraction_length(make_rational(-1, 10)) == encode_fraction_length(make_rational(1, 10)));

    BitString bits;
    append_fraction_bits(bits, make_rational(-3, 7));
    CHECK(bits.size() == encode_fraction_length(make_rational(-3, 7)));
    CHECK(bits[0] == true);  // sign
    std::size_t pos = 1;
    CHECK(*decode_int(bits, pos) == BigInt(3));
    CHECK(*decode_int(bits, pos) == BigInt(7));
}

TEST_CASE("rational helpers") {
    CHECK(rational_to_string(make_rational(-3, 6)) == "-1/2");
    CHECK(parse_rational("3/10") == make_rational(3, 10));
    CHECK(parse_rational("-7") == make_rational(-7));
    CHECK(parse_rational("0.25") == make_rational(1, 4));
    CHECK(parse_rational("0.33333") == make_rational(33333, 100000));
    CHECK(to_double(make_rational(1, 2)) == 0.5);
    CHECK(log2_rational(make_rational(1, 8)) == doctest::Approx(-3.0));

    // Values far below double range still get correct logs.
    Rational tiny = 1;
    for (int i = 0; i < 2000; ++i) {
        tiny *= make_rational(7, 10);
    }
    CHECK(log2_rational(tiny) == doctest::Approx(2000.0 * std::log2(0.7)));

    CHECK(rational_from_double(0.5, 1'000'000) == make_rational(1, 2));
    CHECK(rational_from_double(0.1, 1'000'000) == make_rational(1, 10));
    CHECK(rational_from_double(-2.0, 1'000'000) == make_rational(-2));
    const Rational pi_approx = rational_from_double(3.14159265358979, 1'000'000);
    CHECK(boost::multiprecision::denominator(pi_approx) <= 1'000'000);
    CHECK(std::fabs(to_double(pi_approx) - 3.14159265358979) < 1e-11);
}
