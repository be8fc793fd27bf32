#include "xbarmul/fixedpoint.hpp"

#include <gtest/gtest.h>

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace {

using xbarmul::DigitVector;
using xbarmul::FixedPointValue;
using xbarmul::PartialSumsExact;
using xbarmul::RepresentationError;

std::vector<std::uint32_t> digits_of(const DigitVector& d) { return {d.digits().begin(), d.digits().end()}; }

// Bit-level schoolbook product: sum over set bit pairs, independent of the
// digit machinery under test.
std::uint64_t bitwise_product(std::uint64_t a, std::uint64_t b, unsigned bits) {
    std::uint64_t acc = 0;
    for (unsigned i = 0; i < bits; ++i) {
        for (unsigned j = 0; j < bits; ++j) {
            if (((a >> i) & 1U) && ((b >> j) & 1U)) acc += std::uint64_t{1} << (i + j);
        }
    }
    return acc;
}

const std::vector<std::pair<unsigned, std::size_t>> kSmallShapes = {{1, 8}, {2, 4}, {4, 2}, {8, 1}};

TEST(FixedPoint, RejectsOutOfRange) {
    EXPECT_THROW(FixedPointValue(256, 8), RepresentationError);
    EXPECT_THROW(FixedPointValue(0, 0), RepresentationError);
    EXPECT_THROW(FixedPointValue(0, 65), RepresentationError);
    EXPECT_NO_THROW(FixedPointValue(~std::uint64_t{0}, 64));
    EXPECT_THROW(FixedPointValue::from_double(1.0, 8), RepresentationError);
    EXPECT_THROW(FixedPointValue::from_double(-0.25, 8), RepresentationError);
}

TEST(FixedPoint, EqualityAlignsGrids) {
    EXPECT_EQ(FixedPointValue(1, 1), FixedPointValue(128, 8));
    EXPECT_NE(FixedPointValue(1, 1), FixedPointValue(129, 8));
    EXPECT_LT(FixedPointValue(127, 8), FixedPointValue(1, 1));
    EXPECT_EQ(FixedPointValue::from_double(0.8359375, 8).numerator(), 214U);
}

TEST(FixedPoint, Formatting) {
    const FixedPointValue z(23326, 16);
    EXPECT_EQ(z.to_binary_string(), "0.0101101100011110");
    EXPECT_EQ(z.to_decimal_string(), "0.355926513671875");
    EXPECT_EQ(z.to_rational_string(), "23326/65536");
    EXPECT_EQ(FixedPointValue(1, 64).to_rational_string(), "1/18446744073709551616");
    EXPECT_EQ(FixedPointValue(0, 4).to_decimal_string(), "0.0");
}

TEST(FixedPoint, AbsDifference) {
    EXPECT_EQ(abs_difference(FixedPointValue(3, 4), FixedPointValue(1, 2)), FixedPointValue(1, 4));
    EXPECT_EQ(abs_difference(FixedPointValue(1, 2), FixedPointValue(3, 4)), FixedPointValue(1, 4));
    EXPECT_TRUE(abs_difference(FixedPointValue(5, 8), FixedPointValue(5, 8)).is_zero());
}

TEST(Decompose, WorkedExampleOperands) {
    const DigitVector xd = decompose(FixedPointValue(214, 8), 2, 4);
    EXPECT_EQ(digits_of(xd), (std::vector<std::uint32_t>{3, 1, 1, 2}));
    EXPECT_EQ(xd.normalized(), (std::vector<double>{0.75, 0.25, 0.25, 0.5}));

    const DigitVector yd = decompose(FixedPointValue::from_double(0.42578125, 8), 2, 4);
    EXPECT_EQ(digits_of(yd), (std::vector<std::uint32_t>{1, 2, 3, 1}));
    EXPECT_EQ(yd.normalized(), (std::vector<double>{0.25, 0.5, 0.75, 0.25}));
}

TEST(Decompose, TrivialCases) {
    EXPECT_EQ(digits_of(decompose(FixedPointValue(0, 6), 3, 2)), (std::vector<std::uint32_t>{0, 0}));
    EXPECT_EQ(digits_of(decompose(FixedPointValue(1, 1), 1, 4)), (std::vector<std::uint32_t>{1, 0, 0, 0}));
}

TEST(Decompose, ZeroPadsLowBits) {
    // 0.75 with 2 fractional bits in 3 digits of 2 bits: 0.11 00 00.
    EXPECT_EQ(digits_of(decompose(FixedPointValue(3, 2), 2, 3)), (std::vector<std::uint32_t>{3, 0, 0}));
}

TEST(Decompose, RejectsTruncation) {
    EXPECT_THROW(decompose(FixedPointValue(1, 9), 2, 4), RepresentationError);
    EXPECT_THROW(decompose(FixedPointValue(1, 8), 0, 8), RepresentationError);
    EXPECT_THROW(decompose(FixedPointValue(1, 8), 2, 0), RepresentationError);
}

TEST(Recompose, Examples) {
    EXPECT_EQ(recompose(DigitVector({3, 1, 1, 2}, 2)), FixedPointValue::from_double(0.8359375, 8));
    EXPECT_EQ(recompose(DigitVector({1, 2, 3, 1}, 2)), FixedPointValue::from_double(0.42578125, 8));
    const FixedPointValue zero = recompose(DigitVector({0, 0, 0}, 4));
    EXPECT_TRUE(zero.is_zero());
    EXPECT_EQ(zero.frac_bits(), 12U);
}

TEST(DigitVectorType, RejectsWideDigits) {
    EXPECT_THROW(DigitVector({4}, 2), RepresentationError);
    EXPECT_THROW(DigitVector({}, 2), RepresentationError);
}

TEST(Decompose, RoundTripExhaustive) {
    for (unsigned m = 1; m <= 12; ++m) {
        for (std::size_t k = 1; m * k <= 12; ++k) {
            const unsigned bits = m * static_cast<unsigned>(k);
            for (std::uint64_t v = 0; v < (std::uint64_t{1} << bits); ++v) {
                const FixedPointValue value(v, bits);
                const DigitVector d = decompose(value, m, k);
                ASSERT_EQ(recompose(d), value) << "m=" << m << " k=" << k << " v=" << v;
                ASSERT_EQ(recompose(d).frac_bits(), bits);
            }
        }
    }
}

TEST(PartialSums, WorkedExample) {
    const PartialSumsExact z = partial_sums_exact(DigitVector({3, 1, 1, 2}, 2), DigitVector({1, 2, 3, 1}, 2));
    const std::vector<std::uint64_t> expected{3, 7, 12, 10, 8, 7, 2};
    EXPECT_EQ(std::vector<std::uint64_t>(z.values().begin(), z.values().end()), expected);

    std::uint64_t weighted = 0;
    for (std::size_t j = 0; j < expected.size(); ++j) weighted += expected[j] << ((6 - j) * 2);
    EXPECT_EQ(weighted, 214U * 109U);
    EXPECT_EQ(weighted, bitwise_product(214, 109, 8));
}

TEST(PartialSums, TrivialCases) {
    const PartialSumsExact zero = partial_sums_exact(DigitVector({0, 0, 0}, 3), DigitVector({5, 6, 7}, 3));
    for (std::uint64_t v : zero.values()) EXPECT_EQ(v, 0U);

    const PartialSumsExact single = partial_sums_exact(DigitVector({13}, 4), DigitVector({11}, 4));
    ASSERT_EQ(single.size(), 1U);
    EXPECT_EQ(single[0], 143U);
}

TEST(PartialSums, RejectsMismatchedShapes) {
    EXPECT_THROW(partial_sums_exact(DigitVector({1, 2}, 2), DigitVector({1, 2, 3}, 2)), RepresentationError);
    EXPECT_THROW(partial_sums_exact(DigitVector({1, 2}, 2), DigitVector({1, 2}, 3)), RepresentationError);
    EXPECT_THROW(PartialSumsExact({10}, 1, 1), RepresentationError);   // cap is 1
    EXPECT_THROW(PartialSumsExact({1, 1}, 1, 1), RepresentationError);
}

TEST(PartialSums, SlotCapHoldsForRandomDigits) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 2000; ++trial) {
        const unsigned m = 1 + static_cast<unsigned>(rng() % 8);
        const std::size_t k = 1 + rng() % 16;
        std::vector<std::uint32_t> a(k), b(k);
        for (std::size_t i = 0; i < k; ++i) {
            a[i] = static_cast<std::uint32_t>(rng() >> (64 - m));
            b[i] = static_cast<std::uint32_t>(rng() >> (64 - m));
        }
        const PartialSumsExact z = partial_sums_exact(DigitVector(a, m), DigitVector(b, m));
        for (std::size_t j = 0; j < z.size(); ++j) ASSERT_LE(z[j], PartialSumsExact::slot_cap(j, k, m));
    }
    // The cap is tight for all-max digits.
    const PartialSumsExact full = partial_sums_exact(DigitVector({3, 3, 3}, 2), DigitVector({3, 3, 3}, 2));
    for (std::size_t j = 0; j < full.size(); ++j) EXPECT_EQ(full[j], PartialSumsExact::slot_cap(j, 3, 2));
}

TEST(ExactProduct, Examples) {
    const FixedPointValue z = exact_product(FixedPointValue(214, 8), FixedPointValue(109, 8));
    EXPECT_EQ(z, FixedPointValue(23326, 16));
    EXPECT_EQ(z.to_decimal_string(), "0.355926513671875");
    EXPECT_TRUE(exact_product(FixedPointValue(77, 8), FixedPointValue(0, 8)).is_zero());
    EXPECT_EQ(exact_product(FixedPointValue(1, 1), FixedPointValue(1, 1)), FixedPointValue(1, 2));
    EXPECT_THROW(exact_product(FixedPointValue(1, 40), FixedPointValue(1, 40)), RepresentationError);
}

TEST(Assemble, Examples) {
    const FixedPointValue z = assemble_from_partials(PartialSumsExact({3, 7, 12, 10, 8, 7, 2}, 2, 4));
    EXPECT_EQ(z.to_decimal_string(), "0.355926513671875");
    EXPECT_EQ(z.frac_bits(), 16U);
    EXPECT_TRUE(assemble_from_partials(PartialSumsExact({0, 0, 0}, 2, 2)).is_zero());
    EXPECT_EQ(assemble_from_partials(PartialSumsExact({143}, 4, 1)),
              exact_product(recompose(DigitVector({13}, 4)), recompose(DigitVector({11}, 4))));
}

TEST(Assemble, EqualsExactProductExhaustively) {
    for (const auto& [m, k] : kSmallShapes) {
        for (std::uint64_t a = 0; a < 256; ++a) {
            for (std::uint64_t b = 0; b < 256; ++b) {
                const FixedPointValue x(a, 8), y(b, 8);
                const FixedPointValue z = assemble_from_partials(partial_sums_exact(decompose(x, m, k), decompose(y, m, k)));
                ASSERT_EQ(z, exact_product(x, y)) << "m=" << m << " a=" << a << " b=" << b;
                ASSERT_EQ(z.numerator(), bitwise_product(a, b, 8));
            }
        }
    }
}

TEST(Assemble, EqualsExactProductOnRandomWideOperands) {
    std::mt19937_64 rng(2024);
    const std::vector<std::pair<unsigned, std::size_t>> shapes = {{1, 16}, {2, 8}, {4, 4}, {1, 32}, {2, 16}, {4, 8}, {8, 4}};
    for (const auto& [m, k] : shapes) {
        const unsigned bits = m * static_cast<unsigned>(k);
        for (int trial = 0; trial < 2000; ++trial) {
            const FixedPointValue x(rng() >> (64 - bits), bits), y(rng() >> (64 - bits), bits);
            const FixedPointValue z = assemble_from_partials(partial_sums_exact(decompose(x, m, k), decompose(y, m, k)));
            ASSERT_EQ(z, exact_product(x, y));
            ASSERT_EQ(z.numerator(), bitwise_product(x.numerator(), y.numerator(), bits));
        }
    }
}

}  // namespace
