#ifndef XBARMUL_FIXEDPOINT_HPP
#define XBARMUL_FIXEDPOINT_HPP

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace xbarmul {

/// Raised when an operand, digit vector or partial-sum vector violates its
/// representation invariants.
class RepresentationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Largest number of fractional bits a FixedPointValue may carry. A product of
/// two 32-bit operands needs all 64.
inline constexpr unsigned kMaxFracBits = 64;

/// Exact unsigned fixed-point scalar in [0, 1): numerator / 2^frac_bits.
class FixedPointValue {
public:
    FixedPointValue() = default;
    FixedPointValue(std::uint64_t numerator, unsigned frac_bits);

    /// Nearest value on the 2^-frac_bits grid (ties to even via std::nearbyint).
    /// Rejects values outside [0, 1) after rounding.
    static FixedPointValue from_double(double value, unsigned frac_bits);

    std::uint64_t numerator() const noexcept { return numerator_; }
    unsigned frac_bits() const noexcept { return frac_bits_; }

    bool is_zero() const noexcept { return numerator_ == 0; }
    double to_double() const noexcept;

    /// Same value on a finer grid. Throws if frac_bits < this->frac_bits().
    FixedPointValue widened(unsigned frac_bits) const;

    /// Binary expansion "0.b1b2...bn" with exactly frac_bits digits.
    std::string to_binary_string() const;
    /// Exact decimal expansion (a dyadic fraction always terminates).
    std::string to_decimal_string() const;
    /// "num/den" with 2^frac_bits as the denominator, unreduced.
    std::string to_rational_string() const;

    friend bool operator==(const FixedPointValue& a, const FixedPointValue& b) noexcept;
    friend bool operator<(const FixedPointValue& a, const FixedPointValue& b) noexcept;

private:
    std::uint64_t numerator_ = 0;
    unsigned frac_bits_ = 1;
};

/// |a - b| exactly, on the finer of the two grids.
FixedPointValue abs_difference(const FixedPointValue& a, const FixedPointValue& b);

/// k radix-2^m digits, most significant first. Digit j carries the normalized
/// value digits[j] * 2^-m and slot weight 2^-(j*m).
class DigitVector {
public:
    DigitVector(std::vector<std::uint32_t> digits, unsigned bits_per_digit);

    std::span<const std::uint32_t> digits() const noexcept { return digits_; }
    std::uint32_t operator[](std::size_t j) const { return digits_.at(j); }
    unsigned bits_per_digit() const noexcept { return bits_per_digit_; }
    std::size_t size() const noexcept { return digits_.size(); }

    /// digits[j] * 2^-m, the amplitude or conductance one cell holds.
    double normalized(std::size_t j) const;
    std::vector<double> normalized() const;

    friend bool operator==(const DigitVector&, const DigitVector&) = default;

private:
    std::vector<std::uint32_t> digits_;
    unsigned bits_per_digit_;
};

/// Column sums Z_j in integer units of 2^-2m, j = 0 .. 2k-2.
class PartialSumsExact {
public:
    PartialSumsExact(std::vector<std::uint64_t> values, unsigned bits_per_digit, std::size_t digit_count);

    std::span<const std::uint64_t> values() const noexcept { return values_; }
    std::uint64_t operator[](std::size_t j) const { return values_.at(j); }
    unsigned bits_per_digit() const noexcept { return bits_per_digit_; }
    std::size_t digit_count() const noexcept { return digit_count_; }
    std::size_t size() const noexcept { return values_.size(); }

    /// Number of digit products that land in slot j: min(j+1, k, 2k-1-j).
    static std::uint64_t terms_in_slot(std::size_t j, std::size_t k) noexcept;
    /// Largest legal value of slot j: terms_in_slot * (2^m - 1)^2.
    static std::uint64_t slot_cap(std::size_t j, std::size_t k, unsigned m) noexcept;

private:
    std::vector<std::uint64_t> values_;
    unsigned bits_per_digit_;
    std::size_t digit_count_;
};

/// Splits v into k digits of m bits, zero-padding the low end when
/// v.frac_bits() < k*m. Throws RepresentationError if k*m < v.frac_bits().
DigitVector decompose(const FixedPointValue& v, unsigned bits_per_digit, std::size_t digit_count);

/// Inverse of decompose; result has k*m fractional bits.
FixedPointValue recompose(const DigitVector& digits);

/// Schoolbook convolution of the two digit sequences.
PartialSumsExact partial_sums_exact(const DigitVector& x, const DigitVector& y);

/// Exact integer product; frac_bits add.
FixedPointValue exact_product(const FixedPointValue& x, const FixedPointValue& y);

/// sum_j Z_j * 2^-2m * 2^-jm with 2km fractional bits.
FixedPointValue assemble_from_partials(const PartialSumsExact& sums);

}  // namespace xbarmul

#endif  // XBARMUL_FIXEDPOINT_HPP
