#include "xbarmul/fixedpoint.hpp"

#include <algorithm>
#include <cmath>

namespace xbarmul {

namespace {

__extension__ typedef unsigned __int128 u128;

std::string u128_to_string(u128 value) {
    if (value == 0) return "0";
    std::string out;
    while (value != 0) {
        out.push_back(static_cast<char>('0' + static_cast<int>(value % 10)));
        value /= 10;
    }
    std::reverse(out.begin(), out.end());
    return out;
}

u128 aligned(const FixedPointValue& v, unsigned frac_bits) {
    return static_cast<u128>(v.numerator()) << (frac_bits - v.frac_bits());
}

void check_digit_width(unsigned m) {
    if (m == 0 || m > 16) {
        throw RepresentationError("bits per digit must be in [1, 16], got " + std::to_string(m));
    }
}

}  // namespace

FixedPointValue::FixedPointValue(std::uint64_t numerator, unsigned frac_bits)
    : numerator_(numerator), frac_bits_(frac_bits) {
    if (frac_bits == 0 || frac_bits > kMaxFracBits) {
        throw RepresentationError("fractional bit count must be in [1, 64], got " +
                                  std::to_string(frac_bits));
    }
    if (frac_bits < 64 && (numerator >> frac_bits) != 0) {
        throw RepresentationError("value " + std::to_string(numerator) + "/2^" +
                                  std::to_string(frac_bits) + " is not in [0, 1)");
    }
}

FixedPointValue FixedPointValue::from_double(double value, unsigned frac_bits) {
    if (frac_bits == 0 || frac_bits > 53) {
        throw RepresentationError("from_double supports 1..53 fractional bits");
    }
    if (!std::isfinite(value) || value < 0.0 || value >= 1.0) {
        throw RepresentationError("operand must lie in [0, 1)");
    }
    const double scaled = std::nearbyint(std::ldexp(value, static_cast<int>(frac_bits)));
    return FixedPointValue(static_cast<std::uint64_t>(scaled), frac_bits);
}

double FixedPointValue::to_double() const noexcept {
    return std::ldexp(static_cast<double>(numerator_), -static_cast<int>(frac_bits_));
}

FixedPointValue FixedPointValue::widened(unsigned frac_bits) const {
    if (frac_bits < frac_bits_) {
        throw RepresentationError("cannot narrow a fixed-point value without rounding");
    }
    return FixedPointValue(static_cast<std::uint64_t>(aligned(*this, frac_bits)), frac_bits);
}

std::string FixedPointValue::to_binary_string() const {
    std::string out = "0.";
    for (unsigned i = frac_bits_; i-- > 0;) {
        out.push_back(((numerator_ >> i) & 1U) != 0 ? '1' : '0');
    }
    return out;
}

std::string FixedPointValue::to_decimal_string() const {
    // Long division: each step moves one binary fraction into a decimal digit.
    const u128 denom = static_cast<u128>(1) << frac_bits_;
    u128 rem = numerator_;
    std::string out = "0.";
    if (rem == 0) return "0.0";
    while (rem != 0) {
        rem *= 10;
        out.push_back(static_cast<char>('0' + static_cast<int>(rem / denom)));
        rem %= denom;
    }
    return out;
}

std::string FixedPointValue::to_rational_string() const {
    return u128_to_string(numerator_) + "/" + u128_to_string(static_cast<u128>(1) << frac_bits_);
}

bool operator==(const FixedPointValue& a, const FixedPointValue& b) noexcept {
    const unsigned fb = std::max(a.frac_bits_, b.frac_bits_);
    return aligned(a, fb) == aligned(b, fb);
}

bool operator<(const FixedPointValue& a, const FixedPointValue& b) noexcept {
    const unsigned fb = std::max(a.frac_bits_, b.frac_bits_);
    return aligned(a, fb) < aligned(b, fb);
}

FixedPointValue abs_difference(const FixedPointValue& a, const FixedPointValue& b) {
    const unsigned fb = std::max(a.frac_bits(), b.frac_bits());
    const u128 lhs = aligned(a, fb);
    const u128 rhs = aligned(b, fb);
    return FixedPointValue(static_cast<std::uint64_t>(lhs > rhs ? lhs - rhs : rhs - lhs), fb);
}

DigitVector::DigitVector(std::vector<std::uint32_t> digits, unsigned bits_per_digit)
    : digits_(std::move(digits)), bits_per_digit_(bits_per_digit) {
    check_digit_width(bits_per_digit);
    if (digits_.empty()) throw RepresentationError("digit vector must hold at least one digit");
    const std::uint32_t radix = 1U << bits_per_digit;
    for (std::size_t j = 0; j < digits_.size(); ++j) {
        if (digits_[j] >= radix) {
            throw RepresentationError("digit " + std::to_string(j) + " = " + std::to_string(digits_[j]) +
                                      " does not fit in " + std::to_string(bits_per_digit) + " bits");
        }
    }
}

double DigitVector::normalized(std::size_t j) const {
    return std::ldexp(static_cast<double>(digits_.at(j)), -static_cast<int>(bits_per_digit_));
}

std::vector<double> DigitVector::normalized() const {
    std::vector<double> out(digits_.size());
    for (std::size_t j = 0; j < digits_.size(); ++j) out[j] = normalized(j);
    return out;
}

PartialSumsExact::PartialSumsExact(std::vector<std::uint64_t> values, unsigned bits_per_digit,
                                   std::size_t digit_count)
    : values_(std::move(values)), bits_per_digit_(bits_per_digit), digit_count_(digit_count) {
    check_digit_width(bits_per_digit);
    if (digit_count == 0 || values_.size() != 2 * digit_count - 1) {
        throw RepresentationError("partial sums need 2k-1 slots");
    }
    for (std::size_t j = 0; j < values_.size(); ++j) {
        if (values_[j] > slot_cap(j, digit_count, bits_per_digit)) {
            throw RepresentationError("partial sum " + std::to_string(j) + " exceeds its slot capacity");
        }
    }
}

std::uint64_t PartialSumsExact::terms_in_slot(std::size_t j, std::size_t k) noexcept {
    return std::min({j + 1, k, 2 * k - 1 - j});
}

std::uint64_t PartialSumsExact::slot_cap(std::size_t j, std::size_t k, unsigned m) noexcept {
    const std::uint64_t digit_max = (std::uint64_t{1} << m) - 1;
    return terms_in_slot(j, k) * digit_max * digit_max;
}

DigitVector decompose(const FixedPointValue& v, unsigned bits_per_digit, std::size_t digit_count) {
    check_digit_width(bits_per_digit);
    if (digit_count == 0) throw RepresentationError("digit count must be positive");
    const std::size_t total_bits = bits_per_digit * digit_count;
    if (total_bits > kMaxFracBits) throw RepresentationError("k*m exceeds 64 bits");
    if (total_bits < v.frac_bits()) {
        throw RepresentationError("k*m = " + std::to_string(total_bits) + " would truncate a value with " +
                                  std::to_string(v.frac_bits()) + " fractional bits");
    }
    const std::uint64_t padded = v.widened(static_cast<unsigned>(total_bits)).numerator();
    const std::uint64_t mask = (std::uint64_t{1} << bits_per_digit) - 1;
    std::vector<std::uint32_t> digits(digit_count);
    for (std::size_t j = 0; j < digit_count; ++j) {
        const std::size_t shift = (digit_count - 1 - j) * bits_per_digit;
        digits[j] = static_cast<std::uint32_t>((padded >> shift) & mask);
    }
    return DigitVector(std::move(digits), bits_per_digit);
}

FixedPointValue recompose(const DigitVector& digits) {
    const unsigned m = digits.bits_per_digit();
    const std::size_t total_bits = m * digits.size();
    if (total_bits > kMaxFracBits) throw RepresentationError("k*m exceeds 64 bits");
    std::uint64_t acc = 0;
    for (std::uint32_t d : digits.digits()) {
        acc = (acc << m) | d;
    }
    return FixedPointValue(acc, static_cast<unsigned>(total_bits));
}

PartialSumsExact partial_sums_exact(const DigitVector& x, const DigitVector& y) {
    if (x.bits_per_digit() != y.bits_per_digit() || x.size() != y.size()) {
        throw RepresentationError("operands must share bits-per-digit and digit count");
    }
    const std::size_t k = x.size();
    std::vector<std::uint64_t> sums(2 * k - 1, 0);
    for (std::size_t p = 0; p < k; ++p) {
        for (std::size_t q = 0; q < k; ++q) {
            sums[p + q] += std::uint64_t{x[p]} * y[q];
        }
    }
    return PartialSumsExact(std::move(sums), x.bits_per_digit(), k);
}

FixedPointValue exact_product(const FixedPointValue& x, const FixedPointValue& y) {
    const unsigned fb = x.frac_bits() + y.frac_bits();
    if (fb > kMaxFracBits) throw RepresentationError("product needs more than 64 fractional bits");
    return FixedPointValue(x.numerator() * y.numerator(), fb);
}

FixedPointValue assemble_from_partials(const PartialSumsExact& sums) {
    const unsigned m = sums.bits_per_digit();
    const std::size_t k = sums.digit_count();
    const std::size_t total_bits = 2 * k * m;
    if (total_bits > kMaxFracBits) throw RepresentationError("2km exceeds 64 bits");
    // Slot j has weight 2^-(j+2)m, i.e. 2^((2k-2-j)m) units of 2^-2km.
    u128 acc = 0;
    for (std::size_t j = 0; j < sums.size(); ++j) {
        acc += static_cast<u128>(sums[j]) << ((2 * k - 2 - j) * m);
    }
    if ((acc >> total_bits) != 0) throw RepresentationError("assembled product is not below 1");
    return FixedPointValue(static_cast<std::uint64_t>(acc), static_cast<unsigned>(total_bits));
}

}  // namespace xbarmul
