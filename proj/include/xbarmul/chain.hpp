#ifndef XBARMUL_CHAIN_HPP
#define XBARMUL_CHAIN_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "xbarmul/crossbar.hpp"
#include "xbarmul/fixedpoint.hpp"
#include "xbarmul/random.hpp"

namespace xbarmul::chain {

/// ADC behind each chain cell. A conversion yields a P-bit code on the
/// 2^-2m grid (in slot units): the low m bits are the cell's output digit and
/// the high P-m bits are the carry handed to the next cell.
struct AdcConfig {
    unsigned total_bits;       // P
    unsigned bits_per_digit;   // m

    /// Smallest P that holds every cell sum of a k-digit multiplier:
    /// 2m + ceil(log2(k+1)).
    static AdcConfig for_multiplier(unsigned bits_per_digit, std::size_t digit_count);
    static unsigned min_total_bits(unsigned bits_per_digit, std::size_t digit_count);

    double grid() const;
    unsigned carry_bits() const noexcept { return total_bits - bits_per_digit; }
    std::uint64_t code_limit() const noexcept { return std::uint64_t{1} << total_bits; }
    void validate() const;
};

enum class FaultKind { Saturation, CarryOverflow };

/// A conversion or carry left the range the chain was sized for; the noise
/// exceeded the design margin or the ADC is too narrow.
class ChainFault : public std::runtime_error {
public:
    ChainFault(FaultKind kind, std::optional<std::size_t> slot, const std::string& what)
        : std::runtime_error(what), kind_(kind), slot_(slot) {}

    FaultKind kind() const noexcept { return kind_; }
    std::optional<std::size_t> slot() const noexcept { return slot_; }

private:
    FaultKind kind_;
    std::optional<std::size_t> slot_;
};

/// round(v / grid), ties away from zero. Throws ChainFault(Saturation) when
/// the code falls outside [0, 2^P).
std::uint64_t quantize(double value, const AdcConfig& adc);

struct CellOutput {
    std::uint32_t digit;
    std::uint64_t carry;
    double sum;   // V_s in slot units, as presented to the ADC
    std::uint64_t code;
};

/// One basic cell: V_s = Z~_j + V_carry * 2^-m, where V_carry = carry_in * 2^-m
/// is the upstream DAC output. Noise hooks perturb the two summing
/// conductances (chain) and the DAC output (dac); both are off unless their
/// magnitudes are non-zero.
CellOutput chain_cell(double partial_sum, std::uint64_t carry_in, const AdcConfig& adc, const NoiseModel& noise,
                      Rng& rng);
CellOutput chain_cell(double partial_sum, std::uint64_t carry_in, const AdcConfig& adc);

struct CellTrace {
    std::size_t slot;
    double partial_sum;
    std::uint64_t carry_in;
    CellOutput out;
};

/// 2k base-2^m digits of the product, most significant first.
struct ProductDigits {
    std::vector<std::uint32_t> digits;
    unsigned bits_per_digit;
    std::vector<CellTrace> cells;   // in evaluation order, least significant slot first

    FixedPointValue value() const;
};

/// Ripples from the least significant slot (2k-2) to the most significant
/// (0). Each cell's digit lands at position slot+1 and the last carry becomes
/// the top digit. Faults carry the slot index.
ProductDigits run_chain(const crossbar::PartialSumsAnalog& partials, const AdcConfig& adc, const NoiseModel& noise,
                        Rng& rng);
ProductDigits run_chain(const crossbar::PartialSumsAnalog& partials, const AdcConfig& adc);

}  // namespace xbarmul::chain

#endif  // XBARMUL_CHAIN_HPP
