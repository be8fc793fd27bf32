#include "xbarmul/chain.hpp"

#include <bit>
#include <cmath>

namespace xbarmul::chain {

unsigned AdcConfig::min_total_bits(unsigned bits_per_digit, std::size_t digit_count) {
    // ceil(log2(k+1)) == bit width of k.
    return 2 * bits_per_digit + static_cast<unsigned>(std::bit_width(digit_count));
}

AdcConfig AdcConfig::for_multiplier(unsigned bits_per_digit, std::size_t digit_count) {
    AdcConfig adc{min_total_bits(bits_per_digit, digit_count), bits_per_digit};
    adc.validate();
    return adc;
}

double AdcConfig::grid() const {
    return std::ldexp(1.0, -2 * static_cast<int>(bits_per_digit));
}

void AdcConfig::validate() const {
    if (bits_per_digit == 0 || bits_per_digit > 16) throw std::invalid_argument("bits per digit must be in [1, 16]");
    if (total_bits <= 2 * bits_per_digit || total_bits > 62) {
        throw std::invalid_argument("ADC width must exceed 2m bits and stay below 63");
    }
}

std::uint64_t quantize(double value, const AdcConfig& adc) {
    const double code = std::round(value / adc.grid());
    if (!(code >= 0.0) || code >= static_cast<double>(adc.code_limit())) {
        throw ChainFault(FaultKind::Saturation, std::nullopt,
                         "ADC input " + std::to_string(value) + " outside its " + std::to_string(adc.total_bits) +
                             "-bit range");
    }
    return static_cast<std::uint64_t>(code);
}

CellOutput chain_cell(double partial_sum, std::uint64_t carry_in, const AdcConfig& adc, const NoiseModel& noise,
                      Rng& rng) {
    const unsigned m = adc.bits_per_digit;
    if (carry_in >> adc.carry_bits() != 0) {
        throw ChainFault(FaultKind::CarryOverflow, std::nullopt, "carry-in exceeds the carry field");
    }
    const double align = std::ldexp(1.0, -static_cast<int>(m));
    const double carry_voltage = static_cast<double>(carry_in) * align + noise.dac.draw(rng);
    const double g_direct = 1.0 + noise.chain.draw(rng);
    const double g_carry = align + noise.chain.draw(rng);
    const double sum = partial_sum * g_direct + carry_voltage * g_carry;

    const std::uint64_t code = quantize(sum, adc);
    const std::uint64_t carry = code >> m;
    if (carry >> adc.carry_bits() != 0) {
        throw ChainFault(FaultKind::CarryOverflow, std::nullopt, "carry-out exceeds the carry field");
    }
    return {static_cast<std::uint32_t>(code & ((std::uint64_t{1} << m) - 1)), carry, sum, code};
}

CellOutput chain_cell(double partial_sum, std::uint64_t carry_in, const AdcConfig& adc) {
    Rng unused(0);
    return chain_cell(partial_sum, carry_in, adc, NoiseModel{}, unused);
}

FixedPointValue ProductDigits::value() const {
    DigitVector dv(digits, bits_per_digit);
    return recompose(dv);
}

ProductDigits run_chain(const crossbar::PartialSumsAnalog& partials, const AdcConfig& adc, const NoiseModel& noise,
                        Rng& rng) {
    adc.validate();
    const std::size_t k = partials.digit_count;
    if (k == 0 || partials.values.size() != 2 * k - 1) throw std::invalid_argument("chain needs 2k-1 partial sums");
    if (partials.bits_per_digit != adc.bits_per_digit) {
        throw std::invalid_argument("ADC and partial sums disagree on bits per digit");
    }
    if (adc.total_bits < AdcConfig::min_total_bits(adc.bits_per_digit, k)) {
        throw std::invalid_argument("ADC needs at least " +
                                    std::to_string(AdcConfig::min_total_bits(adc.bits_per_digit, k)) + " bits");
    }

    ProductDigits out{std::vector<std::uint32_t>(2 * k, 0), adc.bits_per_digit, {}};
    out.cells.reserve(2 * k - 1);
    std::uint64_t carry = 0;
    for (std::size_t slot = 2 * k - 1; slot-- > 0;) {
        CellOutput cell{};
        try {
            cell = chain_cell(partials.values[slot], carry, adc, noise, rng);
        } catch (const ChainFault& fault) {
            throw ChainFault(fault.kind(), slot, std::string(fault.what()) + " at slot " + std::to_string(slot));
        }
        out.cells.push_back({slot, partials.values[slot], carry, cell});
        out.digits[slot + 1] = cell.digit;
        carry = cell.carry;
    }
    if (carry >> adc.bits_per_digit != 0) {
        throw ChainFault(FaultKind::CarryOverflow, 0, "final carry does not fit in one digit (product >= 1)");
    }
    out.digits[0] = static_cast<std::uint32_t>(carry);
    return out;
}

ProductDigits run_chain(const crossbar::PartialSumsAnalog& partials, const AdcConfig& adc) {
    Rng unused(0);
    return run_chain(partials, adc, NoiseModel{}, unused);
}

}  // namespace xbarmul::chain
