#ifndef XBARMUL_HARNESS_HPP
#define XBARMUL_HARNESS_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "xbarmul/chain.hpp"
#include "xbarmul/crossbar.hpp"
#include "xbarmul/fixedpoint.hpp"

namespace xbarmul::harness {

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Parses a non-negative magnitude written either as a power of two ("2^-8")
/// or as a plain decimal ("0.0063", "1e-3").
double parse_magnitude(const std::string& text);

struct SimulationConfig {
    unsigned operand_bits = 8;      // n
    unsigned bits_per_digit = 2;    // m
    std::size_t digit_count = 4;    // k
    NoiseModel noise;
    std::optional<unsigned> adc_bits;   // defaults to the minimal multiplier width
    std::size_t trials = 1;
    std::uint64_t seed = 0;
    bool seed_given = false;   // set when a config file names a seed

    /// Enforces n = k*m, 2n <= 64, non-negative noise and a usable ADC.
    void validate() const;
    chain::AdcConfig adc() const;

    /// Flat "key = value" text, '#' comments. Keys: n, m, k, noise_kind
    /// (uniform|gaussian), write_noise, input_noise, chain_noise, dac_noise,
    /// adc_bits, trials, seed. Magnitudes accept the forms of parse_magnitude.
    static SimulationConfig parse(std::istream& in);
    static SimulationConfig load(const std::string& path);
};

struct TrialReport {
    FixedPointValue x;
    FixedPointValue y;
    FixedPointValue z_exact;
    std::optional<FixedPointValue> z_hat;       // absent when the chain faulted
    std::optional<FixedPointValue> abs_error;   // |z_hat - z_exact| on the 2^-2n grid
    bool success = false;                       // abs_error <= 2^-n
    std::optional<std::string> fault;

    std::vector<std::uint64_t> exact_partials;  // Z_j in units of 2^-2m
    std::vector<double> analog_partials;        // Z~_j as read from the columns
    std::optional<chain::ProductDigits> digits;
};

/// Full pipeline for one operand pair, all noise drawn from rng: decompose,
/// program y into a noisy banded array, read it with noisy x amplitudes, then
/// recover the product through the carry chain.
TrialReport run_trial(const FixedPointValue& x, const FixedPointValue& y, const SimulationConfig& config, Rng& rng);
TrialReport run_trial(const FixedPointValue& x, const FixedPointValue& y, const SimulationConfig& config,
                      std::uint64_t seed);

/// Same pipeline with known perturbations: y_offsets[q] is added to every cell
/// holding Y_q, x_offsets[p] to input amplitude X_p. Chain noise still comes
/// from config (ideal when its magnitudes are zero).
TrialReport run_injected_trial(const FixedPointValue& x, const FixedPointValue& y, const SimulationConfig& config,
                               std::span<const double> x_offsets, std::span<const double> y_offsets);

struct SweepReport {
    std::size_t trials = 0;
    std::size_t successes = 0;
    std::size_t faults = 0;
    double success_rate = 0.0;
    FixedPointValue max_error;
    std::vector<TrialReport> rows;
};

/// Monte Carlo over config.trials operand pairs drawn uniformly on the n-bit
/// grid. Trial i uses streams derived from (config.seed, i), so the report is
/// identical for any worker count.
SweepReport run_sweep(const SimulationConfig& config, unsigned workers = 1);

/// Header x,y,error,error_exact,fault; decimals are exact expansions and
/// error_exact is num/den.
void write_sweep_csv(std::ostream& out, const SweepReport& report);

struct MarginReport {
    std::size_t digit_count;
    unsigned bits_per_digit;
    double write_noise;
    double input_noise;
    double accumulated_bound;   // k * (dw + dx + dw*dx)
    double half_grid;           // 2^-(2m+1)
    bool feasible;              // accumulated_bound < half_grid
    /// floor(-log2(accumulated_bound)): bits of each column sum that survive
    /// the accumulated noise. Unbounded (reported as 64) without noise.
    unsigned effective_bits;
    unsigned carry_bits;        // ceil(log2(k+1)), integer part of a column sum
    unsigned adc_bits;          // 2m + carry_bits
};

MarginReport noise_margin(std::size_t digit_count, unsigned bits_per_digit, double write_noise, double input_noise);

void write_margin(std::ostream& out, const MarginReport& margin);

}  // namespace xbarmul::harness

#endif  // XBARMUL_HARNESS_HPP
