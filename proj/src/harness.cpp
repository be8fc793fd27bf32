#include "xbarmul/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>

namespace xbarmul::harness {

namespace {

constexpr std::uint64_t kOperandSalt = 0x6f70;   // "op"
constexpr std::uint64_t kNoiseSalt = 0x6e7a;     // "nz"

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <typename T>
T parse_unsigned(const std::string& key, const std::string& text) {
    T value{};
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end) throw ConfigError("'" + key + "' expects a non-negative integer, got '" + text + "'");
    return value;
}

NoiseKind parse_kind(const std::string& text) {
    if (text == "uniform") return NoiseKind::UniformBounded;
    if (text == "gaussian") return NoiseKind::Gaussian;
    throw ConfigError("noise_kind must be 'uniform' or 'gaussian', got '" + text + "'");
}

// Produces the column readouts for a decomposed operand pair.
using FrontEnd = std::function<crossbar::PartialSumsAnalog(const DigitVector& xd, const DigitVector& yd)>;

TrialReport evaluate(const FixedPointValue& x, const FixedPointValue& y, const SimulationConfig& config,
                     const FrontEnd& front_end, Rng& chain_rng) {
    config.validate();
    const unsigned n = config.operand_bits;
    if (x.frac_bits() > n || y.frac_bits() > n) {
        throw ConfigError("operands carry more than n = " + std::to_string(n) + " fractional bits");
    }

    TrialReport report{x, y, exact_product(x.widened(n), y.widened(n)), {}, {}, false, {}, {}, {}, {}};

    const DigitVector xd = decompose(x, config.bits_per_digit, config.digit_count);
    const DigitVector yd = decompose(y, config.bits_per_digit, config.digit_count);
    const PartialSumsExact exact = partial_sums_exact(xd, yd);
    report.exact_partials.assign(exact.values().begin(), exact.values().end());

    const crossbar::PartialSumsAnalog analog = front_end(xd, yd);
    report.analog_partials = analog.values;

    try {
        report.digits = chain::run_chain(analog, config.adc(), config.noise, chain_rng);
    } catch (const chain::ChainFault& fault) {
        report.fault = fault.what();
        return report;
    }
    report.z_hat = report.digits->value();
    report.abs_error = abs_difference(*report.z_hat, report.z_exact);
    report.success = report.abs_error->numerator() <= (std::uint64_t{1} << n);
    return report;
}

}  // namespace

double parse_magnitude(const std::string& raw) {
    const std::string text = trim(raw);
    double value = 0.0;
    if (const auto caret = text.find('^'); caret != std::string::npos) {
        if (trim(text.substr(0, caret)) != "2") throw ConfigError("only powers of two are accepted: '" + text + "'");
        const std::string exp_text = trim(text.substr(caret + 1));
        int exponent = 0;
        const auto* end = exp_text.data() + exp_text.size();
        const auto [ptr, ec] = std::from_chars(exp_text.data(), end, exponent);
        if (ec != std::errc{} || ptr != end) throw ConfigError("bad exponent in '" + text + "'");
        value = std::ldexp(1.0, exponent);
    } else {
        std::istringstream in(text);
        in >> value;
        if (!in || !in.eof()) throw ConfigError("cannot parse magnitude '" + text + "'");
    }
    if (!(value >= 0.0) || !std::isfinite(value)) throw ConfigError("magnitude must be finite and non-negative");
    return value;
}

void SimulationConfig::validate() const {
    if (bits_per_digit == 0 || bits_per_digit > 16) throw ConfigError("m must be in [1, 16]");
    if (digit_count == 0) throw ConfigError("k must be positive");
    if (operand_bits == 0 || operand_bits > 32) throw ConfigError("n must be in [1, 32]");
    if (operand_bits != bits_per_digit * digit_count) {
        throw ConfigError("n must equal k*m (n=" + std::to_string(operand_bits) + ", k=" + std::to_string(digit_count) +
                          ", m=" + std::to_string(bits_per_digit) + ")");
    }
    if (trials == 0) throw ConfigError("trials must be at least 1");
    try {
        noise.validate();
        const chain::AdcConfig a = adc();
        a.validate();
        if (a.total_bits < chain::AdcConfig::min_total_bits(bits_per_digit, digit_count)) {
            throw ConfigError("adc_bits below the " +
                              std::to_string(chain::AdcConfig::min_total_bits(bits_per_digit, digit_count)) +
                              " bits this multiplier needs");
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

chain::AdcConfig SimulationConfig::adc() const {
    return {adc_bits.value_or(chain::AdcConfig::min_total_bits(bits_per_digit, digit_count)), bits_per_digit};
}

SimulationConfig SimulationConfig::parse(std::istream& in) {
    SimulationConfig config;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        if (key == "n") config.operand_bits = parse_unsigned<unsigned>(key, value);
        else if (key == "m") config.bits_per_digit = parse_unsigned<unsigned>(key, value);
        else if (key == "k") config.digit_count = parse_unsigned<std::size_t>(key, value);
        else if (key == "trials") config.trials = parse_unsigned<std::size_t>(key, value);
        else if (key == "seed") {
            config.seed = parse_unsigned<std::uint64_t>(key, value);
            config.seed_given = true;
        } else if (key == "adc_bits") config.adc_bits = parse_unsigned<unsigned>(key, value);
        else if (key == "write_noise") config.noise.write.magnitude = parse_magnitude(value);
        else if (key == "input_noise") config.noise.input.magnitude = parse_magnitude(value);
        else if (key == "chain_noise") config.noise.chain.magnitude = parse_magnitude(value);
        else if (key == "dac_noise") config.noise.dac.magnitude = parse_magnitude(value);
        else if (key == "noise_kind") {
            const NoiseKind kind = parse_kind(value);
            config.noise.write.kind = config.noise.input.kind = config.noise.chain.kind = config.noise.dac.kind = kind;
        } else {
            throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
    }
    return config;
}

SimulationConfig SimulationConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse(in);
}

TrialReport run_trial(const FixedPointValue& x, const FixedPointValue& y, const SimulationConfig& config, Rng& rng) {
    // Draw order is fixed: write noise row-major over programmed cells, one
    // input draw per row, then the chain cells from least significant up.
    const FrontEnd noisy = [&](const DigitVector& xd, const DigitVector& yd) {
        const crossbar::ConductanceMatrix programmed =
            crossbar::program_array(crossbar::build_multiplier_layout(yd), config.noise.write, rng);
        const std::vector<double> amplitudes = xd.normalized();
        return crossbar::analog_mac(programmed, amplitudes, config.bits_per_digit, config.noise.input, rng);
    };
    return evaluate(x, y, config, noisy, rng);
}

TrialReport run_trial(const FixedPointValue& x, const FixedPointValue& y, const SimulationConfig& config,
                      std::uint64_t seed) {
    Rng rng = derive_stream(seed, 0, kNoiseSalt);
    return run_trial(x, y, config, rng);
}

TrialReport run_injected_trial(const FixedPointValue& x, const FixedPointValue& y, const SimulationConfig& config,
                               std::span<const double> x_offsets, std::span<const double> y_offsets) {
    if (x_offsets.size() != config.digit_count || y_offsets.size() != config.digit_count) {
        throw ConfigError("need one offset per digit");
    }
    const FrontEnd injected = [&](const DigitVector& xd, const DigitVector& yd) {
        const crossbar::ConductanceMatrix programmed = crossbar::program_array(
            crossbar::build_multiplier_layout(yd), [&](std::size_t r, std::size_t c) { return y_offsets[c - r]; });
        std::vector<double> amplitudes = xd.normalized();
        for (std::size_t p = 0; p < amplitudes.size(); ++p) amplitudes[p] += x_offsets[p];
        return crossbar::PartialSumsAnalog{crossbar::column_readout(programmed, amplitudes), xd.bits_per_digit(),
                                           xd.size()};
    };
    Rng rng = derive_stream(config.seed, 0, kNoiseSalt);
    return evaluate(x, y, config, injected, rng);
}

SweepReport run_sweep(const SimulationConfig& config, unsigned workers) {
    config.validate();
    const unsigned n = config.operand_bits;
    SweepReport report;
    report.trials = config.trials;
    report.rows.resize(config.trials);

    auto run_range = [&](std::size_t first, std::size_t stride) {
        for (std::size_t i = first; i < config.trials; i += stride) {
            Rng operands = derive_stream(config.seed, i, kOperandSalt);
            const FixedPointValue x(operands() >> (64 - n), n);
            const FixedPointValue y(operands() >> (64 - n), n);
            Rng noise = derive_stream(config.seed, i, kNoiseSalt);
            report.rows[i] = run_trial(x, y, config, noise);
        }
    };

    workers = std::max(1U, workers);
    if (workers == 1) {
        run_range(0, 1);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run_range, w, workers);
        for (auto& t : pool) t.join();
    }

    report.max_error = FixedPointValue(0, 2 * n);
    for (const TrialReport& row : report.rows) {
        if (row.fault) ++report.faults;
        if (row.success) ++report.successes;
        if (row.abs_error && report.max_error < *row.abs_error) report.max_error = *row.abs_error;
    }
    report.success_rate = static_cast<double>(report.successes) / static_cast<double>(report.trials);
    return report;
}

void write_sweep_csv(std::ostream& out, const SweepReport& report) {
    out << "x,y,error,error_exact,fault\n";
    for (const TrialReport& row : report.rows) {
        out << row.x.to_decimal_string() << ',' << row.y.to_decimal_string() << ',';
        if (row.abs_error) out << row.abs_error->to_decimal_string() << ',' << row.abs_error->to_rational_string();
        else out << ',';
        out << ',';
        if (row.fault) {
            std::string note = *row.fault;
            std::replace(note.begin(), note.end(), ',', ';');
            out << note;
        }
        out << '\n';
    }
}

MarginReport noise_margin(std::size_t digit_count, unsigned bits_per_digit, double write_noise, double input_noise) {
    if (digit_count == 0 || bits_per_digit == 0 || bits_per_digit > 16) {
        throw ConfigError("k and m must be positive (m <= 16)");
    }
    if (!(write_noise >= 0.0) || !(input_noise >= 0.0)) throw ConfigError("noise magnitudes must be non-negative");

    MarginReport r{};
    r.digit_count = digit_count;
    r.bits_per_digit = bits_per_digit;
    r.write_noise = write_noise;
    r.input_noise = input_noise;
    r.accumulated_bound =
        static_cast<double>(digit_count) * (write_noise + input_noise + write_noise * input_noise);
    r.half_grid = std::ldexp(1.0, -static_cast<int>(2 * bits_per_digit + 1));
    r.feasible = r.accumulated_bound < r.half_grid;
    r.effective_bits = r.accumulated_bound > 0.0
                           ? static_cast<unsigned>(std::max(0.0, std::floor(-std::log2(r.accumulated_bound))))
                           : 64U;
    r.carry_bits = chain::AdcConfig::min_total_bits(bits_per_digit, digit_count) - 2 * bits_per_digit;
    r.adc_bits = 2 * bits_per_digit + r.carry_bits;
    return r;
}

void write_margin(std::ostream& out, const MarginReport& margin) {
    const auto old_precision = out.precision(17);
    out << "k = " << margin.digit_count << '\n'
        << "m = " << margin.bits_per_digit << '\n'
        << "write_noise = " << margin.write_noise << '\n'
        << "input_noise = " << margin.input_noise << '\n'
        << "accumulated_bound = " << margin.accumulated_bound << '\n'
        << "half_grid = " << margin.half_grid << '\n'
        << "effective_bits = " << margin.effective_bits << '\n'
        << "carry_bits = " << margin.carry_bits << '\n'
        << "adc_bits = " << margin.adc_bits << '\n'
        << (margin.feasible ? "feasible" : "infeasible") << '\n';
    out.precision(old_precision);
}

}  // namespace xbarmul::harness
