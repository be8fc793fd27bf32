// Command-line driver: demo, sweep, bound and iv subcommands.

#include <array>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "xbarmul/device.hpp"
#include "xbarmul/harness.hpp"

using namespace xbarmul;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitInfeasible = 2;

struct ConfigFlags {
    std::string config_path;
    std::optional<unsigned> n, m, adc_bits;
    std::optional<std::size_t> k, trials;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> dw, dx, dc, dac, kind;

    void attach(CLI::App* app) {
        app->add_option("--config", config_path, "Key = value configuration file");
        app->add_option("--n", n, "Operand bits (must equal k*m)");
        app->add_option("--m", m, "Bits per memristor digit");
        app->add_option("--k", k, "Digits per operand");
        app->add_option("--dw", dw, "Write-noise magnitude, e.g. 2^-8");
        app->add_option("--dx", dx, "Input-noise magnitude");
        app->add_option("--dc", dc, "Chain summing-stage noise magnitude");
        app->add_option("--dac", dac, "Carry DAC noise magnitude");
        app->add_option("--noise-kind", kind, "uniform or gaussian");
        app->add_option("--adc-bits", adc_bits, "ADC width P (default 2m + ceil(log2(k+1)))");
    }

    harness::SimulationConfig resolve(harness::SimulationConfig config) const {
        if (!config_path.empty()) config = harness::SimulationConfig::load(config_path);
        if (m) config.bits_per_digit = *m;
        if (k) config.digit_count = *k;
        if (n) config.operand_bits = *n;
        else if (m || k) config.operand_bits = config.bits_per_digit * static_cast<unsigned>(config.digit_count);
        if (adc_bits) config.adc_bits = *adc_bits;
        if (trials) config.trials = *trials;
        if (seed) config.seed = *seed;
        if (dw) config.noise.write.magnitude = harness::parse_magnitude(*dw);
        if (dx) config.noise.input.magnitude = harness::parse_magnitude(*dx);
        if (dc) config.noise.chain.magnitude = harness::parse_magnitude(*dc);
        if (dac) config.noise.dac.magnitude = harness::parse_magnitude(*dac);
        if (kind) {
            NoiseKind nk;
            if (*kind == "uniform") nk = NoiseKind::UniformBounded;
            else if (*kind == "gaussian") nk = NoiseKind::Gaussian;
            else throw harness::ConfigError("--noise-kind must be uniform or gaussian");
            config.noise.write.kind = config.noise.input.kind = config.noise.chain.kind = config.noise.dac.kind = nk;
        }
        config.validate();
        return config;
    }
};

std::string join(const auto& values) {
    std::string out = "(";
    bool first = true;
    for (const auto& v : values) {
        if (!first) out += ", ";
        first = false;
        std::ostringstream s;
        s.precision(6);
        s << v;
        out += s.str();
    }
    return out + ")";
}

int run_demo() {
    harness::SimulationConfig config;   // n = 8, m = 2, k = 4
    const FixedPointValue x(214, 8);    // 0.8359375
    const FixedPointValue y(109, 8);    // 0.42578125
    // Perturbed input amplitudes (0.7509, 0.2545, 0.2564, 0.5050) and programmed
    // conductances (0.2546, 0.5063, 0.7510, 0.2550), as offsets from the ideal digits.
    const std::array<double, 4> x_noisy{0.7509, 0.2545, 0.2564, 0.5050};
    const std::array<double, 4> y_noisy{0.2546, 0.5063, 0.7510, 0.2550};
    const std::vector<double> x_ideal = decompose(x, 2, 4).normalized();
    const std::vector<double> y_ideal = decompose(y, 2, 4).normalized();
    std::array<double, 4> x_off{}, y_off{};
    for (std::size_t j = 0; j < 4; ++j) {
        x_off[j] = x_noisy[j] - x_ideal[j];
        y_off[j] = y_noisy[j] - y_ideal[j];
    }

    const harness::TrialReport r = harness::run_injected_trial(x, y, config, x_off, y_off);
    std::cout << "x = " << x.to_decimal_string() << "  digits " << join(x_ideal) << '\n'
              << "y = " << y.to_decimal_string() << "  digits " << join(y_ideal) << '\n'
              << "noisy X = " << join(x_noisy) << '\n'
              << "noisy Y = " << join(y_noisy) << '\n'
              << "exact partial sums (x 2^-4) = " << join(r.exact_partials) << '\n'
              << "column readouts = " << join(r.analog_partials) << '\n';
    if (r.digits) {
        std::cout << "chain (least significant slot first):\n";
        for (const auto& cell : r.digits->cells) {
            std::cout << "  slot " << cell.slot << ": Z~ = " << cell.partial_sum << ", carry in " << cell.carry_in
                      << ", V_s = " << cell.out.sum << ", code " << cell.out.code << " -> digit " << cell.out.digit
                      << ", carry out " << cell.out.carry << '\n';
        }
        std::cout << "product digits = " << join(r.digits->digits) << '\n';
    }
    if (r.fault) {
        std::cout << "fault: " << *r.fault << '\n';
        return kExitOk;
    }
    std::cout << "z     = " << r.z_hat->to_binary_string() << " = " << r.z_hat->to_decimal_string() << '\n'
              << "exact = " << r.z_exact.to_binary_string() << " = " << r.z_exact.to_decimal_string() << '\n'
              << "error = " << r.abs_error->to_rational_string() << (r.abs_error->is_zero() ? " (0)" : "") << '\n';
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Crossbar high-precision multiplier simulator"};
    app.require_subcommand(1);

    app.add_subcommand("demo", "Run the 8-bit worked example with fixed perturbations");

    ConfigFlags sweep_flags;
    std::string sweep_out;
    unsigned workers = 1;
    bool sweep_strict = false;
    auto* sweep = app.add_subcommand("sweep", "Monte Carlo sweep over random operand pairs");
    sweep_flags.attach(sweep);
    sweep->add_option("--trials", sweep_flags.trials, "Number of trials");
    sweep->add_option("--seed", sweep_flags.seed, "Master seed (required here or in --config)");
    sweep->add_option("--out", sweep_out, "CSV output path (default stdout)");
    sweep->add_option("--workers", workers, "Worker threads");
    sweep->add_flag("--strict", sweep_strict, "Exit 2 without running when the noise margin is infeasible");

    std::size_t bound_k = 0;
    unsigned bound_m = 0;
    std::string bound_dw = "0", bound_dx = "0";
    bool bound_strict = false;
    auto* bound = app.add_subcommand("bound", "Report the worst-case noise margin");
    bound->add_option("--k", bound_k, "Digits per operand")->required();
    bound->add_option("--m", bound_m, "Bits per digit")->required();
    bound->add_option("--dw", bound_dw, "Write-noise magnitude");
    bound->add_option("--dx", bound_dx, "Input-noise magnitude");
    bound->add_flag("--strict", bound_strict, "Exit 2 when infeasible");

    device::DeviceParams params;
    double amplitude = 1.0, period = 100.0, dt = 0.01, w0 = 0.5;
    unsigned periods = 2;
    std::string iv_out;
    auto* iv = app.add_subcommand("iv", "Sine-driven I-V trace of one memristor (CSV t,v,i,w)");
    iv->add_option("--amplitude", amplitude, "Drive amplitude (V)");
    iv->add_option("--period", period, "Drive period (s)");
    iv->add_option("--periods", periods, "Number of periods");
    iv->add_option("--dt", dt, "Euler step (s)");
    iv->add_option("--w0", w0, "Initial doped length (m)");
    iv->add_option("--length", params.length, "Device length D (m)");
    iv->add_option("--r-on", params.r_on, "R_on (ohm)");
    iv->add_option("--r-off", params.r_off, "R_off (ohm)");
    iv->add_option("--mu", params.ion_mobility, "Ion mobility");
    iv->add_option("--out", iv_out, "CSV output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    }

    try {
        if (app.got_subcommand("demo")) return run_demo();

        if (sweep->parsed()) {
            harness::SimulationConfig base;
            const harness::SimulationConfig config = sweep_flags.resolve(base);
            if (!sweep_flags.seed && !config.seed_given) throw harness::ConfigError("--seed is required");
            const auto margin = harness::noise_margin(config.digit_count, config.bits_per_digit,
                                                      config.noise.write.magnitude, config.noise.input.magnitude);
            if (sweep_strict && !margin.feasible) {
                std::cerr << "noise margin infeasible: bound " << margin.accumulated_bound << " >= "
                          << margin.half_grid << '\n';
                return kExitInfeasible;
            }
            const harness::SweepReport report = harness::run_sweep(config, workers);
            if (sweep_out.empty()) {
                harness::write_sweep_csv(std::cout, report);
            } else {
                std::ofstream out(sweep_out);
                if (!out) throw harness::ConfigError("cannot write '" + sweep_out + "'");
                harness::write_sweep_csv(out, report);
            }
            std::cerr << "trials " << report.trials << ", successes " << report.successes << ", faults "
                      << report.faults << ", success_rate " << report.success_rate << ", max_error "
                      << report.max_error.to_rational_string() << '\n';
            return kExitOk;
        }

        if (bound->parsed()) {
            const auto margin =
                harness::noise_margin(bound_k, bound_m, harness::parse_magnitude(bound_dw), harness::parse_magnitude(bound_dx));
            harness::write_margin(std::cout, margin);
            return bound_strict && !margin.feasible ? kExitInfeasible : kExitOk;
        }

        if (iv->parsed()) {
            if (!(period > 0.0) || !(dt > 0.0) || periods == 0) throw harness::ConfigError("period, dt and periods must be positive");
            device::Memristor dev(params, w0);
            const double omega = 2.0 * 3.14159265358979323846 / period;
            const auto steps = static_cast<std::size_t>(std::llround(periods * period / dt));
            const device::IvTrace trace =
                device::simulate_iv(dev, [&](double t) { return amplitude * std::sin(omega * t); }, dt, steps);
            if (iv_out.empty()) {
                device::write_iv_csv(std::cout, trace);
            } else {
                std::ofstream out(iv_out);
                if (!out) throw harness::ConfigError("cannot write '" + iv_out + "'");
                device::write_iv_csv(out, trace);
            }
            return kExitOk;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    }
    return kExitConfig;
}
