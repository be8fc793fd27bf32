#include "xbarmul/device.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "xbarmul/random.hpp"

namespace xbarmul::device {

namespace {

// Pulses are integrated in sub-steps no wider than this.
constexpr double kMaxSubstep = 0.25;

}  // namespace

void DeviceParams::validate() const {
    if (!(length > 0.0)) throw DeviceError("device length must be positive");
    if (!(r_on > 0.0) || !(r_off > r_on)) throw DeviceError("need 0 < R_on < R_off");
    if (!(ion_mobility > 0.0)) throw DeviceError("ion mobility must be positive");
}

Memristor::Memristor(DeviceParams params, double doped_length) : params_(params), w_(doped_length) {
    params_.validate();
    if (doped_length < 0.0 || doped_length > params_.length) {
        throw DeviceError("doped length must lie in [0, D]");
    }
}

double Memristor::resistance() const noexcept {
    const double frac = w_ / params_.length;
    return params_.r_on * frac + params_.r_off * (1.0 - frac);
}

double Memristor::normalized_conductance() const noexcept {
    const double g_on = 1.0 / params_.r_on;
    const double g_off = 1.0 / params_.r_off;
    return std::clamp((conductance() - g_off) / (g_on - g_off), 0.0, 1.0);
}

double Memristor::step(double voltage, double dt) {
    if (!(dt > 0.0)) throw DeviceError("time step must be positive");
    const double current = voltage / resistance();
    const double dw = params_.ion_mobility * (params_.r_on / params_.length) * current * dt;
    w_ = std::clamp(w_ + dw, 0.0, params_.length);
    return current;
}

IvTrace simulate_iv(Memristor& device, const Waveform& waveform, double dt, std::size_t steps) {
    if (steps == 0) throw DeviceError("need at least one step");
    if (!(dt > 0.0)) throw DeviceError("time step must be positive");
    IvTrace trace;
    trace.reserve(steps);
    for (std::size_t i = 0; i < steps; ++i) {
        const double t = static_cast<double>(i) * dt;
        const double v = waveform(t);
        const double w = device.doped_length();
        const double current = device.step(v, dt);
        trace.push_back({t, v, current, w});
    }
    return trace;
}

void write_iv_csv(std::ostream& out, const IvTrace& trace) {
    const auto old_precision = out.precision(17);
    out << "t,v,i,w\n";
    for (const auto& s : trace) {
        out << s.time << ',' << s.voltage << ',' << s.current << ',' << s.doped_length << '\n';
    }
    out.precision(old_precision);
}

ProgramResult program_conductance(double target, double tolerance, std::size_t max_pulses,
                                  std::uint64_t seed, const DeviceParams& params,
                                  const ProgramOptions& options) {
    if (!(target >= 0.0 && target <= 1.0)) throw DeviceError("target conductance must lie in [0, 1]");
    if (!(tolerance > 0.0)) throw DeviceError("tolerance must be positive");

    Rng rng(seed);
    Memristor device(params, 0.0);
    double width = options.initial_pulse_width;
    int last_polarity = 0;

    ProgramResult result;
    for (;;) {
        const double read = device.normalized_conductance();
        result.achieved = read;
        if (std::abs(read - target) <= tolerance) {
            result.converged = true;
            return result;
        }
        if (result.pulses >= max_pulses) return result;

        const int polarity = read < target ? 1 : -1;
        if (last_polarity != 0) {
            width = polarity == last_polarity ? std::min(width * options.grow_factor, options.max_pulse_width)
                                              : width * options.shrink_factor;
        }
        last_polarity = polarity;

        const double jitter = 1.0 + uniform_symmetric(rng, options.pulse_jitter);
        const double pulse = width * jitter;
        const auto substeps = static_cast<std::size_t>(std::ceil(pulse / kMaxSubstep));
        for (std::size_t s = 0; s < substeps; ++s) {
            device.step(polarity * options.write_voltage, pulse / static_cast<double>(substeps));
        }
        ++result.pulses;
    }
}

}  // namespace xbarmul::device
