#ifndef XBARMUL_DEVICE_HPP
#define XBARMUL_DEVICE_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <vector>

namespace xbarmul::device {

class DeviceError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct DeviceParams {
    double length = 1.0;           // D, meters
    double r_on = 1.0;             // ohms, fully doped
    double r_off = 160.0;          // ohms, undoped
    double ion_mobility = 0.01;    // mu_v, m^2 V^-1 s^-1

    void validate() const;
};

/// Linear ion-drift memristor: two resistors in series whose split is set by
/// the doped-region length w. Current from the doped side to the undoped side
/// (positive voltage here) widens the doped region and lowers the resistance.
class Memristor {
public:
    explicit Memristor(DeviceParams params = {}, double doped_length = 0.0);

    const DeviceParams& params() const noexcept { return params_; }
    double doped_length() const noexcept { return w_; }

    double resistance() const noexcept;
    double conductance() const noexcept { return 1.0 / resistance(); }
    /// (G - G_off) / (G_on - G_off), in [0, 1].
    double normalized_conductance() const noexcept;

    /// One forward-Euler step under constant voltage; w is clipped to [0, D].
    /// Returns the current that flowed at the start of the step.
    double step(double voltage, double dt);

private:
    DeviceParams params_;
    double w_;
};

struct IvSample {
    double time;
    double voltage;
    double current;
    double doped_length;
};

using IvTrace = std::vector<IvSample>;
using Waveform = std::function<double(double)>;

/// Samples the drive at t = i*dt, records (t, v, v/R(w), w) and then advances
/// the device by one Euler step, for i = 0 .. steps-1.
IvTrace simulate_iv(Memristor& device, const Waveform& waveform, double dt, std::size_t steps);

void write_iv_csv(std::ostream& out, const IvTrace& trace);

struct ProgramOptions {
    double write_voltage = 1.0;
    double initial_pulse_width = 1.0;
    /// Each pulse's width is scaled by a factor drawn uniformly from
    /// [1 - jitter, 1 + jitter].
    double pulse_jitter = 0.5;
    double grow_factor = 1.25;     // same polarity as the previous pulse
    double shrink_factor = 0.5;    // polarity reversed (overshoot)
    double max_pulse_width = 50.0;
};

struct ProgramResult {
    double achieved = 0.0;
    std::size_t pulses = 0;
    bool converged = false;
};

/// Write-verify loop starting from the reset state (w = 0): read, compare
/// against the target, then apply a jittered pulse toward it, shrinking the
/// pulse after every overshoot. Deterministic for a given seed.
ProgramResult program_conductance(double target, double tolerance, std::size_t max_pulses,
                                  std::uint64_t seed, const DeviceParams& params = {},
                                  const ProgramOptions& options = {});

}  // namespace xbarmul::device

#endif  // XBARMUL_DEVICE_HPP
