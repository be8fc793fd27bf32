#include "xbarmul/device.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

namespace {

using namespace xbarmul::device;

constexpr double kPi = 3.14159265358979323846;

TEST(Memristor, ResistanceLimits) {
    const DeviceParams p{1.0, 1.0, 160.0, 0.01};
    EXPECT_DOUBLE_EQ(Memristor(p, 0.0).resistance(), 160.0);
    EXPECT_DOUBLE_EQ(Memristor(p, 1.0).resistance(), 1.0);
    EXPECT_DOUBLE_EQ(Memristor(p, 0.5).resistance(), 80.5);
    EXPECT_DOUBLE_EQ(Memristor(p, 0.0).normalized_conductance(), 0.0);
    EXPECT_DOUBLE_EQ(Memristor(p, 1.0).normalized_conductance(), 1.0);
}

TEST(Memristor, ResistanceStrictlyDecreasesWithDopedLength) {
    double previous = Memristor({}, 0.0).resistance();
    for (int i = 1; i <= 100; ++i) {
        const double r = Memristor({}, i / 100.0).resistance();
        EXPECT_LT(r, previous);
        previous = r;
    }
}

TEST(Memristor, RejectsBadParameters) {
    EXPECT_THROW(Memristor(DeviceParams{1.0, 10.0, 5.0, 0.01}), DeviceError);
    EXPECT_THROW(Memristor(DeviceParams{0.0, 1.0, 5.0, 0.01}), DeviceError);
    EXPECT_THROW(Memristor({}, 1.5), DeviceError);
    Memristor dev;
    EXPECT_THROW(dev.step(1.0, 0.0), DeviceError);
}

TEST(Memristor, StepPolarity) {
    Memristor idle({}, 0.4);
    idle.step(0.0, 1.0);
    EXPECT_EQ(idle.doped_length(), 0.4);

    Memristor forward({}, 0.4);
    forward.step(0.5, 0.1);
    EXPECT_GT(forward.doped_length(), 0.4);

    Memristor reverse({}, 0.4);
    reverse.step(-0.5, 0.1);
    EXPECT_LT(reverse.doped_length(), 0.4);
}

TEST(Memristor, StepMatchesDriftEquation) {
    const DeviceParams p{2.0, 10.0, 100.0, 0.3};
    Memristor dev(p, 0.5);
    const double r = 10.0 * 0.25 + 100.0 * 0.75;
    const double i = dev.step(1.5, 0.01);
    EXPECT_DOUBLE_EQ(i, 1.5 / r);
    EXPECT_NEAR(dev.doped_length(), 0.5 + 0.3 * (10.0 / 2.0) * (1.5 / r) * 0.01, 1e-15);
}

TEST(Memristor, SaturatesAtFullyDoped) {
    Memristor dev({}, 0.2);
    int steps = 0;
    while (dev.doped_length() < 1.0 && steps < 100000) {
        dev.step(5.0, 1.0);
        ++steps;
    }
    EXPECT_LT(steps, 100000);
    EXPECT_EQ(dev.doped_length(), 1.0);
    EXPECT_DOUBLE_EQ(dev.resistance(), 1.0);
    dev.step(5.0, 1.0);
    EXPECT_EQ(dev.doped_length(), 1.0);
}

TEST(Memristor, StateStaysBoundedUnderRandomPulses) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> volts(-20.0, 20.0), width(0.01, 50.0), start(0.0, 1.0);
    for (int seq = 0; seq < 200; ++seq) {
        Memristor dev({}, start(rng));
        for (int i = 0; i < 200; ++i) {
            dev.step(volts(rng), width(rng));
            ASSERT_GE(dev.doped_length(), 0.0);
            ASSERT_LE(dev.doped_length(), 1.0);
        }
    }
}

TEST(Memristor, MonotoneUnderFixedPolarity) {
    Memristor up({}, 0.3), down({}, 0.7);
    double last_up = up.doped_length(), last_down = down.doped_length();
    for (int i = 0; i < 500; ++i) {
        up.step(0.8, 0.05);
        down.step(-0.8, 0.05);
        EXPECT_GE(up.doped_length(), last_up);
        EXPECT_LE(down.doped_length(), last_down);
        last_up = up.doped_length();
        last_down = down.doped_length();
    }
}

TEST(SimulateIv, PinchedAtZeroVoltage) {
    Memristor dev({1.0, 1.0, 160.0, 1.0}, 0.5);
    // Square-ish drive with exact zeros every quarter period.
    const auto drive = [](double t) {
        const int phase = static_cast<int>(std::floor(t)) % 4;
        return phase == 0 ? 0.0 : (phase == 1 ? 2.0 : (phase == 2 ? 0.0 : -2.0));
    };
    const IvTrace trace = simulate_iv(dev, drive, 0.25, 400);
    ASSERT_EQ(trace.size(), 400U);
    int zeros = 0;
    for (std::size_t i = 0; i < trace.size(); ++i) {
        if (i > 0) EXPECT_GT(trace[i].time, trace[i - 1].time);
        if (trace[i].voltage == 0.0) {
            EXPECT_EQ(trace[i].current, 0.0);
            ++zeros;
        }
    }
    EXPECT_GT(zeros, 100);
}

TEST(SimulateIv, OhmicWhenStateCannotMove) {
    Memristor dev({1.0, 1.0, 160.0, 1e-30}, 0.25);
    const double r0 = dev.resistance();
    const IvTrace trace = simulate_iv(dev, [](double t) { return 0.3 * std::sin(t); }, 0.01, 1000);
    for (const auto& s : trace) EXPECT_NEAR(s.current, s.voltage / r0, 1e-15);
}

// Closed form for a sine drive: integrating dw = c*i*dt with v = R(w)*i gives
// c*flux = R_off*(w - w0) - (R_off - R_on)/(2D) * (w^2 - w0^2).
double drift_closed_form(const DeviceParams& p, double w0, double flux) {
    const double c = p.ion_mobility * p.r_on / p.length;
    const double a = (p.r_off - p.r_on) / (2.0 * p.length);
    const double b = p.r_off;
    const double constant = b * w0 - a * w0 * w0 + c * flux;
    return (b - std::sqrt(b * b - 4.0 * a * constant)) / (2.0 * a);
}

TEST(SimulateIv, EulerTracksClosedFormAndReturnsAfterOnePeriod) {
    const DeviceParams p{1.0, 1.0, 160.0, 1.0};
    const double w0 = 0.5, amplitude = 1.0, period = 20.0, dt = 1e-3;
    const double omega = 2.0 * kPi / period;
    Memristor dev(p, w0);
    const auto steps = static_cast<std::size_t>(std::llround(period / dt));
    const IvTrace trace = simulate_iv(dev, [&](double t) { return amplitude * std::sin(omega * t); }, dt, steps);

    double max_excursion = 0.0;
    for (std::size_t i = 0; i < trace.size(); i += 500) {
        const double flux = amplitude * (1.0 - std::cos(omega * trace[i].time)) / omega;
        EXPECT_NEAR(trace[i].doped_length, drift_closed_form(p, w0, flux), 1e-4) << "t=" << trace[i].time;
        max_excursion = std::max(max_excursion, trace[i].doped_length - w0);
    }
    EXPECT_GT(max_excursion, 0.05);   // the state really moved
    EXPECT_NEAR(dev.doped_length(), w0, 1e-4);
}

TEST(SimulateIv, CsvHeaderAndRows) {
    Memristor dev;
    const IvTrace trace = simulate_iv(dev, [](double) { return 0.0; }, 0.5, 3);
    std::ostringstream out;
    write_iv_csv(out, trace);
    EXPECT_EQ(out.str(), "t,v,i,w\n0,0,0,0\n0.5,0,0,0\n1,0,0,0\n");
    EXPECT_THROW(simulate_iv(dev, [](double) { return 0.0; }, 0.5, 0), DeviceError);
}

TEST(ProgramConductance, ReachesTargetWithinTolerance) {
    const double tol = std::ldexp(1.0, -8);
    const ProgramResult r = program_conductance(0.42578125, tol, 1000, 1);
    EXPECT_TRUE(r.converged);
    EXPECT_LE(std::abs(r.achieved - 0.42578125), tol);
    EXPECT_GT(r.pulses, 10U);
}

TEST(ProgramConductance, EdgeCases) {
    const ProgramResult zero = program_conductance(0.0, 1e-3, 100, 3);
    EXPECT_TRUE(zero.converged);
    EXPECT_EQ(zero.pulses, 0U);
    EXPECT_EQ(zero.achieved, 0.0);

    const ProgramResult no_budget = program_conductance(0.6, 1e-3, 0, 3);
    EXPECT_FALSE(no_budget.converged);
    EXPECT_EQ(no_budget.pulses, 0U);

    EXPECT_THROW(program_conductance(0.5, 0.0, 100, 3), DeviceError);
    EXPECT_THROW(program_conductance(1.5, 0.1, 100, 3), DeviceError);

    EXPECT_TRUE(program_conductance(1.0, 1e-3, 1000, 9).converged);
}

TEST(ProgramConductance, DeterministicPerSeed) {
    const ProgramResult a = program_conductance(0.3, 1e-3, 1000, 77);
    const ProgramResult b = program_conductance(0.3, 1e-3, 1000, 77);
    EXPECT_EQ(a.pulses, b.pulses);
    EXPECT_EQ(a.achieved, b.achieved);
    const ProgramResult c = program_conductance(0.3, 1e-3, 1000, 78);
    EXPECT_TRUE(c.pulses != a.pulses || c.achieved != a.achieved);
}

TEST(ProgramConductance, ContractOverRandomTargets) {
    const double tol = std::ldexp(1.0, -8);
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> target(0.0, 1.0);
    int converged = 0;
    for (int i = 0; i < 1000; ++i) {
        const double t = target(rng);
        const ProgramResult r = program_conductance(t, tol, 1000, rng());
        if (r.converged) {
            ++converged;
            ASSERT_LE(std::abs(r.achieved - t), tol);
        }
        ASSERT_GE(r.achieved, 0.0);
        ASSERT_LE(r.achieved, 1.0);
    }
    EXPECT_GE(converged, 990);
}

}  // namespace
