#ifndef XBARMUL_CROSSBAR_HPP
#define XBARMUL_CROSSBAR_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "xbarmul/fixedpoint.hpp"
#include "xbarmul/random.hpp"

namespace xbarmul {

class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class NoiseKind { UniformBounded, Gaussian };

/// One perturbation source. For UniformBounded, |draw| <= magnitude always;
/// for Gaussian, magnitude is the standard deviation.
struct NoiseSpec {
    NoiseKind kind = NoiseKind::UniformBounded;
    double magnitude = 0.0;

    double draw(Rng& rng) const;
    bool active() const noexcept { return magnitude > 0.0; }
};

struct NoiseModel {
    NoiseSpec write;   // programmed crossbar conductances
    NoiseSpec input;   // input amplitudes, one draw per row per read
    NoiseSpec chain;   // summing memristors of each chain cell
    NoiseSpec dac;     // carry re-emitted by a cell's DAC; ideal by default
    std::uint64_t seed = 0;

    void validate() const;
};

namespace crossbar {

/// rows x cols normalized conductances. A cross-point is either open (no
/// device, never conducts, never receives write noise) or programmed with a
/// value in [0, 1].
class ConductanceMatrix {
public:
    ConductanceMatrix(std::size_t rows, std::size_t cols);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    bool is_open(std::size_t r, std::size_t c) const { return !cells_.at(index(r, c)).has_value(); }
    /// Conductance seen by the read circuit; open cells read as 0.
    double at(std::size_t r, std::size_t c) const { return cells_.at(index(r, c)).value_or(0.0); }
    void program(std::size_t r, std::size_t c, double g);
    void open(std::size_t r, std::size_t c) { cells_.at(index(r, c)).reset(); }

    /// True when this is a k x (2k-1) array with programmed cells only in
    /// columns r .. r+k-1 of each row r.
    bool is_banded() const noexcept;

    friend bool operator==(const ConductanceMatrix&, const ConductanceMatrix&) = default;

private:
    std::size_t index(std::size_t r, std::size_t c) const;

    std::size_t rows_;
    std::size_t cols_;
    std::vector<std::optional<double>> cells_;
};

/// Noisy column readouts Z~_j in normalized units, j = 0 .. 2k-2.
struct PartialSumsAnalog {
    std::vector<double> values;
    unsigned bits_per_digit;
    std::size_t digit_count;
};

/// Row i holds Y_1..Y_k in columns i..i+k-1; every other cross-point is open.
ConductanceMatrix build_multiplier_layout(const DigitVector& y);

/// Perturbation for the cell at (row, col); used to inject a known write error.
using CellPerturbation = std::function<double(std::size_t row, std::size_t col)>;

/// Adds an independent write-noise draw to every programmed cell (row-major
/// order) and clips to [0, 1]. Open cells are left open.
ConductanceMatrix program_array(const ConductanceMatrix& ideal, const NoiseSpec& write_noise, Rng& rng);
ConductanceMatrix program_array(const ConductanceMatrix& ideal, const CellPerturbation& perturbation);

/// Input amplitudes with one input-noise draw per row.
std::vector<double> perturb_inputs(std::span<const double> inputs, const NoiseSpec& input_noise, Rng& rng);

struct ReadoutOptions {
    /// Additive op-amp offset per column; empty means ideal amplifiers.
    std::vector<double> column_offsets;
};

/// Noise-free column currents for already-perturbed amplitudes:
/// out[c] = sum_i amplitudes[i] * g(i, c) + offset[c].
std::vector<double> column_readout(const ConductanceMatrix& g, std::span<const double> amplitudes,
                                   const ReadoutOptions& readout = {});

/// Plain noisy matrix-vector product y = M x with input noise applied.
std::vector<double> general_mac(const ConductanceMatrix& g, std::span<const double> x, const NoiseSpec& input_noise,
                                Rng& rng, const ReadoutOptions& readout = {});

/// Multiply-accumulate on a banded multiplier layout; the column sums are the
/// partial sums Z~_j of the product.
PartialSumsAnalog analog_mac(const ConductanceMatrix& g, std::span<const double> x_inputs, unsigned bits_per_digit,
                             const NoiseSpec& input_noise, Rng& rng, const ReadoutOptions& readout = {});

/// Worst-case |Z~_j - Z_j| for uniform-bounded noise: T_j * (dw + dx + dw*dx).
double readout_error_bound(std::size_t slot, std::size_t digit_count, double write_magnitude,
                           double input_magnitude);

}  // namespace crossbar
}  // namespace xbarmul

#endif  // XBARMUL_CROSSBAR_HPP
