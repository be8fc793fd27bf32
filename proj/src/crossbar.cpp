#include "xbarmul/crossbar.hpp"

#include <algorithm>
#include <string>

namespace xbarmul {

double NoiseSpec::draw(Rng& rng) const {
    if (!active()) return 0.0;
    switch (kind) {
        case NoiseKind::UniformBounded:
            return uniform_symmetric(rng, magnitude);
        case NoiseKind::Gaussian:
            return magnitude * standard_normal(rng);
    }
    return 0.0;
}

void NoiseModel::validate() const {
    for (const NoiseSpec* spec : {&write, &input, &chain, &dac}) {
        if (!(spec->magnitude >= 0.0)) throw std::invalid_argument("noise magnitudes must be non-negative");
    }
}

namespace crossbar {

ConductanceMatrix::ConductanceMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), cells_(rows * cols) {
    if (rows == 0 || cols == 0) throw DimensionError("conductance matrix must be non-empty");
}

std::size_t ConductanceMatrix::index(std::size_t r, std::size_t c) const {
    if (r >= rows_ || c >= cols_) throw DimensionError("cross-point index out of range");
    return r * cols_ + c;
}

void ConductanceMatrix::program(std::size_t r, std::size_t c, double g) {
    if (!(g >= 0.0 && g <= 1.0)) throw std::invalid_argument("normalized conductance must lie in [0, 1]");
    cells_.at(index(r, c)) = g;
}

bool ConductanceMatrix::is_banded() const noexcept {
    if (cols_ != 2 * rows_ - 1) return false;
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t c = 0; c < cols_; ++c) {
            const bool in_band = c >= r && c < r + rows_;
            if (!in_band && cells_[r * cols_ + c].has_value()) return false;
        }
    }
    return true;
}

ConductanceMatrix build_multiplier_layout(const DigitVector& y) {
    const std::size_t k = y.size();
    ConductanceMatrix g(k, 2 * k - 1);
    for (std::size_t r = 0; r < k; ++r) {
        for (std::size_t q = 0; q < k; ++q) g.program(r, r + q, y.normalized(q));
    }
    return g;
}

ConductanceMatrix program_array(const ConductanceMatrix& ideal, const NoiseSpec& write_noise, Rng& rng) {
    return program_array(ideal, [&](std::size_t, std::size_t) { return write_noise.draw(rng); });
}

ConductanceMatrix program_array(const ConductanceMatrix& ideal, const CellPerturbation& perturbation) {
    ConductanceMatrix out = ideal;
    for (std::size_t r = 0; r < ideal.rows(); ++r) {
        for (std::size_t c = 0; c < ideal.cols(); ++c) {
            if (ideal.is_open(r, c)) continue;
            out.program(r, c, std::clamp(ideal.at(r, c) + perturbation(r, c), 0.0, 1.0));
        }
    }
    return out;
}

std::vector<double> perturb_inputs(std::span<const double> inputs, const NoiseSpec& input_noise, Rng& rng) {
    std::vector<double> out(inputs.begin(), inputs.end());
    for (double& v : out) v += input_noise.draw(rng);
    return out;
}

std::vector<double> column_readout(const ConductanceMatrix& g, std::span<const double> amplitudes,
                                   const ReadoutOptions& readout) {
    if (amplitudes.size() != g.rows()) {
        throw DimensionError("expected " + std::to_string(g.rows()) + " inputs, got " +
                             std::to_string(amplitudes.size()));
    }
    if (!readout.column_offsets.empty() && readout.column_offsets.size() != g.cols()) {
        throw DimensionError("column offset count must match the column count");
    }
    std::vector<double> out(g.cols(), 0.0);
    for (std::size_t c = 0; c < g.cols(); ++c) {
        double acc = 0.0;
        for (std::size_t r = 0; r < g.rows(); ++r) {
            if (!g.is_open(r, c)) acc += amplitudes[r] * g.at(r, c);
        }
        out[c] = readout.column_offsets.empty() ? acc : acc + readout.column_offsets[c];
    }
    return out;
}

std::vector<double> general_mac(const ConductanceMatrix& g, std::span<const double> x, const NoiseSpec& input_noise,
                                Rng& rng, const ReadoutOptions& readout) {
    if (x.size() != g.rows()) throw DimensionError("input length must match the row count");
    const std::vector<double> amplitudes = perturb_inputs(x, input_noise, rng);
    return column_readout(g, amplitudes, readout);
}

PartialSumsAnalog analog_mac(const ConductanceMatrix& g, std::span<const double> x_inputs, unsigned bits_per_digit,
                             const NoiseSpec& input_noise, Rng& rng, const ReadoutOptions& readout) {
    if (!g.is_banded()) throw DimensionError("analog_mac needs a banded k x (2k-1) multiplier layout");
    for (double x : x_inputs) {
        if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("input amplitudes must lie in [0, 1]");
    }
    return {general_mac(g, x_inputs, input_noise, rng, readout), bits_per_digit, g.rows()};
}

double readout_error_bound(std::size_t slot, std::size_t digit_count, double write_magnitude,
                           double input_magnitude) {
    const auto terms = static_cast<double>(PartialSumsExact::terms_in_slot(slot, digit_count));
    return terms * (write_magnitude + input_magnitude + write_magnitude * input_magnitude);
}

}  // namespace crossbar
}  // namespace xbarmul
