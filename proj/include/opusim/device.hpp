// device.hpp — Physics abstraction of one crossbar pass.
//
// A pass drives N weight rows and K input columns through N+K modulators
// (each vector is encoded and noise-perturbed exactly once, which is what
// gives same-row readout errors their correlated structure), interferes
// them at N x K homodyne units, integrates charge over M symbols, and reads
// the result out through the ADC.
//
// A single unit computes
//     charge = gain * sum_m s_m * A^W_m * A^X_m * sin(pi/2 + offset + phi^W_m + phi^X_m)
// where s_m is +1 when the phase bits agree and -1 when they differ.  The
// operating point is quadrature: with perfect calibration the sine factor
// is 1 and the charge is exactly the signed dot product of the decoded
// vectors.  The proportionality constant between photocurrent and MAC value
// is normalized to 1 at that point.
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "opusim/errors.hpp"
#include "opusim/matrix.hpp"
#include "opusim/noise.hpp"
#include "opusim/pulse.hpp"
#include "opusim/quant.hpp"

namespace opusim {

struct DeviceConfig {
    std::size_t rows = 8;             // N, homodyne rows
    std::size_t cols = 8;             // K, homodyne columns
    double clock_rate = 2.4e9;        // symbols/second, used by the perf model
    QuantSpec dac{8, 1.0};
    QuantSpec adc{8, 1.0};
    std::size_t max_integration_len = 128;  // M_max, one charge-integration window
    Matrix unit_gain;                 // rows x cols, in (0, 2]
    Matrix unit_phase_offset;         // rows x cols, radians in [-pi, pi)

    static DeviceConfig uniform(std::size_t rows, std::size_t cols,
                                std::size_t max_integration_len = 128,
                                QuantSpec dac = {8, 1.0}, QuantSpec adc = {8, 1.0},
                                double clock_rate = 2.4e9) {
        DeviceConfig cfg;
        cfg.rows = rows;
        cfg.cols = cols;
        cfg.clock_rate = clock_rate;
        cfg.dac = dac;
        cfg.adc = adc;
        cfg.max_integration_len = max_integration_len;
        cfg.unit_gain = Matrix(rows, cols, 1.0);
        cfg.unit_phase_offset = Matrix(rows, cols, 0.0);
        cfg.validate();
        return cfg;
    }

    void validate() const {
        if (rows < 1 || cols < 1)
            throw ConfigError("DeviceConfig: rows and cols must be >= 1");
        if (max_integration_len < 1)
            throw ConfigError("DeviceConfig: max_integration_len must be >= 1");
        if (!(clock_rate > 0.0))
            throw ConfigError("DeviceConfig: clock_rate must be positive");
        dac.validate();
        adc.validate();
        if (unit_gain.rows() != rows || unit_gain.cols() != cols ||
            unit_phase_offset.rows() != rows || unit_phase_offset.cols() != cols)
            throw ConfigError("DeviceConfig: per-unit maps must be rows x cols");
        for (double g : unit_gain.data())
            if (!(g > 0.0) || g > 2.0)
                throw ConfigError("DeviceConfig: unit gains must be in (0, 2]");
        for (double p : unit_phase_offset.data())
            if (p < -std::numbers::pi || p >= std::numbers::pi)
                throw ConfigError("DeviceConfig: unit phase offsets must be in [-pi, pi)");
    }
};

struct HomodyneReadout {
    double raw_charge = 0.0;  // integrated differential photocurrent, arbitrary units
    double adc_code = 0.0;    // quantized raw_charge / output_scale
    bool saturated = false;   // |raw_charge / output_scale| exceeded the ADC full scale
};

// Integrated charge for one unit.  When neither train carries phase errors
// the sine factor is constant across symbols and is evaluated once; the
// per-symbol arithmetic is unchanged, so both paths agree bit for bit.
inline double homodyne_accumulate(const PulseTrain& w, const PulseTrain& x,
                                  double gain, double phase_offset,
                                  std::size_t max_integration_len) {
    const std::size_t m_len = w.length();
    if (m_len != x.length())
        throw Error("homodyne_accumulate: train lengths differ (" +
                    std::to_string(m_len) + " vs " + std::to_string(x.length()) + ")");
    if (m_len > max_integration_len)
        throw Error("homodyne_accumulate: " + std::to_string(m_len) +
                    " symbols exceed the integration window of " +
                    std::to_string(max_integration_len) +
                    "; the compiler must split the vector");

    constexpr double half_pi = std::numbers::pi / 2.0;
    double acc = 0.0;
    if (w.phase_errors_all_zero() && x.phase_errors_all_zero()) {
        const double k = std::sin(half_pi + phase_offset);
        for (std::size_t m = 0; m < m_len; ++m) {
            const double s = (w.phase_bits[m] == x.phase_bits[m]) ? 1.0 : -1.0;
            acc += s * w.amplitudes[m] * x.amplitudes[m] * k;
        }
    } else {
        for (std::size_t m = 0; m < m_len; ++m) {
            const double s = (w.phase_bits[m] == x.phase_bits[m]) ? 1.0 : -1.0;
            const double k =
                std::sin(half_pi + phase_offset + w.phase_errors[m] + x.phase_errors[m]);
            acc += s * w.amplitudes[m] * x.amplitudes[m] * k;
        }
    }
    return gain * acc;
}

// Optical power sum, the scaling basis for shot noise.
inline double mac_magnitude(const PulseTrain& w, const PulseTrain& x) {
    double s = 0.0;
    for (std::size_t m = 0; m < w.length(); ++m)
        s += std::fabs(w.amplitudes[m] * x.amplitudes[m]);
    return s;
}

inline HomodyneReadout adc_readout(double raw_charge, const QuantSpec& adc,
                                   double output_scale) {
    if (!std::isfinite(raw_charge)) throw Error("adc_readout: non-finite charge");
    if (!(output_scale > 0.0)) throw Error("adc_readout: output_scale must be positive");
    HomodyneReadout r;
    r.raw_charge = raw_charge;
    const double normalized = raw_charge / output_scale;
    r.adc_code = quantize(normalized, adc);
    r.saturated = std::fabs(normalized) > adc.full_scale;
    return r;
}

struct CrossbarResult {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<HomodyneReadout> units;  // row-major

    const HomodyneReadout& at(std::size_t r, std::size_t c) const {
        return units[r * cols + c];
    }
};

// One crossbar pass: W_tile is (n x M) with one weight vector per row,
// X_tile is (M x k) with one input vector per column; both pre-scaled to
// [-1, 1].  Channel ids are physical modulator indices: W rows occupy
// 0..rows-1 and X columns cfg.rows..cfg.rows+cols-1, so a partial tile
// keeps the same streams as a full one.  The readout full scale is M.
inline CrossbarResult crossbar_pass(const Matrix& w_tile, const Matrix& x_tile,
                                    const DeviceConfig& cfg, const NoiseModel& noise,
                                    std::uint64_t pass_id,
                                    PhaseDriftCursor* drift = nullptr) {
    const std::size_t n = w_tile.rows();
    const std::size_t m_len = w_tile.cols();
    const std::size_t k = x_tile.cols();
    if (x_tile.rows() != m_len)
        throw Error("crossbar_pass: W_tile cols != X_tile rows");
    if (n > cfg.rows || k > cfg.cols)
        throw Error("crossbar_pass: tile exceeds the crossbar (" + std::to_string(n) +
                    "x" + std::to_string(k) + " on " + std::to_string(cfg.rows) + "x" +
                    std::to_string(cfg.cols) + ")");
    if (m_len > cfg.max_integration_len)
        throw Error("crossbar_pass: " + std::to_string(m_len) +
                    " symbols exceed max_integration_len " +
                    std::to_string(cfg.max_integration_len));

    // Encode and perturb each vector once, as the N+K modulators do.
    std::vector<PulseTrain> w_trains;
    w_trains.reserve(n);
    std::vector<double> row_buf(m_len);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t m = 0; m < m_len; ++m) row_buf[m] = w_tile(r, m);
        w_trains.push_back(perturb_pulse_train(encode_vector(row_buf, cfg.dac, 1.0), r,
                                               pass_id, noise, drift));
    }
    std::vector<PulseTrain> x_trains;
    x_trains.reserve(k);
    std::vector<double> col_buf(m_len);
    for (std::size_t c = 0; c < k; ++c) {
        for (std::size_t m = 0; m < m_len; ++m) col_buf[m] = x_tile(m, c);
        x_trains.push_back(perturb_pulse_train(encode_vector(col_buf, cfg.dac, 1.0),
                                               cfg.rows + c, pass_id, noise, drift));
    }

    const double output_scale = static_cast<double>(m_len);
    CrossbarResult result;
    result.rows = n;
    result.cols = k;
    result.units.resize(n * k);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < k; ++c) {
            double charge = homodyne_accumulate(w_trains[r], x_trains[c],
                                                cfg.unit_gain(r, c),
                                                cfg.unit_phase_offset(r, c),
                                                cfg.max_integration_len);
            charge = perturb_readout(charge, mac_magnitude(w_trains[r], x_trains[c]),
                                     r, c, pass_id, noise);
            result.units[r * k + c] = adc_readout(charge, cfg.adc, output_scale);
        }
    }
    return result;
}

}  // namespace opusim
