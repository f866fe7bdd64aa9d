// calibration.hpp — Per-unit phase and gain calibration.
//
// Mirrors the lab procedure: drive both inputs of a unit at full amplitude
// with aligned phase bits, sweep an added phase-shifter setting over
// [0, 2pi), take the argmax of the (averaged) differential photocurrent and
// refine it by parabolic interpolation on the peak and its two neighbors.
// The correction uses the signed readout, not its magnitude: the magnitude
// has a second maximum half a turn away where the sign flips, which would
// invert the gain correction.
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "opusim/device.hpp"
#include "opusim/errors.hpp"
#include "opusim/matrix.hpp"
#include "opusim/noise.hpp"

namespace opusim {

struct CalibrationOptions {
    std::size_t sweep_steps = 64;
    std::size_t probe_len = 32;   // symbols per probe integration
    std::size_t repeats = 16;     // averaged measurements per sweep point
};

struct CalibrationMap {
    Matrix phase_correction;   // radians, added to the unit's phase shifter
    Matrix gain_correction;    // multiplied into readouts digitally
    Matrix residual_gain;      // post-correction effective gain; 0 marks a dead unit
    std::vector<std::uint8_t> dead;  // row-major flags

    bool unit_dead(std::size_t r, std::size_t c) const {
        return dead[r * phase_correction.cols() + c] != 0;
    }

    static CalibrationMap identity(std::size_t rows, std::size_t cols) {
        CalibrationMap m;
        m.phase_correction = Matrix(rows, cols, 0.0);
        m.gain_correction = Matrix(rows, cols, 1.0);
        m.residual_gain = Matrix(rows, cols, 1.0);
        m.dead.assign(rows * cols, 0);
        return m;
    }
};

struct UnitCalibration {
    double phase_correction = 0.0;
    double gain_correction = 1.0;
    bool dead = false;
};

namespace detail {

inline double wrap_phase(double theta) {
    theta = std::remainder(theta, 2.0 * std::numbers::pi);
    if (theta >= std::numbers::pi) theta -= 2.0 * std::numbers::pi;
    if (theta < -std::numbers::pi) theta += 2.0 * std::numbers::pi;
    return theta;
}

// One averaged probe measurement of a single unit with an added phase
// shifter setting.  Reads the raw integrated charge (the TIA output), not
// the ADC code: sweeping quantized codes would flatten the peak.
inline double probe_unit(const DeviceConfig& cfg, const NoiseModel& noise,
                         std::size_t row, std::size_t col, double shifter,
                         std::size_t probe_len, std::size_t repeats,
                         std::uint64_t& pass_counter) {
    const std::vector<double> ones(probe_len, 1.0);
    double acc = 0.0;
    for (std::size_t rep = 0; rep < repeats; ++rep) {
        const std::uint64_t pass_id = pass_counter++;
        PulseTrain w = perturb_pulse_train(encode_vector(ones, cfg.dac, 1.0), row,
                                           pass_id, noise);
        PulseTrain x = perturb_pulse_train(encode_vector(ones, cfg.dac, 1.0),
                                           cfg.rows + col, pass_id, noise);
        double charge =
            homodyne_accumulate(w, x, cfg.unit_gain(row, col),
                                cfg.unit_phase_offset(row, col) + shifter,
                                cfg.max_integration_len);
        charge = perturb_readout(charge, mac_magnitude(w, x), row, col, pass_id, noise);
        acc += charge;
    }
    return acc / static_cast<double>(repeats);
}

}  // namespace detail

inline UnitCalibration calibrate_unit(const DeviceConfig& cfg, const NoiseModel& noise,
                                      std::size_t row, std::size_t col,
                                      const CalibrationOptions& opts = {}) {
    if (opts.sweep_steps < 8)
        throw ConfigError("calibrate_unit: sweep_steps must be >= 8");
    if (opts.probe_len < 1 || opts.probe_len > cfg.max_integration_len)
        throw ConfigError("calibrate_unit: probe_len must be in [1, max_integration_len]");
    if (row >= cfg.rows || col >= cfg.cols)
        throw Error("calibrate_unit: unit index out of range");

    const std::size_t steps = opts.sweep_steps;
    const double h = 2.0 * std::numbers::pi / static_cast<double>(steps);
    std::uint64_t pass_counter = 0;

    std::vector<double> sweep(steps);
    for (std::size_t s = 0; s < steps; ++s)
        sweep[s] = detail::probe_unit(cfg, noise, row, col, h * static_cast<double>(s),
                                      opts.probe_len, opts.repeats, pass_counter);

    std::size_t best = 0;
    for (std::size_t s = 1; s < steps; ++s)
        if (sweep[s] > sweep[best]) best = s;

    // Ideal response of a perfect unit to the same probe (quantized
    // amplitudes included), the reference for both checks below.
    const double probe_amp = quantize(1.0, cfg.dac);
    const double ideal = static_cast<double>(opts.probe_len) * probe_amp * probe_amp;

    UnitCalibration out;
    if (sweep[best] < 0.01 * ideal) {
        out.dead = true;
        return out;
    }

    const double y0 = sweep[best];
    const double ym = sweep[(best + steps - 1) % steps];
    const double yp = sweep[(best + 1) % steps];
    double theta = h * static_cast<double>(best);
    const double denom = ym - 2.0 * y0 + yp;
    if (denom < 0.0)  // curvature present; otherwise keep the coarse argmax
        theta += 0.5 * h * (ym - yp) / denom;

    out.phase_correction = detail::wrap_phase(theta);

    const double peak = detail::probe_unit(cfg, noise, row, col, out.phase_correction,
                                           opts.probe_len, opts.repeats, pass_counter);
    if (peak < 0.01 * ideal) {
        out.dead = true;
        return out;
    }
    out.gain_correction = ideal / peak;
    return out;
}

// Calibrates every unit in deterministic row-major order.  residual_gain is
// a simulator-side diagnostic (cos of the remaining phase error, times any
// gain left uncorrected); the corrections themselves come only from the
// simulated measurements.
inline CalibrationMap calibrate_array(const DeviceConfig& cfg, const NoiseModel& noise,
                                      const CalibrationOptions& opts = {}) {
    CalibrationMap map = CalibrationMap::identity(cfg.rows, cfg.cols);
    for (std::size_t r = 0; r < cfg.rows; ++r) {
        for (std::size_t c = 0; c < cfg.cols; ++c) {
            const UnitCalibration u = calibrate_unit(cfg, noise, r, c, opts);
            if (u.dead) {
                map.dead[r * cfg.cols + c] = 1;
                map.phase_correction(r, c) = 0.0;
                map.gain_correction(r, c) = 1.0;
                map.residual_gain(r, c) = 0.0;  // sentinel
                continue;
            }
            map.phase_correction(r, c) = u.phase_correction;
            map.gain_correction(r, c) = u.gain_correction;
            map.residual_gain(r, c) =
                std::cos(cfg.unit_phase_offset(r, c) + u.phase_correction);
        }
    }
    return map;
}

// Bakes the phase corrections into a device config (the shifter settings),
// e.g. to test that re-calibrating a corrected device yields ~zero.
inline DeviceConfig apply_phase_corrections(const DeviceConfig& cfg,
                                            const CalibrationMap& map) {
    DeviceConfig out = cfg;
    for (std::size_t r = 0; r < cfg.rows; ++r)
        for (std::size_t c = 0; c < cfg.cols; ++c)
            out.unit_phase_offset(r, c) = detail::wrap_phase(
                cfg.unit_phase_offset(r, c) + map.phase_correction(r, c));
    return out;
}

}  // namespace opusim
