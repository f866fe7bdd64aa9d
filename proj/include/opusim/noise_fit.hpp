// noise_fit.hpp — Monte Carlo characterization and behavioral noise fitting.
//
// measure_error_deviation runs random MACs of a fixed length through the
// crossbar and returns the error deviation (std of residuals over the
// output full scale M).  fit_noise_to_sigma inverts it: given a target
// deviation it returns a phase-jitter-dominated NoiseModel whose measured
// deviation hits the target.  The paper-style targets cannot be decomposed
// into physical sources, so the split is a documented convention —
// amp : phase : readout variance shares of 1 : 4 : 1 — with the phase knob
// closing the gap by monotone bisection under common random numbers.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "opusim/device.hpp"
#include "opusim/errors.hpp"
#include "opusim/noise.hpp"
#include "opusim/rng.hpp"
#include "opusim/stats.hpp"

namespace opusim {

struct DeviationOptions {
    std::size_t vector_len = 64;   // MAC length M
    std::size_t samples = 10000;   // minimum monitored MACs
    std::size_t passes = 0;        // 0: derived from samples
    std::size_t monitor_rows = 0;  // 0: monitor the whole array
    std::uint64_t data_seed = 0x5eedULL;
};

// Drives full random tiles through the crossbar and accumulates residuals
// of the monitored units against the exact dot products.
inline ErrorStats measure_error_deviation(const DeviceConfig& cfg,
                                          const NoiseModel& noise,
                                          const DeviationOptions& opts) {
    if (opts.vector_len < 1 || opts.vector_len > cfg.max_integration_len)
        throw ConfigError("measure_error_deviation: vector_len must be in [1, M_max]");
    const std::size_t mon_rows =
        opts.monitor_rows == 0 ? cfg.rows : std::min(opts.monitor_rows, cfg.rows);
    const std::size_t macs_per_pass = mon_rows * cfg.cols;
    const std::size_t passes =
        opts.passes > 0 ? opts.passes
                        : (opts.samples + macs_per_pass - 1) / macs_per_pass;
    const std::size_t m_len = opts.vector_len;
    const double full_scale = static_cast<double>(m_len);

    std::vector<double> measured, truth;
    measured.reserve(passes * macs_per_pass);
    truth.reserve(passes * macs_per_pass);

    Matrix w_tile(cfg.rows, m_len);
    Matrix x_tile(m_len, cfg.cols);
    PhaseDriftCursor drift;
    for (std::size_t p = 0; p < passes; ++p) {
        for (std::size_t r = 0; r < cfg.rows; ++r)
            for (std::size_t m = 0; m < m_len; ++m)
                w_tile(r, m) =
                    2.0 * rng::keyed_uniform(opts.data_seed, rng::kGeneric, p, 0,
                                             r * m_len + m) - 1.0;
        for (std::size_t m = 0; m < m_len; ++m)
            for (std::size_t c = 0; c < cfg.cols; ++c)
                x_tile(m, c) =
                    2.0 * rng::keyed_uniform(opts.data_seed, rng::kGeneric, p, 1,
                                             m * cfg.cols + c) - 1.0;

        const CrossbarResult res = crossbar_pass(w_tile, x_tile, cfg, noise, p, &drift);
        for (std::size_t r = 0; r < mon_rows; ++r) {
            for (std::size_t c = 0; c < cfg.cols; ++c) {
                double dot = 0.0;
                for (std::size_t m = 0; m < m_len; ++m) dot += w_tile(r, m) * x_tile(m, c);
                measured.push_back(res.at(r, c).adc_code * full_scale);
                truth.push_back(dot);
            }
        }
    }
    return error_stats(measured, truth, full_scale);
}

struct FitOptions {
    std::size_t samples = 10000;
    double tolerance = 0.02;   // relative, on the measured deviation
    std::size_t max_iters = 48;
    std::uint64_t noise_seed = 1;
    std::uint64_t data_seed = 0x5eedULL;
};

// Fits a NoiseModel to a target error deviation for MACs of length M on the
// given device.  Throws (naming the achievable floor) when the target lies
// below the quantization floor of the config.
inline NoiseModel fit_noise_to_sigma(const NoisePreset& preset, const DeviceConfig& cfg,
                                     std::size_t vector_len, const FitOptions& fit = {}) {
    if (!(preset.target_sigma > 0.0))
        throw ConfigError("fit_noise_to_sigma: target_sigma must be positive");

    DeviationOptions mopts;
    mopts.vector_len = vector_len;
    mopts.samples = fit.samples;
    mopts.data_seed = fit.data_seed;

    auto sigma_of = [&](const NoiseModel& m) {
        return measure_error_deviation(cfg, m, mopts).std_relative;
    };

    NoiseModel model;
    model.seed = fit.noise_seed;

    const double target = preset.target_sigma;
    const double floor = sigma_of(model);  // all-zero model: pure quantization
    if (target <= floor * 1.02)
        throw Error("fit_noise_to_sigma: target " + std::to_string(target) +
                    " is at or below the quantization floor " + std::to_string(floor) +
                    " of this config");

    // Side knobs take 1/6 of the remaining variance budget each, sized with
    // first-order formulas for uniform [-1,1] data:
    //   amp:     var_rel = 2*sigma_a^2 * E[(wx)^2] * M / M^2 = 2*sigma_a^2/(9M)
    //   readout: var_rel = sigma_r^2 / M^2
    const double budget2 = target * target - floor * floor;
    const double share2 = budget2 / 6.0;
    const double m_d = static_cast<double>(vector_len);
    model.amp_noise_rel = std::sqrt(4.5 * m_d * share2);
    model.readout_noise_std = m_d * std::sqrt(share2);

    double lo = 0.0;
    double sigma_lo = sigma_of(model);
    if (sigma_lo > target) {
        // The analytic shares overshot; shrink them instead of the phase knob.
        const double amp0 = model.amp_noise_rel;
        const double ro0 = model.readout_noise_std;
        double ulo = 0.0, uhi = 1.0;
        for (std::size_t it = 0; it < fit.max_iters; ++it) {
            const double u = 0.5 * (ulo + uhi);
            model.amp_noise_rel = amp0 * u;
            model.readout_noise_std = ro0 * u;
            const double s = sigma_of(model);
            if (std::fabs(s - target) <= fit.tolerance * target) return model;
            (s > target ? uhi : ulo) = u;
        }
        return model;
    }

    double hi = 0.5;
    model.phase_jitter_std = hi;
    double sigma_hi = sigma_of(model);
    while (sigma_hi < target && hi < 8.0) {
        hi *= 2.0;
        model.phase_jitter_std = hi;
        sigma_hi = sigma_of(model);
    }
    if (sigma_hi < target)
        throw Error("fit_noise_to_sigma: target " + std::to_string(target) +
                    " unreachable; max achievable " + std::to_string(sigma_hi));

    for (std::size_t it = 0; it < fit.max_iters; ++it) {
        const double p = 0.5 * (lo + hi);
        model.phase_jitter_std = p;
        const double s = sigma_of(model);
        if (std::fabs(s - target) <= fit.tolerance * target) return model;
        if (s > target) {
            hi = p;
        } else {
            lo = p;
            sigma_lo = s;
        }
    }
    model.phase_jitter_std = 0.5 * (lo + hi);
    return model;
}

inline NoiseModel fit_noise_to_sigma(const std::string& preset_label,
                                     const DeviceConfig& cfg, std::size_t vector_len,
                                     const FitOptions& fit = {}) {
    return fit_noise_to_sigma(find_noise_preset(preset_label), cfg, vector_len, fit);
}

}  // namespace opusim
