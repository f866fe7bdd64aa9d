// stats.hpp — Error-deviation statistics.  "Error deviation" is the standard
// deviation of (measured - truth) normalized to output full scale, the
// primary accuracy metric for analog readouts; effective bits = log2(1/sigma).
#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>

#include "opusim/errors.hpp"
#include "opusim/matrix.hpp"

namespace opusim {

struct ErrorStats {
    double mean_abs_error = 0.0;   // mean |measured - truth|, raw units
    double std_relative = 0.0;     // population std of residuals / full_scale
    double effective_bits = 0.0;   // log2(1 / std_relative); +inf when std is 0
    std::size_t sample_count = 0;
};

inline double effective_bits_from_sigma(double sigma) {
    if (sigma < 0.0) throw Error("effective_bits_from_sigma: negative sigma");
    if (sigma == 0.0) return std::numeric_limits<double>::infinity();
    return std::log2(1.0 / sigma);
}

// Residual statistics over paired samples.  Population (not sample) std:
// sample counts here are large, but the convention has to be pinned for
// reproducibility.
inline ErrorStats error_stats(std::span<const double> measured,
                              std::span<const double> truth,
                              double full_scale) {
    if (measured.size() != truth.size())
        throw Error("error_stats: sample count mismatch");
    if (measured.size() < 2)
        throw Error("error_stats: need at least 2 samples, got " +
                    std::to_string(measured.size()));
    if (!(full_scale > 0.0) || !std::isfinite(full_scale))
        throw Error("error_stats: full_scale must be positive");

    const std::size_t n = measured.size();
    double mean = 0.0, mean_abs = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = measured[i] - truth[i];
        mean += r;
        mean_abs += std::fabs(r);
    }
    mean /= static_cast<double>(n);
    mean_abs /= static_cast<double>(n);

    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = (measured[i] - truth[i]) - mean;
        var += d * d;
    }
    var /= static_cast<double>(n);

    ErrorStats s;
    s.sample_count = n;
    s.mean_abs_error = mean_abs;
    s.std_relative = std::sqrt(var) / full_scale;
    s.effective_bits = effective_bits_from_sigma(s.std_relative);
    return s;
}

inline ErrorStats error_stats(const Matrix& measured, const Matrix& truth,
                              double full_scale) {
    if (!measured.same_shape(truth)) throw Error("error_stats: shape mismatch");
    return error_stats(std::span<const double>(measured.data()),
                       std::span<const double>(truth.data()), full_scale);
}

}  // namespace opusim
