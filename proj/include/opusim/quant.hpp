// quant.hpp — Uniform symmetric quantizer modeling DAC and ADC bit depths.
#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "opusim/errors.hpp"

namespace opusim {

// Uniform quantizer over the symmetric range [-full_scale, +full_scale].
// The level grid is k * step for k in [-2^(bits-1), 2^(bits-1) - 1] with
// step = full_scale / 2^(bits-1): 2^bits levels, zero included, extremes
// saturating (drivers clip, they do not wrap).
//
// bits == 0 is the documented "ideal converter" sentinel: quantize becomes
// the identity.  Used for noiseless oracle-equivalence runs.
struct QuantSpec {
    int bits = 8;
    double full_scale = 1.0;

    bool ideal() const { return bits == 0; }

    // Grid spacing (one LSB).
    double step() const {
        return full_scale / static_cast<double>(std::int64_t{1} << (bits - 1));
    }

    void validate() const {
        if (bits < 0 || bits > 30)
            throw ConfigError("QuantSpec: bits must be in [0, 30], got " + std::to_string(bits));
        if (!(full_scale > 0.0) || !std::isfinite(full_scale))
            throw ConfigError("QuantSpec: full_scale must be positive and finite");
    }
};

// Nearest level on the grid; ties round away from zero.  Inputs beyond
// +/- full_scale saturate to the extreme levels.
inline double quantize(double x, const QuantSpec& spec) {
    if (!std::isfinite(x)) throw Error("quantize: non-finite input");
    if (spec.ideal()) return x;
    const double step = spec.step();
    const std::int64_t k_max = (std::int64_t{1} << (spec.bits - 1)) - 1;
    const std::int64_t k_min = -(std::int64_t{1} << (spec.bits - 1));
    double k = std::round(x / step);
    if (k > static_cast<double>(k_max)) k = static_cast<double>(k_max);
    if (k < static_cast<double>(k_min)) k = static_cast<double>(k_min);
    return k * step;
}

}  // namespace opusim
