// pulse.hpp — Optical pulse trains.
//
// One signed vector becomes one train: the DAC drives a non-negative
// amplitude per time step and the sign rides on a binary carrier phase
// (0 or pi).  Homodyne interference then recovers the sign as +/-1
// depending on whether the two trains' phase bits agree.
#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "opusim/errors.hpp"
#include "opusim/quant.hpp"

namespace opusim {

struct PulseTrain {
    std::vector<double> amplitudes;     // in [0, 1]
    std::vector<std::uint8_t> phase_bits;  // 0 -> carrier phase 0, 1 -> pi
    std::vector<double> phase_errors;   // radians, injected by the noise model

    std::size_t length() const { return amplitudes.size(); }

    bool phase_errors_all_zero() const {
        for (double e : phase_errors)
            if (e != 0.0) return false;
        return true;
    }
};

// v_m -> amplitude quantize(|v_m| / scale), phase bit from sign.  The caller
// pre-scales: the device never silently clips an input vector, it rejects it.
inline PulseTrain encode_vector(std::span<const double> v, const QuantSpec& dac,
                                double scale) {
    if (!(scale > 0.0) || !std::isfinite(scale))
        throw Error("encode_vector: scale must be positive");
    PulseTrain p;
    p.amplitudes.reserve(v.size());
    p.phase_bits.reserve(v.size());
    p.phase_errors.assign(v.size(), 0.0);
    for (std::size_t m = 0; m < v.size(); ++m) {
        if (!std::isfinite(v[m])) throw Error("encode_vector: non-finite element");
        const double a = std::fabs(v[m]) / scale;
        if (a > 1.0)
            throw Error("encode_vector: |v[" + std::to_string(m) +
                        "]|/scale = " + std::to_string(a) +
                        " exceeds 1; caller must rescale");
        p.amplitudes.push_back(quantize(a, dac));
        p.phase_bits.push_back(v[m] < 0.0 ? 1 : 0);
    }
    return p;
}

// Inverse of encode (up to DAC quantization): signed values back out.
inline std::vector<double> decode_pulse_train(const PulseTrain& p, double scale) {
    std::vector<double> v(p.length());
    for (std::size_t m = 0; m < p.length(); ++m)
        v[m] = (p.phase_bits[m] ? -1.0 : 1.0) * p.amplitudes[m] * scale;
    return v;
}

}  // namespace opusim
