// noise.hpp — Stochastic perturbations for pulse trains and readouts.
//
// The noise model is behavioral: its parameters are fit to measured error
// deviations, not derived from laser/detector physics.  All draws come from
// counter-based keyed streams (see rng.hpp), so a zero-parameter model is
// bit-exactly the identity and parallel execution cannot change results.
#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "opusim/errors.hpp"
#include "opusim/pulse.hpp"
#include "opusim/rng.hpp"

namespace opusim {

struct NoiseModel {
    double amp_noise_rel = 0.0;     // relative amplitude jitter std, per symbol
    double phase_jitter_std = 0.0;  // radians, i.i.d. per symbol
    double phase_drift_step = 0.0;  // radians, random-walk increment std per pass per channel
    double shot_factor = 0.0;       // charge variance per unit of sum |A^W * A^X|
    double readout_noise_std = 0.0; // additive charge noise std
    std::uint64_t seed = 0;

    bool all_zero() const {
        return amp_noise_rel == 0.0 && phase_jitter_std == 0.0 &&
               phase_drift_step == 0.0 && shot_factor == 0.0 &&
               readout_noise_std == 0.0;
    }

    void validate() const {
        if (amp_noise_rel < 0 || phase_jitter_std < 0 || phase_drift_step < 0 ||
            shot_factor < 0 || readout_noise_std < 0)
            throw ConfigError("NoiseModel: std parameters must be >= 0");
    }
};

// A clock-rate-tagged error-deviation target the fitter can aim at.
struct NoisePreset {
    std::string label;
    double target_sigma = 0.0;
};

// Presets for the measured error deviations at each characterization point:
// the three probe clock rates, the packaged 16-unit system, and the
// attention-stage workload.
inline const std::vector<NoisePreset>& builtin_noise_presets() {
    static const std::vector<NoisePreset> presets = {
        {"50GSa", 0.0119},
        {"100GSa", 0.0152},
        {"120GSa", 0.0226},
        {"2.4GSa", 0.0165},
        {"attention", 0.0053},
    };
    return presets;
}

inline const NoisePreset& find_noise_preset(const std::string& label) {
    for (const auto& p : builtin_noise_presets())
        if (p.label == label) return p;
    throw ConfigError("unknown noise preset '" + label + "'");
}

// Accumulated phase random walk for one channel after `pass_id` passes.
// Pure in (seed, channel, pass): increment j is keyed by (channel, j), so
// the walk value is the same no matter who computes it or in what order.
inline double phase_drift_value(const NoiseModel& model, std::uint64_t channel_id,
                                std::uint64_t pass_id) {
    if (model.phase_drift_step == 0.0) return 0.0;
    double w = 0.0;
    for (std::uint64_t p = 0; p <= pass_id; ++p)
        w += model.phase_drift_step *
             rng::keyed_normal(model.seed, rng::kPhaseDrift, channel_id, p, 0);
    return w;
}

// Memoized sequential view of the drift walks.  Each execution worker owns
// one; since the underlying walk is a pure function, every cursor agrees.
class PhaseDriftCursor {
public:
    double value(const NoiseModel& model, std::uint64_t channel_id, std::uint64_t pass_id) {
        if (model.phase_drift_step == 0.0) return 0.0;
        auto& st = state_[channel_id];
        if (!st.valid || st.pass > pass_id) {
            st.walk = phase_drift_value(model, channel_id, pass_id);
        } else {
            for (std::uint64_t p = st.pass + 1; p <= pass_id; ++p)
                st.walk += model.phase_drift_step *
                           rng::keyed_normal(model.seed, rng::kPhaseDrift, channel_id, p, 0);
        }
        st.pass = pass_id;
        st.valid = true;
        return st.walk;
    }

private:
    struct ChannelState {
        std::uint64_t pass = 0;
        double walk = 0.0;
        bool valid = false;
    };
    std::unordered_map<std::uint64_t, ChannelState> state_;
};

// Amplitude jitter + per-symbol phase jitter + per-pass channel drift.
// Stream keys: (seed, domain, channel_id, pass_id, symbol).
inline PulseTrain perturb_pulse_train(const PulseTrain& p, std::uint64_t channel_id,
                                      std::uint64_t pass_id, const NoiseModel& model,
                                      PhaseDriftCursor* drift = nullptr) {
    if (model.all_zero()) return p;
    PulseTrain out = p;
    const double drift_phase =
        drift ? drift->value(model, channel_id, pass_id)
              : phase_drift_value(model, channel_id, pass_id);
    for (std::size_t m = 0; m < out.length(); ++m) {
        if (model.amp_noise_rel > 0.0) {
            const double eps = model.amp_noise_rel *
                rng::keyed_normal(model.seed, rng::kAmpJitter, channel_id, pass_id, m);
            double a = out.amplitudes[m] * (1.0 + eps);
            // Physical amplitudes stay in [0, 1].
            if (a < 0.0) a = 0.0;
            if (a > 1.0) a = 1.0;
            out.amplitudes[m] = a;
        }
        double phi = drift_phase;
        if (model.phase_jitter_std > 0.0)
            phi += model.phase_jitter_std *
                rng::keyed_normal(model.seed, rng::kPhaseJitter, channel_id, pass_id, m);
        if (phi != 0.0) out.phase_errors[m] += phi;
    }
    return out;
}

// Detector-side noise: shot term with variance proportional to the optical
// MAC magnitude, plus a flat readout term.  Keyed by unit and pass.
inline double perturb_readout(double charge, double mac_magnitude,
                              std::uint64_t unit_row, std::uint64_t unit_col,
                              std::uint64_t pass_id, const NoiseModel& model) {
    if (mac_magnitude < 0.0)
        throw Error("perturb_readout: mac_magnitude must be >= 0");
    if (model.shot_factor == 0.0 && model.readout_noise_std == 0.0) return charge;
    const double var = model.shot_factor * mac_magnitude +
                       model.readout_noise_std * model.readout_noise_std;
    if (var == 0.0) return charge;
    const std::uint64_t unit_key = (unit_row << 32) | (unit_col & 0xffffffffULL);
    return charge + std::sqrt(var) *
        rng::keyed_normal(model.seed, rng::kReadout, unit_key, pass_id, 0);
}

}  // namespace opusim
