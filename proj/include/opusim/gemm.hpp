// gemm.hpp — Maps an arbitrary [n x m] * [m x k] product onto the fixed-size
// crossbar as a sequence of passes.
//
// Tiling order is n-tiles outer, k-tiles middle, m-tiles inner, so the
// partial sums of one output tile are contiguous in the task list.  Each
// tile is scaled by its own max-abs (the scale factors are exact doubles
// carried digitally, so rescaling loses nothing), and out_scale =
// w_scale * x_scale * |m_range| bounds every readout inside the ADC range:
// a saturated readout is a scaling bug and raises a hard error.
// Partial sums across m-tiles accumulate digitally at full precision after
// the ADC; one integration window covers one vector, longer contractions
// are the electronics' job.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "opusim/calibration.hpp"
#include "opusim/device.hpp"
#include "opusim/errors.hpp"
#include "opusim/matrix.hpp"
#include "opusim/noise.hpp"
#include "opusim/stats.hpp"

namespace opusim {

struct GemmShape {
    std::size_t n = 1;
    std::size_t m = 1;
    std::size_t k = 1;

    void validate() const {
        if (n < 1 || m < 1 || k < 1)
            throw Error("GemmShape: all dimensions must be >= 1");
    }
};

struct IndexRange {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::size_t size() const { return end - begin; }
};

struct TileTask {
    std::uint64_t pass_id = 0;
    IndexRange w_rows;   // output rows covered
    IndexRange x_cols;   // output cols covered
    IndexRange m_range;  // contraction slice
    // Filled at execution from the actual data (1.0 sentinels until then;
    // a skipped all-zero tile keeps the sentinels and out_scale 0).
    double w_scale = 1.0;
    double x_scale = 1.0;
    double out_scale = 0.0;
    bool skipped = false;
};

struct GemmPlan {
    GemmShape shape;
    std::size_t device_rows = 0;
    std::size_t device_cols = 0;
    std::size_t m_tile = 0;  // min(m, max_integration_len)
    std::vector<TileTask> tasks;
    std::size_t pass_count = 0;
};

inline std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

// Closed-form pass count: ceil(n/rows) * ceil(k/cols) * ceil(m/min(m, M_max)).
inline std::size_t estimate_passes(const GemmShape& shape, const DeviceConfig& cfg) {
    shape.validate();
    const std::size_t m_tile = std::min(shape.m, cfg.max_integration_len);
    return ceil_div(shape.n, cfg.rows) * ceil_div(shape.k, cfg.cols) *
           ceil_div(shape.m, m_tile);
}

inline GemmPlan plan_gemm(const GemmShape& shape, const DeviceConfig& cfg) {
    shape.validate();
    cfg.validate();
    GemmPlan plan;
    plan.shape = shape;
    plan.device_rows = cfg.rows;
    plan.device_cols = cfg.cols;
    plan.m_tile = std::min(shape.m, cfg.max_integration_len);
    plan.tasks.reserve(estimate_passes(shape, cfg));

    std::uint64_t pass_id = 0;
    for (std::size_t n0 = 0; n0 < shape.n; n0 += cfg.rows) {
        const std::size_t n1 = std::min(n0 + cfg.rows, shape.n);
        for (std::size_t k0 = 0; k0 < shape.k; k0 += cfg.cols) {
            const std::size_t k1 = std::min(k0 + cfg.cols, shape.k);
            for (std::size_t m0 = 0; m0 < shape.m; m0 += plan.m_tile) {
                const std::size_t m1 = std::min(m0 + plan.m_tile, shape.m);
                TileTask t;
                t.pass_id = pass_id++;
                t.w_rows = {n0, n1};
                t.x_cols = {k0, k1};
                t.m_range = {m0, m1};
                plan.tasks.push_back(t);
            }
        }
    }
    plan.pass_count = plan.tasks.size();
    return plan;
}

struct ExecOptions {
    unsigned threads = 1;
    bool with_reference = false;  // compare against matmul_reference
};

struct GemmReport {
    std::size_t optical_passes = 0;   // passes actually driven
    std::size_t skipped_passes = 0;   // all-zero tiles skipped
    std::size_t saturated_count = 0;  // 0 on success (saturation throws)
    std::optional<ErrorStats> stats;  // per-element normalized residuals vs reference
    std::vector<TileTask> executed_tasks;  // plan tasks with actual scales
};

// Worst-case per-element error contribution of one task given its scales,
// assuming an ideal (calibrated, unit-gain) noiseless device: DAC amplitude
// error up to one step at the clipped top level on each of the two inputs,
// plus half an ADC step after rescale.
inline double quantization_bound_per_task(std::size_t m_len, double w_scale,
                                          double x_scale, const QuantSpec& dac,
                                          const QuantSpec& adc) {
    const double dd = dac.ideal() ? 0.0 : dac.step();
    const double da = adc.ideal() ? 0.0 : adc.step();
    const double per_symbol = 2.0 * dd + dd * dd;
    return w_scale * x_scale * static_cast<double>(m_len) * (per_symbol + 0.5 * da);
}

namespace detail {

struct GroupOutcome {
    std::size_t skipped = 0;
    std::size_t driven = 0;
    bool saturated = false;
    std::uint64_t saturated_pass = 0;
    std::size_t sat_row = 0, sat_col = 0;
};

}  // namespace detail

// Executes a plan.  Y accumulates digitally; noise streams are keyed by
// pass_id so any thread count gives bit-identical results.  Output tiles
// are independent; the m-tiles of one output tile run sequentially.
inline std::pair<Matrix, GemmReport> execute_gemm(const Matrix& w, const Matrix& x,
                                                  const GemmPlan& plan,
                                                  const DeviceConfig& cfg,
                                                  const NoiseModel& noise,
                                                  const CalibrationMap& cal,
                                                  const ExecOptions& opts = {}) {
    cfg.validate();
    noise.validate();
    if (w.rows() != plan.shape.n || w.cols() != plan.shape.m)
        throw Error("execute_gemm: W is " + std::to_string(w.rows()) + "x" +
                    std::to_string(w.cols()) + ", plan expects " +
                    std::to_string(plan.shape.n) + "x" + std::to_string(plan.shape.m));
    if (x.rows() != plan.shape.m || x.cols() != plan.shape.k)
        throw Error("execute_gemm: X is " + std::to_string(x.rows()) + "x" +
                    std::to_string(x.cols()) + ", plan expects " +
                    std::to_string(plan.shape.m) + "x" + std::to_string(plan.shape.k));
    if (plan.device_rows != cfg.rows || plan.device_cols != cfg.cols ||
        plan.m_tile != std::min(plan.shape.m, cfg.max_integration_len))
        throw Error("execute_gemm: plan was made for a different device geometry");
    if (cal.phase_correction.rows() != cfg.rows || cal.phase_correction.cols() != cfg.cols)
        throw Error("execute_gemm: calibration map shape does not match the device");
    for (std::size_t r = 0; r < std::min(cfg.rows, plan.shape.n); ++r)
        for (std::size_t c = 0; c < std::min(cfg.cols, plan.shape.k); ++c)
            if (cal.unit_dead(r, c))
                throw ConfigError("execute_gemm: calibration map flags unit (" +
                                  std::to_string(r) + "," + std::to_string(c) +
                                  ") unusable; plan around dead units is not supported");

    // Phase corrections become shifter settings on the device copy; gain
    // corrections multiply the readouts digitally below.
    const DeviceConfig eff = apply_phase_corrections(cfg, cal);

    const std::size_t m_tiles = ceil_div(plan.shape.m, plan.m_tile);
    const std::size_t groups = plan.tasks.size() / m_tiles;

    Matrix y(plan.shape.n, plan.shape.k, 0.0);
    Matrix full_scale(plan.shape.n, plan.shape.k, 0.0);  // per-element representable range
    std::vector<TileTask> executed = plan.tasks;
    std::vector<detail::GroupOutcome> outcomes(groups);

    auto run_group = [&](std::size_t g, PhaseDriftCursor& drift) {
        detail::GroupOutcome& oc = outcomes[g];
        for (std::size_t t = g * m_tiles; t < (g + 1) * m_tiles; ++t) {
            TileTask& task = executed[t];
            const std::size_t nt = task.w_rows.size();
            const std::size_t kt = task.x_cols.size();
            const std::size_t mt = task.m_range.size();

            Matrix w_tile(nt, mt);
            double w_max = 0.0;
            for (std::size_t r = 0; r < nt; ++r)
                for (std::size_t mm = 0; mm < mt; ++mm) {
                    const double v = w(task.w_rows.begin + r, task.m_range.begin + mm);
                    w_tile(r, mm) = v;
                    w_max = std::max(w_max, std::fabs(v));
                }
            Matrix x_tile(mt, kt);
            double x_max = 0.0;
            for (std::size_t mm = 0; mm < mt; ++mm)
                for (std::size_t c = 0; c < kt; ++c) {
                    const double v = x(task.m_range.begin + mm, task.x_cols.begin + c);
                    x_tile(mm, c) = v;
                    x_max = std::max(x_max, std::fabs(v));
                }

            if (w_max == 0.0 || x_max == 0.0) {
                task.skipped = true;  // contribution is exactly zero
                ++oc.skipped;
                continue;
            }
            task.w_scale = w_max;
            task.x_scale = x_max;
            task.out_scale = w_max * x_max * static_cast<double>(mt);

            for (auto& v : w_tile.data()) v /= w_max;
            for (auto& v : x_tile.data()) v /= x_max;

            const CrossbarResult res =
                crossbar_pass(w_tile, x_tile, eff, noise, task.pass_id, &drift);
            ++oc.driven;
            for (std::size_t r = 0; r < nt; ++r) {
                for (std::size_t c = 0; c < kt; ++c) {
                    const HomodyneReadout& u = res.at(r, c);
                    if (u.saturated) {
                        if (!oc.saturated) {
                            oc.saturated = true;
                            oc.saturated_pass = task.pass_id;
                            oc.sat_row = r;
                            oc.sat_col = c;
                        }
                        continue;
                    }
                    const std::size_t i = task.w_rows.begin + r;
                    const std::size_t j = task.x_cols.begin + c;
                    y(i, j) += u.adc_code * task.out_scale * cal.gain_correction(r, c);
                    full_scale(i, j) += task.out_scale;
                }
            }
            if (oc.saturated) return;  // group result is unusable anyway
        }
    };

    const unsigned threads = std::max(1u, opts.threads);
    if (threads == 1 || groups <= 1) {
        PhaseDriftCursor drift;
        for (std::size_t g = 0; g < groups; ++g) run_group(g, drift);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (unsigned th = 0; th < threads; ++th) {
            pool.emplace_back([&, th] {
                PhaseDriftCursor drift;
                for (std::size_t g = th; g < groups; g += threads) run_group(g, drift);
            });
        }
        for (auto& t : pool) t.join();
    }

    GemmReport report;
    for (const auto& oc : outcomes) {
        report.optical_passes += oc.driven;
        report.skipped_passes += oc.skipped;
        if (oc.saturated) {
            throw SaturationError("execute_gemm: readout saturated at pass " +
                                  std::to_string(oc.saturated_pass) + ", unit (" +
                                  std::to_string(oc.sat_row) + "," +
                                  std::to_string(oc.sat_col) +
                                  "); tile scaling contract violated");
        }
    }
    report.executed_tasks = std::move(executed);

    if (opts.with_reference && y.size() >= 2) {
        const Matrix truth = matmul_reference(w, x);
        std::vector<double> residuals;
        residuals.reserve(y.size());
        for (std::size_t i = 0; i < y.size(); ++i) {
            const double fs = full_scale.data()[i];
            const double d = y.data()[i] - truth.data()[i];
            residuals.push_back(fs > 0.0 ? d / fs : 0.0);
        }
        std::vector<double> zeros(residuals.size(), 0.0);
        report.stats = error_stats(residuals, zeros, 1.0);
    }
    return {std::move(y), std::move(report)};
}

// Convenience wrapper: plan + execute in one call.
inline std::pair<Matrix, GemmReport> run_gemm(const Matrix& w, const Matrix& x,
                                              const DeviceConfig& cfg,
                                              const NoiseModel& noise,
                                              const CalibrationMap& cal,
                                              const ExecOptions& opts = {}) {
    GemmShape shape{w.rows(), w.cols(), x.cols()};
    return execute_gemm(w, x, plan_gemm(shape, cfg), cfg, noise, cal, opts);
}

}  // namespace opusim
