// matrix.hpp — Dense row-major matrix plus the digital reference GEMM used as
// ground truth everywhere else in the simulator.
#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "opusim/errors.hpp"

namespace opusim {

// Dense matrix of doubles, row-major.  Values are required to be finite:
// NaN/Inf must never reach the device encode path, so they are rejected at
// construction instead.
class Matrix {
public:
    Matrix() = default;

    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {
        if (!std::isfinite(fill)) throw Error("Matrix: non-finite fill value");
    }

    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
        : rows_(rows), cols_(cols), data_(std::move(data)) {
        if (data_.size() != rows_ * cols_)
            throw Error("Matrix: data length " + std::to_string(data_.size()) +
                        " != rows*cols " + std::to_string(rows_ * cols_));
        for (double v : data_)
            if (!std::isfinite(v)) throw Error("Matrix: non-finite entry");
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    bool same_shape(const Matrix& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }

    // Largest absolute entry; 0 for an all-zero (or empty) matrix.
    double max_abs() const {
        double m = 0.0;
        for (double v : data_) m = std::max(m, std::fabs(v));
        return m;
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n, 0.0);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// Exact digital GEMM, the ground truth for every accuracy comparison.
// Summation order is fixed (row-major output, ascending inner index) so
// results are reproducible bit for bit.
inline Matrix matmul_reference(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows())
        throw Error("matmul_reference: inner dimensions " + std::to_string(a.cols()) +
                    " and " + std::to_string(b.rows()) + " do not agree");
    Matrix y(a.rows(), b.cols(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) acc += a(i, k) * b(k, j);
            y(i, j) = acc;
        }
    }
    return y;
}

inline double frobenius_norm(const Matrix& m) {
    double s = 0.0;
    for (double v : m.data()) s += v * v;
    return std::sqrt(s);
}

// ||a - b||_F / ||b||_F, with an absolute fallback when b is zero.
inline double relative_frobenius_error(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) throw Error("relative_frobenius_error: shape mismatch");
    double num = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a.data()[i] - b.data()[i];
        num += d * d;
    }
    double den = frobenius_norm(b);
    if (den == 0.0) return std::sqrt(num);
    return std::sqrt(num) / den;
}

}  // namespace opusim
