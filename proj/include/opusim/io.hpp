// io.hpp — OPT1 tensor file format.
//
// Layout: magic bytes 'O' 'P' 'T' '1', u8 dtype code (0 = float32,
// 1 = int8), u8 ndim, ndim x u32 little-endian dims, then the row-major
// payload.  Shared by the CLI, calibration maps, and model fixtures.
#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "opusim/errors.hpp"
#include "opusim/matrix.hpp"

namespace opusim {

enum class Opt1Dtype : std::uint8_t { Float32 = 0, Int8 = 1 };

struct Opt1Tensor {
    Opt1Dtype dtype = Opt1Dtype::Float32;
    std::vector<std::uint32_t> dims;
    std::vector<double> values;  // decoded, row-major

    std::size_t element_count() const {
        std::size_t n = 1;
        for (auto d : dims) n *= d;
        return dims.empty() ? 0 : n;
    }
};

namespace detail {

inline void put_u32_le(std::ofstream& out, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff),
                          static_cast<unsigned char>((v >> 24) & 0xff)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

inline std::uint32_t get_u32_le(std::istream& in, const std::string& path) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4))
        throw FormatError(path + ": truncated OPT1 header");
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

}  // namespace detail

inline void write_opt1(const std::string& path, const Opt1Tensor& t) {
    if (t.dims.empty() || t.dims.size() > 8)
        throw FormatError(path + ": OPT1 ndim must be in [1, 8]");
    if (t.values.size() != t.element_count())
        throw FormatError(path + ": OPT1 payload size does not match dims");

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError(path + ": cannot open for writing");
    out.write("OPT1", 4);
    const std::uint8_t dtype = static_cast<std::uint8_t>(t.dtype);
    const std::uint8_t ndim = static_cast<std::uint8_t>(t.dims.size());
    out.write(reinterpret_cast<const char*>(&dtype), 1);
    out.write(reinterpret_cast<const char*>(&ndim), 1);
    for (auto d : t.dims) detail::put_u32_le(out, d);

    if (t.dtype == Opt1Dtype::Float32) {
        for (double v : t.values) {
            const float f = static_cast<float>(v);
            std::uint32_t bits;
            std::memcpy(&bits, &f, 4);
            detail::put_u32_le(out, bits);
        }
    } else {
        for (double v : t.values) {
            if (v < -128.0 || v > 127.0 || v != std::floor(v))
                throw FormatError(path + ": value not representable as int8");
            const char b = static_cast<char>(static_cast<std::int8_t>(v));
            out.write(&b, 1);
        }
    }
    if (!out) throw FormatError(path + ": write failed");
}

inline Opt1Tensor read_opt1(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError(path + ": cannot open");
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, "OPT1", 4) != 0)
        throw FormatError(path + ": bad OPT1 magic");

    std::uint8_t dtype_code = 0, ndim = 0;
    if (!in.read(reinterpret_cast<char*>(&dtype_code), 1) ||
        !in.read(reinterpret_cast<char*>(&ndim), 1))
        throw FormatError(path + ": truncated OPT1 header");
    if (dtype_code > 1) throw FormatError(path + ": unknown OPT1 dtype code");
    if (ndim == 0 || ndim > 8) throw FormatError(path + ": OPT1 ndim must be in [1, 8]");

    Opt1Tensor t;
    t.dtype = static_cast<Opt1Dtype>(dtype_code);
    t.dims.resize(ndim);
    std::size_t count = 1;
    for (auto& d : t.dims) {
        d = detail::get_u32_le(in, path);
        count *= d;
    }
    if (count > (std::size_t{1} << 31)) throw FormatError(path + ": OPT1 tensor too large");

    t.values.resize(count);
    if (t.dtype == Opt1Dtype::Float32) {
        for (auto& v : t.values) {
            const std::uint32_t bits = detail::get_u32_le(in, path);
            float f;
            std::memcpy(&f, &bits, 4);
            if (!std::isfinite(f)) throw FormatError(path + ": non-finite float32 value");
            v = static_cast<double>(f);
        }
    } else {
        std::vector<char> raw(count);
        if (!in.read(raw.data(), static_cast<std::streamsize>(count)))
            throw FormatError(path + ": truncated OPT1 payload");
        for (std::size_t i = 0; i < count; ++i)
            t.values[i] = static_cast<double>(static_cast<std::int8_t>(raw[i]));
    }
    // Trailing bytes indicate a corrupt or mislabeled file.
    char extra;
    if (in.read(&extra, 1)) throw FormatError(path + ": trailing bytes after OPT1 payload");
    return t;
}

inline void write_matrix_opt1(const std::string& path, const Matrix& m) {
    Opt1Tensor t;
    t.dtype = Opt1Dtype::Float32;
    t.dims = {static_cast<std::uint32_t>(m.rows()), static_cast<std::uint32_t>(m.cols())};
    t.values = m.data();
    write_opt1(path, t);
}

inline Matrix read_matrix_opt1(const std::string& path) {
    const Opt1Tensor t = read_opt1(path);
    if (t.dims.size() != 2)
        throw FormatError(path + ": expected a 2-D OPT1 tensor, got ndim " +
                          std::to_string(t.dims.size()));
    return Matrix(t.dims[0], t.dims[1], t.values);
}

}  // namespace opusim
