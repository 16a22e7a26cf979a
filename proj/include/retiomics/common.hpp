#pragma once

#include <charconv>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace retiomics {

// Error categories map onto CLI exit codes: UsageError -> 1, DataError -> 2,
// anything else -> 3.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Dense row-major matrix of doubles. The numeric workhorse for model
/// training and preprocessed design matrices.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }
    std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }
};

/// Keep the columns listed in `keep` (in that order).
inline Matrix subset_columns(const Matrix& m, std::span<const std::size_t> keep) {
    Matrix out(m.rows, keep.size());
    for (std::size_t r = 0; r < m.rows; ++r) {
        for (std::size_t j = 0; j < keep.size(); ++j) {
            out(r, j) = m(r, keep[j]);
        }
    }
    return out;
}

inline Matrix subset_rows(const Matrix& m, std::span<const std::size_t> keep) {
    Matrix out(keep.size(), m.cols);
    for (std::size_t i = 0; i < keep.size(); ++i) {
        for (std::size_t c = 0; c < m.cols; ++c) {
            out(i, c) = m(keep[i], c);
        }
    }
    return out;
}

inline Matrix subset(const Matrix& m, std::span<const std::size_t> rows,
                     std::span<const std::size_t> cols) {
    Matrix out(rows.size(), cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < cols.size(); ++j) {
            out(i, j) = m(rows[i], cols[j]);
        }
    }
    return out;
}

/// Shortest round-trip decimal representation; stable across runs so every
/// emitted file is byte-reproducible.
inline std::string format_double(double v) {
    char buf[40];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

}  // namespace retiomics
