#pragma once

#include <cmath>
#include <cstddef>
#include <cstring>
#include <span>
#include <vector>

#include "pfedeg/errors.hpp"

namespace pfedeg {

/// Dense row-major matrix of doubles. Deliberately minimal: the codebase only
/// needs storage, row views and a few reductions; everything heavier is
/// written as explicit loops at the call site so summation order stays fixed.
class Matrix {
public:
    Matrix() = default;

    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix zeros_like(const Matrix& other) { return Matrix(other.rows_, other.cols_); }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

    bool same_shape(const Matrix& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }

    void fill(double value) { std::fill(data_.begin(), data_.end(), value); }

    bool all_finite() const {
        for (double v : data_)
            if (!std::isfinite(v)) return false;
        return true;
    }

    /// Bitwise comparison, used by determinism tests.
    bool bit_equal(const Matrix& other) const {
        return same_shape(other) &&
               (data_.empty() ||
                std::memcmp(data_.data(), other.data(), data_.size() * sizeof(double)) == 0);
    }

    friend bool operator==(const Matrix& a, const Matrix& b) {
        return a.same_shape(b) && a.data_ == b.data_;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Frobenius distance sqrt(sum (a-b)^2) over all entries.
inline double frobenius_distance(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) throw InvalidInputError("frobenius_distance: shape mismatch");
    double acc = 0.0;
    const double* pa = a.data();
    const double* pb = b.data();
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = pa[i] - pb[i];
        acc += d * d;
    }
    return std::sqrt(acc);
}

}  // namespace pfedeg
