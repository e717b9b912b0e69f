#pragma once

#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace gelulab {

// Row-major 2-D array of doubles. The only array type in the library;
// a bias vector is a 1 x n tensor.
class Tensor2D {
public:
    Tensor2D() = default;  // empty sentinel (0 x 0), used for caches

    Tensor2D(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {
        check_dims(rows, cols);
    }

    Tensor2D(std::size_t rows, std::size_t cols, std::vector<double> data)
        : rows_(rows), cols_(cols), data_(std::move(data)) {
        check_dims(rows, cols);
        if (data_.size() != rows * cols) {
            throw std::invalid_argument("Tensor2D: data length " + std::to_string(data_.size()) +
                                        " does not match " + std::to_string(rows) + "x" +
                                        std::to_string(cols));
        }
    }

    static Tensor2D from_rows(std::initializer_list<std::initializer_list<double>> rows) {
        if (rows.size() == 0) throw std::invalid_argument("Tensor2D: no rows");
        const std::size_t cols = rows.begin()->size();
        Tensor2D t(rows.size(), cols);
        std::size_t r = 0;
        for (const auto& row : rows) {
            if (row.size() != cols) throw std::invalid_argument("Tensor2D: ragged rows");
            std::size_t c = 0;
            for (double v : row) t(r, c++) = v;
            ++r;
        }
        return t;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    std::string shape_str() const {
        return std::to_string(rows_) + "x" + std::to_string(cols_);
    }

    bool same_shape(const Tensor2D& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }

private:
    static void check_dims(std::size_t rows, std::size_t cols) {
        if (rows == 0 || cols == 0) {
            throw std::invalid_argument("Tensor2D: rows and cols must be >= 1");
        }
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

inline void require_same_shape(const Tensor2D& a, const Tensor2D& b) {
    if (!a.same_shape(b)) {
        throw std::invalid_argument("shape mismatch: " + a.shape_str() + " vs " + b.shape_str());
    }
}

// C = A * B. The k-before-j loop order keeps the inner loop contiguous in
// both B and C so it vectorizes.
inline Tensor2D matmul(const Tensor2D& a, const Tensor2D& b) {
    if (a.cols() != b.rows()) {
        throw std::invalid_argument("matmul dimension mismatch: " + a.shape_str() + " * " +
                                    b.shape_str());
    }
    Tensor2D c(a.rows(), b.cols());
    const std::size_t n = b.cols();
    const double* __restrict__ bp = b.data();
    double* __restrict__ cp = c.data();
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double* __restrict__ crow = cp + i * n;
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            const double* __restrict__ brow = bp + k * n;
            for (std::size_t j = 0; j < n; ++j) {
                crow[j] += aik * brow[j];
            }
        }
    }
    return c;
}

// C = A^T * B without materializing the transpose.
inline Tensor2D matmul_transpose_a(const Tensor2D& a, const Tensor2D& b) {
    if (a.rows() != b.rows()) {
        throw std::invalid_argument("matmul dimension mismatch: " + a.shape_str() + "^T * " +
                                    b.shape_str());
    }
    Tensor2D c(a.cols(), b.cols());
    const std::size_t n = b.cols();
    const double* __restrict__ bp = b.data();
    double* __restrict__ cp = c.data();
    for (std::size_t k = 0; k < a.rows(); ++k) {
        const double* __restrict__ brow = bp + k * n;
        for (std::size_t i = 0; i < a.cols(); ++i) {
            const double aki = a(k, i);
            double* __restrict__ crow = cp + i * n;
            for (std::size_t j = 0; j < n; ++j) {
                crow[j] += aki * brow[j];
            }
        }
    }
    return c;
}

inline Tensor2D transpose(const Tensor2D& a) {
    Tensor2D t(a.cols(), a.rows());
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c) t(c, r) = a(r, c);
    return t;
}

// C = A * B^T. Materializing the transpose and reusing the streaming
// kernel beats row-by-row dot products, whose reduction chain does not
// vectorize.
inline Tensor2D matmul_transpose_b(const Tensor2D& a, const Tensor2D& b) {
    if (a.cols() != b.cols()) {
        throw std::invalid_argument("matmul dimension mismatch: " + a.shape_str() + " * " +
                                    b.shape_str() + "^T");
    }
    return matmul(a, transpose(b));
}

inline Tensor2D hadamard(const Tensor2D& a, const Tensor2D& b) {
    require_same_shape(a, b);
    Tensor2D c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.size(); ++i) c.data()[i] = a.data()[i] * b.data()[i];
    return c;
}

// Adds a 1 x cols bias row to every row of a.
inline Tensor2D add_row_vector(const Tensor2D& a, const Tensor2D& bias) {
    if (bias.rows() != 1 || bias.cols() != a.cols()) {
        throw std::invalid_argument("shape mismatch: " + a.shape_str() + " vs bias " +
                                    bias.shape_str());
    }
    Tensor2D c = a;
    for (std::size_t r = 0; r < c.rows(); ++r)
        for (std::size_t j = 0; j < c.cols(); ++j) c(r, j) += bias(0, j);
    return c;
}

// 1 x cols tensor of column sums.
inline Tensor2D column_sums(const Tensor2D& a) {
    Tensor2D s(1, a.cols());
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t j = 0; j < a.cols(); ++j) s(0, j) += a(r, j);
    return s;
}

}  // namespace gelulab
