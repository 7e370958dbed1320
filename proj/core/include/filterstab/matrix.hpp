#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace filterstab {

/// Dense row-major matrix of doubles. Kernels here are tiny, so rows are
/// handed out as spans instead of going through an expression library.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);

    /// Throws std::invalid_argument on ragged input.
    static Matrix from_rows(const std::vector<std::vector<double>>& rows);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }

    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }

    std::vector<std::vector<double>> to_rows() const;

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Row-stochastic identity.
Matrix identity_matrix(std::size_t n);

/// Every row equal to `row`.
Matrix repeated_rows(std::size_t rows, const std::vector<double>& row);

} // namespace filterstab
