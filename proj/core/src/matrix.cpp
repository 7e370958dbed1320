#include "filterstab/matrix.hpp"

#include <algorithm>
#include <stdexcept>

namespace filterstab {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty())
        return {};
    const std::size_t cols = rows.front().size();
    Matrix m(rows.size(), cols);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != cols)
            throw std::invalid_argument("ragged matrix: row " + std::to_string(r) + " has " +
                                        std::to_string(rows[r].size()) + " entries, expected " +
                                        std::to_string(cols));
        std::copy(rows[r].begin(), rows[r].end(), m.row(r).begin());
    }
    return m;
}

std::vector<std::vector<double>> Matrix::to_rows() const {
    std::vector<std::vector<double>> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        out[r].assign(row(r).begin(), row(r).end());
    return out;
}

Matrix identity_matrix(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        m(i, i) = 1.0;
    return m;
}

Matrix repeated_rows(std::size_t rows, const std::vector<double>& row) {
    Matrix m(rows, row.size());
    for (std::size_t r = 0; r < rows; ++r)
        std::copy(row.begin(), row.end(), m.row(r).begin());
    return m;
}

} // namespace filterstab
