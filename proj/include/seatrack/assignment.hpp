#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace seatrack {

// Dense row-major real matrix.
class Matrix {
public:
    Matrix() = default;
    Matrix(size_t rows, size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Matrix(std::initializer_list<std::initializer_list<double>> init);

    size_t rows() const { return rows_; }
    size_t cols() const { return cols_; }
    bool empty() const { return rows_ == 0 || cols_ == 0; }

    double operator()(size_t r, size_t c) const { return data_[r * cols_ + c]; }
    double& operator()(size_t r, size_t c) { return data_[r * cols_ + c]; }

    const std::vector<double>& data() const { return data_; }

    bool operator==(const Matrix&) const = default;

private:
    size_t rows_ = 0;
    size_t cols_ = 0;
    std::vector<double> data_;
};

struct Assignment {
    std::vector<std::pair<size_t, size_t>> matches;  // (row, col), sorted by row
    std::vector<size_t> unmatched_rows;
    std::vector<size_t> unmatched_cols;
};

// Minimum-cost perfect assignment of a square matrix: result[row] = col.
// Among equal-cost optima the lexicographically smallest column sequence
// is returned.
std::vector<size_t> solve_square_assignment(const Matrix& cost);

// Rectangular assignment: pads to square with 10 * gate, solves, then drops
// pairs whose cost exceeds `gate` (and all padded pairs).
Assignment hungarian_assign(const Matrix& cost, double gate);

}  // namespace seatrack
