#include "seatrack/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace seatrack {

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> init) {
    rows_ = init.size();
    cols_ = rows_ ? init.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& row : init) {
        if (row.size() != cols_) throw std::invalid_argument("Matrix: ragged initializer");
        data_.insert(data_.end(), row.begin(), row.end());
    }
}

namespace {

// Shortest-augmenting-path Hungarian with potentials (1-based internals).
// Returns row->col plus potentials such that cost(i,j) - u[i] - v[j] >= 0
// everywhere and == 0 on the matching.
struct DualSolution {
    std::vector<size_t> row_to_col;
    std::vector<double> u, v;
};

DualSolution solve_with_duals(const Matrix& a) {
    const size_t n = a.rows();
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<size_t> p(n + 1, 0), way(n + 1, 0);
    std::vector<double> minv(n + 1);
    std::vector<char> used(n + 1);
    for (size_t i = 1; i <= n; ++i) {
        p[0] = i;
        size_t j0 = 0;
        std::fill(minv.begin(), minv.end(), inf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[j0] = 1;
            const size_t i0 = p[j0];
            double delta = inf;
            size_t j1 = 0;
            for (size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = a(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    DualSolution sol;
    sol.row_to_col.assign(n, 0);
    for (size_t j = 1; j <= n; ++j) sol.row_to_col[p[j] - 1] = j - 1;
    sol.u.assign(u.begin() + 1, u.end());
    sol.v.assign(v.begin() + 1, v.end());
    return sol;
}

}  // namespace

std::vector<size_t> solve_square_assignment(const Matrix& cost) {
    if (cost.rows() != cost.cols()) throw std::invalid_argument("solve_square_assignment: matrix not square");
    const size_t n = cost.rows();
    if (n == 0) return {};
    for (double c : cost.data())
        if (!std::isfinite(c)) throw std::invalid_argument("solve_square_assignment: non-finite cost");

    DualSolution sol = solve_with_duals(cost);

    // Every optimum lives on tight edges of an optimal dual; walk rows in
    // order and re-route the matching toward the smallest tight column that
    // still admits a perfect matching of the remaining rows.
    double scale = 1.0;
    for (double c : cost.data()) scale = std::max(scale, std::abs(c));
    const double tol = 1e-10 * scale;
    std::vector<std::vector<size_t>> tight(n);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            if (cost(i, j) - sol.u[i] - sol.v[j] <= tol) tight[i].push_back(j);

    std::vector<size_t>& row_to_col = sol.row_to_col;
    std::vector<size_t> col_to_row(n);
    for (size_t i = 0; i < n; ++i) col_to_row[row_to_col[i]] = i;

    std::vector<size_t> parent_col(n);
    std::vector<char> seen_row(n);
    for (size_t r = 0; r < n; ++r) {
        for (size_t c : tight[r]) {
            if (c >= row_to_col[r]) break;
            const size_t owner = col_to_row[c];
            if (owner < r) continue;  // fixed
            // Find an alternating path from `owner` to the column r gives up,
            // through rows > r only.
            const size_t target = row_to_col[r];
            std::fill(seen_row.begin(), seen_row.end(), 0);
            std::vector<size_t> queue{owner};
            seen_row[owner] = 1;
            parent_col[owner] = n;
            size_t found_row = n;
            for (size_t qi = 0; qi < queue.size() && found_row == n; ++qi) {
                const size_t x = queue[qi];
                for (size_t y : tight[x]) {
                    if (y == row_to_col[x]) continue;
                    if (y == target) {
                        found_row = x;
                        break;
                    }
                    const size_t nx = col_to_row[y];
                    if (nx <= r || seen_row[nx]) continue;
                    seen_row[nx] = 1;
                    parent_col[nx] = x;  // reached via column y = row_to_col[nx] from row x
                    queue.push_back(nx);
                }
            }
            if (found_row == n) continue;
            // Shift along the path: found_row takes target, each predecessor
            // takes its successor's old column.
            size_t x = found_row;
            size_t take = target;
            while (true) {
                const size_t old = row_to_col[x];
                row_to_col[x] = take;
                col_to_row[take] = x;
                if (x == owner) break;
                take = old;
                x = parent_col[x];
            }
            row_to_col[r] = c;
            col_to_row[c] = r;
            break;
        }
    }
    return row_to_col;
}

Assignment hungarian_assign(const Matrix& cost, double gate) {
    Assignment out;
    const size_t rows = cost.rows(), cols = cost.cols();
    if (rows == 0 || cols == 0) {
        for (size_t r = 0; r < rows; ++r) out.unmatched_rows.push_back(r);
        for (size_t c = 0; c < cols; ++c) out.unmatched_cols.push_back(c);
        return out;
    }
    const size_t n = std::max(rows, cols);
    Matrix square(n, n, 10.0 * gate);
    for (size_t r = 0; r < rows; ++r)
        for (size_t c = 0; c < cols; ++c) square(r, c) = cost(r, c);
    const std::vector<size_t> perm = solve_square_assignment(square);

    std::vector<char> col_matched(cols, 0);
    for (size_t r = 0; r < rows; ++r) {
        const size_t c = perm[r];
        if (c < cols && !(cost(r, c) > gate)) {
            out.matches.emplace_back(r, c);
            col_matched[c] = 1;
        } else {
            out.unmatched_rows.push_back(r);
        }
    }
    for (size_t c = 0; c < cols; ++c)
        if (!col_matched[c]) out.unmatched_cols.push_back(c);
    return out;
}

}  // namespace seatrack
