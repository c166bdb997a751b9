#include <algorithm>
#include <numeric>

#include "doctest.h"
#include "seatrack/assignment.hpp"
#include "seatrack/rng.hpp"

using namespace seatrack;

namespace {

double brute_force_min(const Matrix& m) {
    std::vector<size_t> perm(m.rows());
    std::iota(perm.begin(), perm.end(), size_t{0});
    double best = INFINITY;
    do {
        double s = 0.0;
        for (size_t r = 0; r < perm.size(); ++r) s += m(r, perm[r]);
        best = std::min(best, s);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

// Smallest column sequence among optimal permutations.
std::vector<size_t> brute_force_lexmin(const Matrix& m) {
    std::vector<size_t> perm(m.rows());
    std::iota(perm.begin(), perm.end(), size_t{0});
    const double best = brute_force_min(m);
    do {
        double s = 0.0;
        for (size_t r = 0; r < perm.size(); ++r) s += m(r, perm[r]);
        if (s == best) return perm;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return {};
}

double total(const Matrix& m, const std::vector<size_t>& cols) {
    double s = 0.0;
    for (size_t r = 0; r < cols.size(); ++r) s += m(r, cols[r]);
    return s;
}

}  // namespace

TEST_CASE("worked fixtures") {
    const Assignment a = hungarian_assign(Matrix{{0, 1}, {1, 0}}, 0.5);
    CHECK(a.matches == std::vector<std::pair<size_t, size_t>>{{0, 0}, {1, 1}});
    CHECK(a.unmatched_rows.empty());
    CHECK(a.unmatched_cols.empty());

    const Assignment g = hungarian_assign(Matrix{{0.9}}, 0.5);
    CHECK(g.matches.empty());
    CHECK(g.unmatched_rows == std::vector<size_t>{0});
    CHECK(g.unmatched_cols == std::vector<size_t>{0});
}

TEST_CASE("empty matrices leave everything unmatched") {
    const Assignment a = hungarian_assign(Matrix(0, 3), 1.0);
    CHECK(a.matches.empty());
    CHECK(a.unmatched_cols == std::vector<size_t>{0, 1, 2});
    const Assignment b = hungarian_assign(Matrix(2, 0), 1.0);
    CHECK(b.unmatched_rows == std::vector<size_t>{0, 1});
}

TEST_CASE("rectangular matrices") {
    const Matrix wide{{5, 1, 9}, {1, 5, 9}};
    const Assignment a = hungarian_assign(wide, 10);
    CHECK(a.matches == std::vector<std::pair<size_t, size_t>>{{0, 1}, {1, 0}});
    CHECK(a.unmatched_cols == std::vector<size_t>{2});
    const Matrix tall{{3}, {1}, {2}};
    const Assignment b = hungarian_assign(tall, 10);
    CHECK(b.matches == std::vector<std::pair<size_t, size_t>>{{1, 0}});
    CHECK(b.unmatched_rows == std::vector<size_t>{0, 2});
}

TEST_CASE("gating drops only the expensive pairs") {
    const Matrix m{{0.1, 0.9}, {0.9, 0.7}};
    const Assignment a = hungarian_assign(m, 0.5);
    CHECK(a.matches == std::vector<std::pair<size_t, size_t>>{{0, 0}});
    CHECK(a.unmatched_rows == std::vector<size_t>{1});
    CHECK(a.unmatched_cols == std::vector<size_t>{1});
}

TEST_CASE("ties resolve to the lexicographically smallest optimum") {
    CHECK(solve_square_assignment(Matrix{{1, 1}, {1, 1}}) == std::vector<size_t>{0, 1});
    CHECK(solve_square_assignment(Matrix(4, 4, 2.0)) == std::vector<size_t>{0, 1, 2, 3});
    const Matrix m{{0, 0, 5}, {0, 0, 5}, {5, 5, 0}};
    CHECK(solve_square_assignment(m) == std::vector<size_t>{0, 1, 2});
    Rng rng(9);
    for (int t = 0; t < 300; ++t) {
        const size_t n = 2 + rng.below(4);
        Matrix c(n, n);
        for (size_t r = 0; r < n; ++r)
            for (size_t k = 0; k < n; ++k) c(r, k) = static_cast<double>(rng.below(3));
        CHECK(solve_square_assignment(c) == brute_force_lexmin(c));
    }
}

TEST_CASE("optimality against brute force, integer and real costs") {
    Rng rng(2024);
    for (size_t n = 2; n <= 6; ++n) {
        for (int t = 0; t < 100; ++t) {
            Matrix ints(n, n), reals(n, n);
            for (size_t r = 0; r < n; ++r)
                for (size_t c = 0; c < n; ++c) {
                    ints(r, c) = static_cast<double>(rng.below(10));
                    reals(r, c) = rng.uniform(-1.0, 1.0);
                }
            CHECK(total(ints, solve_square_assignment(ints)) == brute_force_min(ints));
            CHECK(total(reals, solve_square_assignment(reals)) == doctest::Approx(brute_force_min(reals)).epsilon(1e-12));
        }
    }
}

TEST_CASE("result is a permutation and rejects non-finite input") {
    Rng rng(1);
    Matrix m(30, 30);
    for (size_t r = 0; r < 30; ++r)
        for (size_t c = 0; c < 30; ++c) m(r, c) = rng.uniform();
    auto cols = solve_square_assignment(m);
    std::sort(cols.begin(), cols.end());
    for (size_t i = 0; i < cols.size(); ++i) CHECK(cols[i] == i);
    m(3, 4) = NAN;
    CHECK_THROWS(solve_square_assignment(m));
    CHECK_THROWS(hungarian_assign(m, 1.0));
}

TEST_CASE("raising the gate never reduces the number of matches") {
    Rng rng(77);
    for (int t = 0; t < 50; ++t) {
        Matrix m(5, 7);
        for (size_t r = 0; r < 5; ++r)
            for (size_t c = 0; c < 7; ++c) m(r, c) = rng.uniform();
        size_t prev = 0;
        for (double gate = 0.0; gate <= 1.0; gate += 0.05) {
            const size_t n = hungarian_assign(m, gate).matches.size();
            CHECK(n >= prev);
            prev = n;
        }
    }
}
