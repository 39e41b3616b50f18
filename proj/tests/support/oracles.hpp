#pragma once

// Independent brute-force oracles used to cross-check the implementation.
// Deliberately hand-rolled (no Eigen) so they share no code path with the
// library under test.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace testsupport {

using DenseMatrix = std::vector<std::vector<double>>;

/// Solves A w = b by Gauss-Jordan elimination with partial pivoting.
inline std::vector<double> gauss_jordan_solve(DenseMatrix a, std::vector<double> b)
{
    const std::size_t n = a.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        if (a[pivot][col] == 0.0) throw std::runtime_error("gauss_jordan_solve: singular matrix");
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);

        const double inv = 1.0 / a[col][col];
        for (std::size_t c = 0; c < n; ++c) a[col][c] *= inv;
        b[col] *= inv;
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col || a[r][col] == 0.0) continue;
            const double factor = a[r][col];
            for (std::size_t c = 0; c < n; ++c) a[r][c] -= factor * a[col][c];
            b[r] -= factor * b[col];
        }
    }
    return b;
}

/// Dense normal-equations ridge oracle: w = (X^T X + alpha I)^{-1} X^T y.
inline std::vector<double> ridge_oracle(const DenseMatrix& x, const std::vector<double>& y, double alpha)
{
    const std::size_t rows = x.size();
    const std::size_t cols = x.front().size();
    DenseMatrix gram(cols, std::vector<double>(cols, 0.0));
    for (std::size_t i = 0; i < cols; ++i)
        for (std::size_t j = 0; j < cols; ++j)
            for (std::size_t r = 0; r < rows; ++r) gram[i][j] += x[r][i] * x[r][j];
    for (std::size_t i = 0; i < cols; ++i) gram[i][i] += alpha;

    std::vector<double> rhs(cols, 0.0);
    for (std::size_t i = 0; i < cols; ++i)
        for (std::size_t r = 0; r < rows; ++r) rhs[i] += x[r][i] * y[r];
    return gauss_jordan_solve(std::move(gram), std::move(rhs));
}

}  // namespace testsupport
