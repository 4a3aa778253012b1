#pragma once

// Reference computations that share no code with the library: dense
// long-double Gauss-Jordan and explicit projection matrices. Slow and only
// suitable for small, well-conditioned problems.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace oracle {

using Dense = std::vector<std::vector<long double>>;

inline Dense from_columns(const std::vector<std::vector<double>>& columns)
{
    const std::size_t rows = columns.front().size();
    Dense a(rows, std::vector<long double>(columns.size()));
    for (std::size_t j = 0; j < columns.size(); ++j) {
        for (std::size_t i = 0; i < rows; ++i) {
            a[i][j] = columns[j][i];
        }
    }
    return a;
}

inline Dense gram(const Dense& a)
{
    const std::size_t m = a.front().size();
    Dense g(m, std::vector<long double>(m, 0.0L));
    for (const auto& row : a) {
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < m; ++j) {
                g[i][j] += row[i] * row[j];
            }
        }
    }
    return g;
}

/// Gauss-Jordan with partial pivoting.
inline Dense inverse(Dense g)
{
    const std::size_t m = g.size();
    Dense inv(m, std::vector<long double>(m, 0.0L));
    for (std::size_t i = 0; i < m; ++i) {
        inv[i][i] = 1.0L;
    }
    for (std::size_t col = 0; col < m; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < m; ++r) {
            if (std::fabs(g[r][col]) > std::fabs(g[pivot][col])) {
                pivot = r;
            }
        }
        if (g[pivot][col] == 0.0L) {
            throw std::runtime_error("oracle: singular matrix");
        }
        std::swap(g[col], g[pivot]);
        std::swap(inv[col], inv[pivot]);
        const long double d = g[col][col];
        for (std::size_t j = 0; j < m; ++j) {
            g[col][j] /= d;
            inv[col][j] /= d;
        }
        for (std::size_t r = 0; r < m; ++r) {
            if (r == col || g[r][col] == 0.0L) {
                continue;
            }
            const long double f = g[r][col];
            for (std::size_t j = 0; j < m; ++j) {
                g[r][j] -= f * g[col][j];
                inv[r][j] -= f * inv[col][j];
            }
        }
    }
    return inv;
}

/// θ = (AᵀA)⁻¹Aᵀy.
inline std::vector<double> normal_equations(const Dense& a, const std::vector<double>& y)
{
    const std::size_t m = a.front().size();
    std::vector<long double> aty(m, 0.0L);
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            aty[j] += a[i][j] * y[i];
        }
    }
    const Dense inv = inverse(gram(a));
    std::vector<double> theta(m);
    for (std::size_t i = 0; i < m; ++i) {
        long double acc = 0.0L;
        for (std::size_t j = 0; j < m; ++j) {
            acc += inv[i][j] * aty[j];
        }
        theta[i] = static_cast<double>(acc);
    }
    return theta;
}

/// H = A(AᵀA)⁻¹Aᵀ as an explicit n×n matrix.
inline Dense hat_matrix(const Dense& a)
{
    const std::size_t n = a.size();
    const std::size_t m = a.front().size();
    const Dense inv = inverse(gram(a));
    Dense ainv(n, std::vector<long double>(m, 0.0L));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            for (std::size_t k = 0; k < m; ++k) {
                ainv[i][j] += a[i][k] * inv[k][j];
            }
        }
    }
    Dense h(n, std::vector<long double>(n, 0.0L));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t k = 0; k < m; ++k) {
                h[i][j] += ainv[i][k] * a[j][k];
            }
        }
    }
    return h;
}

inline std::vector<long double> apply(const Dense& h, const std::vector<long double>& v)
{
    std::vector<long double> out(h.size(), 0.0L);
    for (std::size_t i = 0; i < h.size(); ++i) {
        for (std::size_t j = 0; j < v.size(); ++j) {
            out[i] += h[i][j] * v[j];
        }
    }
    return out;
}

inline long double squared_norm(const std::vector<long double>& v)
{
    long double acc = 0.0L;
    for (long double e : v) {
        acc += e * e;
    }
    return acc;
}

/// Columns x, x², …, x^m without going through the library.
inline std::vector<std::vector<double>> power_columns(const std::vector<double>& x, std::size_t first,
                                                      std::size_t last)
{
    std::vector<std::vector<double>> cols;
    for (std::size_t p = first; p <= last; ++p) {
        std::vector<double> c(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            c[i] = std::pow(x[i], static_cast<double>(p));
        }
        cols.push_back(std::move(c));
    }
    return cols;
}

} // namespace oracle
