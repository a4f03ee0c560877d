#pragma once

#include "mpoly.hpp"
#include "upoly.hpp"

#include <stdexcept>
#include <utility>
#include <vector>

namespace pdisc {

template <typename T>
using Matrix = std::vector<std::vector<T>>;

namespace detail {

inline bool ring_is_zero(const MPoly &p) { return p.is_zero(); }
inline bool ring_is_zero(const UPoly &p) { return p.is_zero(); }
inline bool ring_is_zero(const Rat &r) { return r == 0; }

inline MPoly ring_exact_div(const MPoly &a, const MPoly &b) {
    auto q = a.divide_exact(b);
    if (!q) throw InvariantViolation("ffdet: Bareiss division was not exact");
    return *std::move(q);
}
inline UPoly ring_exact_div(const UPoly &a, const UPoly &b) {
    auto q = divide_exact(a, b);
    if (!q) throw InvariantViolation("ffdet: Bareiss division was not exact");
    return *std::move(q);
}
inline Rat ring_exact_div(const Rat &a, const Rat &b) { return a / b; }

} // namespace detail

/// Determinant by fraction-free (Bareiss) elimination over an integral
/// domain with exact division. Row swaps pick the first nonzero pivot.
template <typename T>
T ffdet(Matrix<T> m) {
    const std::size_t n = m.size();
    if (n == 0) throw std::invalid_argument("ffdet: empty matrix");
    for (const auto &row : m)
        if (row.size() != n) throw std::invalid_argument("ffdet: matrix is not square");
    T prev(1);
    bool negate = false;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (detail::ring_is_zero(m[k][k])) {
            std::size_t r = k + 1;
            while (r < n && detail::ring_is_zero(m[r][k])) ++r;
            if (r == n) return T(0);
            std::swap(m[k], m[r]);
            negate = !negate;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < n; ++j) {
                T num = m[i][j] * m[k][k] - m[i][k] * m[k][j];
                m[i][j] = detail::ring_exact_div(num, prev);
            }
            m[i][k] = T(0);
        }
        prev = m[k][k];
    }
    T det = m[n - 1][n - 1];
    if (negate) det = -det;
    return det;
}

/// Sylvester resultant of f and g with respect to `v`; the result is a
/// polynomial in the other variable. Both inputs must have positive degree in
/// `v` or one of them may be free of it (the resultant is then a power).
inline MPoly resultant(const MPoly &f, const MPoly &g, Var v) {
    int m = f.degree_in(v);
    int n = g.degree_in(v);
    if (f.is_zero() || g.is_zero()) return MPoly{};
    if (m == 0 && n == 0) return MPoly(1);
    if (m == 0) return f.pow(static_cast<unsigned>(n));
    if (n == 0) return g.pow(static_cast<unsigned>(m));
    const std::size_t size = static_cast<std::size_t>(m + n);
    Matrix<MPoly> s(size, std::vector<MPoly>(size));
    auto fill = [&](const MPoly &p, int deg, int rows, std::size_t row0) {
        for (int r = 0; r < rows; ++r)
            for (int k = 0; k <= deg; ++k)
                s[row0 + static_cast<std::size_t>(r)][static_cast<std::size_t>(r + deg - k)] =
                    p.coeff_in(v, static_cast<unsigned>(k));
    };
    fill(f, m, n, 0);
    fill(g, n, m, static_cast<std::size_t>(n));
    return ffdet(std::move(s));
}

} // namespace pdisc
