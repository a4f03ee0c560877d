#pragma once

#include "rational.hpp"

#include <cstdlib>
#include <optional>
#include <vector>

namespace pdisc {

using RatVector = std::vector<Rat>;
using RatMatrix = std::vector<RatVector>;

/// Reduced row echelon form of a rational matrix.
struct RowEchelon {
    RatMatrix rows;
    std::vector<std::size_t> pivot_cols;
    std::size_t cols = 0;

    std::size_t rank() const { return pivot_cols.size(); }
};

namespace detail {

// Pivot preference: smallest |numerator|, then smallest denominator, then the
// first row. Deterministic for identical input.
inline bool better_pivot(const Rat &a, const Rat &b) {
    int c = mpz_cmpabs(a.get_num_mpz_t(), b.get_num_mpz_t());
    if (c != 0) return c < 0;
    return cmp(a.get_den(), b.get_den()) < 0;
}

} // namespace detail

inline RowEchelon row_echelon(RatMatrix m, std::size_t cols) {
    RowEchelon out;
    out.cols = cols;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < m.size(); ++c) {
        std::optional<std::size_t> best;
        for (std::size_t i = r; i < m.size(); ++i) {
            if (m[i][c] == 0) continue;
            if (!best || detail::better_pivot(m[i][c], m[*best][c])) best = i;
        }
        if (!best) continue;
        std::swap(m[r], m[*best]);
        Rat inv = 1 / m[r][c];
        for (auto &v : m[r]) v *= inv;
        for (std::size_t i = 0; i < m.size(); ++i) {
            if (i == r || m[i][c] == 0) continue;
            Rat f = m[i][c];
            for (std::size_t j = c; j < cols; ++j) m[i][j] -= f * m[r][j];
        }
        out.pivot_cols.push_back(c);
        ++r;
    }
    m.resize(r);
    out.rows = std::move(m);
    return out;
}

inline std::size_t rank(const RatMatrix &m, std::size_t cols) { return row_echelon(m, cols).rank(); }

/// Basis of {v : m v = 0}, one vector per free column, each with a 1 in its
/// free position.
inline std::vector<RatVector> nullspace(const RatMatrix &m, std::size_t cols) {
    RowEchelon e = row_echelon(m, cols);
    std::vector<bool> is_pivot(cols, false);
    for (auto c : e.pivot_cols) is_pivot[c] = true;
    std::vector<RatVector> basis;
    for (std::size_t f = 0; f < cols; ++f) {
        if (is_pivot[f]) continue;
        RatVector v(cols, Rat(0));
        v[f] = 1;
        for (std::size_t i = 0; i < e.rows.size(); ++i) v[e.pivot_cols[i]] = -e.rows[i][f];
        basis.push_back(std::move(v));
    }
    return basis;
}

/// Result of solving m v = b exactly.
struct LinearSolve {
    std::size_t rank_m = 0;
    std::size_t rank_augmented = 0;
    std::optional<RatVector> solution; // particular solution with free variables 0

    bool consistent() const { return rank_m == rank_augmented; }
};

inline LinearSolve solve(const RatMatrix &m, const RatVector &b, std::size_t cols) {
    RatMatrix aug = m;
    for (std::size_t i = 0; i < aug.size(); ++i) aug[i].push_back(b[i]);
    RowEchelon e = row_echelon(aug, cols + 1);
    LinearSolve out;
    out.rank_augmented = e.rank();
    out.rank_m = 0;
    for (auto c : e.pivot_cols)
        if (c < cols) ++out.rank_m;
    if (!out.consistent()) return out;
    RatVector v(cols, Rat(0));
    for (std::size_t i = 0; i < e.rows.size(); ++i) v[e.pivot_cols[i]] = e.rows[i][cols];
    out.solution = std::move(v);
    return out;
}

} // namespace pdisc
