#pragma once

#include "equilibria.hpp"
#include "ffdet.hpp"
#include "linalg.hpp"
#include "system.hpp"

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

namespace pdisc {

/// An invariant algebraic curve f = 0 with X(f) = K f. A missing multiplicity
/// is the "family" sentinel: the extactic curve vanishes identically.
struct InvariantCurve {
    MPoly f;
    MPoly cofactor;
    std::optional<unsigned> multiplicity = 1;

    bool is_family() const { return !multiplicity.has_value(); }
};

/// exp(g/f) with X(exp(g/f)) = L exp(g/f); f = 1 for the line at infinity.
struct ExpFactor {
    MPoly g;
    MPoly f = MPoly(1);
    MPoly cofactor;
};

struct ExtacticResult {
    unsigned order = 1;
    std::vector<Monomial> basis;
    MPoly e;
    std::vector<std::optional<unsigned>> multiplicities; // parallel to the curves passed in

    std::size_t basis_size() const { return basis.size(); }
    bool vanishes_identically() const { return e.is_zero(); }
};

/// Outcome of the degree-1 curve search.
struct LineSearch {
    std::vector<InvariantCurve> lines;
    bool family = false;
    std::vector<std::string> families;        // descriptions of the one-parameter families
    std::vector<std::string> irrational_lines; // real invariant lines with irrational coefficients

    bool complete() const { return !family && irrational_lines.empty(); }
};

inline MPoly divergence(const VectorField &f) { return f.divergence(); }
inline MPoly divergence(const PlanarSystem &s) { return s.field.divergence(); }

/// Exact invariance test: K = X(f)/f when the division is exact.
inline std::optional<InvariantCurve> verify_invariant_curve(const VectorField &field, const MPoly &f) {
    if (f.is_constant()) throw InputError("an invariant curve needs a nonconstant polynomial");
    MPoly fn = f.monic();
    auto k = field.lie(fn).divide_exact(fn);
    if (!k) return std::nullopt;
    return InvariantCurve{fn, *k, 1};
}
inline std::optional<InvariantCurve> verify_invariant_curve(const PlanarSystem &s, const MPoly &f) {
    return verify_invariant_curve(s.field, f);
}

namespace detail {

using YCoeffs = std::vector<UPoly>; // coefficients in y, each a polynomial in x

inline YCoeffs to_ycoeffs(const MPoly &f) {
    YCoeffs out;
    for (int k = 0; k <= f.degree_in(Var::y); ++k)
        out.push_back(UPoly::from_mpoly(f.coeff_in(Var::y, static_cast<unsigned>(k)), Var::x));
    return out;
}

inline MPoly from_ycoeffs(const YCoeffs &c) {
    MPoly out;
    for (std::size_t k = 0; k < c.size(); ++k) out += c[k].to_mpoly(Var::x) * MPoly::monomial(Rat(1), 0, static_cast<unsigned>(k));
    return out;
}

inline void trim(YCoeffs &c) {
    while (!c.empty() && c.back().is_zero()) c.pop_back();
}

inline UPoly content(const YCoeffs &c) {
    UPoly g;
    for (const auto &u : c) g = gcd(g, u);
    return g;
}

inline YCoeffs primitive_part(YCoeffs c) {
    UPoly g = content(c);
    for (auto &u : c) u = divmod(u, g).first;
    return c;
}

// Pseudo-remainder of a by b with respect to y.
inline YCoeffs prem(YCoeffs a, const YCoeffs &b) {
    const UPoly lb = b.back();
    while (!a.empty() && a.size() >= b.size()) {
        UPoly la = a.back();
        std::size_t shift = a.size() - b.size();
        for (auto &u : a) u = u * lb;
        for (std::size_t k = 0; k < b.size(); ++k) a[k + shift] = a[k + shift] - la * b[k];
        trim(a);
    }
    return a;
}

} // namespace detail

/// Monic gcd of two bivariate polynomials (primitive remainder sequence over
/// Q[x][y]).
inline MPoly poly_gcd(const MPoly &f, const MPoly &g) {
    if (f.is_zero()) return g.monic();
    if (g.is_zero()) return f.monic();
    auto a = detail::to_ycoeffs(f), b = detail::to_ycoeffs(g);
    UPoly c = gcd(detail::content(a), detail::content(b));
    a = detail::primitive_part(a);
    b = detail::primitive_part(b);
    if (a.size() < b.size()) std::swap(a, b);
    while (b.size() > 1) {
        auto r = detail::prem(a, b);
        a = std::move(b);
        b = r.empty() ? r : detail::primitive_part(r);
    }
    MPoly out = c.to_mpoly(Var::x);
    if (b.empty()) out = out * detail::from_ycoeffs(a);
    return out.monic();
}

namespace detail {

// Common real zeros of a list of bivariate polynomials: isolated points plus
// the curves along which all of them vanish.
struct ZeroSet {
    std::vector<AlgebraicPoint> points;
    std::vector<MPoly> curves;
};

inline bool has_real_curve_points(const MPoly &h) {
    if (h.degree_in(Var::y) <= 0) return !real_roots(UPoly::from_mpoly(h, Var::x)).empty();
    MPoly crit = resultant(h, h.diff(Var::y), Var::y) * h.coeff_in(Var::y, static_cast<unsigned>(h.degree_in(Var::y)));
    std::vector<Rat> samples;
    if (crit.is_constant()) {
        samples.push_back(Rat(0));
    } else {
        auto roots = real_roots(UPoly::from_mpoly(crit, Var::x));
        if (roots.empty()) samples.push_back(Rat(0));
        for (std::size_t i = 0; i < roots.size(); ++i) {
            if (i == 0) samples.push_back(roots[i].iv.lo - 1);
            if (i + 1 < roots.size()) samples.push_back((roots[i].iv.hi + roots[i + 1].iv.lo) / 2);
            else samples.push_back(roots[i].iv.hi + 1);
        }
    }
    for (const auto &s : samples)
        if (!real_roots(slice(h, Var::x, s)).empty()) return true;
    return false;
}

inline void common_zeros(std::vector<MPoly> list, ZeroSet &out) {
    std::vector<MPoly> polys;
    for (auto &p : list) {
        if (p.is_zero()) continue;
        if (p.is_constant()) return;
        polys.push_back(p.monic());
    }
    if (polys.empty()) throw InvariantViolation("common_zeros: the whole plane is a solution");
    const MPoly f = polys[0];
    if (polys.size() == 1) {
        if (has_real_curve_points(f)) {
            out.curves.push_back(f);
            return;
        }
        // Real points of a curve without real branches are singular.
        polys.push_back(f.diff(Var::x));
        polys.push_back(f.diff(Var::y));
        common_zeros(std::move(polys), out);
        return;
    }
    for (std::size_t j = 1; j < polys.size(); ++j) {
        MPoly g = poly_gcd(f, polys[j]);
        if (g.is_constant()) continue;
        std::vector<MPoly> rest;
        for (std::size_t k = 1; k < polys.size(); ++k)
            if (k != j) rest.push_back(polys[k]);
        std::vector<MPoly> with_g = rest, with_quotients = rest;
        with_g.insert(with_g.begin(), g);
        with_quotients.insert(with_quotients.begin(), *polys[j].divide_exact(g));
        with_quotients.insert(with_quotients.begin(), *f.divide_exact(g));
        common_zeros(std::move(with_g), out);
        common_zeros(std::move(with_quotients), out);
        return;
    }
    // f is coprime to every other member: finitely many common zeros.
    const MPoly &g = polys[1];
    std::vector<RawPoint> raw;
    MPoly res = resultant(f, g, Var::y);
    if (!res.is_zero()) {
        raw = solve_eliminating_y(f, g, res);
    } else {
        raw = solve_eliminating_y(f.swap_vars(), g.swap_vars(), resultant(f.swap_vars(), g.swap_vars(), Var::y));
        for (auto &r : raw) std::swap(r.pt.x, r.pt.y);
    }
    for (auto &r : raw) {
        bool keep = true;
        for (std::size_t k = 2; k < polys.size() && keep; ++k) {
            auto s = sign_at(polys[k], r.pt);
            keep = !s || *s == 0;
        }
        if (keep) out.points.push_back(r.pt);
    }
}

// Coefficients, in powers of x, of (Q - aP)(x, ax + b) as polynomials in
// (a, b), with a stored in the x slot and b in the y slot.
inline std::vector<MPoly> slant_conditions(const VectorField &field) {
    std::vector<MPoly> c;
    auto add = [&](unsigned k, const MPoly &v) {
        if (c.size() <= k) c.resize(k + 1);
        c[k] += v;
    };
    auto expand = [&](const MPoly &poly, const Rat &sign, unsigned extra_a) {
        for (const auto &[m, coef] : poly.terms()) {
            Int binom(1);
            for (unsigned t = 0; t <= m.y; ++t) {
                if (t > 0) binom = binom * (m.y - t + 1) / t;
                add(m.x + t, MPoly::monomial(sign * coef * Rat(binom), t + extra_a, m.y - t));
            }
        }
    };
    expand(field.q, Rat(1), 0);
    expand(field.p, Rat(-1), 1);
    return c;
}

inline std::vector<AlgebraicNumber> common_roots(const std::vector<UPoly> &polys) {
    UPoly g;
    for (const auto &u : polys) g = gcd(g, u);
    return real_roots(g);
}

} // namespace detail

/// All real invariant lines: vertical x - c, horizontal y - c and slanted
/// y - a x - b. Lines with rational coefficients are returned with their
/// cofactors; irrational ones and one-parameter families are flagged.
inline LineSearch find_invariant_lines(const VectorField &field) {
    LineSearch out;
    const MPoly x = MPoly::x(), y = MPoly::y();
    auto add_line = [&](const MPoly &f) {
        MPoly fn = f.monic();
        for (const auto &l : out.lines)
            if (l.f == fn) return;
        auto c = verify_invariant_curve(field, fn);
        if (!c) throw InvariantViolation("line " + fn.to_string() + " failed the invariance check");
        out.lines.push_back(*std::move(c));
    };
    auto axis_lines = [&](const MPoly &poly, Var free, const MPoly &var, const std::string &name) {
        if (poly.is_zero()) {
            out.family = true;
            out.families.push_back(name + " = c for every c");
            return;
        }
        std::vector<UPoly> coeffs;
        Var fixed = free == Var::y ? Var::x : Var::y;
        for (int k = 0; k <= std::max(poly.degree_in(free), 0); ++k)
            coeffs.push_back(UPoly::from_mpoly(poly.coeff_in(free, static_cast<unsigned>(k)), fixed));
        for (const auto &r : detail::common_roots(coeffs)) {
            if (r.is_exact()) add_line(var - MPoly(r.exact()));
            else out.irrational_lines.push_back(name + " = root of " + r.poly.to_string("t") + " in " + r.to_string());
        }
    };
    axis_lines(field.p, Var::y, x, "x");
    axis_lines(field.q, Var::x, y, "y");

    auto conds = detail::slant_conditions(field);
    if (std::all_of(conds.begin(), conds.end(), [](const MPoly &c) { return c.is_zero(); })) {
        out.family = true;
        out.families.push_back("y = a*x + b for every a, b");
        return out;
    }
    detail::ZeroSet zs;
    detail::common_zeros(conds, zs);
    for (const auto &h : zs.curves) {
        out.family = true;
        out.families.push_back("y = a*x + b with " + h.to_string("a", "b") + " = 0");
    }
    for (const auto &pt : zs.points) {
        if (pt.is_rational()) {
            add_line(y - MPoly(pt.x.exact()) * x - MPoly(pt.y.exact()));
        } else {
            out.irrational_lines.push_back("y = a*x + b with (a, b) in " + pt.x.to_string() + " x " + pt.y.to_string());
        }
    }
    return out;
}
inline LineSearch find_invariant_lines(const PlanarSystem &s) { return find_invariant_lines(s.field); }

/// Largest k with f^k | e; nullopt when e is identically zero.
inline std::optional<unsigned> curve_multiplicity(const MPoly &e, const MPoly &f) {
    if (e.is_zero()) return std::nullopt;
    unsigned k = 0;
    MPoly rest = e;
    while (auto q = rest.divide_exact(f)) {
        rest = *std::move(q);
        ++k;
    }
    return k;
}

/// m-th extactic curve: determinant of the iterated Lie derivatives of the
/// degree-<= m monomials.
inline ExtacticResult extactic(const VectorField &field, unsigned m, const std::vector<InvariantCurve> &curves = {},
                               unsigned max_order = 2) {
    if (m < 1 || m > max_order)
        throw InputError("extactic order must lie in [1, " + std::to_string(max_order) + "]");
    ExtacticResult out;
    out.order = m;
    out.basis = monomials_up_to(m);
    const std::size_t l = out.basis.size();
    Matrix<MPoly> mat(l, std::vector<MPoly>(l));
    for (std::size_t j = 0; j < l; ++j) {
        MPoly v = MPoly::monomial(Rat(1), out.basis[j].x, out.basis[j].y);
        for (std::size_t i = 0; i < l; ++i) {
            mat[i][j] = v;
            if (i + 1 < l) v = field.lie(v);
        }
    }
    out.e = ffdet(std::move(mat));
    for (const auto &c : curves) {
        auto k = curve_multiplicity(out.e, c.f);
        if (k && *k == 0 && c.f.degree() <= static_cast<int>(m))
            throw InvariantViolation("invariant curve " + c.f.to_string() + " does not divide the extactic curve");
        out.multiplicities.push_back(k);
    }
    return out;
}
inline ExtacticResult extactic(const PlanarSystem &s, unsigned m, const std::vector<InvariantCurve> &curves = {},
                               unsigned max_order = 2) {
    return extactic(s.field, m, curves, max_order);
}

/// Copies the multiplicities of an extactic computation onto its curves.
inline void assign_multiplicities(std::vector<InvariantCurve> &curves, const ExtacticResult &e) {
    if (e.multiplicities.size() != curves.size()) throw std::invalid_argument("curve list does not match the extactic table");
    for (std::size_t i = 0; i < curves.size(); ++i) curves[i].multiplicity = e.multiplicities[i];
}

namespace detail {

inline RatMatrix coefficient_rows(const std::vector<MPoly> &columns, const std::vector<Monomial> &rows) {
    RatMatrix m(rows.size(), RatVector(columns.size(), Rat(0)));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < columns.size(); ++j) m[i][j] = columns[j].coeff(rows[i].x, rows[i].y);
    return m;
}

inline std::vector<Monomial> support(const std::vector<MPoly> &polys) {
    std::vector<Monomial> out;
    for (const auto &p : polys)
        for (const auto &[m, c] : p.terms())
            if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
    return out;
}

inline MPoly combine(const std::vector<MPoly> &polys, const RatVector &v, std::size_t offset = 0) {
    MPoly out;
    for (std::size_t i = 0; i < polys.size(); ++i)
        if (v[offset + i] != 0) out += polys[i] * v[offset + i];
    return out;
}

} // namespace detail

/// Exponential factors from the line at infinity (deg g <= N, constants
/// quotiented out) and from curves of multiplicity k > 1.
inline std::vector<ExpFactor> find_exponential_factors(const VectorField &field, const std::vector<InvariantCurve> &curves,
                                                       unsigned n) {
    if (n < 1) throw InputError("exponential factor degree bound must be at least 1");
    const int d = field.degree();
    std::vector<ExpFactor> out;

    // exp(g): every coefficient of X(g) of degree >= d must vanish.
    std::vector<MPoly> gs, lies;
    for (const auto &m : monomials_up_to(n)) {
        if (m.degree() == 0) continue;
        gs.push_back(MPoly::monomial(Rat(1), m.x, m.y));
        lies.push_back(field.lie(gs.back()));
    }
    std::vector<Monomial> high;
    for (const auto &m : detail::support(lies))
        if (static_cast<int>(m.degree()) >= d) high.push_back(m);
    for (const auto &v : nullspace(detail::coefficient_rows(lies, high), gs.size())) {
        MPoly g = detail::combine(gs, v);
        Rat s = 1 / g.leading_term().second;
        out.push_back(ExpFactor{g * s, MPoly(1), detail::combine(lies, v) * s});
    }

    // exp(g/f): X(g) - K g - L f = 0 with g in normal form modulo f.
    for (const auto &c : curves) {
        if (!c.multiplicity || *c.multiplicity <= 1) continue;
        const Monomial lead = c.f.leading_term().first;
        const unsigned deg_g = (*c.multiplicity - 1) * static_cast<unsigned>(c.f.degree());
        std::vector<MPoly> cols, g_basis, l_basis;
        for (const auto &m : monomials_up_to(deg_g)) {
            if (lead.divides(m)) continue;
            g_basis.push_back(MPoly::monomial(Rat(1), m.x, m.y));
            cols.push_back(field.lie(g_basis.back()) - c.cofactor * g_basis.back());
        }
        for (const auto &m : monomials_up_to(static_cast<unsigned>(std::max(d - 1, 0)))) {
            l_basis.push_back(MPoly::monomial(Rat(1), m.x, m.y));
            cols.push_back(-(l_basis.back() * c.f));
        }
        for (const auto &v : nullspace(detail::coefficient_rows(cols, detail::support(cols)), cols.size())) {
            MPoly g = detail::combine(g_basis, v);
            if (g.is_zero()) continue;
            Rat s = 1 / g.leading_term().second;
            out.push_back(ExpFactor{g * s, c.f, detail::combine(l_basis, v, g_basis.size()) * s});
        }
    }
    return out;
}
inline std::vector<ExpFactor> find_exponential_factors(const PlanarSystem &s, const std::vector<InvariantCurve> &curves,
                                                       unsigned n) {
    return find_exponential_factors(s.field, curves, n);
}

} // namespace pdisc
