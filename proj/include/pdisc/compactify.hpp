#pragma once

#include "equilibria.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace pdisc {

enum class Chart { U1, U2, U3, V1, V2 };

inline std::string to_string(Chart c) {
    switch (c) {
    case Chart::U1: return "U1";
    case Chart::U2: return "U2";
    case Chart::U3: return "U3";
    case Chart::V1: return "V1";
    case Chart::V2: return "V2";
    }
    return "U3";
}

/// A compactified chart. The chart variables (u, v) are stored as the x and y
/// of the field; v = 0 is the equator in U1, U2, V1 and V2.
struct ChartSystem {
    Chart chart = Chart::U3;
    VectorField field;
    int parent_degree = 0;

    const MPoly &u_dot() const { return field.p; }
    const MPoly &v_dot() const { return field.q; }
};

namespace detail {

// v^d f(1/v, u/v) for the U1 chart and v^d f(u/v, 1/v) for U2.
inline MPoly chart_homogenize(const MPoly &f, int d, bool first) {
    MPoly out;
    for (const auto &[m, c] : f.terms()) {
        unsigned vpow = static_cast<unsigned>(d) - m.degree();
        out.add_term(first ? Monomial{m.y, vpow} : Monomial{m.x, vpow}, c);
    }
    return out;
}

} // namespace detail

inline ChartSystem to_chart(const VectorField &f, Chart chart) {
    int d = f.degree();
    if (d < 1) throw InputError("compactification needs a system of degree at least 1");
    ChartSystem cs;
    cs.chart = chart;
    cs.parent_degree = d;
    if (chart == Chart::U3) {
        cs.field = f;
        return cs;
    }
    MPoly u = MPoly::x(), v = MPoly::y();
    bool first = chart == Chart::U1 || chart == Chart::V1;
    MPoly hp = detail::chart_homogenize(f.p, d, first), hq = detail::chart_homogenize(f.q, d, first);
    if (first) cs.field = {hq - u * hp, -(v * hp)};
    else cs.field = {hp - u * hq, -(v * hq)};
    if ((chart == Chart::V1 || chart == Chart::V2) && d % 2 == 0) cs.field = Rat(-1) * cs.field;
    return cs;
}

inline ChartSystem to_chart(const PlanarSystem &s, Chart chart) { return to_chart(s.field, chart); }

/// Infinite equilibria of a chart: the zeros of the restricted flow on v = 0.
struct InfiniteEquilibria {
    Chart chart = Chart::U1;
    std::vector<EquilibriumRecord> points;
    bool line_of_equilibria = false;
};

inline InfiniteEquilibria infinite_equilibria(const ChartSystem &cs, bool positive_quadrant_only = false) {
    if (cs.chart == Chart::U3) throw InputError("infinite equilibria live in the U1, U2, V1 and V2 charts");
    InfiniteEquilibria out;
    out.chart = cs.chart;
    UPoly restricted = UPoly::from_mpoly(cs.u_dot().subs_y(Rat(0)), Var::x);
    if (restricted.is_zero()) {
        out.line_of_equilibria = true;
        return out;
    }
    for (const auto &root : detail::real_roots(restricted)) {
        AlgebraicPoint pt{root, AlgebraicNumber::rational(Rat(0))};
        if (positive_quadrant_only && pt.x.sign() < 0) continue;
        pt.refine(default_root_width());
        out.points.push_back(analyze_point(cs.field, pt, root.is_exact() ? Certificate::exact : Certificate::algebraic));
    }
    return out;
}

enum class BlowupDirection { x_directional, y_directional };

inline std::string to_string(BlowupDirection d) {
    return d == BlowupDirection::x_directional ? "x-directional" : "y-directional";
}

/// Directional blow-up at the origin. x-directional: (x, y) = (u, u w), field
/// in variables (u, w) stored as (x, y); y-directional: (x, y) = (z v, v),
/// field in (z, v). Both equations are divided by the same power of the
/// exceptional variable.
struct BlowupSystem {
    BlowupDirection direction = BlowupDirection::x_directional;
    VectorField field;
    unsigned power = 0;
    /// The blow-up map swaps the two quadrants on the negative side of the
    /// exceptional variable.
    bool quadrant_swap = true;
    /// Dividing by an odd power reverses time where the exceptional variable is
    /// negative.
    bool reverses_negative_side = false;
    /// The divisor is not invariant (every direction is characteristic).
    bool dicritical = false;
    bool divisor_line_of_equilibria = false;
    std::vector<EquilibriumRecord> divisor_equilibria;

    Var exceptional() const { return direction == BlowupDirection::x_directional ? Var::x : Var::y; }
};

namespace detail {

inline unsigned valuation(const MPoly &f, Var v) {
    Monomial m = f.monomial_content();
    return v == Var::x ? m.x : m.y;
}

} // namespace detail

inline BlowupSystem directional_blowup(const VectorField &f, BlowupDirection dir) {
    if (f.p.constant_term() != 0 || f.q.constant_term() != 0)
        throw InputError("directional blow-up needs an equilibrium at the origin");
    BlowupSystem b;
    b.direction = dir;
    MPoly s = MPoly::x(), t = MPoly::y();
    MPoly e_dot, d_dot; // exceptional-variable and direction-variable equations
    Var ev = dir == BlowupDirection::x_directional ? Var::x : Var::y;
    if (dir == BlowupDirection::x_directional) {
        // u' = P(u, uw), w' = (Q(u, uw) - w P(u, uw)) / u.
        MPoly pp = f.p.compose(s, s * t), qq = f.q.compose(s, s * t);
        e_dot = pp;
        auto w = (qq - t * pp).divide_exact(s);
        if (!w) throw InvariantViolation("blow-up numerator not divisible by the exceptional variable");
        d_dot = *w;
    } else {
        // v' = Q(zv, v), z' = (P(zv, v) - z Q(zv, v)) / v.
        MPoly pp = f.p.compose(s * t, t), qq = f.q.compose(s * t, t);
        e_dot = qq;
        auto z = (pp - s * qq).divide_exact(t);
        if (!z) throw InvariantViolation("blow-up numerator not divisible by the exceptional variable");
        d_dot = *z;
    }
    unsigned k = ~0u;
    if (!e_dot.is_zero()) k = std::min(k, detail::valuation(e_dot, ev));
    if (!d_dot.is_zero()) k = std::min(k, detail::valuation(d_dot, ev));
    if (k == ~0u) k = 0;
    b.power = k;
    b.reverses_negative_side = k % 2 == 1;
    Monomial div = ev == Var::x ? Monomial{k, 0} : Monomial{0, k};
    e_dot = e_dot.divide_by_monomial(div);
    d_dot = d_dot.divide_by_monomial(div);
    b.field = ev == Var::x ? VectorField{e_dot, d_dot} : VectorField{d_dot, e_dot};
    // The divisor is invariant iff the exceptional equation vanishes on it.
    MPoly e_on_divisor = ev == Var::x ? e_dot.subs_x(Rat(0)) : e_dot.subs_y(Rat(0));
    if (!e_on_divisor.is_zero()) {
        b.dicritical = true;
        return b;
    }
    MPoly d_on_divisor = ev == Var::x ? d_dot.subs_x(Rat(0)) : d_dot.subs_y(Rat(0));
    UPoly restricted = UPoly::from_mpoly(d_on_divisor, ev == Var::x ? Var::y : Var::x);
    if (restricted.is_zero()) {
        b.divisor_line_of_equilibria = true;
        return b;
    }
    for (auto root : detail::real_roots(restricted)) {
        root.refine(default_root_width());
        AlgebraicNumber zero = AlgebraicNumber::rational(Rat(0));
        AlgebraicPoint pt = ev == Var::x ? AlgebraicPoint{zero, root} : AlgebraicPoint{root, zero};
        b.divisor_equilibria.push_back(
            analyze_point(b.field, pt, root.is_exact() ? Certificate::exact : Certificate::algebraic));
    }
    return b;
}

inline BlowupSystem directional_blowup(const ChartSystem &cs, BlowupDirection dir) {
    return directional_blowup(cs.field, dir);
}

/// Pushes the blown-up field at (s, t) forward through the blow-up map and
/// multiplies by the rescaling monomial; this reproduces the original field.
inline std::array<Rat, 2> blow_down(const BlowupSystem &b, const Rat &s, const Rat &t) {
    Rat a = b.field.p.eval(s, t), c = b.field.q.eval(s, t);
    std::array<Rat, 2> out;
    if (b.direction == BlowupDirection::x_directional) {
        // (u, v) = (s, s t): u' = a, v' = t a + s c.
        out = {a, t * a + s * c};
        Rat scale = pow_rat(s, b.power);
        out[0] *= scale;
        out[1] *= scale;
    } else {
        // (u, v) = (s t, t): u' = t a + s c, v' = c.
        out = {t * a + s * c, c};
        Rat scale = pow_rat(t, b.power);
        out[0] *= scale;
        out[1] *= scale;
    }
    return out;
}

struct SectorDecomposition {
    int hyperbolic = 0;
    int parabolic = 0;
    int elliptic = 0;
    bool resolved = false;
    std::string note;
};

/// One characteristic direction: an equilibrium of the blown-up flow on the
/// circle of directions. radial < 0 means orbits approach the point along it;
/// tangential > 0 means the circle flow leaves it.
struct CharacteristicDirection {
    double angle = 0;
    int radial = 0;
    int tangential = 0;
};

namespace detail {

inline SectorDecomposition sectors_from_circle(std::vector<CharacteristicDirection> dirs) {
    SectorDecomposition out;
    if (dirs.empty()) {
        out.note = "no characteristic directions (monodromic point)";
        return out;
    }
    std::sort(dirs.begin(), dirs.end(), [](const auto &a, const auto &b) { return a.angle < b.angle; });
    std::size_t n = dirs.size();
    std::vector<char> arcs(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto &p = dirs[i], &q = dirs[(i + 1) % n];
        if (p.tangential == q.tangential) {
            out.note = "circle flow inconsistent between characteristic directions";
            return out;
        }
        const auto &src = p.tangential > 0 ? p : q;
        const auto &dst = p.tangential > 0 ? q : p;
        if (src.radial < 0 && dst.radial > 0) arcs[i] = 'h';
        else if (src.radial > 0 && dst.radial < 0) arcs[i] = 'e';
        else arcs[i] = 'p';
    }
    for (char a : arcs) {
        if (a == 'h') ++out.hyperbolic;
        if (a == 'e') ++out.elliptic;
    }
    if (out.hyperbolic + out.elliptic == 0) {
        out.parabolic = 1;
    } else {
        for (std::size_t i = 0; i < n; ++i)
            if (arcs[i] == 'p' && arcs[(i + n - 1) % n] != 'p') ++out.parabolic;
    }
    out.resolved = true;
    return out;
}

inline std::optional<int> partial_sign(const EquilibriumRecord &r, std::size_t i, std::size_t j) {
    AlgebraicPoint pt = r.point;
    return sign_at(r.jacobian.partials[i][j], pt);
}

} // namespace detail

/// Characteristic directions of the original point read off both blow-ups,
/// or nullopt when some divisor equilibrium is not hyperbolic.
inline std::optional<std::vector<CharacteristicDirection>> characteristic_directions(const BlowupSystem &bx,
                                                                                     const BlowupSystem &by,
                                                                                     std::string &why) {
    std::vector<CharacteristicDirection> dirs;
    for (const BlowupSystem *b : {&bx, &by}) {
        if (b->dicritical || b->divisor_line_of_equilibria) {
            why = to_string(b->direction) + " blow-up is dicritical";
            return std::nullopt;
        }
    }
    const double pi = std::numbers::pi;
    for (const auto &r : bx.divisor_equilibria) {
        if (!is_hyperbolic(r.classification)) {
            why = "non-hyperbolic divisor equilibrium in the x-directional blow-up";
            return std::nullopt;
        }
        auto rs = detail::partial_sign(r, 0, 0), ts = detail::partial_sign(r, 1, 1);
        if (!rs || !ts) {
            why = "undetermined sign at a divisor equilibrium";
            return std::nullopt;
        }
        int flip = bx.reverses_negative_side ? -1 : 1;
        double a = std::atan(r.point.y.approx());
        dirs.push_back({a < 0 ? a + 2 * pi : a, *rs, *ts});
        dirs.push_back({a + pi, flip * *rs, flip * *ts});
    }
    for (const auto &r : by.divisor_equilibria) {
        if (!is_hyperbolic(r.classification)) {
            why = "non-hyperbolic divisor equilibrium in the y-directional blow-up";
            return std::nullopt;
        }
        if (!r.point.x.is_exact() || r.point.x.exact() != 0) continue; // already seen by the x-directional chart
        auto rs = detail::partial_sign(r, 1, 1), ts = detail::partial_sign(r, 0, 0);
        if (!rs || !ts) {
            why = "undetermined sign at a divisor equilibrium";
            return std::nullopt;
        }
        int flip = by.reverses_negative_side ? -1 : 1;
        dirs.push_back({pi / 2, *rs, *ts});
        dirs.push_back({3 * pi / 2, flip * *rs, flip * *ts});
    }
    return dirs;
}

/// Sector counts of a degenerate point from its two directional blow-ups.
inline SectorDecomposition sector_synthesis(const BlowupSystem &bx, const BlowupSystem &by) {
    std::string why;
    auto dirs = characteristic_directions(bx, by, why);
    if (!dirs) {
        SectorDecomposition out;
        out.note = why;
        return out;
    }
    return detail::sectors_from_circle(*dirs);
}

/// Sector counts of a hyperbolic equilibrium.
inline SectorDecomposition sector_synthesis(const EquilibriumRecord &r) {
    SectorDecomposition out;
    switch (r.classification) {
    case Classification::saddle: out.hyperbolic = 4; break;
    case Classification::stable_node:
    case Classification::unstable_node:
    case Classification::stable_focus:
    case Classification::unstable_focus: out.parabolic = 1; break;
    default: out.note = "not hyperbolic"; return out;
    }
    out.resolved = true;
    return out;
}

/// The full analysis of a degenerate chart origin: both blow-ups and the
/// resulting sectors.
struct BlowupTree {
    BlowupSystem x_dir;
    BlowupSystem y_dir;
    SectorDecomposition sectors;
};

inline BlowupTree blowup_tree(const VectorField &f) {
    BlowupTree t;
    t.x_dir = directional_blowup(f, BlowupDirection::x_directional);
    t.y_dir = directional_blowup(f, BlowupDirection::y_directional);
    t.sectors = sector_synthesis(t.x_dir, t.y_dir);
    return t;
}

/// Disc coordinates of a point of the plane: (x, y) / sqrt(1 + x^2 + y^2).
inline std::array<double, 2> to_disc(double x, double y) {
    double r = std::sqrt(1 + x * x + y * y);
    return {x / r, y / r};
}

/// Disc coordinates of the point at infinity in direction (dx, dy).
inline std::array<double, 2> infinity_on_disc(double dx, double dy) {
    double r = std::hypot(dx, dy);
    return {dx / r, dy / r};
}

} // namespace pdisc
