#pragma once

#include "ffdet.hpp"
#include "leslie.hpp"
#include "linalg.hpp"
#include "roots.hpp"
#include "system.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace pdisc {

/// The equilibrium set of P = Q = 0 contains a curve (P and Q share a factor).
class PositiveDimensionalError : public InputError {
  public:
    using InputError::InputError;
};

/// A real point whose coordinates are exact rationals or isolated algebraic
/// numbers.
struct AlgebraicPoint {
    AlgebraicNumber x;
    AlgebraicNumber y;

    static AlgebraicPoint rational(const Rat &a, const Rat &b) {
        return {AlgebraicNumber::rational(a), AlgebraicNumber::rational(b)};
    }

    bool is_rational() const { return x.is_exact() && y.is_exact(); }
    std::array<double, 2> approx() const { return {x.approx(), y.approx()}; }

    void refine(const Rat &width) {
        x.refine(width);
        y.refine(width);
    }
    void bisect() {
        x.bisect();
        y.bisect();
    }
    Rat width() const {
        Rat wx = x.iv.hi - x.iv.lo, wy = y.iv.hi - y.iv.lo;
        return wx > wy ? wx : wy;
    }

    RatInterval box_eval(const MPoly &f) const { return f.eval(x.interval(), y.interval()); }
};

namespace detail {

// Does h vanish at the algebraic number a? Exact: a is the only root of the
// square-free a.poly in its interval, so h(a) = 0 iff gcd(h, a.poly) changes
// sign across that interval.
inline bool vanishes_at(const UPoly &h, const AlgebraicNumber &a) {
    if (h.is_zero()) return true;
    if (a.is_exact()) return h.eval(a.exact()) == 0;
    UPoly g = gcd(h, a.poly);
    if (g.degree() <= 0) return false;
    return g.sign_at(a.iv.lo) * g.sign_at(a.iv.hi) < 0;
}

inline UPoly slice(const MPoly &f, Var fixed, const Rat &value) {
    if (fixed == Var::x) return UPoly::from_mpoly(f.subs_x(value), Var::y);
    return UPoly::from_mpoly(f.subs_y(value), Var::x);
}

} // namespace detail

inline constexpr unsigned kBisectionCap = 128;

/// Sign of f at pt, or nullopt when the cap of interval bisections is reached
/// without a decision. Zero is certified exactly whenever at least one
/// coordinate is rational.
inline std::optional<int> sign_at(const MPoly &f, AlgebraicPoint &pt, unsigned cap = kBisectionCap) {
    if (f.is_constant()) return sgn(f.constant_term());
    if (pt.is_rational()) return sgn(f.eval(pt.x.exact(), pt.y.exact()));
    if (pt.x.is_exact()) {
        if (detail::vanishes_at(detail::slice(f, Var::x, pt.x.exact()), pt.y)) return 0;
        cap = ~0u;
    } else if (pt.y.is_exact()) {
        if (detail::vanishes_at(detail::slice(f, Var::y, pt.y.exact()), pt.x)) return 0;
        cap = ~0u;
    }
    for (unsigned i = 0;; ++i) {
        if (auto s = pt.box_eval(f).certain_sign(); s && *s != 0) return s;
        if (pt.is_rational()) return sgn(f.eval(pt.x.exact(), pt.y.exact()));
        if (i >= cap) return std::nullopt;
        pt.bisect();
    }
}

using Mat2 = std::array<std::array<Rat, 2>, 2>;

/// Jacobian at a point: formal partials, their exact values when the point is
/// rational, and interval enclosures otherwise.
struct Jacobian {
    std::array<std::array<MPoly, 2>, 2> partials;
    std::optional<Mat2> exact;
    std::array<std::array<RatInterval, 2>, 2> box;
    std::array<std::array<double, 2>, 2> approx{};

    MPoly trace_poly() const { return partials[0][0] + partials[1][1]; }
    MPoly det_poly() const { return partials[0][0] * partials[1][1] - partials[0][1] * partials[1][0]; }
    MPoly disc_poly() const {
        MPoly t = trace_poly();
        return t * t - MPoly(4) * det_poly();
    }
};

inline Jacobian jacobian_at(const VectorField &f, AlgebraicPoint pt) {
    Jacobian j;
    j.partials = {{{f.p.diff(Var::x), f.p.diff(Var::y)}, {f.q.diff(Var::x), f.q.diff(Var::y)}}};
    if (!pt.is_rational()) pt.refine(default_root_width());
    Mat2 m;
    for (std::size_t r = 0; r < 2; ++r) {
        for (std::size_t c = 0; c < 2; ++c) {
            j.box[r][c] = pt.box_eval(j.partials[r][c]);
            if (pt.is_rational()) m[r][c] = j.partials[r][c].eval(pt.x.exact(), pt.y.exact());
            auto a = pt.approx();
            j.approx[r][c] = j.partials[r][c].eval(a[0], a[1]);
        }
    }
    if (pt.is_rational()) j.exact = m;
    return j;
}

inline Jacobian jacobian_at(const PlanarSystem &s, const AlgebraicPoint &pt) { return jacobian_at(s.field, pt); }

enum class Classification {
    stable_node,
    unstable_node,
    saddle,
    stable_focus,
    unstable_focus,
    center_candidate,
    saddle_node,
    degenerate_needs_blowup,
    undetermined,
};

inline std::string to_string(Classification c) {
    switch (c) {
    case Classification::stable_node: return "stable node";
    case Classification::unstable_node: return "unstable node";
    case Classification::saddle: return "saddle";
    case Classification::stable_focus: return "stable focus";
    case Classification::unstable_focus: return "unstable focus";
    case Classification::center_candidate: return "center-candidate";
    case Classification::saddle_node: return "saddle-node";
    case Classification::degenerate_needs_blowup: return "degenerate-needs-blowup";
    case Classification::undetermined: return "undetermined";
    }
    return "undetermined";
}

inline bool is_hyperbolic(Classification c) {
    return c == Classification::stable_node || c == Classification::unstable_node || c == Classification::saddle ||
           c == Classification::stable_focus || c == Classification::unstable_focus;
}

/// Eigenvalues: exact when rational, otherwise as doubles. Real eigenvalues
/// are ordered ascending.
struct EigenData {
    bool real = true;
    std::array<std::optional<Rat>, 2> exact;
    std::array<double, 2> re{};
    std::array<double, 2> im{};
    std::string text;
};

/// The flow after translating a semi-hyperbolic point to the origin and
/// aligning (xi, eta) with the zero and nonzero eigendirections:
/// xi' = a2 xi^2 + ..., eta' = lambda eta + ...
struct SemiHyperbolicReduction {
    Rat lambda;
    Rat a2;
    std::array<Rat, 2> center_dir;
    std::array<Rat, 2> strong_dir;
    MPoly xi_dot;
    MPoly eta_dot;
    /// Side of the center direction (+1 along center_dir, -1 against it) that
    /// carries the center separatrix.
    int separatrix_side = 0;
};

enum class Certificate { exact, algebraic, interval };

inline std::string to_string(Certificate c) {
    switch (c) {
    case Certificate::exact: return "exact";
    case Certificate::algebraic: return "algebraic";
    case Certificate::interval: return "interval";
    }
    return "interval";
}

struct EquilibriumRecord {
    AlgebraicPoint point;
    Certificate certificate = Certificate::exact;
    Jacobian jacobian;
    std::optional<Rat> trace, det, disc;
    std::optional<int> trace_sign, det_sign, disc_sign;
    EigenData eigen;
    Classification classification = Classification::undetermined;
    int stability = 0; // -1 attracting, +1 repelling, 0 neither
    std::optional<SemiHyperbolicReduction> reduction;
    std::string label;

    std::string describe() const {
        if (classification == Classification::saddle_node)
            return std::string(stability < 0 ? "attractor" : "repeller") + " saddle-node";
        return to_string(classification);
    }
};

namespace detail {

inline std::array<Rat, 2> kernel_vector(const Mat2 &m) {
    RatMatrix a{{m[0][0], m[0][1]}, {m[1][0], m[1][1]}};
    auto ns = nullspace(a, 2);
    if (ns.empty()) throw InvariantViolation("expected a singular matrix");
    return {ns[0][0], ns[0][1]};
}

inline EigenData eigen_data(const Jacobian &j, const std::optional<Rat> &t, const std::optional<Rat> &d) {
    EigenData e;
    if (t && d) {
        Rat disc = *t * *t - 4 * *d;
        if (auto s = exact_sqrt(disc)) {
            Rat l1 = (*t - *s) / 2, l2 = (*t + *s) / 2;
            e.exact = {l1, l2};
            e.re = {l1.get_d(), l2.get_d()};
            e.text = l1 == l2 ? l1.get_str() + " (double)" : l1.get_str() + ", " + l2.get_str();
            return e;
        }
        double tt = t->get_d(), dd = Rat(disc).get_d();
        if (disc > 0) {
            e.re = {(tt - std::sqrt(dd)) / 2, (tt + std::sqrt(dd)) / 2};
            e.text = "(" + t->get_str() + " -+ sqrt(" + disc.get_str() + "))/2";
        } else {
            e.real = false;
            e.re = {tt / 2, tt / 2};
            e.im = {-std::sqrt(-dd) / 2, std::sqrt(-dd) / 2};
            e.text = "(" + t->get_str() + " -+ i*sqrt(" + Rat(-disc).get_str() + "))/2";
        }
        return e;
    }
    double tt = j.approx[0][0] + j.approx[1][1];
    double dd = j.approx[0][0] * j.approx[1][1] - j.approx[0][1] * j.approx[1][0];
    double disc = tt * tt - 4 * dd;
    if (disc >= 0) {
        e.re = {(tt - std::sqrt(disc)) / 2, (tt + std::sqrt(disc)) / 2};
    } else {
        e.real = false;
        e.re = {tt / 2, tt / 2};
        e.im = {-std::sqrt(-disc) / 2, std::sqrt(-disc) / 2};
    }
    e.text = "approx";
    return e;
}

} // namespace detail

/// Translates f to the rational point (x0, y0) with zero-trace-nonzero Jacobian
/// of rank one and reads the quadratic coefficient on the center direction.
inline SemiHyperbolicReduction semi_hyperbolic_reduction(const VectorField &f, const Rat &x0, const Rat &y0,
                                                         const Mat2 &j) {
    SemiHyperbolicReduction r;
    r.lambda = j[0][0] + j[1][1];
    r.center_dir = detail::kernel_vector(j);
    Mat2 shifted = j;
    shifted[0][0] -= r.lambda;
    shifted[1][1] -= r.lambda;
    r.strong_dir = detail::kernel_vector(shifted);
    const auto &e0 = r.center_dir, &e1 = r.strong_dir;
    MPoly xi = MPoly::x(), eta = MPoly::y();
    MPoly xs = MPoly(x0) + e0[0] * xi + e1[0] * eta;
    MPoly ys = MPoly(y0) + e0[1] * xi + e1[1] * eta;
    MPoly pt = f.p.compose(xs, ys), qt = f.q.compose(xs, ys);
    Rat det = e0[0] * e1[1] - e1[0] * e0[1];
    // (xi', eta') = M^{-1} (P, Q) with M = [e0 e1].
    r.xi_dot = (e1[1] * pt - e1[0] * qt) * Rat(1 / det);
    r.eta_dot = (e0[0] * qt - e0[1] * pt) * Rat(1 / det);
    r.a2 = r.xi_dot.coeff(2, 0);
    // Center flow xi' ~ a2 xi^2 moves away from the point on the side sign(a2).
    // The hyperbolic sectors sit where the center flow has the opposite
    // character to the strong eigenvalue.
    if (r.a2 != 0) r.separatrix_side = r.lambda < 0 ? sgn(r.a2) : -sgn(r.a2);
    return r;
}

/// Fills jacobian, trace/det/disc signs, eigen-data and the classification.
inline Classification classify(EquilibriumRecord &rec, const VectorField &f) {
    rec.jacobian = jacobian_at(f, rec.point);
    const Jacobian &j = rec.jacobian;
    if (j.exact) {
        const Mat2 &m = *j.exact;
        rec.trace = m[0][0] + m[1][1];
        rec.det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        rec.disc = *rec.trace * *rec.trace - 4 * *rec.det;
        rec.trace_sign = sgn(*rec.trace);
        rec.det_sign = sgn(*rec.det);
        rec.disc_sign = sgn(*rec.disc);
    } else {
        AlgebraicPoint pt = rec.point;
        rec.det_sign = sign_at(j.det_poly(), pt);
        rec.trace_sign = sign_at(j.trace_poly(), pt);
        rec.disc_sign = sign_at(j.disc_poly(), pt);
    }
    rec.eigen = detail::eigen_data(j, rec.trace, rec.det);
    rec.stability = 0;
    rec.reduction.reset();
    auto &cls = rec.classification;
    if (!rec.det_sign || !rec.trace_sign) return cls = Classification::undetermined;
    int ds = *rec.det_sign, ts = *rec.trace_sign;
    if (ds < 0) return cls = Classification::saddle;
    if (ds > 0) {
        if (ts == 0) return cls = Classification::center_candidate;
        rec.stability = ts;
        if (!rec.disc_sign) return cls = Classification::undetermined;
        if (*rec.disc_sign >= 0) return cls = ts < 0 ? Classification::stable_node : Classification::unstable_node;
        return cls = ts < 0 ? Classification::stable_focus : Classification::unstable_focus;
    }
    if (ts != 0) {
        if (!j.exact) return cls = Classification::undetermined;
        rec.reduction = semi_hyperbolic_reduction(f, rec.point.x.exact(), rec.point.y.exact(), *j.exact);
        if (rec.reduction->a2 == 0) return cls = Classification::undetermined;
        rec.stability = ts;
        return cls = Classification::saddle_node;
    }
    bool zero_linear = true;
    for (std::size_t r = 0; r < 2; ++r) {
        for (std::size_t c = 0; c < 2; ++c) {
            AlgebraicPoint pt = rec.point;
            auto s = sign_at(j.partials[r][c], pt);
            if (!s) return cls = Classification::undetermined;
            zero_linear = zero_linear && *s == 0;
        }
    }
    // Nilpotent linear parts need higher-order normal forms; not attempted.
    return cls = zero_linear ? Classification::degenerate_needs_blowup : Classification::undetermined;
}

inline Classification classify(EquilibriumRecord &rec, const PlanarSystem &s) { return classify(rec, s.field); }

inline EquilibriumRecord analyze_point(const VectorField &f, const AlgebraicPoint &pt,
                                       Certificate cert = Certificate::exact) {
    EquilibriumRecord rec;
    rec.point = pt;
    rec.certificate = cert;
    classify(rec, f);
    return rec;
}

namespace detail {

struct RawPoint {
    AlgebraicPoint pt;
    Certificate cert;
};

inline std::vector<AlgebraicNumber> real_roots(const UPoly &p) {
    std::vector<AlgebraicNumber> out;
    if (p.degree() <= 0) return out;
    UPoly sqf = squarefree_part(p);
    for (auto &iv : isolate_all_real_roots(sqf)) out.push_back(AlgebraicNumber{sqf, iv});
    return out;
}

[[noreturn]] inline void positive_dimensional(const std::string &where) {
    throw PositiveDimensionalError("the equilibrium set is positive-dimensional: P and Q vanish together along " +
                                   where);
}

// Common zeros of p and q with x eliminated last: x from Res_y, then y over
// each x root.
inline std::vector<RawPoint> solve_eliminating_y(const MPoly &p, const MPoly &q, const MPoly &res_y) {
    std::vector<RawPoint> out;
    std::optional<std::vector<AlgebraicNumber>> y_roots;
    auto coeffs_in_y = [](const MPoly &f) {
        std::vector<UPoly> cs;
        for (int k = 0; k <= std::max(f.degree_in(Var::y), 0); ++k)
            cs.push_back(UPoly::from_mpoly(f.coeff_in(Var::y, static_cast<unsigned>(k)), Var::x));
        return cs;
    };
    auto pc = coeffs_in_y(p), qc = coeffs_in_y(q);
    for (const auto &xr : real_roots(UPoly::from_mpoly(res_y, Var::x))) {
        if (xr.is_exact()) {
            UPoly pe = detail::slice(p, Var::x, xr.exact()), qe = detail::slice(q, Var::x, xr.exact());
            if (pe.is_zero() && qe.is_zero()) positive_dimensional("x = " + xr.exact().get_str());
            UPoly g = gcd(pe, qe);
            for (auto &yr : real_roots(g))
                out.push_back({AlgebraicPoint{xr, yr}, yr.is_exact() ? Certificate::exact : Certificate::algebraic});
            continue;
        }
        bool p_zero = std::all_of(pc.begin(), pc.end(), [&](const UPoly &c) { return vanishes_at(c, xr); });
        bool q_zero = std::all_of(qc.begin(), qc.end(), [&](const UPoly &c) { return vanishes_at(c, xr); });
        if (p_zero && q_zero) positive_dimensional("x = " + xr.to_string());
        if (!y_roots) {
            MPoly res_x = resultant(p, q, Var::x);
            if (res_x.is_zero()) positive_dimensional("a common factor");
            y_roots = real_roots(UPoly::from_mpoly(res_x, Var::y));
        }
        for (const auto &yr : *y_roots) {
            if (yr.is_exact()) {
                if (vanishes_at(detail::slice(p, Var::y, yr.exact()), xr) &&
                    vanishes_at(detail::slice(q, Var::y, yr.exact()), xr))
                    out.push_back({AlgebraicPoint{xr, yr}, Certificate::algebraic});
                continue;
            }
            AlgebraicPoint pt{xr, yr};
            bool rejected = false;
            for (unsigned i = 0; i <= kBisectionCap && !rejected; ++i) {
                rejected = !pt.box_eval(p).contains_zero() || !pt.box_eval(q).contains_zero();
                if (!rejected) pt.bisect();
            }
            if (!rejected) out.push_back({AlgebraicPoint{xr, yr}, Certificate::interval});
        }
    }
    return out;
}

} // namespace detail

/// All real solutions of P = Q = 0, classified and sorted by coordinates.
inline std::vector<EquilibriumRecord> finite_equilibria(const VectorField &f, bool positive_quadrant_only = false) {
    const MPoly &p = f.p, &q = f.q;
    if (p.is_zero() && q.is_zero()) throw InputError("the vector field is identically zero");
    if (p.is_zero() || q.is_zero()) {
        const MPoly &other = p.is_zero() ? q : p;
        if (!other.is_constant()) detail::positive_dimensional("the curve " + other.to_string() + " = 0");
        return {};
    }
    std::vector<detail::RawPoint> raw;
    bool p_free = p.degree_in(Var::y) <= 0, q_free = q.degree_in(Var::y) <= 0;
    if (p_free && q_free) {
        UPoly g = gcd(UPoly::from_mpoly(p, Var::x), UPoly::from_mpoly(q, Var::x));
        if (g.degree() > 0 && !detail::real_roots(g).empty()) detail::positive_dimensional("vertical lines");
        return {};
    }
    MPoly res_y = resultant(p, q, Var::y);
    if (!res_y.is_zero()) {
        raw = detail::solve_eliminating_y(p, q, res_y);
    } else {
        MPoly ps = p.swap_vars(), qs = q.swap_vars();
        MPoly res = resultant(ps, qs, Var::y);
        if (res.is_zero()) detail::positive_dimensional("a common factor of P and Q");
        raw = detail::solve_eliminating_y(ps, qs, res);
        for (auto &r : raw) std::swap(r.pt.x, r.pt.y);
    }
    std::vector<EquilibriumRecord> out;
    for (auto &r : raw) {
        if (positive_quadrant_only && (r.pt.x.sign() < 0 || r.pt.y.sign() < 0)) continue;
        r.pt.refine(default_root_width());
        out.push_back(analyze_point(f, r.pt, r.cert));
    }
    auto key = [](const EquilibriumRecord &e) {
        AlgebraicPoint pt = e.point;
        if (!pt.is_rational()) pt.refine(Rat(1, 1) / Rat(Int(1) << 64));
        return pt.approx();
    };
    std::vector<std::pair<std::array<double, 2>, std::size_t>> keys;
    for (std::size_t i = 0; i < out.size(); ++i) keys.push_back({key(out[i]), i});
    std::sort(keys.begin(), keys.end());
    std::vector<EquilibriumRecord> sorted;
    for (auto &k : keys) sorted.push_back(std::move(out[k.second]));
    return sorted;
}

inline std::vector<EquilibriumRecord> finite_equilibria(const PlanarSystem &s, bool positive_quadrant_only = false) {
    return finite_equilibria(s.field, positive_quadrant_only);
}

/// Tags the Leslie-Gower equilibria E0 = (0,0), E1 = (0,C), E2 = (1,0) and
/// the interior point Estar; anything else is "other".
inline void label_leslie(std::vector<EquilibriumRecord> &recs, const ParamBindings &b) {
    for (auto &r : recs) {
        r.label = "other";
        if (!r.point.is_rational()) continue;
        Rat x = r.point.x.exact(), y = r.point.y.exact();
        if (x == 0 && y == 0) r.label = "E0";
        else if (x == 0 && y == b.C) r.label = "E1";
        else if (x == 1 && y == 0) r.label = "E2";
        else if (x > 0 && y > 0) r.label = "Estar";
    }
}

/// Closed-form interior equilibrium ((1 - AC)/(1 + A), (1 + C)/(1 + A)).
inline std::array<Rat, 2> leslie_interior_point(const ParamBindings &b) {
    Rat x = (1 - b.A * b.C) / (1 + b.A);
    Rat y = (1 + b.C) / (1 + b.A);
    return {x, y};
}

} // namespace pdisc
