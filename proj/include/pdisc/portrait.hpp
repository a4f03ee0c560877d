#pragma once

#include "compactify.hpp"
#include "equilibria.hpp"
#include "leslie.hpp"
#include "system.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace pdisc {

enum class Role { generic, separatrix, axis };
enum class Termination { converged, reached_tmax, reached_boundary, step_underflow };

inline std::string to_string(Role r) {
    switch (r) {
    case Role::generic: return "generic";
    case Role::separatrix: return "separatrix";
    case Role::axis: return "axis";
    }
    return "generic";
}

inline std::string to_string(Termination t) {
    switch (t) {
    case Termination::converged: return "converged-to-equilibrium";
    case Termination::reached_tmax: return "reached-tmax";
    case Termination::reached_boundary: return "reached-boundary";
    case Termination::step_underflow: return "step-underflow";
    }
    return "reached-tmax";
}

/// Where a state lives: the plane itself, or the U1/U2 chart on the side
/// `side` of the equator (side -1 covers what V1/V2 cover).
enum class Frame { plane, u1, u2 };

struct ChartPoint {
    Frame frame = Frame::plane;
    double a = 0; // x, or u
    double b = 0; // y, or v
    int side = 1;
};

struct Seed {
    std::size_t id = 0;
    Role role = Role::generic;
    int direction = 1; // +1 forward in time, -1 backward
    ChartPoint start;
};

struct Trajectory {
    std::size_t seed = 0;
    Role role = Role::generic;
    int direction = 1;
    std::vector<std::array<double, 2>> points; // disc coordinates
    std::vector<double> times;
    Termination reason = Termination::reached_tmax;
    ChartPoint end;
    std::optional<std::array<double, 2>> plane_end; // when the endpoint is finite
};

struct IntegrationOptions {
    double tmax = 1000;
    double rtol = 1e-9;
    double atol = 1e-12;
    double switch_threshold = 10; // |x| + |y| beyond which the U charts take over
    double hysteresis = 2;
    double converge_distance = 1e-8;
    double converge_speed = 1e-10;
    double min_step = 1e-14;
    double store_spacing = 2e-3; // disc distance between stored points
    std::size_t max_steps = 2000000;
};

/// Plane point of a disc point (inverse of to_disc); undefined on the rim.
inline std::array<double, 2> from_disc(double dx, double dy) {
    double s = std::sqrt(std::max(0.0, 1 - dx * dx - dy * dy));
    return {dx / s, dy / s};
}

inline std::array<double, 2> disc_of(const ChartPoint &p) {
    switch (p.frame) {
    case Frame::plane: return to_disc(p.a, p.b);
    case Frame::u1: {
        double r = std::sqrt(p.b * p.b + 1 + p.a * p.a) * p.side;
        return {1 / r, p.a / r};
    }
    case Frame::u2: {
        double r = std::sqrt(p.b * p.b + 1 + p.a * p.a) * p.side;
        return {p.a / r, 1 / r};
    }
    }
    return {0, 0};
}

namespace detail {

// Polynomial in double precision for fast evaluation.
class DPoly {
  public:
    DPoly() = default;
    explicit DPoly(const MPoly &p) {
        for (const auto &[m, c] : p.terms()) {
            terms_.push_back({m.x, m.y, Rat(c).get_d()});
            deg_ = std::max(deg_, m.degree());
        }
    }
    double eval(const std::vector<double> &xp, const std::vector<double> &yp) const {
        double s = 0;
        for (const auto &t : terms_) s += t.c * xp[t.i] * yp[t.j];
        return s;
    }
    unsigned degree() const { return deg_; }

  private:
    struct Term {
        unsigned i, j;
        double c;
    };
    std::vector<Term> terms_;
    unsigned deg_ = 0;
};

struct DField {
    DPoly p, q;
    unsigned deg = 0;

    DField() = default;
    explicit DField(const VectorField &f)
        : p(f.p), q(f.q), deg(static_cast<unsigned>(std::max({f.p.degree(), f.q.degree(), 0}))) {}

    std::array<double, 2> operator()(double a, double b) const {
        std::vector<double> ap(deg + 1, 1.0), bp(deg + 1, 1.0);
        for (unsigned k = 1; k <= deg; ++k) {
            ap[k] = ap[k - 1] * a;
            bp[k] = bp[k - 1] * b;
        }
        return {p.eval(ap, bp), q.eval(ap, bp)};
    }
};

} // namespace detail

/// Known equilibria handed over from the exact modules, in double precision.
struct EquilibriumAtlas {
    std::vector<std::array<double, 2>> finite;
    std::vector<double> u1; // equator points (u, 0) of U1 (both sides)
    std::vector<double> u2;
};

inline EquilibriumAtlas equilibrium_atlas(const VectorField &f) {
    EquilibriumAtlas out;
    try {
        for (const auto &r : finite_equilibria(f)) out.finite.push_back(r.point.approx());
    } catch (const PositiveDimensionalError &) {
    }
    if (f.degree() >= 1) {
        for (auto [chart, dst] : {std::pair{Chart::U1, &out.u1}, std::pair{Chart::U2, &out.u2}}) {
            auto inf = infinite_equilibria(to_chart(f, chart));
            for (const auto &r : inf.points) dst->push_back(r.point.approx()[0]);
        }
    }
    return out;
}

/// Adaptive Dormand-Prince 5(4) integration of a polynomial field on the
/// Poincare disc, switching to the U1/U2 charts far from the origin.
class OrbitIntegrator {
  public:
    explicit OrbitIntegrator(const VectorField &f, IntegrationOptions opts = {})
        : OrbitIntegrator(f, equilibrium_atlas(f), opts) {}

    OrbitIntegrator(const VectorField &f, EquilibriumAtlas atlas, IntegrationOptions opts)
        : field_(f), atlas_(std::move(atlas)), opts_(opts), plane_(f) {
        degree_ = f.degree();
        if (degree_ >= 1) {
            u1_ = detail::DField(to_chart(f, Chart::U1).field);
            u2_ = detail::DField(to_chart(f, Chart::U2).field);
        }
        x_axis_invariant_ = f.q.subs_y(Rat(0)).is_zero();
        y_axis_invariant_ = f.p.subs_x(Rat(0)).is_zero();
    }

    const IntegrationOptions &options() const { return opts_; }
    const EquilibriumAtlas &atlas() const { return atlas_; }

    Trajectory integrate(const Seed &seed) const {
        Trajectory tr;
        tr.seed = seed.id;
        tr.role = seed.role;
        tr.direction = seed.direction;
        ChartPoint p = seed.start;
        Lock lock = axis_lock(p);
        if (lock != Lock::none) tr.role = seed.role == Role::generic ? Role::axis : seed.role;
        const bool started_on_rim = p.frame != Frame::plane && p.b == 0;
        double t = 0, h = 1e-3;
        auto store = [&](bool force) {
            auto d = disc_of(p);
            if (!force && !tr.points.empty()) {
                auto &last = tr.points.back();
                if (std::hypot(d[0] - last[0], d[1] - last[1]) < opts_.store_spacing) return;
            }
            tr.points.push_back(d);
            tr.times.push_back(t);
        };
        store(true);
        tr.reason = Termination::reached_tmax;
        for (std::size_t step = 0; step < opts_.max_steps; ++step) {
            rechart(p);
            if (converged(p)) {
                tr.reason = Termination::converged;
                break;
            }
            if (!started_on_rim && p.frame != Frame::plane && std::abs(p.b) < 1e-12) {
                tr.reason = Termination::reached_boundary;
                break;
            }
            if (opts_.tmax - t <= opts_.min_step) break;
            auto speed = velocity(p);
            double norm = std::hypot(speed[0], speed[1]);
            double hmax = std::min(10.0, 0.1 * (1 + std::abs(p.a) + std::abs(p.b)) / std::max(norm, 1e-300));
            h = std::min({h, hmax, opts_.tmax - t});
            bool accepted = false;
            while (!accepted) {
                if (h < opts_.min_step) {
                    tr.reason = Termination::step_underflow;
                    break;
                }
                auto [next, err] = dp_step(p, h, seed.direction, lock);
                double factor = err == 0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
                if (err <= 1) {
                    accepted = true;
                    p = next;
                    t += h;
                }
                h *= factor;
            }
            if (!accepted) break;
            store(false);
        }
        store(true);
        if (tr.points.size() >= 2 && tr.points.back() == tr.points[tr.points.size() - 2] &&
            tr.times.back() == tr.times[tr.times.size() - 2]) {
            tr.points.pop_back();
            tr.times.pop_back();
        }
        tr.end = p;
        if (auto q = plane_of(p)) tr.plane_end = q;
        return tr;
    }

    /// Integrates from a plane point.
    Trajectory integrate_from(double x, double y, int direction, Role role = Role::generic, std::size_t id = 0) const {
        return integrate(Seed{id, role, direction, ChartPoint{Frame::plane, x, y, 1}});
    }

  private:
    enum class Lock { none, x_axis, y_axis };

    Lock axis_lock(const ChartPoint &p) const {
        if (p.frame == Frame::plane) {
            if (p.b == 0 && x_axis_invariant_) return Lock::x_axis;
            if (p.a == 0 && y_axis_invariant_) return Lock::y_axis;
        }
        if (p.frame == Frame::u1 && p.a == 0 && x_axis_invariant_) return Lock::x_axis;
        if (p.frame == Frame::u2 && p.a == 0 && y_axis_invariant_) return Lock::y_axis;
        return Lock::none;
    }

    static std::optional<std::array<double, 2>> plane_of(const ChartPoint &p) {
        switch (p.frame) {
        case Frame::plane: return std::array<double, 2>{p.a, p.b};
        case Frame::u1:
            if (p.b == 0) return std::nullopt;
            return std::array<double, 2>{1 / p.b, p.a / p.b};
        case Frame::u2:
            if (p.b == 0) return std::nullopt;
            return std::array<double, 2>{p.a / p.b, 1 / p.b};
        }
        return std::nullopt;
    }

    std::array<double, 2> velocity(const ChartPoint &p) const {
        if (p.frame == Frame::plane) return plane_(p.a, p.b);
        auto v = p.frame == Frame::u1 ? u1_(p.a, p.b) : u2_(p.a, p.b);
        if (p.side < 0 && degree_ % 2 == 0) return {-v[0], -v[1]};
        return v;
    }

    void rechart(ChartPoint &p) const {
        const double hi = opts_.switch_threshold, lo = hi / opts_.hysteresis;
        if (p.frame == Frame::plane) {
            if (degree_ < 1 || std::abs(p.a) + std::abs(p.b) <= hi) return;
            if (std::abs(p.a) >= std::abs(p.b)) p = {Frame::u1, p.b / p.a, 1 / p.a, p.a > 0 ? 1 : -1};
            else p = {Frame::u2, p.a / p.b, 1 / p.b, p.b > 0 ? 1 : -1};
            return;
        }
        if (p.b != 0) {
            auto q = *plane_of(p);
            if (std::abs(q[0]) + std::abs(q[1]) < lo) {
                p = {Frame::plane, q[0], q[1], 1};
                return;
            }
        }
        if (std::abs(p.a) > opts_.hysteresis) {
            // (u, v) -> (1/u, v/u); the side follows the sign of the new leading coordinate.
            int side = p.side * (p.a > 0 ? 1 : -1);
            p = {p.frame == Frame::u1 ? Frame::u2 : Frame::u1, 1 / p.a, p.b / p.a, side};
            if (p.b != 0) p.side = p.b > 0 ? 1 : -1;
        }
    }

    bool converged(const ChartPoint &p) const {
        auto v = velocity(p);
        double speed = std::hypot(v[0], v[1]);
        if (speed == 0) return true;
        if (speed >= opts_.converge_speed) return false;
        if (p.frame == Frame::plane) {
            for (const auto &e : atlas_.finite)
                if (std::hypot(p.a - e[0], p.b - e[1]) < opts_.converge_distance) return true;
            return false;
        }
        for (double u : p.frame == Frame::u1 ? atlas_.u1 : atlas_.u2)
            if (std::hypot(p.a - u, p.b) < opts_.converge_distance) return true;
        if (auto q = plane_of(p)) {
            auto w = plane_(q->at(0), q->at(1));
            if (std::hypot(w[0], w[1]) < opts_.converge_speed)
                for (const auto &e : atlas_.finite)
                    if (std::hypot(q->at(0) - e[0], q->at(1) - e[1]) < opts_.converge_distance) return true;
        }
        return false;
    }

    std::pair<ChartPoint, double> dp_step(const ChartPoint &p, double h, int dir, Lock lock) const {
        static constexpr double a21 = 1.0 / 5;
        static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
        static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
        static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
        static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                                a65 = -5103.0 / 18656;
        static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
        static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                                e6 = 22.0 / 525, e7 = -1.0 / 40;
        auto f = [&](double a, double b) {
            ChartPoint q = p;
            q.a = a;
            q.b = b;
            auto v = velocity(q);
            v[0] *= dir;
            v[1] *= dir;
            if (lock == Lock::x_axis) v[p.frame == Frame::plane ? 1 : 0] = 0;
            if (lock == Lock::y_axis) v[0] = 0;
            return v;
        };
        const double a = p.a, b = p.b;
        auto k1 = f(a, b);
        auto k2 = f(a + h * a21 * k1[0], b + h * a21 * k1[1]);
        auto k3 = f(a + h * (a31 * k1[0] + a32 * k2[0]), b + h * (a31 * k1[1] + a32 * k2[1]));
        auto k4 = f(a + h * (a41 * k1[0] + a42 * k2[0] + a43 * k3[0]), b + h * (a41 * k1[1] + a42 * k2[1] + a43 * k3[1]));
        auto k5 = f(a + h * (a51 * k1[0] + a52 * k2[0] + a53 * k3[0] + a54 * k4[0]),
                    b + h * (a51 * k1[1] + a52 * k2[1] + a53 * k3[1] + a54 * k4[1]));
        auto k6 = f(a + h * (a61 * k1[0] + a62 * k2[0] + a63 * k3[0] + a64 * k4[0] + a65 * k5[0]),
                    b + h * (a61 * k1[1] + a62 * k2[1] + a63 * k3[1] + a64 * k4[1] + a65 * k5[1]));
        ChartPoint n = p;
        n.a = a + h * (b1 * k1[0] + b3 * k3[0] + b4 * k4[0] + b5 * k5[0] + b6 * k6[0]);
        n.b = b + h * (b1 * k1[1] + b3 * k3[1] + b4 * k4[1] + b5 * k5[1] + b6 * k6[1]);
        auto k7 = f(n.a, n.b);
        double err = 0;
        for (int i = 0; i < 2; ++i) {
            double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            double y0 = i == 0 ? a : b, y1 = i == 0 ? n.a : n.b;
            double sc = opts_.atol + opts_.rtol * std::max(std::abs(y0), std::abs(y1));
            err = std::max(err, std::abs(e) / sc);
        }
        if (!std::isfinite(err) || !std::isfinite(n.a) || !std::isfinite(n.b)) err = 1e10;
        return {n, err};
    }

    VectorField field_;
    EquilibriumAtlas atlas_;
    IntegrationOptions opts_;
    detail::DField plane_, u1_, u2_;
    int degree_ = 0;
    bool x_axis_invariant_ = false;
    bool y_axis_invariant_ = false;
};

/// Single-orbit convenience wrapper.
inline Trajectory integrate_orbit(const VectorField &f, double x, double y, int direction,
                                  const IntegrationOptions &opts = {}) {
    return OrbitIntegrator(f, opts).integrate_from(x, y, direction);
}

namespace detail {

inline double disc_scale(const ChartPoint &p, std::array<double, 2> dir) {
    const double probe = 1e-6;
    ChartPoint q = p;
    q.a += probe * dir[0];
    q.b += probe * dir[1];
    auto d0 = disc_of(p), d1 = disc_of(q);
    double s = std::hypot(d1[0] - d0[0], d1[1] - d0[1]) / probe;
    return s > 0 ? s : 1;
}

inline std::array<double, 2> unit(std::array<double, 2> v) {
    double n = std::hypot(v[0], v[1]);
    return {v[0] / n, v[1] / n};
}

inline std::array<double, 2> eigenvector(const std::array<std::array<double, 2>, 2> &j, double lambda) {
    std::array<double, 2> a{j[0][1], lambda - j[0][0]}, b{lambda - j[1][1], j[1][0]};
    return unit(std::hypot(a[0], a[1]) >= std::hypot(b[0], b[1]) ? a : b);
}

inline void seeds_for_record(const EquilibriumRecord &r, ChartPoint base, double eps, bool interior_only,
                             std::vector<Seed> &out) {
    auto push = [&](std::array<double, 2> dir, double sign, int direction) {
        double delta = eps / disc_scale(base, dir);
        ChartPoint s = base;
        s.a += sign * delta * dir[0];
        s.b += sign * delta * dir[1];
        if (interior_only && s.b * base.side <= 0) return;
        out.push_back(Seed{out.size(), Role::separatrix, direction, s});
    };
    if (r.classification == Classification::saddle) {
        const auto &j = r.jacobian.approx;
        double lo = std::min(r.eigen.re[0], r.eigen.re[1]), hi = std::max(r.eigen.re[0], r.eigen.re[1]);
        auto stable = eigenvector(j, lo), unstable = eigenvector(j, hi);
        for (double s : {1.0, -1.0}) push(unstable, s, 1);
        for (double s : {1.0, -1.0}) push(stable, s, -1);
        return;
    }
    if (r.classification == Classification::saddle_node && r.reduction) {
        const auto &red = *r.reduction;
        std::array<double, 2> center = unit({red.center_dir[0].get_d(), red.center_dir[1].get_d()});
        std::array<double, 2> strong = unit({red.strong_dir[0].get_d(), red.strong_dir[1].get_d()});
        int strong_dir = red.lambda < 0 ? -1 : 1;
        for (double s : {1.0, -1.0}) push(strong, s, strong_dir);
        push(center, red.separatrix_side, red.lambda < 0 ? 1 : -1);
    }
}

} // namespace detail

/// Separatrix seeds: four per saddle (unstable directions forward, stable
/// backward), and for a saddle-node both strong directions plus the one-sided
/// center separatrix. Infinite saddles contribute only their branches into the
/// disc. Seed ids are assigned in order.
inline std::vector<Seed> separatrix_seeds(const std::vector<EquilibriumRecord> &finite,
                                          const std::vector<InfiniteEquilibria> &infinite = {}, double eps = 1e-3) {
    std::vector<Seed> out;
    for (const auto &r : finite) {
        auto a = r.point.approx();
        detail::seeds_for_record(r, ChartPoint{Frame::plane, a[0], a[1], 1}, eps, false, out);
    }
    for (const auto &inf : infinite) {
        Frame frame = inf.chart == Chart::U1 || inf.chart == Chart::V1 ? Frame::u1 : Frame::u2;
        int side = inf.chart == Chart::V1 || inf.chart == Chart::V2 ? -1 : 1;
        for (const auto &r : inf.points) {
            ChartPoint base{frame, r.point.approx()[0], 0, side};
            detail::seeds_for_record(r, base, eps, true, out);
        }
    }
    for (std::size_t i = 0; i < out.size(); ++i) out[i].id = i;
    return out;
}

struct EquilibriumMarker {
    std::string label;
    std::string chart; // "plane", or the chart of a point at infinity
    std::string coordinates;
    std::array<double, 2> disc{};
    bool at_infinity = false;
    Classification classification = Classification::undetermined;
    std::string description;
    std::string eigenvalues;
    std::optional<SectorDecomposition> sectors;
};

struct PortraitOptions {
    bool quadrant_only = false;
    unsigned grid = 8;
    double separatrix_eps = 1e-3;
    IntegrationOptions integration;
    unsigned threads = 0; // 0: hardware concurrency
};

struct PortraitDoc {
    std::string system;
    std::map<std::string, Rat> params;
    std::optional<Rat> regime; // 1 - AC for the Leslie-Gower family
    std::optional<int> regime_sign;
    bool quadrant_only = false;
    std::vector<EquilibriumMarker> equilibria;
    std::vector<Trajectory> trajectories;
    std::optional<int> canonical_regions; // not certified by the renderer
    std::vector<std::string> notes;

    bool has_marker(const std::string &label) const {
        return std::any_of(equilibria.begin(), equilibria.end(), [&](const EquilibriumMarker &m) { return m.label == label; });
    }
};

/// Leslie-Gower bindings when the system is that family.
inline std::optional<ParamBindings> leslie_bindings_of(const PlanarSystem &s) {
    auto a = s.param("A"), b = s.param("B"), c = s.param("C");
    if (!a || !b || !c) return std::nullopt;
    ParamBindings pb{*a, *b, *c};
    if (leslie_system(pb).field != s.field) return std::nullopt;
    return pb;
}

namespace detail {

inline std::vector<Trajectory> run_parallel(const OrbitIntegrator &integ, const std::vector<Seed> &seeds, unsigned threads) {
    std::vector<Trajectory> out(seeds.size());
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(seeds.size(), 1)));
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < seeds.size(); i = next++) out[i] = integ.integrate(seeds[i]);
    };
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(work);
    work();
    for (auto &t : pool) t.join();
    return out;
}

inline std::array<double, 2> chart_disc(Chart c, double u) {
    switch (c) {
    case Chart::U1: return infinity_on_disc(1, u);
    case Chart::V1: return infinity_on_disc(-1, -u);
    case Chart::U2: return infinity_on_disc(u, 1);
    case Chart::V2: return infinity_on_disc(-u, -1);
    default: return {0, 0};
    }
}

} // namespace detail

/// Equilibria, sectors and trajectories of a system on the Poincare disc.
inline PortraitDoc build_portrait(const PlanarSystem &sys, const PortraitOptions &opts = {}) {
    const VectorField &f = sys.field;
    PortraitDoc doc;
    doc.system = serialize(sys);
    doc.params = sys.params;
    doc.quadrant_only = opts.quadrant_only;
    auto leslie = leslie_bindings_of(sys);
    if (leslie) {
        doc.regime = regime(*leslie);
        doc.regime_sign = sgn(*doc.regime);
    }

    std::vector<EquilibriumRecord> finite;
    try {
        finite = finite_equilibria(f, opts.quadrant_only);
    } catch (const PositiveDimensionalError &e) {
        doc.notes.push_back(e.what());
    }
    if (leslie) label_leslie(finite, *leslie);
    for (auto &r : finite) {
        EquilibriumMarker m;
        m.label = r.label;
        m.chart = "plane";
        m.coordinates = "(" + r.point.x.to_string() + ", " + r.point.y.to_string() + ")";
        auto a = r.point.approx();
        m.disc = to_disc(a[0], a[1]);
        m.classification = r.classification;
        m.description = r.describe();
        m.eigenvalues = r.eigen.text;
        if (r.classification == Classification::degenerate_needs_blowup) {
            auto shifted = f;
            if (r.point.is_rational()) {
                MPoly xs = MPoly::x() + MPoly(r.point.x.exact()), ys = MPoly::y() + MPoly(r.point.y.exact());
                shifted = {f.p.compose(xs, ys), f.q.compose(xs, ys)};
                m.sectors = blowup_tree(shifted).sectors;
            }
        } else {
            m.sectors = sector_synthesis(r);
        }
        doc.equilibria.push_back(std::move(m));
    }

    std::vector<InfiniteEquilibria> infinite;
    if (f.degree() >= 1) {
        std::vector<Chart> charts{Chart::U1, Chart::U2};
        if (!opts.quadrant_only) charts = {Chart::U1, Chart::V1, Chart::U2, Chart::V2};
        for (Chart c : charts) {
            ChartSystem cs = to_chart(f, c);
            InfiniteEquilibria inf = infinite_equilibria(cs, opts.quadrant_only);
            if (inf.line_of_equilibria) doc.notes.push_back("the equator of " + to_string(c) + " consists of equilibria");
            // U2 and V2 only contribute the poles; the rest is seen from U1 and V1.
            if (c == Chart::U2 || c == Chart::V2)
                std::erase_if(inf.points, [](const EquilibriumRecord &r) { return !(r.point.x.is_exact() && r.point.x.exact() == 0); });
            for (auto &r : inf.points) {
                EquilibriumMarker m;
                m.label = to_string(c) + " u=" + r.point.x.to_string();
                m.chart = to_string(c);
                m.coordinates = "(" + r.point.x.to_string() + ", 0)";
                m.at_infinity = true;
                double u = r.point.approx()[0];
                m.disc = detail::chart_disc(c, u);
                m.classification = r.classification;
                m.description = r.describe();
                m.eigenvalues = r.eigen.text;
                if (r.classification == Classification::degenerate_needs_blowup && r.point.is_rational() &&
                    r.point.x.exact() == 0)
                    m.sectors = blowup_tree(cs.field).sectors;
                else if (r.classification != Classification::degenerate_needs_blowup)
                    m.sectors = sector_synthesis(r);
                doc.equilibria.push_back(std::move(m));
            }
            infinite.push_back(std::move(inf));
        }
    }
    if (doc.regime_sign && (*doc.regime_sign > 0) != doc.has_marker("Estar"))
        throw InvariantViolation("interior equilibrium marker disagrees with the sign of 1 - AC");

    // Seeds: separatrices first, then the grid, then the invariant axes.
    std::vector<Seed> seeds = separatrix_seeds(finite, infinite, opts.separatrix_eps);
    auto add = [&](double x, double y, Role role) {
        for (int dir : {1, -1}) seeds.push_back(Seed{seeds.size(), role, dir, ChartPoint{Frame::plane, x, y, 1}});
    };
    const unsigned g = opts.grid;
    for (unsigned i = 1; i <= g; ++i) {
        for (unsigned j = 1; j <= g; ++j) {
            double r = static_cast<double>(i) / (g + 1);
            if (opts.quadrant_only) {
                double th = (std::numbers::pi / 2) * static_cast<double>(j) / (g + 1);
                auto p = from_disc(r * std::cos(th), r * std::sin(th));
                add(p[0], p[1], Role::generic);
            } else {
                double th = 2 * std::numbers::pi * (static_cast<double>(j) - 0.5) / g;
                auto p = from_disc(r * std::cos(th), r * std::sin(th));
                add(p[0], p[1], Role::generic);
            }
        }
    }
    bool x_inv = f.q.subs_y(Rat(0)).is_zero(), y_inv = f.p.subs_x(Rat(0)).is_zero();
    for (double r : {0.2, 0.5, 0.8}) {
        double v = from_disc(r, 0)[0];
        if (x_inv) {
            add(v, 0, Role::axis);
            if (!opts.quadrant_only) add(-v, 0, Role::axis);
        }
        if (y_inv) {
            add(0, v, Role::axis);
            if (!opts.quadrant_only) add(0, -v, Role::axis);
        }
    }
    OrbitIntegrator integ(f, opts.integration);
    doc.trajectories = detail::run_parallel(integ, seeds, opts.threads);
    doc.notes.push_back("separatrix connections and the number of canonical regions are drawn, not certified");
    return doc;
}

namespace detail {

inline std::string color_of(Classification c) {
    switch (c) {
    case Classification::stable_node: return "#1f77b4";
    case Classification::unstable_node: return "#d62728";
    case Classification::saddle: return "#2ca02c";
    case Classification::stable_focus: return "#17becf";
    case Classification::unstable_focus: return "#ff7f0e";
    case Classification::center_candidate: return "#9467bd";
    case Classification::saddle_node: return "#8c564b";
    case Classification::degenerate_needs_blowup: return "#e377c2";
    case Classification::undetermined: return "#7f7f7f";
    }
    return "#7f7f7f";
}

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    std::string s = buf;
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
    if (s == "-0") s = "0";
    return s;
}

inline std::string xml_escape(const std::string &s) {
    std::string out;
    for (char ch : s) {
        switch (ch) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += ch;
        }
    }
    return out;
}

} // namespace detail

struct RenderStyle {
    bool clip_quadrant = false;
    double size = 800;
    double radius = 380;
};

inline std::string render_svg(const PortraitDoc &doc, const RenderStyle &style = {}) {
    const double c = style.size / 2, r = style.radius;
    auto px = [&](const std::array<double, 2> &d) { return std::array<double, 2>{c + r * d[0], c - r * d[1]}; };
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << detail::fmt(style.size) << "\" height=\""
       << detail::fmt(style.size) << "\" viewBox=\"0 0 " << detail::fmt(style.size) << " " << detail::fmt(style.size)
       << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    bool clip = style.clip_quadrant || doc.quadrant_only;
    if (clip) {
        os << "<clipPath id=\"quadrant\"><rect x=\"" << detail::fmt(c - 2) << "\" y=\"" << detail::fmt(c - r - 2)
           << "\" width=\"" << detail::fmt(r + 4) << "\" height=\"" << detail::fmt(r + 4) << "\"/></clipPath>\n";
    }
    os << "<circle cx=\"" << detail::fmt(c) << "\" cy=\"" << detail::fmt(c) << "\" r=\"" << detail::fmt(r)
       << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
    os << "<g id=\"trajectories\" fill=\"none\"" << (clip ? " clip-path=\"url(#quadrant)\"" : "") << ">\n";
    for (const auto &t : doc.trajectories) {
        if (t.points.size() < 2) continue;
        const char *stroke = t.role == Role::separatrix ? "#000000" : t.role == Role::axis ? "#555555" : "#999999";
        const char *width = t.role == Role::separatrix ? "1.4" : t.role == Role::axis ? "1" : "0.6";
        os << "<polyline data-seed=\"" << t.seed << "\" data-role=\"" << to_string(t.role) << "\" stroke=\"" << stroke
           << "\" stroke-width=\"" << width << "\" points=\"";
        for (std::size_t i = 0; i < t.points.size(); ++i) {
            auto p = px(t.points[i]);
            os << (i ? " " : "") << detail::fmt(p[0]) << "," << detail::fmt(p[1]);
        }
        os << "\"/>\n";
    }
    os << "</g>\n<g id=\"equilibria\">\n";
    for (const auto &m : doc.equilibria) {
        auto p = px(m.disc);
        std::string color = detail::color_of(m.classification);
        std::string title = (m.label.empty() ? m.coordinates : m.label) + ": " + m.description;
        if (m.classification == Classification::saddle) {
            os << "<rect x=\"" << detail::fmt(p[0] - 5) << "\" y=\"" << detail::fmt(p[1] - 5)
               << "\" width=\"10\" height=\"10\" fill=\"" << color << "\">";
        } else if (m.classification == Classification::saddle_node ||
                   m.classification == Classification::degenerate_needs_blowup ||
                   m.classification == Classification::undetermined) {
            os << "<polygon points=\"" << detail::fmt(p[0]) << "," << detail::fmt(p[1] - 7) << " " << detail::fmt(p[0] + 7)
               << "," << detail::fmt(p[1]) << " " << detail::fmt(p[0]) << "," << detail::fmt(p[1] + 7) << " "
               << detail::fmt(p[0] - 7) << "," << detail::fmt(p[1]) << "\" fill=\"" << color << "\">";
        } else {
            os << "<circle cx=\"" << detail::fmt(p[0]) << "\" cy=\"" << detail::fmt(p[1]) << "\" r=\"6\" fill=\"" << color
               << "\">";
        }
        os << "<title>" << detail::xml_escape(title) << "</title>";
        os << (m.classification == Classification::saddle ? "</rect>\n"
               : (m.classification == Classification::saddle_node ||
                  m.classification == Classification::degenerate_needs_blowup ||
                  m.classification == Classification::undetermined)
                   ? "</polygon>\n"
                   : "</circle>\n");
    }
    os << "</g>\n</svg>\n";
    return os.str();
}

inline nlohmann::ordered_json portrait_json(const PortraitDoc &doc) {
    using json = nlohmann::ordered_json;
    json j;
    j["system"] = doc.system;
    json params = json::object();
    for (const auto &[k, v] : doc.params) params[k] = v.get_str();
    j["params"] = params;
    if (doc.regime) j["regime"] = {{"value", "1-AC = " + doc.regime->get_str()}, {"sign", *doc.regime_sign}};
    else j["regime"] = nullptr;
    j["quadrant_only"] = doc.quadrant_only;
    json eqs = json::array();
    for (const auto &m : doc.equilibria) {
        json e;
        e["label"] = m.label;
        e["chart"] = m.chart;
        e["coordinates"] = m.coordinates;
        e["disc"] = {m.disc[0], m.disc[1]};
        e["at_infinity"] = m.at_infinity;
        e["classification"] = to_string(m.classification);
        e["description"] = m.description;
        e["eigenvalues"] = m.eigenvalues;
        if (m.sectors)
            e["sectors"] = {{"hyperbolic", m.sectors->hyperbolic},
                            {"parabolic", m.sectors->parabolic},
                            {"elliptic", m.sectors->elliptic},
                            {"resolved", m.sectors->resolved}};
        eqs.push_back(e);
    }
    j["equilibria"] = eqs;
    json trs = json::array();
    for (const auto &t : doc.trajectories) {
        json pts = json::array();
        for (const auto &p : t.points) pts.push_back({p[0], p[1]});
        trs.push_back({{"seed", t.seed},
                       {"role", to_string(t.role)},
                       {"direction", t.direction > 0 ? "forward" : "backward"},
                       {"points", pts},
                       {"reason", to_string(t.reason)}});
    }
    j["trajectories"] = trs;
    j["canonical_regions"] = doc.canonical_regions ? json(*doc.canonical_regions) : json(nullptr);
    j["notes"] = doc.notes;
    return j;
}

inline std::string render_json(const PortraitDoc &doc) { return portrait_json(doc).dump(2) + "\n"; }

} // namespace pdisc
