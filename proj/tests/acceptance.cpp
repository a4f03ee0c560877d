#include <pdisc/pdisc.hpp>

#include "paper_oracles.hpp"
#include "support.hpp"

#include <functional>
#include <iostream>
#include <set>
#include <sstream>

using namespace pdisc;
using pdisc::testing::leslie_display;

namespace {

const MPoly X = MPoly::x();
const MPoly Y = MPoly::y();

class Check {
  public:
    void expect(bool ok, const std::string &what) {
        if (!ok && failures_.size() < 5) failures_.push_back(what);
        ok_ = ok_ && ok;
    }
    bool ok() const { return ok_; }
    std::string detail() const {
        std::string out;
        for (const auto &f : failures_) out += (out.empty() ? "" : "; ") + f;
        return out;
    }

  private:
    bool ok_ = true;
    std::vector<std::string> failures_;
};

std::string str(const ParamBindings &b) {
    return "(" + b.A.get_str() + ", " + b.B.get_str() + ", " + b.C.get_str() + ")";
}

ParamBindings paper_triple() { return {Rat(1), Rat(2), make_rat(1, 2)}; }

std::multiset<Rat> exact_eigs(const EquilibriumRecord &r) {
    if (!r.eigen.exact[0] || !r.eigen.exact[1]) return {};
    return {*r.eigen.exact[0], *r.eigen.exact[1]};
}

const EquilibriumRecord *find_at(const std::vector<EquilibriumRecord> &recs, const Rat &x, const Rat &y) {
    for (const auto &r : recs)
        if (r.point.is_rational() && r.point.x.exact() == x && r.point.y.exact() == y) return &r;
    return nullptr;
}

double disc_distance(const std::array<double, 2> &a, const std::array<double, 2> &b) {
    auto p = to_disc(a[0], a[1]), q = to_disc(b[0], b[1]);
    return std::hypot(p[0] - q[0], p[1] - q[1]);
}

void cofactors(Check &c) {
    for (const auto &b : seeded_parameter_sample()) {
        VectorField f = leslie_system(b).field;
        MPoly A(b.A), B(b.B), C(b.C), one(1);
        MPoly k1 = -((C + X) * (-one + X + A * Y)), k2 = -(X * (-one + X + A * Y)), k3 = B * (C + X - Y);
        auto c1 = verify_invariant_curve(f, X), c2 = verify_invariant_curve(f, X + C), c3 = verify_invariant_curve(f, Y);
        c.expect(c1 && c1->cofactor == k1, "K1 at " + str(b));
        c.expect(c2 && c2->cofactor == k2, "K2 at " + str(b));
        c.expect(c3 && c3->cofactor == k3, "K3 at " + str(b));
    }
}

void extactic_curve(Check &c) {
    ParamBindings b = paper_triple();
    VectorField f = leslie_system(b).field;
    std::vector<InvariantCurve> curves;
    for (const MPoly &g : {X, X + MPoly(b.C), Y}) curves.push_back(*verify_invariant_curve(f, g));
    ExtacticResult e = extactic(f, 1, curves);
    MPoly display = leslie_display(pdisc::testing::kLeslieE1, b);
    c.expect(!display.is_zero() && !e.e.is_zero(), "E1 vanishes");
    if (display.is_zero() || e.e.is_zero()) return;
    Rat ratio = e.e.leading_term().second / display.leading_term().second;
    c.expect(e.e == display * ratio, "E1 differs from the display by more than a constant");
    for (std::size_t i = 0; i < curves.size(); ++i)
        c.expect(e.multiplicities[i] && *e.multiplicities[i] == 1, "multiplicity of " + curves[i].f.to_string());
}

void exponential_factors(Check &c) {
    for (const auto &b : seeded_parameter_sample()) {
        VectorField f = leslie_system(b).field;
        auto curves = find_invariant_lines(f).lines;
        auto exps = find_exponential_factors(f, curves, 2);
        c.expect(exps.size() == 1, "factor count at " + str(b));
        if (exps.size() != 1) continue;
        const ExpFactor &e = exps[0];
        c.expect(e.f == MPoly(1) && e.g == Y, "g = y at " + str(b));
        c.expect(e.cofactor == MPoly(b.B) * Y * (MPoly(b.C) + X - Y), "L = B y (C + x - y) at " + str(b));
        for (auto [i, j] : {std::pair{2u, 0u}, std::pair{1u, 1u}, std::pair{0u, 2u}})
            c.expect(e.g.coeff(i, j) == 0, "a" + std::to_string(i) + std::to_string(j) + " at " + str(b));
        // a y with any rational a: X(a y) = a L.
        Rat a = make_rat(-7, 3);
        c.expect(f.lie(Y * a) == e.cofactor * a, "scaled factor at " + str(b));
    }
}

void theorem1(Check &c) {
    for (const auto &b : seeded_parameter_sample()) {
        IntegrabilityVerdict v = liouville_verdict(leslie_system(b));
        c.expect(v.verdict == Verdict::NotLiouvillianWithinBounds, "verdict at " + str(b) + ": " + to_string(v.verdict));
        c.expect(v.nullity == v.degenerate_solutions, "nontrivial nullspace at " + str(b));
        c.expect(v.rank_m < v.rank_augmented, "integrating-factor system consistent at " + str(b));
    }
}

void divergence_display(Check &c) {
    for (const auto &b : seeded_parameter_sample())
        c.expect(divergence(leslie_system(b)) == leslie_display(pdisc::testing::kLeslieDivergence, b),
                 "div at " + str(b));
}

void finite_equilibria_check(Check &c) {
    std::vector<ParamBindings> sample = seeded_parameter_sample();
    sample.push_back(paper_triple());
    for (const auto &b : sample) {
        Rat A = b.A, B = b.B, C = b.C;
        auto recs = finite_equilibria(leslie_system(b), true);
        const auto *e0 = find_at(recs, Rat(0), Rat(0));
        const auto *e2 = find_at(recs, Rat(1), Rat(0));
        const auto *e1 = find_at(recs, Rat(0), C);
        c.expect(e0 && e0->jacobian.exact && *e0->jacobian.exact == Mat2{{{C, Rat(0)}, {Rat(0), Rat(B * C)}}},
                 "J(0,0) at " + str(b));
        c.expect(e2 && exact_eigs(*e2) == std::multiset<Rat>{Rat(-1 - C), Rat(B * (1 + C))}, "J(1,0) at " + str(b));
        c.expect(e1 && exact_eigs(*e1) == std::multiset<Rat>{Rat(-B * C), Rat(C * (1 - A * C))}, "J(0,C) at " + str(b));
        label_leslie(recs, b);
        const EquilibriumRecord *star = nullptr;
        for (const auto &r : recs)
            if (r.label == "Estar") star = &r;
        c.expect((star != nullptr) == (regime(b) > 0), "E* existence at " + str(b));
        if (!star) continue;
        c.expect(star->det && *star->det == B * (1 + C) * (1 + C) * (1 - A * C) / ((1 + A) * (1 + A)), "det J(E*) at " + str(b));
        c.expect(star->trace && *star->trace == (1 + C) * (-1 - (1 + A) * B + A * C) / ((1 + A) * (1 + A)),
                 "trace J(E*) at " + str(b));
    }
}

void saddle_node(Check &c) {
    ParamBindings b{Rat(1), Rat(1), Rat(1)};
    auto recs = finite_equilibria(leslie_system(b), true);
    const auto *e1 = find_at(recs, Rat(0), b.C);
    c.expect(e1 != nullptr, "(0,C) missing");
    if (!e1) return;
    c.expect(e1->classification == Classification::saddle_node, "classification " + to_string(e1->classification));
    c.expect(e1->describe() == "attractor saddle-node", e1->describe());
    c.expect(e1->reduction && e1->reduction->a2 != 0, "a2 vanishes");
}

void compactification(Check &c) {
    std::vector<ParamBindings> sample = seeded_parameter_sample();
    sample.push_back(paper_triple());
    for (const auto &b : sample) {
        PlanarSystem s = leslie_system(b);
        c.expect(to_chart(s, Chart::U1).field == pdisc::testing::poincare_u1(b), "U1 system at " + str(b));
        c.expect(to_chart(s, Chart::U2).field == pdisc::testing::poincare_u2(b), "U2 system at " + str(b));
        auto u1 = infinite_equilibria(to_chart(s, Chart::U1));
        std::set<Rat> us;
        for (const auto &r : u1.points)
            if (r.point.x.is_exact()) us.insert(r.point.x.exact());
        c.expect(u1.points.size() == 2 && us == std::set<Rat>{Rat(0), Rat(-1 / b.A)}, "U1 equilibria at " + str(b));
        for (const auto &r : u1.points)
            if (r.point.x.is_exact() && r.point.x.exact() == 0)
                c.expect(r.jacobian.exact && *r.jacobian.exact == Mat2{{{Rat(1), Rat(0)}, {Rat(0), Rat(1)}}},
                         "U1 origin linear part at " + str(b));
        auto u2 = infinite_equilibria(to_chart(s, Chart::U2), true);
        bool zero = !u2.points.empty() && u2.points[0].point.x.exact() == 0 && u2.points[0].jacobian.exact &&
                    *u2.points[0].jacobian.exact == Mat2{};
        c.expect(zero, "U2 origin linear part at " + str(b));
    }
}

void blowups(Check &c) {
    std::mt19937_64 rng(17);
    for (const auto &b : seeded_parameter_sample()) {
        ChartSystem u2 = to_chart(leslie_system(b), Chart::U2);
        BlowupTree t = blowup_tree(u2.field);
        auto eig_at = [&](const BlowupSystem &bs, const Rat &coord) -> std::multiset<Rat> {
            for (const auto &r : bs.divisor_equilibria) {
                const AlgebraicNumber &a = bs.direction == BlowupDirection::x_directional ? r.point.y : r.point.x;
                if (a.is_exact() && a.exact() == coord) return exact_eigs(r);
            }
            return {};
        };
        Rat A = b.A, B = b.B, C = b.C;
        c.expect(eig_at(t.x_dir, Rat(0)) == std::multiset<Rat>{A, Rat(-A)}, "{A, -A} at " + str(b));
        c.expect(eig_at(t.x_dir, Rat(-1 / C)) == std::multiset<Rat>{Rat(-B / C), Rat(-A)}, "{-B/C, -A} at " + str(b));
        c.expect(eig_at(t.y_dir, Rat(0)) == std::multiset<Rat>{B, Rat(-A * C)}, "{B, -AC} at " + str(b));
        c.expect(eig_at(t.y_dir, Rat(-C)) == std::multiset<Rat>{B, Rat(A * C)}, "{B, AC} at " + str(b));
        c.expect(t.sectors.resolved && t.sectors.hyperbolic == 2 && t.sectors.parabolic == 2 && t.sectors.elliptic == 0,
                 "U2 origin sectors at " + str(b));
        for (const BlowupSystem *bs : {&t.x_dir, &t.y_dir}) {
            bool xdir = bs->direction == BlowupDirection::x_directional;
            for (int k = 0; k < 10; ++k) {
                Rat s = pdisc::testing::random_rat(rng), w = pdisc::testing::random_rat(rng);
                if ((xdir ? s : w) == 0) continue;
                Rat u = xdir ? s : Rat(s * w), v = xdir ? Rat(s * w) : w;
                auto down = blow_down(*bs, s, w);
                c.expect(down[0] == u2.field.p.eval(u, v) && down[1] == u2.field.q.eval(u, v), "blow-down at " + str(b));
            }
        }
    }
}

void regime_dichotomy(Check &c) {
    for (int i = 1; i <= 10; ++i) {
        for (int j = 1; j <= 10; ++j) {
            ParamBindings b{make_rat(2 * i - 1, 4), Rat(1), make_rat(2 * j - 1, 6)};
            Trajectory t = integrate_orbit(leslie_system(b).field, 0.5, 0.5, 1, {.tmax = 20000});
            std::array<double, 2> target{0, b.C.get_d()};
            if (regime(b) > 0) {
                auto p = leslie_interior_point(b);
                target = {p[0].get_d(), p[1].get_d()};
            }
            c.expect(t.plane_end && disc_distance(*t.plane_end, target) < 1e-6, "orbit limit at " + str(b));
        }
    }
    auto inventory = [&](const ParamBindings &b) {
        PortraitOptions opts;
        opts.quadrant_only = true;
        opts.grid = 4;
        PortraitDoc doc = build_portrait(leslie_system(b), opts);
        std::map<std::string, const EquilibriumMarker *> m;
        for (const auto &e : doc.equilibria) m[e.label] = &e;
        auto cls = [&](const std::string &l) { return m.count(l) ? m[l]->classification : Classification::undetermined; };
        bool star_stable = cls("Estar") == Classification::stable_node || cls("Estar") == Classification::stable_focus;
        bool u2 = m.count("U2 u=0") && m["U2 u=0"]->sectors && m["U2 u=0"]->sectors->hyperbolic == 2 &&
                  m["U2 u=0"]->sectors->parabolic == 2;
        c.expect(cls("E0") == Classification::unstable_node, "E0 at " + str(b));
        c.expect(cls("E2") == Classification::saddle, "E2 at " + str(b));
        c.expect(cls("U1 u=0") == Classification::unstable_node, "U1 origin at " + str(b));
        c.expect(u2, "U2 origin sectors at " + str(b));
        if (regime(b) > 0) {
            c.expect(cls("E1") == Classification::saddle && star_stable, "figure (b) inventory at " + str(b));
            c.expect(m.size() == 6, "figure (b) marker count at " + str(b));
        } else {
            bool e1 = cls("E1") == Classification::stable_node || cls("E1") == Classification::saddle_node;
            c.expect(e1 && !m.count("Estar"), "figure (a) inventory at " + str(b));
            c.expect(m.size() == 5, "figure (a) marker count at " + str(b));
        }
    };
    inventory({Rat(1), Rat(1), make_rat(1, 2)});
    inventory({Rat(1), Rat(1), Rat(2)});
    inventory({Rat(1), Rat(1), Rat(1)});
}

void soundness(Check &c) {
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 1000; ++i) {
        MPoly a = pdisc::testing::random_poly(rng), b = pdisc::testing::random_poly(rng),
              d = pdisc::testing::random_poly(rng);
        bool ok = (a + b) + d == a + (b + d) && a * (b + d) == a * b + a * d && a * b == b * a &&
                  (a * b).diff(Var::x) == a.diff(Var::x) * b + a * b.diff(Var::x) &&
                  (a * b).diff(Var::y) == a.diff(Var::y) * b + a * b.diff(Var::y);
        c.expect(ok, "ring axiom or product rule, case " + std::to_string(i));
    }

    std::uniform_real_distribution<double> pos(0.1, 3.0);
    PlanarSystem s = leslie_system(paper_triple());
    ChartSystem c1 = to_chart(s, Chart::U1), c2 = to_chart(s, Chart::U2);
    for (int i = 0; i < 20; ++i) {
        // U1 -> U2 is (u, v) -> (1/u, v/u); the pushed-forward field is parallel to the U2 field.
        double u = pos(rng), v = pos(rng);
        double f1u = c1.u_dot().eval(u, v), f1v = c1.v_dot().eval(u, v);
        double pu = -f1u / (u * u), pv = -v * f1u / (u * u) + f1v / u;
        double f2u = c2.u_dot().eval(1 / u, v / u), f2v = c2.v_dot().eval(1 / u, v / u);
        double scale = std::hypot(pu, pv) * std::hypot(f2u, f2v);
        c.expect(std::abs(pu * f2v - pv * f2u) <= 1e-9 * scale && pu * f2u + pv * f2v > 0, "chart overlap");
    }

    OrbitIntegrator inv(leslie_system({Rat(1), Rat(1), make_rat(1, 2)}).field, {.tmax = 50});
    std::uniform_real_distribution<double> ux(0.0, 1.0), uy(0.0, 3.0);
    for (int i = 0; i < 50; ++i) {
        Trajectory t = inv.integrate_from(ux(rng), uy(rng), 1);
        for (const auto &p : t.points) {
            auto q = from_disc(p[0], p[1]);
            c.expect(q[0] >= -1e-12 && q[0] <= 1 + 1e-9 && q[1] >= -1e-12, "orbit leaves the invariant region");
        }
    }

    OrbitIntegrator rev(s.field, {.tmax = 1});
    std::uniform_real_distribution<double> sx(0.05, 0.95), sy(0.05, 2.0);
    for (int i = 0; i < 20; ++i) {
        double x0 = sx(rng), y0 = sy(rng);
        Trajectory fwd = rev.integrate_from(x0, y0, 1);
        Trajectory bwd = rev.integrate(Seed{0, Role::generic, -1, fwd.end});
        c.expect(bwd.plane_end && disc_distance(*bwd.plane_end, {x0, y0}) < 1e-5, "reversibility");
    }
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<void(Check &)>>> criteria{
        {"cofactor reproduction", cofactors},
        {"extactic reproduction", extactic_curve},
        {"exponential factors", exponential_factors},
        {"no Liouvillian first integral within bounds", theorem1},
        {"divergence", divergence_display},
        {"finite equilibria and eigenvalues", finite_equilibria_check},
        {"saddle-node at AC = 1", saddle_node},
        {"compactification charts", compactification},
        {"blow-ups and sectors", blowups},
        {"regime dichotomy", regime_dichotomy},
        {"soundness properties", soundness},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Check c;
        try {
            criteria[i].second(c);
        } catch (const std::exception &e) {
            c.expect(false, std::string("exception: ") + e.what());
        }
        std::cout << "criterion " << i + 1 << ": " << (c.ok() ? "PASS" : "FAIL") << " - " << criteria[i].first;
        if (!c.ok()) std::cout << " [" << c.detail() << "]";
        std::cout << "\n";
        failed += !c.ok();
    }
    return failed == 0 ? 0 : 1;
}
