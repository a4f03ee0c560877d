#pragma once

#include "compactify.hpp"
#include "integrability.hpp"
#include "leslie.hpp"
#include "parser.hpp"
#include "portrait.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace pdisc {

using ojson = nlohmann::ordered_json;

namespace detail {

inline ojson params_json(const std::map<std::string, Rat> &params) {
    ojson p = ojson::object();
    for (const auto &[k, v] : params) p[k] = v.get_str();
    return p;
}

inline ojson field_json(const VectorField &f, std::string_view a, std::string_view b) {
    return {{std::string(a) + "'", f.p.to_string(a, b)}, {std::string(b) + "'", f.q.to_string(a, b)}};
}

inline ojson record_json(const EquilibriumRecord &r) {
    ojson e;
    if (!r.label.empty()) e["label"] = r.label;
    e["point"] = {r.point.x.to_string(), r.point.y.to_string()};
    e["approx"] = {r.point.approx()[0], r.point.approx()[1]};
    e["certificate"] = to_string(r.certificate);
    if (r.jacobian.exact) {
        ojson rows = ojson::array();
        for (const auto &row : *r.jacobian.exact) rows.push_back({row[0].get_str(), row[1].get_str()});
        e["jacobian"] = rows;
    } else {
        const auto &a = r.jacobian.approx;
        e["jacobian_approx"] = {{a[0][0], a[0][1]}, {a[1][0], a[1][1]}};
    }
    if (r.trace) e["trace"] = r.trace->get_str();
    if (r.det) e["det"] = r.det->get_str();
    if (r.disc) e["discriminant"] = r.disc->get_str();
    e["eigenvalues"] = r.eigen.text;
    e["classification"] = to_string(r.classification);
    e["description"] = r.describe();
    if (r.reduction) {
        e["center_reduction"] = {{"lambda", r.reduction->lambda.get_str()},
                                 {"a2", r.reduction->a2.get_str()},
                                 {"xi'", r.reduction->xi_dot.to_string("xi", "eta")},
                                 {"eta'", r.reduction->eta_dot.to_string("xi", "eta")}};
    }
    return e;
}

inline ojson sectors_json(const SectorDecomposition &s) {
    ojson o{{"hyperbolic", s.hyperbolic}, {"parabolic", s.parabolic}, {"elliptic", s.elliptic}, {"resolved", s.resolved}};
    if (!s.note.empty()) o["note"] = s.note;
    return o;
}

inline ojson blowup_json(const BlowupSystem &b) {
    bool xdir = b.direction == BlowupDirection::x_directional;
    ojson o;
    o["direction"] = to_string(b.direction);
    o["system"] = xdir ? field_json(b.field, "u", "w") : field_json(b.field, "z", "v");
    o["divided_by_power"] = b.power;
    o["dicritical"] = b.dicritical;
    ojson eqs = ojson::array();
    for (const auto &r : b.divisor_equilibria) eqs.push_back(record_json(r));
    o["divisor_equilibria"] = eqs;
    return o;
}

inline ojson curve_json(const InvariantCurve &c) {
    ojson o{{"f", c.f.to_string()}, {"cofactor", c.cofactor.to_string()}};
    o["multiplicity"] = c.multiplicity ? ojson(*c.multiplicity) : ojson(nullptr);
    return o;
}

inline void recheck(const VectorField &field, const InvariantCurve &c) {
    if (field.lie(c.f) != c.cofactor * c.f) throw InvariantViolation("X(f) != K f for f = " + c.f.to_string());
}

} // namespace detail

/// Finite equilibria, chart systems, infinite equilibria and blow-ups.
inline ojson analysis_json(const PlanarSystem &sys, bool quadrant_only = false) {
    const VectorField &f = sys.field;
    ojson j;
    j["system"] = detail::field_json(f, "x", "y");
    j["params"] = detail::params_json(sys.params);
    auto leslie = leslie_bindings_of(sys);
    if (leslie) {
        Rat r = regime(*leslie);
        j["regime"] = {{"value", "1-AC = " + r.get_str()}, {"sign", sgn(r)}};
    }
    j["quadrant_only"] = quadrant_only;
    j["divergence"] = f.divergence().to_string();

    auto finite = finite_equilibria(f, quadrant_only);
    if (leslie) {
        label_leslie(finite, *leslie);
        bool has_star = std::any_of(finite.begin(), finite.end(), [](const auto &r) { return r.label == "Estar"; });
        if (has_star != (regime(*leslie) > 0))
            throw InvariantViolation("interior equilibrium disagrees with the sign of 1 - AC");
    }
    ojson fin = ojson::array();
    for (const auto &r : finite) {
        ojson e = detail::record_json(r);
        if (r.classification == Classification::degenerate_needs_blowup && r.point.is_rational()) {
            MPoly xs = MPoly::x() + MPoly(r.point.x.exact()), ys = MPoly::y() + MPoly(r.point.y.exact());
            BlowupTree t = blowup_tree(VectorField{f.p.compose(xs, ys), f.q.compose(xs, ys)});
            e["blowups"] = {detail::blowup_json(t.x_dir), detail::blowup_json(t.y_dir)};
            e["sectors"] = detail::sectors_json(t.sectors);
        }
        fin.push_back(e);
    }
    j["finite_equilibria"] = fin;

    ojson lines = ojson::array();
    LineSearch ls = find_invariant_lines(f);
    for (const auto &c : ls.lines) {
        detail::recheck(f, c);
        lines.push_back(detail::curve_json(c));
    }
    j["invariant_lines"] = lines;
    if (!ls.families.empty()) j["line_families"] = ls.families;

    ojson charts = ojson::array();
    std::vector<Chart> list{Chart::U1, Chart::U2};
    if (!quadrant_only) list = {Chart::U1, Chart::V1, Chart::U2, Chart::V2};
    for (Chart c : list) {
        ChartSystem cs = to_chart(f, c);
        InfiniteEquilibria inf = infinite_equilibria(cs, quadrant_only);
        ojson o;
        o["chart"] = to_string(c);
        o["system"] = detail::field_json(cs.field, "u", "v");
        o["line_of_equilibria"] = inf.line_of_equilibria;
        ojson pts = ojson::array();
        for (const auto &r : inf.points) {
            ojson e = detail::record_json(r);
            e.erase("label");
            if (r.classification == Classification::degenerate_needs_blowup && r.point.is_rational() &&
                r.point.x.exact() == 0) {
                BlowupTree t = blowup_tree(cs.field);
                e["blowups"] = {detail::blowup_json(t.x_dir), detail::blowup_json(t.y_dir)};
                e["sectors"] = detail::sectors_json(t.sectors);
            }
            pts.push_back(e);
        }
        o["infinite_equilibria"] = pts;
        charts.push_back(o);
    }
    j["charts"] = charts;
    return j;
}

/// Curves, exponential factors, the cofactor linear algebra and the verdict.
inline ojson darboux_json(const PlanarSystem &sys, const IntegrabilityVerdict &v, bool dump_extactic = false) {
    ojson j;
    j["system"] = detail::field_json(sys.field, "x", "y");
    j["params"] = detail::params_json(sys.params);
    j["bounds"] = {{"curve_degree", v.bounds.curve_degree},
                   {"exp_degree", v.bounds.exp_degree},
                   {"extactic_order", v.bounds.extactic_order}};
    ojson curves = ojson::array();
    for (const auto &c : v.curves) {
        detail::recheck(sys.field, c);
        curves.push_back(detail::curve_json(c));
    }
    j["curves"] = curves;
    if (!v.line_search.families.empty()) j["line_families"] = v.line_search.families;
    if (!v.line_search.irrational_lines.empty()) j["irrational_lines"] = v.line_search.irrational_lines;
    ojson exps = ojson::array();
    for (const auto &e : v.exp_factors) exps.push_back({{"g", e.g.to_string()}, {"f", e.f.to_string()}, {"L", e.cofactor.to_string()}});
    j["exponential_factors"] = exps;
    ojson ext{{"order", v.extactic.order},
              {"basis_size", v.extactic.basis_size()},
              {"terms", v.extactic.e.size()},
              {"degree", v.extactic.e.is_zero() ? -1 : v.extactic.e.degree()},
              {"vanishes_identically", v.extactic.vanishes_identically()}};
    if (dump_extactic) ext["polynomial"] = v.extactic.e.to_string();
    j["extactic"] = ext;
    j["divergence"] = v.divergence.to_string();
    j["cofactor_matrix"] = {{"columns", v.matrix.labels},
                            {"rows", v.matrix.rows.size()},
                            {"rank", v.rank_m},
                            {"rank_augmented", v.rank_augmented},
                            {"nullity", v.nullity},
                            {"degenerate_solutions", v.degenerate_solutions}};
    j["verdict"] = to_string(v.verdict);
    if (v.solution) {
        ojson lam = ojson::array(), mu = ojson::array();
        for (const auto &l : v.solution->lambda) lam.push_back(l.get_str());
        for (const auto &m : v.solution->mu) mu.push_back(m.get_str());
        j["solution"] = {{"lambda", lam}, {"mu", mu}};
    }
    if (v.darboux_function) j["darboux_function"] = *v.darboux_function;
    j["notes"] = v.notes;
    return j;
}

} // namespace pdisc
