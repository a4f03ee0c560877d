#pragma once

#include "darboux.hpp"
#include "linalg.hpp"
#include "system.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pdisc {

/// Cofactors of the curves (first) and exponential factors (after) as
/// coefficient columns over the monomials of degree <= d - 1.
struct CofactorMatrix {
    std::vector<Monomial> basis;
    RatMatrix rows; // rows[i][j]: coefficient of basis[i] in column j
    std::vector<std::string> labels;
    std::size_t curve_columns = 0;
    std::vector<bool> degenerate; // exp factor with constant exponent

    std::size_t columns() const { return labels.size(); }
};

struct DarbouxSolution {
    RatVector lambda; // one per curve
    RatVector mu;     // one per exponential factor
};

struct SearchBounds {
    unsigned curve_degree = 1;
    unsigned exp_degree = 2;
    unsigned extactic_order = 1;
};

enum class Verdict { DarbouxFirstIntegral, DarbouxIntegratingFactor, NotLiouvillianWithinBounds, Inconclusive };

inline std::string to_string(Verdict v) {
    switch (v) {
    case Verdict::DarbouxFirstIntegral: return "DarbouxFirstIntegral";
    case Verdict::DarbouxIntegratingFactor: return "DarbouxIntegratingFactor";
    case Verdict::NotLiouvillianWithinBounds: return "NotLiouvillianWithinBounds";
    case Verdict::Inconclusive: return "Inconclusive";
    }
    return "?";
}

struct IntegrabilityVerdict {
    Verdict verdict = Verdict::Inconclusive;
    SearchBounds bounds;
    std::vector<InvariantCurve> curves;
    std::vector<ExpFactor> exp_factors;
    LineSearch line_search;
    ExtacticResult extactic;
    CofactorMatrix matrix;
    MPoly divergence;
    std::size_t rank_m = 0;
    std::size_t rank_augmented = 0;           // of [M | -div]
    std::size_t nullity = 0;                  // of M
    std::size_t degenerate_solutions = 0;     // nullspace directions rejected as constant exponents
    std::optional<DarbouxSolution> solution;
    std::optional<std::string> darboux_function; // D = prod f^lambda * prod F^mu
    std::vector<std::string> notes;
};

/// Columns in the order given: curves first, then exponential factors.
inline CofactorMatrix build_cofactor_matrix(const std::vector<InvariantCurve> &curves,
                                            const std::vector<ExpFactor> &exps, int d) {
    CofactorMatrix m;
    if (d >= 1) m.basis = monomials_up_to(static_cast<unsigned>(d - 1));
    std::vector<const MPoly *> cols;
    for (const auto &c : curves) {
        cols.push_back(&c.cofactor);
        m.labels.push_back("K[" + c.f.to_string() + "]");
        m.degenerate.push_back(false);
    }
    m.curve_columns = curves.size();
    for (const auto &e : exps) {
        cols.push_back(&e.cofactor);
        m.labels.push_back(e.f == MPoly(1) ? "L[exp(" + e.g.to_string() + ")]"
                                           : "L[exp((" + e.g.to_string() + ")/(" + e.f.to_string() + "))]");
        m.degenerate.push_back(e.g.is_constant() && e.f == MPoly(1));
    }
    for (std::size_t j = 0; j < cols.size(); ++j)
        if (!cols[j]->is_zero() && cols[j]->degree() > d - 1)
            throw InputError("cofactor " + m.labels[j] + " has degree " + std::to_string(cols[j]->degree()) +
                             " above the bound " + std::to_string(d - 1));
    m.rows.assign(m.basis.size(), RatVector(cols.size(), Rat(0)));
    for (std::size_t i = 0; i < m.basis.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j) m.rows[i][j] = cols[j]->coeff(m.basis[i].x, m.basis[i].y);
    return m;
}

namespace detail {

inline DarbouxSolution split(const CofactorMatrix &m, const RatVector &v) {
    DarbouxSolution s;
    s.lambda.assign(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(m.curve_columns));
    s.mu.assign(v.begin() + static_cast<std::ptrdiff_t>(m.curve_columns), v.end());
    return s;
}

inline MPoly combination(const std::vector<InvariantCurve> &curves, const std::vector<ExpFactor> &exps,
                         const DarbouxSolution &s) {
    MPoly out;
    for (std::size_t i = 0; i < curves.size(); ++i) out += curves[i].cofactor * s.lambda[i];
    for (std::size_t j = 0; j < exps.size(); ++j) out += exps[j].cofactor * s.mu[j];
    return out;
}

} // namespace detail

/// Nonzero nullspace vector of M, preferring one with curve support. Vectors
/// living only on constant-exponent factors are rejected.
inline std::optional<DarbouxSolution> first_integral_test(const CofactorMatrix &m) {
    const std::size_t n = m.columns();
    if (n == 0) return std::nullopt;
    std::vector<RatVector> basis = nullspace(m.rows, n);
    std::optional<RatVector> pick;
    for (auto v : basis) {
        for (std::size_t j = 0; j < n; ++j)
            if (m.degenerate[j]) v[j] = 0;
        bool curve = false, any = false;
        for (std::size_t j = 0; j < n; ++j) {
            any = any || v[j] != 0;
            curve = curve || (j < m.curve_columns && v[j] != 0);
        }
        if (!any) continue;
        if (curve) {
            pick = v;
            break;
        }
        if (!pick) pick = v;
    }
    if (!pick) return std::nullopt;
    Rat lead = 0;
    for (const auto &c : *pick)
        if (c != 0) {
            lead = c;
            break;
        }
    for (auto &c : *pick) c /= lead;
    return detail::split(m, *pick);
}

/// Solves M (lambda, mu) = -div exactly.
inline std::optional<DarbouxSolution> integrating_factor_test(const CofactorMatrix &m, const MPoly &div,
                                                              LinearSolve *data = nullptr) {
    for (const auto &[mono, c] : div.terms())
        if (std::find(m.basis.begin(), m.basis.end(), mono) == m.basis.end())
            throw InvariantViolation("divergence has a term outside the cofactor basis");
    RatVector rhs;
    for (const auto &mono : m.basis) rhs.push_back(-div.coeff(mono.x, mono.y));
    LinearSolve s = solve(m.rows, rhs, m.columns());
    if (data) *data = s;
    if (!s.consistent()) return std::nullopt;
    return detail::split(m, *s.solution);
}

/// D = prod f_i^lambda_i * prod exp(g_j/f_j)^mu_j in readable form.
inline std::string darboux_function_text(const std::vector<InvariantCurve> &curves, const std::vector<ExpFactor> &exps,
                                         const DarbouxSolution &s) {
    auto base = [](const MPoly &f) {
        std::string t = f.to_string();
        return f.size() == 1 && f.leading_term().second == 1 ? t : "(" + t + ")";
    };
    std::vector<std::string> num, den;
    for (std::size_t i = 0; i < curves.size(); ++i) {
        const Rat &l = s.lambda[i];
        if (l == 0) continue;
        Rat a = abs_rat(l);
        std::string term = base(curves[i].f) + (a == 1 ? "" : "^(" + a.get_str() + ")");
        (l > 0 ? num : den).push_back(term);
    }
    for (std::size_t j = 0; j < exps.size(); ++j) {
        const Rat &m = s.mu[j];
        if (m == 0) continue;
        MPoly g = exps[j].g * m;
        std::string arg = exps[j].f == MPoly(1) ? g.to_string() : "(" + g.to_string() + ")/(" + exps[j].f.to_string() + ")";
        num.push_back("exp(" + arg + ")");
    }
    auto join = [](const std::vector<std::string> &v) {
        std::string out;
        for (std::size_t i = 0; i < v.size(); ++i) out += (i ? " * " : "") + v[i];
        return out;
    };
    if (num.empty() && den.empty()) return "1";
    std::string n = num.empty() ? "1" : join(num);
    if (den.empty()) return n;
    return n + "/" + (den.size() == 1 ? den[0] : "(" + join(den) + ")");
}

/// Runs the Darboux pipeline within the bounds and issues the verdict.
/// `extra_curves` are user-supplied candidates; those that are invariant join
/// the inventory.
inline IntegrabilityVerdict liouville_verdict(const PlanarSystem &sys, const SearchBounds &bounds = {},
                                              const std::vector<MPoly> &extra_curves = {}) {
    const VectorField &field = sys.field;
    if (bounds.exp_degree < 1) throw InputError("exponential factor degree bound must be at least 1");
    IntegrabilityVerdict v;
    v.bounds = bounds;
    v.line_search = find_invariant_lines(field);
    v.curves = v.line_search.lines;
    for (const auto &f : extra_curves) {
        if (f.degree() > static_cast<int>(bounds.curve_degree))
            throw InputError("curve " + f.to_string() + " exceeds the curve degree bound");
        auto c = verify_invariant_curve(field, f);
        if (!c) {
            v.notes.push_back("supplied curve " + f.to_string() + " is not invariant");
            continue;
        }
        bool dup = std::any_of(v.curves.begin(), v.curves.end(), [&](const InvariantCurve &k) { return k.f == c->f; });
        if (!dup) v.curves.push_back(*std::move(c));
    }
    v.extactic = extactic(field, bounds.extactic_order, v.curves, std::max(bounds.extactic_order, 2u));
    assign_multiplicities(v.curves, v.extactic);
    v.exp_factors = find_exponential_factors(field, v.curves, bounds.exp_degree);
    v.divergence = field.divergence();
    v.matrix = build_cofactor_matrix(v.curves, v.exp_factors, field.degree());

    const std::size_t n = v.matrix.columns();
    auto null = nullspace(v.matrix.rows, n);
    v.nullity = null.size();
    for (const auto &vec : null) {
        bool only_degenerate = true;
        for (std::size_t j = 0; j < n; ++j)
            if (vec[j] != 0 && !v.matrix.degenerate[j]) only_degenerate = false;
        if (only_degenerate) ++v.degenerate_solutions;
    }
    LinearSolve data;
    auto integrating = integrating_factor_test(v.matrix, v.divergence, &data);
    v.rank_m = data.rank_m;
    v.rank_augmented = data.rank_augmented;

    if (auto fi = first_integral_test(v.matrix)) {
        if (!detail::combination(v.curves, v.exp_factors, *fi).is_zero())
            throw InvariantViolation("first integral failed the cofactor recheck");
        v.verdict = Verdict::DarbouxFirstIntegral;
        v.solution = fi;
    } else if (integrating) {
        if (!(detail::combination(v.curves, v.exp_factors, *integrating) + v.divergence).is_zero())
            throw InvariantViolation("integrating factor failed the cofactor recheck");
        v.verdict = Verdict::DarbouxIntegratingFactor;
        v.solution = integrating;
    } else if (!v.line_search.complete() || v.extactic.vanishes_identically()) {
        v.verdict = Verdict::Inconclusive;
        if (v.line_search.family) v.notes.push_back("the line search found a one-parameter family of invariant lines");
        if (!v.line_search.irrational_lines.empty())
            v.notes.push_back("invariant lines with irrational coefficients are outside the rational cofactor matrix");
    } else {
        v.verdict = Verdict::NotLiouvillianWithinBounds;
        v.notes.push_back("no Darboux integrating factor built from invariant curves of degree <= " +
                          std::to_string(bounds.curve_degree) + ", exponential factors with exponent degree <= " +
                          std::to_string(bounds.exp_degree) + " and extactic order " +
                          std::to_string(bounds.extactic_order));
        if (!sys.params.empty())
            v.notes.push_back("certified at the given rational parameter values only, not for all parameters");
    }
    if (v.solution) v.darboux_function = darboux_function_text(v.curves, v.exp_factors, *v.solution);
    return v;
}

inline IntegrabilityVerdict liouville_verdict(const VectorField &f, const SearchBounds &bounds = {},
                                              const std::vector<MPoly> &extra_curves = {}) {
    return liouville_verdict(PlanarSystem{f, {}, {"x", "y"}}, bounds, extra_curves);
}

} // namespace pdisc
