#include <pdisc/integrability.hpp>
#include <pdisc/leslie.hpp>

#include <gtest/gtest.h>

#include "support.hpp"

using namespace pdisc;

namespace {

const MPoly X = MPoly::x();
const MPoly Y = MPoly::y();

ParamBindings paper_triple() { return {Rat(1), Rat(2), make_rat(1, 2)}; }

std::vector<InvariantCurve> curves_of(const VectorField &f, const std::vector<MPoly> &fs) {
    std::vector<InvariantCurve> out;
    for (const auto &p : fs) out.push_back(*verify_invariant_curve(f, p));
    return out;
}

} // namespace

TEST(CofactorMatrix, LeslieShape) {
    VectorField f = leslie_system(paper_triple()).field;
    auto curves = find_invariant_lines(f).lines;
    auto exps = find_exponential_factors(f, curves, 1);
    CofactorMatrix m = build_cofactor_matrix(curves, exps, f.degree());
    EXPECT_EQ(m.columns(), 4u);
    EXPECT_EQ(m.curve_columns, 3u);
    ASSERT_EQ(m.basis.size(), 6u);
    EXPECT_EQ(m.basis[3], (Monomial{2, 0}));
    EXPECT_EQ(m.basis[5], (Monomial{0, 2}));
    // The exp(y) column: L = 2 (1/2 + x - y) y = y + 2xy - 2y^2.
    EXPECT_EQ(m.rows[2][3], 1);
    EXPECT_EQ(m.rows[4][3], 2);
    EXPECT_EQ(m.rows[5][3], -2);
}

TEST(CofactorMatrix, EmptyAndLinear) {
    CofactorMatrix e = build_cofactor_matrix({}, {}, 3);
    EXPECT_EQ(e.columns(), 0u);
    EXPECT_FALSE(first_integral_test(e));

    VectorField f{X, Y};
    CofactorMatrix m = build_cofactor_matrix(curves_of(f, {X, Y}), {}, 1);
    ASSERT_EQ(m.basis.size(), 1u);
    EXPECT_EQ(m.rows[0], (RatVector{Rat(1), Rat(1)}));
}

TEST(CofactorMatrix, RejectsDegreeOverflow) {
    InvariantCurve c{X, X * X};
    EXPECT_THROW(build_cofactor_matrix({c}, {}, 2), InputError);
}

TEST(FirstIntegralTest, RadialNode) {
    VectorField f{X, Y};
    auto curves = curves_of(f, {X, Y});
    auto s = first_integral_test(build_cofactor_matrix(curves, {}, 1));
    ASSERT_TRUE(s);
    EXPECT_EQ(s->lambda, (RatVector{Rat(1), Rat(-1)}));
    EXPECT_EQ(darboux_function_text(curves, {}, *s), "x/y");
    // X(x/y) = 0: y X(x) - x X(y) = 0.
    EXPECT_TRUE((Y * f.lie(X) - X * f.lie(Y)).is_zero());
}

TEST(FirstIntegralTest, RejectsConstantExponent) {
    ExpFactor constant{MPoly(1), MPoly(1), MPoly()};
    CofactorMatrix m = build_cofactor_matrix({}, {constant}, 2);
    EXPECT_TRUE(m.degenerate[0]);
    EXPECT_FALSE(first_integral_test(m));
    ExpFactor genuine{X * X + Y * Y, MPoly(1), MPoly()};
    EXPECT_TRUE(first_integral_test(build_cofactor_matrix({}, {genuine}, 2)));
}

TEST(FirstIntegralTest, LeslieHasNone) {
    for (const auto &b : seeded_parameter_sample()) {
        VectorField f = leslie_system(b).field;
        auto curves = find_invariant_lines(f).lines;
        auto exps = find_exponential_factors(f, curves, 2);
        CofactorMatrix m = build_cofactor_matrix(curves, exps, f.degree());
        EXPECT_FALSE(first_integral_test(m));
        EXPECT_EQ(rank(m.rows, m.columns()), m.columns());
    }
}

TEST(IntegratingFactorTest, LeslieInconsistent) {
    for (const auto &b : seeded_parameter_sample()) {
        VectorField f = leslie_system(b).field;
        auto curves = find_invariant_lines(f).lines;
        auto exps = find_exponential_factors(f, curves, 2);
        CofactorMatrix m = build_cofactor_matrix(curves, exps, f.degree());
        LinearSolve data;
        EXPECT_FALSE(integrating_factor_test(m, f.divergence(), &data));
        EXPECT_LT(data.rank_m, data.rank_augmented);
    }
}

TEST(IntegratingFactorTest, RadialNode) {
    VectorField f{X, Y};
    auto curves = curves_of(f, {X, Y});
    auto s = integrating_factor_test(build_cofactor_matrix(curves, {}, 1), f.divergence());
    ASSERT_TRUE(s);
    EXPECT_EQ(s->lambda[0] + s->lambda[1], -2);
    // R = 1/(xy): d(R P)/dx + d(R Q)/dy = d(1/y)/dx + d(1/x)/dy = 0, and with
    // R = x^a y^b the condition reads (a + 1) + (b + 1) = 0.
    EXPECT_EQ((s->lambda[0] + 1) + (s->lambda[1] + 1), 0);
}

TEST(IntegratingFactorTest, ZeroDivergence) {
    VectorField f{Y, -X};
    auto s = integrating_factor_test(build_cofactor_matrix({}, {}, 1), f.divergence());
    ASSERT_TRUE(s);
    EXPECT_TRUE(s->lambda.empty());
}

TEST(LiouvilleVerdict, LeslieNotLiouvillian) {
    for (const auto &b : seeded_parameter_sample()) {
        IntegrabilityVerdict v = liouville_verdict(leslie_system(b), SearchBounds{1, 2, 1});
        EXPECT_EQ(v.verdict, Verdict::NotLiouvillianWithinBounds);
        EXPECT_EQ(v.matrix.columns(), 4u);
        EXPECT_EQ(v.nullity, 0u);
        EXPECT_LT(v.rank_m, v.rank_augmented);
        EXPECT_FALSE(v.solution);
        ASSERT_GE(v.notes.size(), 2u);
        EXPECT_NE(v.notes[0].find("degree <= 2"), std::string::npos);
    }
}

TEST(LiouvilleVerdict, RadialNodeFirstIntegral) {
    IntegrabilityVerdict v = liouville_verdict(VectorField{X, Y});
    EXPECT_EQ(v.verdict, Verdict::DarbouxFirstIntegral);
    ASSERT_TRUE(v.darboux_function);
    EXPECT_EQ(*v.darboux_function, "x/y");
    EXPECT_TRUE(v.line_search.family);
}

TEST(LiouvilleVerdict, RotationIntegratingFactorAtDegreeOne) {
    IntegrabilityVerdict v = liouville_verdict(VectorField{Y, -X}, SearchBounds{1, 1, 1});
    EXPECT_EQ(v.verdict, Verdict::DarbouxIntegratingFactor);
    EXPECT_EQ(*v.darboux_function, "1");
    // With quadratic exponents exp(x^2 + y^2) is itself a first integral.
    IntegrabilityVerdict w = liouville_verdict(VectorField{Y, -X}, SearchBounds{1, 2, 1});
    EXPECT_EQ(w.verdict, Verdict::DarbouxFirstIntegral);
    EXPECT_EQ(*w.darboux_function, "exp(y^2 + x^2)");
}

TEST(LiouvilleVerdict, ConstantFieldFamilyStillIntegrates) {
    // Every line y = x + b is invariant, and exp(y - x) is a first integral.
    IntegrabilityVerdict c = liouville_verdict(VectorField{MPoly(1), MPoly(1)});
    EXPECT_TRUE(c.line_search.family);
    EXPECT_EQ(c.verdict, Verdict::DarbouxFirstIntegral);
    EXPECT_EQ(*c.darboux_function, "exp(y - x)");
}

TEST(LiouvilleVerdict, IrrationalLinesAreInconclusive) {
    IntegrabilityVerdict v =
        liouville_verdict(VectorField{X * X - MPoly(2), Y * (X * X + MPoly(1)) - X.pow(5)}, SearchBounds{1, 1, 1});
    EXPECT_EQ(v.line_search.irrational_lines.size(), 2u);
    EXPECT_EQ(v.verdict, Verdict::Inconclusive);
}

TEST(LiouvilleVerdict, SuppliedCurves) {
    // x' = -y + x (x^2 + y^2 - 1), y' = x + y (x^2 + y^2 - 1): the unit circle.
    MPoly r = X * X + Y * Y - MPoly(1);
    VectorField f{-Y + X * r, X + Y * r};
    SearchBounds b{2, 1, 1};
    IntegrabilityVerdict v = liouville_verdict(f, b, {r, X + Y});
    bool has_circle = std::any_of(v.curves.begin(), v.curves.end(), [&](const InvariantCurve &c) { return c.f == r; });
    EXPECT_TRUE(has_circle);
    EXPECT_EQ(v.notes[0], "supplied curve y + x is not invariant");
    EXPECT_THROW(liouville_verdict(f, SearchBounds{1, 1, 1}, {r}), InputError);
}

TEST(LiouvilleVerdict, SoundnessOfPositiveVerdicts) {
    std::mt19937_64 rng(12);
    for (int i = 0; i < 30; ++i) {
        Rat a = pdisc::testing::random_rat(rng), b = pdisc::testing::random_rat(rng);
        Rat c = pdisc::testing::random_rat(rng), d = pdisc::testing::random_rat(rng);
        VectorField f{MPoly(a) * X + MPoly(b) * Y, MPoly(c) * X + MPoly(d) * Y};
        if (f.p.is_zero() || f.q.is_zero()) continue;
        IntegrabilityVerdict v = liouville_verdict(f, SearchBounds{1, 2, 1});
        if (!v.solution) continue;
        MPoly sum;
        for (std::size_t k = 0; k < v.curves.size(); ++k) sum += v.curves[k].cofactor * v.solution->lambda[k];
        for (std::size_t k = 0; k < v.exp_factors.size(); ++k) sum += v.exp_factors[k].cofactor * v.solution->mu[k];
        if (v.verdict == Verdict::DarbouxFirstIntegral) {
            EXPECT_TRUE(sum.is_zero());
        }
        if (v.verdict == Verdict::DarbouxIntegratingFactor) {
            EXPECT_TRUE((sum + f.divergence()).is_zero());
        }
    }
}

TEST(LiouvilleVerdict, PermutationAndRescalingInvariance) {
    VectorField f = leslie_system(paper_triple()).field;
    auto curves = find_invariant_lines(f).lines;
    auto exps = find_exponential_factors(f, curves, 2);
    auto reference = first_integral_test(build_cofactor_matrix(curves, exps, 3));
    std::vector<InvariantCurve> permuted(curves.rbegin(), curves.rend());
    for (auto &c : permuted) c.f = c.f * Rat(-5, 2);
    CofactorMatrix m = build_cofactor_matrix(permuted, exps, 3);
    EXPECT_EQ(first_integral_test(m).has_value(), reference.has_value());
    EXPECT_FALSE(integrating_factor_test(m, f.divergence()));

    VectorField g{X, Y};
    auto gc = curves_of(g, {Y, X});
    auto s = first_integral_test(build_cofactor_matrix(gc, {}, 1));
    ASSERT_TRUE(s);
    EXPECT_EQ(darboux_function_text(gc, {}, *s), "y/x");
}
