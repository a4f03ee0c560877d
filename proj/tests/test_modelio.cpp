#include <pdisc/leslie.hpp>
#include <pdisc/parser.hpp>

#include <gtest/gtest.h>

#include "support.hpp"

using namespace pdisc;

namespace {

const MPoly X = MPoly::x();
const MPoly Y = MPoly::y();

std::size_t error_column(const std::string &src) {
    try {
        parse_system(src);
    } catch (const ParseError &e) {
        return e.column();
    }
    return 0;
}

} // namespace

TEST(ParseSystem, LeslieSource) {
    PlanarSystem s = parse_system("params: A=1, B=2, C=1/2\n"
                                  "dx = x*(C+x)*(1-x-A*y)\n"
                                  "dy = B*y*(C+x-y)\n");
    EXPECT_EQ(s.degree(), 3);
    EXPECT_EQ(s.field, leslie_system({Rat(1), Rat(2), make_rat(1, 2)}).field);
    MPoly c = MPoly(make_rat(1, 2));
    EXPECT_EQ(s.p(), X * (c + X) * (MPoly(1) - X - Y));
    EXPECT_EQ(s.q(), MPoly(2) * Y * (c + X - Y));
    EXPECT_EQ(*s.param("C"), make_rat(1, 2));
}

TEST(ParseSystem, CommentsOrderAndTimeSuffix) {
    PlanarSystem s = parse_system("# linear saddle\n\ndy/dt = -y   # stable\ndx/dt = x\n");
    EXPECT_EQ(s.p(), X);
    EXPECT_EQ(s.q(), -Y);
}

TEST(ParseSystem, OverridesReplaceFileBindings) {
    PlanarSystem s = parse_system(kLeslieSource, {{"A", Rat(2)}, {"B", Rat(1)}, {"C", Rat(2)}});
    EXPECT_EQ(s.field, leslie_system({Rat(2), Rat(1), Rat(2)}).field);
    PlanarSystem t = parse_system("params: a=3\ndx = a*x\ndy = y\n", {{"a", Rat(5)}});
    EXPECT_EQ(t.p(), MPoly(5) * X);
}

TEST(ParseSystem, OtherVariableNamesAreNormalized) {
    PlanarSystem s = parse_system("du = v\ndv = -u + v^2\n");
    EXPECT_EQ(s.p(), Y);
    EXPECT_EQ(s.q(), -X + Y * Y);
    EXPECT_EQ(serialize(s), "dx = y\ndy = y^2 - x\n");
}

TEST(ParseSystem, UnaryMinusAndPowers) {
    PlanarSystem s = parse_system("dx = -x^2 + 2^3\ndy = (x - y)^2 - -y\n");
    EXPECT_EQ(s.p(), -(X * X) + MPoly(8));
    EXPECT_EQ(s.q(), (X - Y) * (X - Y) + Y);
}

TEST(ParseSystem, MissingEquation) { EXPECT_THROW(parse_system("dx = x\n"), ParseError); }

TEST(ParseSystem, ZeroDenominator) {
    EXPECT_THROW(parse_system("params: A=1/0\ndx = x\ndy = y\n"), ParseError);
    EXPECT_THROW(parse_system("dx = 1/0*x\ndy = y\n"), ParseError);
}

TEST(ParseSystem, ErrorsCarryPositions) {
    try {
        parse_system("dx = x\ndy = y + z\n");
        FAIL() << "expected an unbound identifier";
    } catch (const ParseError &e) {
        EXPECT_EQ(e.line(), 2u);
        EXPECT_EQ(e.column(), 10u);
        EXPECT_NE(std::string(e.what()).find("unbound identifier 'z'"), std::string::npos);
    }
    EXPECT_EQ(error_column("dx = x^y\ndy = y\n"), 8u);
    EXPECT_THROW(parse_system("dx = x^1.5\ndy = y\n"), ParseError);
    EXPECT_THROW(parse_system("dx = x^-1\ndy = y\n"), ParseError);
    EXPECT_THROW(parse_system("dx = 0.5*x\ndy = y\n"), ParseError);
    EXPECT_THROW(parse_system("dx = x/y\ndy = y\n"), ParseError);
    EXPECT_THROW(parse_system("dx = (x\ndy = y\n"), ParseError);
    EXPECT_THROW(parse_system("dx = x\ndx = y\n"), ParseError);
    EXPECT_THROW(parse_system("dx = x\ndy = y\ndz = x\n"), ParseError);
    EXPECT_THROW(parse_system("x = 1\ndy = y\n"), ParseError);
    EXPECT_THROW(parse_system("params: x=1\ndx = x\ndy = y\n"), InputError);
    EXPECT_THROW(parse_system("params: A\ndx = x\ndy = y\n"), ParseError);
}

TEST(ParseProperties, SerializeRoundTrip) {
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 200; ++i) {
        PlanarSystem s;
        s.field = {pdisc::testing::random_poly(rng, 4, 6), pdisc::testing::random_poly(rng, 4, 6)};
        PlanarSystem back = parse_system(serialize(s));
        EXPECT_EQ(back.field, s.field) << serialize(s);
    }
}

TEST(LeslieTransform, AllOnes) {
    auto t = leslie_transform({Rat(1), Rat(1), Rat(1), Rat(1), Rat(1), Rat(1)});
    EXPECT_EQ(t.bindings, (ParamBindings{Rat(1), Rat(1), Rat(1)}));
    EXPECT_EQ(t.regime, 0);
    EXPECT_EQ(t.regime_sign, 0);
}

TEST(LeslieTransform, DoubledGrowthRate) {
    // A = knq/r = 1/2, B = s/r = 1/2, C = c/(kn) = 1.
    auto t = leslie_transform({Rat(2), Rat(1), Rat(1), Rat(1), Rat(1), Rat(1)});
    EXPECT_EQ(t.bindings, (ParamBindings{make_rat(1, 2), make_rat(1, 2), Rat(1)}));
    EXPECT_EQ(t.regime, make_rat(1, 2));
    EXPECT_EQ(t.regime_sign, 1);
}

TEST(LeslieTransform, PreyExtinctionRegime) {
    // A = 1*1*2/1 = 2, B = 1, C = 2/(1*1) = 2.
    auto t = leslie_transform({Rat(1), Rat(1), Rat(2), Rat(1), Rat(1), Rat(2)});
    EXPECT_EQ(t.bindings, (ParamBindings{Rat(2), Rat(1), Rat(2)}));
    EXPECT_EQ(t.regime, -3);
    EXPECT_EQ(t.regime_sign, -1);
}

TEST(LeslieTransform, RejectsNonpositive) {
    EXPECT_THROW(leslie_transform({Rat(1), Rat(0), Rat(1), Rat(1), Rat(1), Rat(1)}), InputError);
    EXPECT_THROW(leslie_transform({Rat(1), Rat(1), Rat(1), Rat(-1), Rat(1), Rat(1)}), InputError);
}

TEST(LeslieTransform, PropertyPositiveAndReexpands) {
    std::mt19937_64 rng(8);
    std::uniform_int_distribution<long> d(1, 20);
    for (int i = 0; i < 50; ++i) {
        LeslieGowerParams p{make_rat(d(rng), d(rng)), make_rat(d(rng), d(rng)), make_rat(d(rng), d(rng)),
                            make_rat(d(rng), d(rng)), make_rat(d(rng), d(rng)), make_rat(d(rng), d(rng))};
        auto t = leslie_transform(p);
        EXPECT_GT(t.bindings.A, 0);
        EXPECT_GT(t.bindings.B, 0);
        EXPECT_GT(t.bindings.C, 0);
        EXPECT_EQ(t.bindings.A, p.k * p.n * p.q / p.r);
        PlanarSystem ref = parse_system(kLeslieSource, {{"A", t.bindings.A}, {"B", t.bindings.B}, {"C", t.bindings.C}});
        EXPECT_EQ(t.system.field, ref.field);
        EXPECT_EQ(t.regime_sign, sgn(t.regime));
    }
}

TEST(SeededSample, DeterministicDistinctPositive) {
    auto a = seeded_parameter_sample();
    auto b = seeded_parameter_sample();
    ASSERT_EQ(a.size(), 5u);
    EXPECT_EQ(a, b);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_GT(a[i].A, 0);
        EXPECT_GT(a[i].B, 0);
        EXPECT_GT(a[i].C, 0);
        for (std::size_t j = i + 1; j < a.size(); ++j) EXPECT_FALSE(a[i] == a[j]);
    }
    EXPECT_NE(seeded_parameter_sample(kDefaultSampleSeed + 1), a);
}
