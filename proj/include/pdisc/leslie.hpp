#pragma once

#include "system.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace pdisc {

/// Biological parameters of the generalist-predator Leslie-Gower model:
/// prey growth r, carrying capacity k, consumption rate q, predator growth s,
/// food quality n and alternative food c.
struct LeslieGowerParams {
    Rat r, k, q, s, n, c;
};

/// Dimensionless parameters of the polynomial model.
struct ParamBindings {
    Rat A, B, C;

    friend bool operator==(const ParamBindings &, const ParamBindings &) = default;
};

/// x' = x (C + x)(1 - x - A y),  y' = B y (C + x - y).
inline PlanarSystem leslie_system(const ParamBindings &b) {
    MPoly x = MPoly::x(), y = MPoly::y();
    PlanarSystem sys;
    sys.field.p = x * (MPoly(b.C) + x) * (MPoly(1) - x - MPoly(b.A) * y);
    sys.field.q = MPoly(b.B) * y * (MPoly(b.C) + x - y);
    sys.params = {{"A", b.A}, {"B", b.B}, {"C", b.C}};
    return sys;
}

/// The source text of the polynomial model with symbolic parameters.
inline constexpr const char *kLeslieSource = "dx = x*(C+x)*(1-x-A*y)\ndy = B*y*(C+x-y)\n";

/// 1 - AC; its sign separates coexistence from prey extinction.
inline Rat regime(const ParamBindings &b) {
    Rat r = 1 - b.A * b.C;
    return r;
}

struct LeslieTransform {
    ParamBindings bindings;
    PlanarSystem system;
    Rat regime;
    int regime_sign = 0;
};

/// A = knq/r, B = s/r, C = c/(kn).
inline LeslieTransform leslie_transform(const LeslieGowerParams &p) {
    for (const Rat *v : {&p.r, &p.k, &p.q, &p.s, &p.n, &p.c})
        if (*v <= 0) throw InputError("Leslie-Gower parameters must all be positive");
    LeslieTransform out;
    out.bindings.A = p.k * p.n * p.q / p.r;
    out.bindings.B = p.s / p.r;
    out.bindings.C = p.c / (p.k * p.n);
    out.system = leslie_system(out.bindings);
    out.regime = regime(out.bindings);
    out.regime_sign = sgn(out.regime);
    return out;
}

inline constexpr std::uint64_t kDefaultSampleSeed = 20240517;

/// Deterministic sample of positive rational (A, B, C) triples with small
/// numerators and denominators.
inline std::vector<ParamBindings> seeded_parameter_sample(std::uint64_t seed = kDefaultSampleSeed,
                                                          std::size_t count = 5) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<long> num(1, 12);
    std::uniform_int_distribution<long> den(1, 7);
    auto draw = [&] {
        long a = num(rng);
        long b = den(rng);
        return make_rat(a, b);
    };
    std::vector<ParamBindings> out;
    while (out.size() < count) {
        ParamBindings b{draw(), draw(), draw()};
        bool dup = false;
        for (const auto &o : out) dup = dup || o == b;
        if (!dup) out.push_back(b);
    }
    return out;
}

} // namespace pdisc
