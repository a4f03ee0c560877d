#pragma once

#include "mpoly.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <string>

namespace pdisc {

/// Polynomial vector field P d/dx + Q d/dy.
struct VectorField {
    MPoly p;
    MPoly q;

    int degree() const { return std::max({p.degree(), q.degree(), 0}); }

    MPoly lie(const MPoly &f) const { return lie_derivative(p, q, f); }
    MPoly divergence() const { return p.diff(Var::x) + q.diff(Var::y); }

    friend VectorField operator*(const Rat &s, const VectorField &f) { return {f.p * s, f.q * s}; }
    friend bool operator==(const VectorField &, const VectorField &) = default;
};

/// A parsed planar system with its parameter bindings already substituted.
struct PlanarSystem {
    VectorField field;
    std::map<std::string, Rat> params;
    std::array<std::string, 2> variables{"x", "y"};

    const MPoly &p() const { return field.p; }
    const MPoly &q() const { return field.q; }
    int degree() const { return field.degree(); }

    std::optional<Rat> param(const std::string &name) const {
        auto it = params.find(name);
        if (it == params.end()) return std::nullopt;
        return it->second;
    }
};

/// Canonical text form; parse_system(serialize(s)) reproduces the polynomials.
inline std::string serialize(const PlanarSystem &s) {
    std::string out;
    out += "dx = " + s.p().to_string() + "\n";
    out += "dy = " + s.q().to_string() + "\n";
    return out;
}

} // namespace pdisc
