#pragma once

#include "mpoly.hpp"
#include "rational.hpp"

#include <numeric>
#include <string>
#include <utility>
#include <vector>

namespace pdisc {

/// Dense univariate polynomial, coefficients from the constant term upward.
class UPoly {
  public:
    UPoly() = default;
    explicit UPoly(std::vector<Rat> coeffs) : c_(std::move(coeffs)) { trim(); }
    UPoly(const Rat &c) : c_{c} { trim(); } // NOLINT

    static UPoly monomial(const Rat &c, unsigned e) {
        std::vector<Rat> v(e + 1, Rat(0));
        v[e] = c;
        return UPoly(std::move(v));
    }
    static UPoly identity() { return monomial(Rat(1), 1); }

    /// Reads a polynomial in a single variable out of an MPoly.
    static UPoly from_mpoly(const MPoly &p, Var v) {
        std::vector<Rat> v_coeffs;
        for (const auto &[m, c] : p.terms()) {
            unsigned other = v == Var::x ? m.y : m.x;
            if (other != 0) throw std::domain_error("polynomial is not univariate");
            unsigned e = v == Var::x ? m.x : m.y;
            if (v_coeffs.size() <= e) v_coeffs.resize(e + 1, Rat(0));
            v_coeffs[e] = c;
        }
        return UPoly(std::move(v_coeffs));
    }

    MPoly to_mpoly(Var v) const {
        MPoly out;
        for (std::size_t i = 0; i < c_.size(); ++i)
            out.add_term(v == Var::x ? Monomial{static_cast<unsigned>(i), 0} : Monomial{0, static_cast<unsigned>(i)}, c_[i]);
        return out;
    }

    const std::vector<Rat> &coeffs() const { return c_; }
    bool is_zero() const { return c_.empty(); }
    int degree() const { return c_.empty() ? kDegreeOfZero : static_cast<int>(c_.size()) - 1; }
    Rat lead() const { return c_.empty() ? Rat(0) : c_.back(); }
    Rat operator[](std::size_t i) const { return i < c_.size() ? c_[i] : Rat(0); }

    Rat eval(const Rat &t) const {
        Rat acc(0);
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) {
            acc *= t;
            acc += *it;
        }
        return acc;
    }

    int sign_at(const Rat &t) const { return sgn(eval(t)); }

    UPoly derivative() const {
        if (c_.size() <= 1) return {};
        std::vector<Rat> d(c_.size() - 1);
        for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * static_cast<unsigned long>(i);
        return UPoly(std::move(d));
    }

    UPoly monic() const {
        if (is_zero()) return *this;
        UPoly out = *this;
        Rat l = lead();
        for (auto &c : out.c_) c /= l;
        return out;
    }

    friend UPoly operator+(const UPoly &a, const UPoly &b) {
        std::vector<Rat> v(std::max(a.c_.size(), b.c_.size()), Rat(0));
        for (std::size_t i = 0; i < a.c_.size(); ++i) v[i] += a.c_[i];
        for (std::size_t i = 0; i < b.c_.size(); ++i) v[i] += b.c_[i];
        return UPoly(std::move(v));
    }
    friend UPoly operator-(const UPoly &a) {
        UPoly out = a;
        for (auto &c : out.c_) c = -c;
        return out;
    }
    friend UPoly operator-(const UPoly &a, const UPoly &b) { return a + (-b); }
    friend UPoly operator*(const UPoly &a, const UPoly &b) {
        if (a.is_zero() || b.is_zero()) return {};
        std::vector<Rat> v(a.c_.size() + b.c_.size() - 1, Rat(0));
        for (std::size_t i = 0; i < a.c_.size(); ++i)
            for (std::size_t j = 0; j < b.c_.size(); ++j) v[i + j] += a.c_[i] * b.c_[j];
        return UPoly(std::move(v));
    }
    friend bool operator==(const UPoly &a, const UPoly &b) { return a.c_ == b.c_; }

    /// Euclidean division: a = q*b + r with deg r < deg b.
    friend std::pair<UPoly, UPoly> divmod(const UPoly &a, const UPoly &b) {
        if (b.is_zero()) throw std::domain_error("division by zero polynomial");
        std::vector<Rat> r = a.c_;
        int db = b.degree();
        if (a.degree() < db) return {UPoly{}, a};
        std::vector<Rat> q(static_cast<std::size_t>(a.degree() - db + 1), Rat(0));
        Rat lb = b.lead();
        for (int k = a.degree() - db; k >= 0; --k) {
            Rat coef = r[static_cast<std::size_t>(k + db)] / lb;
            q[static_cast<std::size_t>(k)] = coef;
            if (coef == 0) continue;
            for (int j = 0; j <= db; ++j) r[static_cast<std::size_t>(k + j)] -= coef * b.c_[static_cast<std::size_t>(j)];
        }
        return {UPoly(std::move(q)), UPoly(std::move(r))};
    }

    /// Monic greatest common divisor; gcd(0, 0) = 0.
    friend UPoly gcd(UPoly a, UPoly b) {
        while (!b.is_zero()) {
            UPoly r = divmod(a, b).second;
            a = std::move(b);
            b = std::move(r);
        }
        return a.monic();
    }

    std::string to_string(std::string_view var = "x") const { return to_mpoly(Var::x).to_string(var, "y"); }

  private:
    void trim() {
        while (!c_.empty() && c_.back() == 0) c_.pop_back();
    }
    std::vector<Rat> c_;
};

/// Removes repeated factors: p / gcd(p, p').
inline UPoly squarefree_part(const UPoly &p) {
    if (p.degree() <= 0) return p.monic();
    UPoly g = gcd(p, p.derivative());
    return divmod(p, g).first.monic();
}

/// Exact quotient test for univariate polynomials.
inline std::optional<UPoly> divide_exact(const UPoly &a, const UPoly &b) {
    auto [q, r] = divmod(a, b);
    if (!r.is_zero()) return std::nullopt;
    return q;
}

} // namespace pdisc
