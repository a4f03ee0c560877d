#pragma once

#include "rational.hpp"

#include <array>
#include <climits>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace pdisc {

/// Exponent pair of x^i y^j.
struct Monomial {
    unsigned x = 0;
    unsigned y = 0;

    unsigned degree() const { return x + y; }
    bool divides(const Monomial &o) const { return x <= o.x && y <= o.y; }
    friend bool operator==(const Monomial &, const Monomial &) = default;
};

/// Graded order, ties broken by the larger y exponent, so that y - a*x - b and
/// x - c are both monic in their leading term. std::map iterates from the
/// leading monomial downward.
struct GradedOrder {
    bool operator()(const Monomial &a, const Monomial &b) const {
        if (a.degree() != b.degree()) return a.degree() > b.degree();
        return a.y > b.y;
    }
};

enum class Var { x, y };

/// Degree of the zero polynomial.
inline constexpr int kDegreeOfZero = INT_MIN;

/// Sparse bivariate polynomial with exact rational coefficients. No zero
/// coefficient is ever stored, so structural equality is polynomial equality.
class MPoly {
  public:
    using TermMap = std::map<Monomial, Rat, GradedOrder>;

    MPoly() = default;
    MPoly(const Rat &c) { // NOLINT: implicit lift of constants is intended
        if (c != 0) terms_.emplace(Monomial{}, c);
    }
    MPoly(long c) : MPoly(Rat(c)) {} // NOLINT

    static MPoly x() { return monomial(Rat(1), 1, 0); }
    static MPoly y() { return monomial(Rat(1), 0, 1); }
    static MPoly monomial(const Rat &c, unsigned i, unsigned j) {
        MPoly p;
        if (c != 0) p.terms_.emplace(Monomial{i, j}, c);
        return p;
    }

    const TermMap &terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.degree() == 0); }
    std::size_t size() const { return terms_.size(); }

    /// Total degree; kDegreeOfZero for the zero polynomial.
    int degree() const { return terms_.empty() ? kDegreeOfZero : static_cast<int>(terms_.begin()->first.degree()); }

    int degree_in(Var v) const {
        int d = kDegreeOfZero;
        for (const auto &[m, c] : terms_) d = std::max(d, static_cast<int>(v == Var::x ? m.x : m.y));
        return d;
    }

    Rat coeff(unsigned i, unsigned j) const {
        auto it = terms_.find(Monomial{i, j});
        return it == terms_.end() ? Rat(0) : it->second;
    }

    Rat constant_term() const { return coeff(0, 0); }

    std::pair<Monomial, Rat> leading_term() const {
        if (terms_.empty()) throw std::domain_error("leading term of zero polynomial");
        return *terms_.begin();
    }

    void add_term(const Monomial &m, const Rat &c) {
        if (c == 0) return;
        auto [it, inserted] = terms_.try_emplace(m, c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }

    MPoly &operator+=(const MPoly &o) {
        for (const auto &[m, c] : o.terms_) add_term(m, c);
        return *this;
    }
    MPoly &operator-=(const MPoly &o) {
        for (const auto &[m, c] : o.terms_) add_term(m, -c);
        return *this;
    }
    MPoly &operator*=(const Rat &s) {
        if (s == 0) {
            terms_.clear();
            return *this;
        }
        for (auto &[m, c] : terms_) c *= s;
        return *this;
    }

    friend MPoly operator+(MPoly a, const MPoly &b) { return a += b; }
    friend MPoly operator-(MPoly a, const MPoly &b) { return a -= b; }
    friend MPoly operator-(MPoly a) {
        for (auto &[m, c] : a.terms_) c = -c;
        return a;
    }
    friend MPoly operator*(MPoly a, const Rat &s) { return a *= s; }
    friend MPoly operator*(const Rat &s, MPoly a) { return a *= s; }

    friend MPoly operator*(const MPoly &a, const MPoly &b) {
        MPoly out;
        if (a.is_zero() || b.is_zero()) return out;
        Rat prod;
        for (const auto &[ma, ca] : a.terms_) {
            for (const auto &[mb, cb] : b.terms_) {
                mpq_mul(prod.get_mpq_t(), ca.get_mpq_t(), cb.get_mpq_t());
                out.add_term(Monomial{ma.x + mb.x, ma.y + mb.y}, prod);
            }
        }
        return out;
    }
    MPoly &operator*=(const MPoly &o) { return *this = *this * o; }

    friend bool operator==(const MPoly &a, const MPoly &b) { return a.terms_ == b.terms_; }

    MPoly pow(unsigned e) const {
        MPoly out(1);
        for (unsigned i = 0; i < e; ++i) out *= *this;
        return out;
    }

    MPoly diff(Var v) const {
        MPoly out;
        for (const auto &[m, c] : terms_) {
            unsigned e = v == Var::x ? m.x : m.y;
            if (e == 0) continue;
            Monomial nm = v == Var::x ? Monomial{m.x - 1, m.y} : Monomial{m.x, m.y - 1};
            out.add_term(nm, c * e);
        }
        return out;
    }

    Rat eval(const Rat &xv, const Rat &yv) const {
        Rat acc(0);
        for (const auto &[m, c] : terms_) acc += c * pow_rat(xv, m.x) * pow_rat(yv, m.y);
        return acc;
    }

    double eval(double xv, double yv) const {
        double acc = 0.0;
        for (const auto &[m, c] : terms_) acc += c.get_d() * std::pow(xv, m.x) * std::pow(yv, m.y);
        return acc;
    }

    RatInterval eval(const RatInterval &xv, const RatInterval &yv) const {
        RatInterval acc = RatInterval::point(Rat(0));
        for (const auto &[m, c] : terms_) acc = acc + c * (pdisc::pow(xv, m.x) * pdisc::pow(yv, m.y));
        return acc;
    }

    /// p(xs, ys) for polynomial substitutions of both variables.
    MPoly compose(const MPoly &xs, const MPoly &ys) const {
        std::vector<MPoly> xp{MPoly(1)}, yp{MPoly(1)};
        MPoly out;
        for (const auto &[m, c] : terms_) {
            while (xp.size() <= m.x) xp.push_back(xp.back() * xs);
            while (yp.size() <= m.y) yp.push_back(yp.back() * ys);
            out += (xp[m.x] * yp[m.y]) * c;
        }
        return out;
    }

    /// Substitutes x := value, leaving a polynomial in y only.
    MPoly subs_x(const Rat &value) const {
        MPoly out;
        for (const auto &[m, c] : terms_) out.add_term(Monomial{0, m.y}, c * pow_rat(value, m.x));
        return out;
    }
    MPoly subs_y(const Rat &value) const {
        MPoly out;
        for (const auto &[m, c] : terms_) out.add_term(Monomial{m.x, 0}, c * pow_rat(value, m.y));
        return out;
    }

    MPoly swap_vars() const {
        MPoly out;
        for (const auto &[m, c] : terms_) out.add_term(Monomial{m.y, m.x}, c);
        return out;
    }

    /// Terms of total degree exactly k.
    MPoly homogeneous_part(unsigned k) const {
        MPoly out;
        for (const auto &[m, c] : terms_)
            if (m.degree() == k) out.add_term(m, c);
        return out;
    }

    /// Coefficient of v^k viewed as a polynomial in the other variable.
    MPoly coeff_in(Var v, unsigned k) const {
        MPoly out;
        for (const auto &[m, c] : terms_) {
            if (v == Var::y && m.y == k) out.add_term(Monomial{m.x, 0}, c);
            if (v == Var::x && m.x == k) out.add_term(Monomial{0, m.y}, c);
        }
        return out;
    }

    /// Largest monomial dividing every term (x^0 y^0 for the zero polynomial).
    Monomial monomial_content() const {
        if (terms_.empty()) return {};
        Monomial g{UINT_MAX, UINT_MAX};
        for (const auto &[m, c] : terms_) {
            g.x = std::min(g.x, m.x);
            g.y = std::min(g.y, m.y);
        }
        return g;
    }

    MPoly divide_by_monomial(const Monomial &d) const {
        MPoly out;
        for (const auto &[m, c] : terms_) {
            if (!d.divides(m)) throw std::domain_error("monomial does not divide polynomial");
            out.terms_.emplace(Monomial{m.x - d.x, m.y - d.y}, c);
        }
        return out;
    }

    MPoly times_monomial(const Monomial &d) const {
        MPoly out;
        for (const auto &[m, c] : terms_) out.terms_.emplace(Monomial{m.x + d.x, m.y + d.y}, c);
        return out;
    }

    /// Division by a single polynomial in the graded order. The remainder is
    /// the unique normal form of *this modulo d.
    std::pair<MPoly, MPoly> div_rem(const MPoly &d) const {
        if (d.is_zero()) throw std::domain_error("division by zero polynomial");
        auto [lm, lc] = d.leading_term();
        MPoly q, r, p = *this;
        while (!p.is_zero()) {
            auto [pm, pc] = *p.terms_.begin();
            if (lm.divides(pm)) {
                Monomial qm{pm.x - lm.x, pm.y - lm.y};
                Rat qc = pc / lc;
                q.add_term(qm, qc);
                p.sub_scaled_shifted(d, qc, qm);
            } else {
                r.add_term(pm, pc);
                p.terms_.erase(p.terms_.begin());
            }
        }
        return {q, r};
    }

    /// Exact quotient, or nullopt when d does not divide *this.
    std::optional<MPoly> divide_exact(const MPoly &d) const {
        if (d.is_zero()) throw std::domain_error("division by zero polynomial");
        auto [lm, lc] = d.leading_term();
        MPoly q, p = *this;
        while (!p.is_zero()) {
            auto [pm, pc] = *p.terms_.begin();
            if (!lm.divides(pm)) return std::nullopt;
            Monomial qm{pm.x - lm.x, pm.y - lm.y};
            Rat qc = pc / lc;
            q.add_term(qm, qc);
            p.sub_scaled_shifted(d, qc, qm);
        }
        return q;
    }

    /// Scales so the leading coefficient is 1.
    MPoly monic() const {
        if (is_zero()) return *this;
        Rat lc = leading_term().second;
        return *this * Rat(1 / lc);
    }

    /// Canonical text, parseable back by the system parser.
    std::string to_string(std::string_view xn = "x", std::string_view yn = "y") const {
        if (terms_.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (const auto &[m, c] : terms_) {
            Rat a = abs_rat(c);
            if (first) {
                if (c < 0) os << "-";
            } else {
                os << (c < 0 ? " - " : " + ");
            }
            first = false;
            bool unit = a == 1;
            bool wrote = false;
            if (!unit || m.degree() == 0) {
                os << a.get_str();
                wrote = true;
            }
            auto var = [&](std::string_view name, unsigned e) {
                if (e == 0) return;
                if (wrote) os << "*";
                os << name;
                if (e > 1) os << "^" << e;
                wrote = true;
            };
            var(xn, m.x);
            var(yn, m.y);
        }
        return os.str();
    }

  private:
    // *this -= s * x^m.x y^m.y * d
    void sub_scaled_shifted(const MPoly &d, const Rat &s, const Monomial &m) {
        Rat prod;
        for (const auto &[dm, dc] : d.terms_) {
            mpq_mul(prod.get_mpq_t(), dc.get_mpq_t(), s.get_mpq_t());
            mpq_neg(prod.get_mpq_t(), prod.get_mpq_t());
            add_term(Monomial{dm.x + m.x, dm.y + m.y}, prod);
        }
    }

    TermMap terms_;
};

/// Lie derivative X(f) = P f_x + Q f_y.
inline MPoly lie_derivative(const MPoly &p, const MPoly &q, const MPoly &f) {
    return p * f.diff(Var::x) + q * f.diff(Var::y);
}

/// All monomials of total degree <= d, ordered 1, x, y, x^2, xy, y^2, ...
inline std::vector<Monomial> monomials_up_to(unsigned d) {
    std::vector<Monomial> out;
    for (unsigned k = 0; k <= d; ++k)
        for (unsigned j = 0; j <= k; ++j) out.push_back(Monomial{k - j, j});
    return out;
}

} // namespace pdisc
