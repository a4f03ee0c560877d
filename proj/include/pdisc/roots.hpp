#pragma once

#include "upoly.hpp"

#include <algorithm>
#include <optional>
#include <vector>

namespace pdisc {

/// Isolating interval of one real root of a square-free polynomial.
struct RootInterval {
    Rat lo;
    Rat hi;
    unsigned multiplicity_of_squarefree = 1;
    std::optional<Rat> exact;

    Rat mid_value() const {
        Rat m = (lo + hi) / 2;
        return m;
    }
};

/// Default refinement width, 2^-40.
inline Rat default_root_width() {
    Rat w(1);
    w /= Rat(Int(1) << 40);
    return w;
}

class SturmSequence {
  public:
    explicit SturmSequence(const UPoly &p) {
        seq_.push_back(p);
        if (p.degree() <= 0) return;
        seq_.push_back(p.derivative());
        while (true) {
            UPoly r = divmod(seq_[seq_.size() - 2], seq_.back()).second;
            if (r.is_zero()) break;
            seq_.push_back(-r);
        }
    }

    int variations(const Rat &t) const {
        int count = 0;
        int last = 0;
        for (const auto &s : seq_) {
            int sg = s.sign_at(t);
            if (sg == 0) continue;
            if (last != 0 && sg != last) ++count;
            last = sg;
        }
        return count;
    }

    /// Number of distinct real roots in (a, b].
    int count(const Rat &a, const Rat &b) const { return variations(a) - variations(b); }

  private:
    std::vector<UPoly> seq_;
};

/// Cauchy bound: every real root lies in [-B, B].
inline Rat cauchy_bound(const UPoly &p) {
    Rat m(0);
    Rat l = p.lead();
    for (int i = 0; i < p.degree(); ++i) m = std::max(m, abs_rat(p[static_cast<std::size_t>(i)] / l));
    return m + 1;
}

/// Leading coefficient of the primitive integer multiple of p.
inline Int primitive_lead(const UPoly &p) {
    Int l(1);
    for (const auto &c : p.coeffs()) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den().get_mpz_t());
    Int g(0);
    for (const auto &c : p.coeffs()) {
        Int n = c.get_num() * (l / c.get_den());
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), n.get_mpz_t());
    }
    Rat lead = p.lead();
    Int out = lead.get_num() * (l / lead.get_den()) / g;
    return abs(out);
}

/// One bisection step on a sign-changing interval of a square-free polynomial.
/// Returns true when the midpoint hit the root exactly.
inline bool bisect_step(const UPoly &sqf, RootInterval &iv) {
    if (iv.exact) return true;
    Rat m = iv.mid_value();
    int sm = sqf.sign_at(m);
    if (sm == 0) {
        iv.lo = iv.hi = m;
        iv.exact = m;
        return true;
    }
    if (sm == sqf.sign_at(iv.lo)) iv.lo = m;
    else iv.hi = m;
    return false;
}

/// Bisects until hi - lo < width (or the root is found exactly).
inline void refine_root(const UPoly &sqf, RootInterval &iv, const Rat &width = default_root_width()) {
    while (!iv.exact && iv.hi - iv.lo >= width)
        if (bisect_step(sqf, iv)) break;
}

namespace detail {

inline void detect_rational(const UPoly &sqf, RootInterval &iv, const Int &lead) {
    if (iv.exact) return;
    // A rational root p/q of a primitive integer polynomial has q | lead, so
    // lead * root is an integer.
    Rat limit(1, 1);
    limit /= Rat(lead);
    while (!iv.exact && iv.hi - iv.lo >= limit)
        if (bisect_step(sqf, iv)) return;
    if (iv.exact) return;
    Rat scaled_lo = iv.lo * Rat(lead);
    Int k;
    mpz_cdiv_q(k.get_mpz_t(), scaled_lo.get_num().get_mpz_t(), scaled_lo.get_den().get_mpz_t());
    Rat cand(k, lead);
    cand.canonicalize();
    if (cand >= iv.lo && cand <= iv.hi && sqf.sign_at(cand) == 0) {
        iv.lo = iv.hi = cand;
        iv.exact = cand;
    }
}

inline void isolate_in(const UPoly &sqf, const SturmSequence &st, Rat a, Rat b, int n, std::vector<RootInterval> &out) {
    // Invariant: exactly n distinct roots in (a, b].
    if (n <= 0) return;
    if (n == 1) {
        if (sqf.sign_at(b) == 0) {
            out.push_back(RootInterval{b, b, 1, b});
            return;
        }
        while (sqf.sign_at(a) == 0) {
            Rat m = (a + b) / 2;
            if (sqf.sign_at(m) == 0) {
                out.push_back(RootInterval{m, m, 1, m});
                return;
            }
            if (st.count(a, m) == 1) b = m;
            else a = m;
        }
        out.push_back(RootInterval{a, b, 1, std::nullopt});
        return;
    }
    Rat m = (a + b) / 2;
    int left = st.count(a, m);
    isolate_in(sqf, st, a, m, left, out);
    isolate_in(sqf, st, m, b, n - left, out);
}

} // namespace detail

/// Isolates every real root of p inside the closed window [lo, hi]. Roots are
/// isolated on the square-free part; rational roots come back exact; the
/// returned intervals are sorted and pairwise disjoint.
inline std::vector<RootInterval> isolate_real_roots(const UPoly &p, const Rat &lo, const Rat &hi) {
    if (p.is_zero()) throw std::domain_error("isolate_real_roots: zero polynomial");
    std::vector<RootInterval> out;
    UPoly sqf = squarefree_part(p);
    if (sqf.degree() <= 0 || lo > hi) return out;
    SturmSequence st(sqf);
    if (sqf.sign_at(lo) == 0) out.push_back(RootInterval{lo, lo, 1, lo});
    if (lo < hi) detail::isolate_in(sqf, st, lo, hi, st.count(lo, hi), out);

    Int lead = primitive_lead(sqf);
    for (auto &iv : out) detail::detect_rational(sqf, iv, lead);
    // Separate neighbours that still share an endpoint.
    for (std::size_t i = 0; i + 1 < out.size(); ++i) {
        while (out[i].hi >= out[i + 1].lo) {
            bisect_step(sqf, out[i]);
            bisect_step(sqf, out[i + 1]);
        }
    }
    return out;
}

/// All real roots of p.
inline std::vector<RootInterval> isolate_all_real_roots(const UPoly &p) {
    UPoly sqf = squarefree_part(p);
    if (sqf.degree() <= 0) return {};
    Rat b = cauchy_bound(sqf);
    return isolate_real_roots(sqf, -b, b);
}

/// A real algebraic number: the unique root of a square-free polynomial
/// inside an isolating interval, or an exact rational.
struct AlgebraicNumber {
    UPoly poly;
    RootInterval iv;

    static AlgebraicNumber rational(const Rat &r) {
        UPoly p(std::vector<Rat>{Rat(-r), Rat(1)});
        return AlgebraicNumber{p, RootInterval{r, r, 1, r}};
    }

    bool is_exact() const { return iv.exact.has_value(); }
    const Rat &exact() const { return *iv.exact; }
    RatInterval interval() const { return {iv.lo, iv.hi}; }

    void refine(const Rat &width) { refine_root(poly, iv, width); }
    /// Halves the interval once.
    void bisect() { bisect_step(poly, iv); }

    double approx() const {
        if (is_exact()) return exact().get_d();
        return iv.mid_value().get_d();
    }

    /// Sign of the number itself, refining as needed.
    int sign() {
        while (true) {
            if (is_exact()) return sgn(exact());
            if (iv.lo >= 0) return 1;
            if (iv.hi <= 0) return -1;
            bisect();
        }
    }

    std::string to_string() const {
        if (is_exact()) return exact().get_str();
        return "[" + iv.lo.get_str() + ", " + iv.hi.get_str() + "]";
    }
};

} // namespace pdisc
