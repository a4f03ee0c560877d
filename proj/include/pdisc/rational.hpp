#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pdisc {

/// Exact rational number. mpq_class keeps values canonical (lowest terms,
/// positive denominator) after every arithmetic operation.
using Rat = mpq_class;
using Int = mpz_class;

/// Raised for malformed user input (CLI exit code 2).
class InputError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Raised when an exact soundness recheck fails (CLI exit code 3).
class InvariantViolation : public std::logic_error {
  public:
    using std::logic_error::logic_error;
};

inline Rat make_rat(long num, long den = 1) {
    if (den == 0) throw InputError("zero denominator");
    Rat r(num, den);
    r.canonicalize();
    return r;
}

/// Parses "p" or "p/q"; q must be nonzero.
inline Rat parse_rat(std::string_view text) {
    std::string s(text);
    s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
    if (s.empty()) throw InputError("empty rational literal");
    auto slash = s.find('/');
    auto check_int = [](const std::string &part, bool allow_sign) {
        if (part.empty()) return false;
        std::size_t start = 0;
        if (allow_sign && (part[0] == '-' || part[0] == '+')) start = 1;
        if (start == part.size()) return false;
        return std::all_of(part.begin() + static_cast<long>(start), part.end(),
                           [](unsigned char c) { return std::isdigit(c) != 0; });
    };
    std::string num = s.substr(0, slash);
    std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
    if (!check_int(num, true) || !check_int(den, false))
        throw InputError("malformed rational literal '" + std::string(text) + "'");
    if (num[0] == '+') num.erase(0, 1);
    Int n(num), d(den);
    if (d == 0) throw InputError("zero denominator in rational literal '" + std::string(text) + "'");
    Rat r(n, d);
    r.canonicalize();
    return r;
}

inline std::string to_string(const Rat &r) { return r.get_str(); }

inline int sign(const Rat &r) { return sgn(r); }

inline Rat abs_rat(const Rat &r) { return r < 0 ? Rat(-r) : r; }

inline double to_double(const Rat &r) { return r.get_d(); }

/// Exact square root when r is the square of a rational.
inline std::optional<Rat> exact_sqrt(const Rat &r) {
    if (r < 0) return std::nullopt;
    const Int &n = r.get_num();
    const Int &d = r.get_den();
    if (mpz_perfect_square_p(n.get_mpz_t()) == 0 || mpz_perfect_square_p(d.get_mpz_t()) == 0)
        return std::nullopt;
    Int sn = sqrt(n);
    Int sd = sqrt(d);
    Rat out(sn, sd);
    out.canonicalize();
    return out;
}

inline Rat pow_rat(const Rat &base, unsigned e) {
    Rat out(1);
    for (unsigned i = 0; i < e; ++i) out *= base;
    return out;
}

/// Closed interval with rational endpoints, lo <= hi.
struct RatInterval {
    Rat lo;
    Rat hi;

    static RatInterval point(const Rat &r) { return {r, r}; }

    bool contains_zero() const { return lo <= 0 && hi >= 0; }
    bool is_point() const { return lo == hi; }
    Rat width() const { return hi - lo; }
    Rat mid() const {
        Rat m = (lo + hi) / 2;
        return m;
    }
    /// +1 / -1 when the whole interval has that sign, 0 when it is exactly {0},
    /// nullopt when undecided.
    std::optional<int> certain_sign() const {
        if (lo > 0) return 1;
        if (hi < 0) return -1;
        if (lo == 0 && hi == 0) return 0;
        return std::nullopt;
    }
};

inline RatInterval operator+(const RatInterval &a, const RatInterval &b) { return {a.lo + b.lo, a.hi + b.hi}; }
inline RatInterval operator-(const RatInterval &a, const RatInterval &b) { return {a.lo - b.hi, a.hi - b.lo}; }
inline RatInterval operator-(const RatInterval &a) { return {-a.hi, -a.lo}; }

inline RatInterval operator*(const RatInterval &a, const RatInterval &b) {
    Rat c[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
    return {*std::min_element(c, c + 4), *std::max_element(c, c + 4)};
}

inline RatInterval operator*(const Rat &s, const RatInterval &a) {
    if (s >= 0) return {s * a.lo, s * a.hi};
    return {s * a.hi, s * a.lo};
}

inline RatInterval pow(const RatInterval &a, unsigned e) {
    if (e == 0) return RatInterval::point(Rat(1));
    Rat plo = pow_rat(a.lo, e);
    Rat phi = pow_rat(a.hi, e);
    if (e % 2 == 1) return {plo, phi};
    if (a.lo >= 0) return {plo, phi};
    if (a.hi <= 0) return {phi, plo};
    return {Rat(0), std::max(plo, phi)};
}

} // namespace pdisc
