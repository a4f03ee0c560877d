#pragma once

#include <pdisc/mpoly.hpp>

#include <random>

namespace pdisc::testing {

inline Rat random_rat(std::mt19937_64 &rng, long span = 9) {
    std::uniform_int_distribution<long> num(-span, span);
    std::uniform_int_distribution<long> den(1, 5);
    return make_rat(num(rng), den(rng));
}

inline MPoly random_poly(std::mt19937_64 &rng, unsigned max_degree = 3, unsigned terms = 5) {
    std::uniform_int_distribution<unsigned> deg(0, max_degree);
    MPoly p;
    for (unsigned t = 0; t < terms; ++t) {
        unsigned total = deg(rng);
        std::uniform_int_distribution<unsigned> split(0, total);
        unsigned i = split(rng);
        p.add_term(Monomial{i, total - i}, random_rat(rng));
    }
    return p;
}

inline MPoly random_nonzero_poly(std::mt19937_64 &rng, unsigned max_degree = 3, unsigned terms = 5) {
    MPoly p;
    while (p.is_zero()) p = random_poly(rng, max_degree, terms);
    return p;
}

} // namespace pdisc::testing
