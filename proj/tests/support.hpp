#pragma once

#include <doctest.h>

#include "walsh3/random.hpp"
#include "walsh3/step_function.hpp"

namespace walsh3::test {

inline WalshPoint random_point(Rng& rng, int lo, int hi) {
    std::map<int, int> d;
    for (int n = lo; n <= hi; ++n) d[n] = static_cast<int>(rng() % 3);
    return WalshPoint::from_digits(d);
}

// f̂ on the dual grid by summing conj(e_ξ(x)) over cells, with characters
// taken from WalshPoint arithmetic rather than grid indices.
inline StepFunction oracle_wft(const StepFunction& f) {
    StepFunction g(f.space(), f.support(), f.fine());
    const double w = f.cell_width();
    for (std::size_t d = 0; d < g.cells(); ++d) {
        const WalshPoint xi = g.cell_point(d);
        for (std::size_t c = 0; c < f.cells(); ++c) {
            const cplx e = std::conj(character(xi, f.cell_point(c))) * w;
            for (int k = 0; k < f.dim(); ++k) g.at(d, k) += f.at(c, k) * e;
        }
    }
    return g;
}

inline double diff(const Vec& a, const Vec& b) { return (a - b).cwiseAbs().maxCoeff(); }

} // namespace walsh3::test
