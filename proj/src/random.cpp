#include "walsh3/random.hpp"

namespace walsh3 {

std::uint64_t trial_seed(std::uint64_t master, std::uint64_t trial) {
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (trial + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

cplx random_gaussian(Rng& rng) {
    // Box-Muller on raw 53-bit uniforms keeps results identical across standard libraries.
    auto uniform = [&] { return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53; };
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double t = 6.283185307179586 * uniform();
    return {r * std::cos(t) / std::sqrt(2.0), r * std::sin(t) / std::sqrt(2.0)};
}

Vec random_vector(const BanachSpace& space, Rng& rng) {
    Vec v(space.dim());
    for (int i = 0; i < v.size(); ++i) v[i] = random_gaussian(rng);
    return v;
}

StepFunction random_step_function(const BanachSpace& space, int fine, int support, Rng& rng, double sparsity) {
    StepFunction f(space, fine, support);
    for (std::size_t c = 0; c < f.cells(); ++c) {
        const bool zero = sparsity > 0.0 && static_cast<double>(rng() >> 11) * 0x1.0p-53 < sparsity;
        for (int k = 0; k < f.dim(); ++k) {
            const cplx z = random_gaussian(rng);
            f.at(c, k) = zero ? cplx{} : z;
        }
    }
    return f;
}

TileFunction random_tile_function(const Truncation& plane, const BanachSpace& space, Rng& rng, double density) {
    TileFunction F(plane, space);
    for (std::size_t i = 0; i < plane.size(); ++i) {
        const bool keep = density >= 1.0 || static_cast<double>(rng() >> 11) * 0x1.0p-53 < density;
        for (int u = 0; u < 3; ++u) {
            const Vec v = random_vector(space, rng);
            if (keep) F.value(i, u) = v;
        }
    }
    return F;
}

Tritile random_tritile(const Truncation& plane, Rng& rng) { return plane[rng() % plane.size()]; }

} // namespace walsh3
