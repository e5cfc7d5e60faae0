#include "walsh3/randomized.hpp"

#include <cmath>
#include <stdexcept>

namespace walsh3 {

double tile_type_ratio(const StepFunction& f, std::span<const Tile> A, double r) {
    if (!(r >= 1.0) || std::isinf(r)) throw std::invalid_argument("tile_type_ratio: r must be finite and >= 1");
    for (std::size_t i = 0; i < A.size(); ++i) {
        for (std::size_t j = i + 1; j < A.size(); ++j) {
            if (!tiles_disjoint(A[i], A[j])) throw std::invalid_argument("tile_type_ratio: tiles not pairwise disjoint");
        }
    }
    const double den = lp_norm(f, r);
    if (den == 0.0) return 0.0;
    double s = 0.0;
    for (const auto& P : A) s += std::pow(f.space().norm(packet_coefficient(f, P)), r) * P.time.length();
    return std::pow(s, 1.0 / r) / den;
}

std::vector<Tile> lacunary_tiles(const Tree& T) {
    std::vector<Tile> out;
    for (auto i : T.members()) {
        const Tritile P = T.plane()[i];
        const int c = T.component_of(i);
        for (int v = 0; v < 3; ++v) {
            if (v != c) out.push_back(P.subtile(v));
        }
    }
    return out;
}

double lacunary_projection_ratio(const Tree& T, const StepFunction& f, double p, const RademacherSampler& sampler) {
    if (!(p >= 1.0) || std::isinf(p)) throw std::invalid_argument("lacunary_projection_ratio: p must be finite and >= 1");
    const TriadicInterval IT = T.top().time;
    for (std::size_t c = 0; c < f.cells(); ++c) {
        if (!IT.contains(f.cell_point(c)) && f.value(c).norm() != 0.0)
            throw std::invalid_argument("lacunary_projection_ratio: f not supported in the tree's interval");
    }
    const double den = lp_norm(f, p);
    if (den == 0.0) return 0.0;

    const auto tiles = lacunary_tiles(T);
    const int fine = std::max(f.fine(), -T.plane().min_scale() + 1);
    const int support = std::max(f.support(), IT.scale);
    const StepFunction g = f.regrid(fine, support);
    std::vector<Vec> coeff;
    coeff.reserve(tiles.size());
    for (const auto& P : tiles) coeff.push_back(packet_coefficient(g, P));

    // Per cell of I_T, the terms c_P w_P(x)|I_P| from lacunary tiles over x.
    double total = 0.0;
    const auto n = ipow(kRadix, IT.scale + fine);
    std::vector<Vec> terms;
    for (std::int64_t c = IT.offset * n; c < (IT.offset + 1) * n; ++c) {
        terms.clear();
        for (std::size_t k = 0; k < tiles.size(); ++k) {
            const Tile& P = tiles[k];
            const auto per = ipow(kRadix, P.time.scale + fine);
            if (c / per != P.time.offset || coeff[k].norm() == 0.0) continue;
            const int e = grid_character_exponent(c, -fine, P.freq.offset, P.freq.scale);
            terms.push_back(root_of_unity(e) * coeff[k]);
        }
        if (terms.empty()) continue;
        total += std::pow(rademacher_moment(terms, g.space(), p, sampler).value, p);
    }
    return std::pow(total * g.cell_width(), 1.0 / p) / den;
}

StepFunction rademacher_maximal(const TrilinearForm& pi, int u, const StepFunction& f, const TriadicInterval& ambient,
                                const RBoundBudget& budget) {
    if (!(f.space() == pi.space(u))) throw std::invalid_argument("rademacher_maximal: space does not match the form slot");
    int support = f.support();
    while (!TriadicInterval{support, 0}.contains(ambient)) ++support;
    const int fine = std::max(f.fine(), -ambient.scale);
    const StepFunction g = f.regrid(fine, support);
    StepFunction out(BanachSpace::scalar(), fine, support);
    const auto n = ipow(kRadix, ambient.scale + fine);
    std::vector<Vec> V;
    for (std::int64_t c = ambient.offset * n; c < (ambient.offset + 1) * n; ++c) {
        V.clear();
        for (int s = -fine; s <= ambient.scale; ++s) {
            const TriadicInterval I{s, c / ipow(kRadix, s + fine)};
            V.push_back(average(g, I));
        }
        out.at(static_cast<std::size_t>(c)) = r_bound_estimate(pi, u, V, budget).lower;
    }
    return out;
}

} // namespace walsh3
