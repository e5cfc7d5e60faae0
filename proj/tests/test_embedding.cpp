#include "support.hpp"

#include "walsh3/embedding.hpp"

using namespace walsh3;
using namespace walsh3::test;

namespace {

// w_P from WalshPoint characters, evaluated cell by cell.
StepFunction oracle_packet(const Tile& P, int fine, int support) {
    StepFunction w(BanachSpace::scalar(), fine, support);
    for (std::size_t c = 0; c < w.cells(); ++c) {
        const auto x = w.cell_point(c);
        if (P.time.contains(x)) w.at(c) = character(P.frequency(), x) / P.time.length();
    }
    return w;
}

Tile random_tile(Rng& rng, int fine, int support) {
    const int s = -fine + static_cast<int>(rng() % static_cast<std::uint64_t>(fine + support + 1));
    return {{s, static_cast<std::int64_t>(rng() % ipow(3, support - s))},
            {-s, static_cast<std::int64_t>(rng() % ipow(3, fine + s))}};
}

// Disjoint cover of P by monotone time refinement or frequency refinement.
void random_cover(const Tile& P, Rng& rng, int dir, int budget, std::vector<Tile>& out) {
    if (budget == 0 || rng() % 3 == 0) {
        out.push_back(P);
        return;
    }
    if (dir == 0) {
        for (const auto& J : P.time.children()) random_cover({J, P.freq.parent()}, rng, dir, budget - 1, out);
    } else {
        for (const auto& w : P.freq.children()) random_cover({P.time.parent(), w}, rng, dir, budget - 1, out);
    }
}

TritileMask complement(TritileMask m) {
    for (auto& b : m) b = !b;
    return m;
}

TritileMask intersect(TritileMask a, const TritileMask& b) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = a[i] && b[i];
    return a;
}

TritileMask random_convex(const Truncation& plane, Rng& rng) {
    const Tree T(plane, random_tritile(plane, rng));
    const Strip D(plane, random_tritile(plane, rng).time);
    const Tree T2(plane, random_tritile(plane, rng));
    switch (rng() % 6) {
    case 0: return T.mask();
    case 1: return D.mask();
    case 2: return complement(T.mask());
    case 3: return intersect(D.mask(), complement(T.mask()));
    case 4: return intersect(complement(T2.mask()), complement(T.mask()));
    default: return plane.full_mask();
    }
}

} // namespace

TEST_SUITE("embedding") {

TEST_CASE("wave packets") {
    const auto w0 = wave_packet({{0, 0}, {0, 0}}, 1, 1);
    CHECK(max_abs_diff(w0, StepFunction::indicator({0, 0}, 1, 1)) == 0.0);
    const auto w1 = wave_packet({{0, 0}, {0, 1}}, 1, 0);
    for (int c = 0; c < 3; ++c) CHECK(std::abs(w1.at(static_cast<std::size_t>(c)) - root_of_unity(c)) < 1e-15);
    CHECK_THROWS_AS(wave_packet({{-2, 0}, {2, 0}}, 1, 1), GridError);

    Rng rng(1);
    for (int t = 0; t < 100; ++t) {
        const Tile P = random_tile(rng, 2, 2);
        const auto w = wave_packet(P, 2, 2);
        CHECK(max_abs_diff(w, oracle_packet(P, 2, 2)) < 1e-12);
        CHECK(lp_norm(w, 1) == doctest::Approx(1.0));
        const auto wh = wft(w);
        for (std::size_t c = 0; c < wh.cells(); ++c) {
            const double expect = P.freq.contains(wh.cell_point(c)) ? 1.0 : 0.0;
            CHECK(std::abs(std::abs(wh.at(c)) - expect) < 1e-12);
        }
        for (std::size_t c = 0; c < w.cells(); ++c) {
            if (!P.time.contains(w.cell_point(c))) CHECK(w.at(c) == 0.0);
        }
    }
    WavePacketCache cache;
    const Tile P{{0, 1}, {0, 2}};
    CHECK(cache.get(P, 1, 1) == cache.get(P, 1, 1));
    CHECK(cache.size() == 1);
}

TEST_CASE("packet inner products and orthogonality") {
    Rng rng(2);
    for (int t = 0; t < 400; ++t) {
        const Tile P = random_tile(rng, 2, 1), Q = random_tile(rng, 2, 1);
        const cplx direct = inner(oracle_packet(P, 2, 1), oracle_packet(Q, 2, 1));
        CHECK(std::abs(packet_inner(P, Q) - direct) < 1e-12);
        if (tiles_disjoint(P, Q)) CHECK(std::abs(packet_inner(P, Q)) < 1e-12);
        else CHECK(std::abs(packet_inner(P, Q)) > 1e-12);
    }
}

TEST_CASE("packet coefficients") {
    Rng rng(3);
    for (int t = 0; t < 100; ++t) {
        const auto f = random_step_function(BanachSpace::sequence(3, 2), 2, 1, rng);
        const Tile P = random_tile(rng, 2, 2);
        const Vec c = packet_coefficient(f, P);
        const Vec expect = pairing(f.regrid(2, 2), oracle_packet(P, 2, 2));
        CHECK(diff(c, expect) < 1e-12);
    }
}

TEST_CASE("embedding") {
    const Truncation plane(2, 1);
    const auto one = StepFunction::indicator({0, 0}, 2, 1);
    const auto E = embed(one, plane);
    const auto idx = *plane.index(Tritile{{0, 0}, {1, 0}});
    CHECK(std::abs(E.value(idx, 0)[0] - 1.0) < 1e-12);
    CHECK(std::abs(E.value(idx, 1)[0]) < 1e-12);
    CHECK(std::abs(E.value(idx, 2)[0]) < 1e-12);

    const Tritile P{{0, 1}, {1, 0}};
    const auto wp = wave_packet(P.subtile(1), 2, 1);
    const auto Ew = embed(wp, plane);
    CHECK(std::abs(Ew.value(*plane.index(P), 1)[0] - 1.0 / P.time.length()) < 1e-12);

    CHECK(embed(StepFunction(BanachSpace::scalar(), 2, 1), plane).support().empty());

    Rng rng(4);
    for (int t = 0; t < 30; ++t) {
        const int N = 1 + static_cast<int>(rng() % 2), M = static_cast<int>(rng() % 2);
        const Truncation pl(N, M);
        const int Nf = N + static_cast<int>(rng() % 2);
        const auto f = random_step_function(t % 2 ? BanachSpace::scalar() : BanachSpace::sequence(4, 2), Nf, M, rng);
        const auto F = embed(f, pl);
        for (std::size_t i = 0; i < pl.size(); ++i) {
            for (int u = 0; u < 3; ++u) {
                const Tile Pu = pl[i].subtile(u);
                CHECK(diff(F.value(i, u), pairing(f, oracle_packet(Pu, Nf, M))) < 1e-12);
            }
        }
    }
    CHECK_THROWS_AS(embed(StepFunction(BanachSpace::scalar(), 1, 1), Truncation(2, 1)), GridError);
}

TEST_CASE("modulation covariance up to a unimodular factor") {
    Rng rng(5);
    const int N = 2, M = 1;
    const Truncation plane(N, M);
    for (int t = 0; t < 20; ++t) {
        const auto f = random_step_function(BanachSpace::scalar(), N, M, rng);
        const auto xi = WalshPoint::from_grid(static_cast<std::int64_t>(rng() % ipow(3, N + M)), -M);
        const auto Ef = embed(f, plane), Em = embed(modulate(xi, f), plane);
        for (std::size_t i = 0; i < plane.size(); ++i) {
            for (int u = 0; u < 3; ++u) {
                const Tile Pu = plane[i].subtile(u);
                const auto zeta = Pu.frequency() - xi;
                const auto off = static_cast<std::int64_t>(std::floor(zeta.to_real() / Pu.freq.length() + 1e-9));
                const Tile Q{Pu.time, {Pu.freq.scale, off}};
                CHECK(std::abs(std::abs(Em.value(i, u)[0]) - std::abs(Ef.tile_value(Q)[0])) < 1e-12);
            }
        }
    }
}

TEST_CASE("basis expansion of wave packets") {
    Rng rng(6);
    for (int t = 0; t < 200; ++t) {
        const Tile P = random_tile(rng, 1, 1);
        std::vector<Tile> cover;
        random_cover(P, rng, static_cast<int>(rng() % 2), 2, cover);
        const auto coeffs = expand_wave_packet(P, cover);
        const int fine = 4, support = 4;
        StepFunction sum(BanachSpace::scalar(), fine, support);
        for (const auto& [Q, c] : coeffs) sum += c * oracle_packet(Q, fine, support);
        CHECK(max_abs_diff(sum, oracle_packet(P, fine, support)) < 1e-10);
    }
    const Tile P{{1, 0}, {-1, 0}};
    const std::vector<Tile> self{P};
    CHECK(std::abs(expand_wave_packet(P, self)[0].second - 1.0) < 1e-15);
    const std::vector<Tile> kids{Tile{{0, 0}, {0, 0}}, Tile{{0, 1}, {0, 0}}, Tile{{0, 2}, {0, 0}}};
    for (const auto& [Q, c] : expand_wave_packet(P, kids)) CHECK(std::abs(c) == doctest::Approx(1.0 / 3));
    const std::vector<Tile> overlap{P, Tile{{0, 0}, {0, 0}}};
    CHECK_THROWS(expand_wave_packet(P, overlap));
    const std::vector<Tile> partial{Tile{{0, 0}, {0, 0}}};
    CHECK_THROWS(expand_wave_packet(P, partial));
    const std::vector<Tile> extra{P, Tile{{0, 5}, {0, 0}}};
    const auto e = expand_wave_packet(P, extra);
    CHECK(e[1].second == 0.0);
}

TEST_CASE("defect of embedded functions") {
    Rng rng(7);
    for (int t = 0; t < 40; ++t) {
        const Truncation plane(1 + static_cast<int>(rng() % 2), static_cast<int>(rng() % 2) + 1);
        const auto f = random_step_function(BanachSpace::sequence(3, 2), plane.fine() + 1, plane.ambient(), rng);
        const auto F = embed(f, plane);
        const auto D = defect(F);
        for (std::size_t i = 0; i < plane.size(); ++i) {
            for (int u = 0; u < 3; ++u) {
                if (plane[i].scale() == plane.min_scale()) CHECK(diff(D.value(i, u), F.value(i, u)) == 0.0);
                else CHECK(D.value(i, u).norm() < 1e-10);
            }
        }
    }
    // Single tritile support with zero children.
    const Truncation plane(1, 1);
    TileFunction F(plane, BanachSpace::scalar());
    const auto idx = *plane.index(Tritile{{1, 0}, {0, 0}});
    F.value(idx, 2)[0] = 2.0;
    CHECK(std::abs(defect_at(F, idx, 2)[0] - 2.0) < 1e-15);
}

TEST_CASE("defect of a convex restriction lives on the boundary") {
    Rng rng(8);
    const Truncation plane(2, 2);
    for (int t = 0; t < 60; ++t) {
        const auto f = random_step_function(BanachSpace::scalar(), 2, 2, rng);
        const auto A = random_convex(plane, rng);
        const auto D = defect(embed(f, plane).restricted(A));
        std::vector<std::uint8_t> boundary(plane.size(), 0);
        for (std::size_t i = 0; i < plane.size(); ++i) {
            for (auto q : plane.predecessors(i)) boundary[i] |= A[i] != A[q];
            if (!boundary[i] && plane[i].scale() > plane.min_scale()) CHECK(D.triple_norm(i) < 1e-10);
        }
        const Tree T(plane, random_tritile(plane, rng));
        for (std::int64_t x = 0; x < 9 * 9; ++x) {
            const auto pt = WalshPoint::from_grid(x, -2);
            int count = 0;
            for (auto i : T.members()) count += boundary[i] && plane[i].time.contains(pt);
            CHECK(count <= 2);
        }
    }
}

TEST_CASE("reconstruction from defects") {
    Rng rng(9);
    for (int t = 0; t < 60; ++t) {
        const Truncation plane(3, static_cast<int>(rng() % 2));
        const auto F = random_tile_function(plane, BanachSpace::sequence(2, 2), rng);
        const auto top = plane[plane.scale_range(plane.max_scale()).first + rng() % plane.per_scale()];
        const Tree T(plane, top);
        const auto members = T.members();
        const auto pidx = members[rng() % members.size()];
        const Tile P = plane[pidx].subtile(static_cast<int>(rng() % 3));
        const int maxdepth = P.time.scale - plane.min_scale() - 1;
        for (int depth = 0; depth <= maxdepth; ++depth) CHECK(diff(reconstruct(F, T, P, depth), F.tile_value(P)) < 1e-9);
        CHECK_THROWS(reconstruct(F, T, P, maxdepth + 1));
    }
}

TEST_CASE("convex projection") {
    Rng rng(10);
    const Truncation plane(2, 1);
    const auto f = random_step_function(BanachSpace::scalar(), 2, 1, rng);
    const Tree T(plane, Tritile{{1, 0}, {0, 1}});
    {
        const auto g = convex_project(f, T, complement(T.mask()));
        CHECK(lp_norm(g.g, kInf) == 0.0);
        CHECK(g.packets.empty());
    }
    {
        TritileMask single = plane.empty_mask();
        single[*plane.index(T.top())] = 1;
        const auto g = convex_project(f, T, single);
        CHECK(g.packets.size() == 3);
        for (const auto& Q : g.packets) CHECK(Q.time.scale == 0);
        const auto Eg = embed(g.g, plane), Ef = embed(f, plane);
        CHECK(diff(Eg.value(*plane.index(T.top()), 0), Ef.value(*plane.index(T.top()), 0)) < 1e-9);
    }
    double worst = 0;
    for (int t = 0; t < 100; ++t) {
        const Truncation pl(1 + static_cast<int>(rng() % 2), 1 + static_cast<int>(rng() % 2));
        const auto h = random_step_function(BanachSpace::scalar(), pl.fine(), pl.ambient(), rng);
        const Tree Tr(pl, random_tritile(pl, rng));
        const auto A = random_convex(pl, rng);
        const auto g = convex_project(h, Tr, A);
        const auto Eg = embed(g.g, pl), Eh = embed(h, pl);
        for (auto i : Tr.members()) {
            if (!A[i]) continue;
            for (int u = 0; u < 3; ++u) CHECK(diff(Eg.value(i, u), Eh.value(i, u)) < 1e-9);
        }
        for (std::size_t c = 0; c < g.g.cells(); ++c) {
            if (!Tr.top().time.contains(g.g.cell_point(c))) CHECK(g.g.at(c) == 0.0);
        }
        worst = std::max(worst, g.ratio);
    }
    MESSAGE("convex projection sup ratio " << worst);
    CHECK(worst < 10.0);
    TritileMask gap = plane.empty_mask();
    gap[*plane.index(Tritile{{-1, 0}, {2, 0}})] = 1;
    gap[*plane.index(Tritile{{1, 0}, {0, 0}})] = 1;
    CHECK_THROWS(convex_project(f, Tree(plane, Tritile{{1, 0}, {0, 0}}), gap));
}

}
