#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "walsh3/outer.hpp"

using namespace walsh3;
using namespace walsh3::test;

namespace {

TritileMask random_set(const Truncation& plane, Rng& rng, std::size_t n) {
    TritileMask A = plane.empty_mask();
    for (std::size_t k = 0; k < n; ++k) A[rng() % plane.size()] = 1;
    return A;
}

std::vector<double> random_scalar(const Truncation& plane, Rng& rng, std::size_t n) {
    std::vector<double> h(plane.size(), 0.0);
    for (std::size_t k = 0; k < n; ++k) h[rng() % plane.size()] = 0.1 + static_cast<double>(rng() % 1000) / 100.0;
    return h;
}

// Exhaustive cover search over every subset of generators that meet A.
double brute_cover(const OuterStructure& E, const TritileMask& A) {
    std::set<std::size_t> gens;
    for (std::size_t i = 0; i < A.size(); ++i) {
        if (A[i]) gens.insert(E.covering(i).begin(), E.covering(i).end());
    }
    const std::vector<std::size_t> G(gens.begin(), gens.end());
    REQUIRE(G.size() <= 20);
    double best = kInf;
    for (std::uint32_t m = 0; m < (1U << G.size()); ++m) {
        TritileMask c(A.size(), 0);
        double cost = 0.0;
        for (std::size_t b = 0; b < G.size(); ++b) {
            if (m >> b & 1U) {
                cost += E.premeasure(G[b]);
                for (auto i : E.members(G[b])) c[i] = 1;
            }
        }
        bool ok = true;
        for (std::size_t i = 0; i < A.size(); ++i) ok = ok && (!A[i] || c[i]);
        if (ok) best = std::min(best, cost);
    }
    return best;
}

// S^∞ with the closed form switched off, to exercise the enumerations.
class PlainSup : public Size {
public:
    PlainSup(StructurePtr E, std::vector<double> h) : Size(std::move(E)), inner_(structure_ptr(), ScalarSizeKind::Sinf, std::move(h)) {}
    double evaluate(std::size_t g, const TritileMask& keep) const override { return inner_.evaluate(g, keep); }
    const std::vector<std::size_t>& support() const override { return inner_.support(); }
    std::vector<double> magnitudes() const override { return inner_.magnitudes(); }
    bool monotone() const override { return true; }
    std::string name() const override { return "plain"; }

private:
    ScalarSize inner_;
};

// S^1 on a tree from its definition, without the structure tables.
double oracle_s1(const Truncation& plane, const Tritile& top, const std::vector<double>& h, const TritileMask& keep) {
    double s = 0.0;
    for (std::size_t i = 0; i < plane.size(); ++i) {
        if (keep[i] && tritile_leq(plane[i], top)) s += h[i] * plane[i].time.length();
    }
    return s / top.time.length();
}

} // namespace

TEST_SUITE("outer") {

TEST_CASE("structures") {
    const Truncation plane(2, 1);
    auto T = make_structure(plane, Family::Trees);
    auto D = make_structure(plane, Family::Strips);
    CHECK(T->size() == plane.size());
    CHECK(D->size() == 13);
    for (std::size_t g = 0; g < T->size(); ++g) {
        Tree tree(plane, plane[g]);
        CHECK(std::equal(tree.members().begin(), tree.members().end(), T->members(g).begin(), T->members(g).end()));
    }
    for (std::size_t i = 0; i < plane.size(); ++i) {
        for (auto g : D->covering(i)) CHECK(D->interval(g).contains(plane[i].time));
    }
    CHECK(D->strip_index({1, 0}).has_value());
    CHECK_FALSE(D->strip_index({2, 0}).has_value());
}

TEST_CASE("outer measure of trees and strips") {
    const Truncation plane(2, 1);
    for (auto fam : {Family::Trees, Family::Strips}) {
        auto E = make_structure(plane, fam);
        CHECK(outer_measure(*E, plane.empty_mask()).value == 0.0);
        for (std::size_t g = 0; g < E->size(); ++g) {
            TritileMask A = plane.empty_mask();
            for (auto i : E->members(g)) A[i] = 1;
            CHECK(outer_measure(*E, A).value == doctest::Approx(E->premeasure(g)).epsilon(1e-12));
            CHECK(outer_measure(*E, A, Mode::Greedy).value == doctest::Approx(E->premeasure(g)).epsilon(1e-12));
        }
    }
    auto E = make_structure(plane, Family::Trees);
    Tree a(plane, {{0, 0}, {1, 1}}), b(plane, {{0, 2}, {1, 0}});
    TritileMask A = a.mask();
    for (auto i : b.members()) A[i] = 1;
    CHECK(outer_measure(*E, A).value == doctest::Approx(2.0));
}

TEST_CASE("branch and bound against brute force and closed form") {
    Rng rng(11);
    for (auto fam : {Family::Trees, Family::Strips}) {
        for (auto [N, M] : {std::pair{2, 1}, std::pair{1, 2}, std::pair{2, 2}}) {
            const Truncation plane(N, M);
            auto E = make_structure(plane, fam);
            for (int t = 0; t < 40; ++t) {
                const auto A = random_set(plane, rng, 1 + rng() % 6);
                const auto ex = outer_measure(*E, A);
                CHECK(ex.exact);
                CHECK(ex.value == doctest::Approx(outer_measure_closed_form(*E, A)).epsilon(1e-12));
                std::set<std::size_t> gens;
                for (std::size_t i = 0; i < A.size(); ++i) {
                    if (A[i]) gens.insert(E->covering(i).begin(), E->covering(i).end());
                }
                if (gens.size() <= 16) CHECK(ex.value == doctest::Approx(brute_cover(*E, A)).epsilon(1e-12));
                TritileMask covered(A.size(), 0);
                for (auto g : ex.cover) {
                    for (auto i : E->members(g)) covered[i] = 1;
                }
                for (std::size_t i = 0; i < A.size(); ++i) CHECK((!A[i] || covered[i]));
            }
        }
    }
}

TEST_CASE("greedy cover, monotonicity, subadditivity") {
    Rng rng(12);
    const Truncation plane(2, 2);
    for (auto fam : {Family::Trees, Family::Strips}) {
        auto E = make_structure(plane, fam);
        double worst = 0.0;
        for (int t = 0; t < 150; ++t) {
            const auto A = random_set(plane, rng, 1 + rng() % 20);
            const auto B = random_set(plane, rng, 1 + rng() % 8);
            TritileMask AB = A;
            for (std::size_t i = 0; i < AB.size(); ++i) AB[i] |= B[i];
            const double a = outer_measure(*E, A).value, b = outer_measure(*E, B).value, ab = outer_measure(*E, AB).value;
            const double g = outer_measure(*E, A, Mode::Greedy).value;
            CHECK(g >= a - 1e-12);
            worst = std::max(worst, g / a);
            CHECK(a <= ab + 1e-12);
            CHECK(ab <= a + b + 1e-12);
        }
        CHECK(worst <= 4.0);
    }
}

TEST_CASE("single tritile superlevel and layer cake") {
    const Truncation plane(2, 1);
    const Tritile P{{0, 1}, {1, 2}};
    std::vector<double> h(plane.size(), 0.0);
    h[*plane.index(P)] = 5.0;
    for (auto fam : {Family::Trees, Family::Strips}) {
        auto E = make_structure(plane, fam);
        ScalarSize S(E, ScalarSizeKind::Sinf, h);
        PlainSup Q(E, h);
        for (const Size* s : {static_cast<const Size*>(&S), static_cast<const Size*>(&Q)}) {
            CHECK(superlevel(*s, 2.0) == doctest::Approx(1.0));
            CHECK(superlevel(*s, 6.0) == 0.0);
            CHECK(superlevel(*s, 5.0) == 0.0);
            for (double p : {1.0, 2.0, 3.5}) {
                const auto q = outer_lp(*s, p);
                CHECK(q.value == doctest::Approx(5.0));
                CHECK(q.lower <= q.value + 1e-12);
                CHECK(q.upper >= q.value - 1e-12);
            }
            CHECK(outer_lp_weak(*s, 2.0).value == doctest::Approx(5.0));
            CHECK(outer_linf(*s) == 5.0);
        }
    }
    const Tritile R{{-1, 1}, {2, 0}};
    std::vector<double> g(plane.size(), 0.0);
    g[*plane.index(R)] = 2.0;
    ScalarSize S(make_structure(plane, Family::Trees), ScalarSizeKind::Sinf, g);
    CHECK(std::pow(outer_lp(S, 3.0).value, 3.0) == doctest::Approx(8.0 / 3.0));
    ScalarSize Z(make_structure(plane, Family::Trees), ScalarSizeKind::S1, std::vector<double>(plane.size(), 0.0));
    CHECK(outer_lp(Z, 2.0).value == 0.0);
    CHECK(superlevel(Z, 1.0) == 0.0);
}

TEST_CASE("sup-size closed form agrees with enumeration") {
    Rng rng(13);
    for (auto fam : {Family::Trees, Family::Strips}) {
        for (int t = 0; t < 60; ++t) {
            const Truncation plane(2, 1 + static_cast<int>(t % 2));
            auto E = make_structure(plane, fam);
            const auto h = random_scalar(plane, rng, 1 + rng() % 8);
            ScalarSize S(E, ScalarSizeKind::Sinf, h);
            PlainSup Q(E, h);
            SuperlevelOptions ex;
            ex.mode = Mode::Exact;
            const auto a = superlevel_measure(S);
            const auto b = superlevel_measure(Q, ex);
            CHECK(b.mode == "exact");
            for (double lam = 0.0; lam < 11.0; lam += 0.05) CHECK(a(lam) == doctest::Approx(b(lam)).epsilon(1e-12));
            for (double p : {1.0, 2.5}) CHECK(outer_lp(S, p).value == doctest::Approx(outer_lp(Q, p, ex).value));
            const auto g = superlevel_measure(Q, SuperlevelOptions{Mode::Greedy});
            for (double lam = 0.0; lam < 11.0; lam += 0.05) CHECK(g(lam) >= a(lam) - 1e-12);
        }
    }
}

TEST_CASE("exact superlevel of S1 against an independent oracle") {
    Rng rng(14);
    const Truncation plane(2, 1);
    auto E = make_structure(plane, Family::Trees);
    for (int t = 0; t < 25; ++t) {
        const auto h = random_scalar(plane, rng, 1 + rng() % 6);
        ScalarSize S(E, ScalarSizeKind::S1, h);
        const auto m = superlevel_measure(S, SuperlevelOptions{Mode::Exact});
        const auto& supp = S.support();
        for (double lam : {0.0, 0.3, 1.0, 2.0, 4.0, 9.0}) {
            double best = kInf;
            for (std::uint32_t k = 0; k < (1U << supp.size()); ++k) {
                TritileMask keep = plane.full_mask(), K = plane.empty_mask();
                for (std::size_t b = 0; b < supp.size(); ++b) {
                    if (k >> b & 1U) {
                        keep[supp[b]] = 0;
                        K[supp[b]] = 1;
                    }
                }
                double level = 0.0;
                for (std::size_t g = 0; g < plane.size(); ++g) level = std::max(level, oracle_s1(plane, plane[g], h, keep));
                if (level <= lam) best = std::min(best, outer_measure(*E, K).value);
            }
            CHECK(m(lam) == doctest::Approx(best).epsilon(1e-12));
        }
    }
}

TEST_CASE("quasinorm homogeneity, monotonicity and grids") {
    Rng rng(15);
    const Truncation plane(2, 1);
    auto E = make_structure(plane, Family::Trees);
    for (int t = 0; t < 20; ++t) {
        auto h = random_scalar(plane, rng, 1 + rng() % 7);
        auto h2 = h;
        for (auto& x : h2) x *= 2.0;
        for (auto kind : {ScalarSizeKind::S1, ScalarSizeKind::Sinf, ScalarSizeKind::Sinf1}) {
            ScalarSize S(E, kind, h), S2(E, kind, h2);
            for (double p : {1.0, 2.0, 4.0}) {
                const auto a = outer_lp(S, p), b = outer_lp(S2, p);
                CHECK(b.value == doctest::Approx(2.0 * a.value).epsilon(1e-12));
                CHECK(a.lower <= a.value * (1 + 1e-12));
                CHECK(a.upper >= a.value * (1 - 1e-12));
                CHECK(a.upper <= a.lower * 2.0);
            }
            const auto m = superlevel_measure(S);
            for (double lam = 0.0; lam < 12.0; lam += 0.1) CHECK(m(lam) >= m(lam + 0.1));
        }
    }
    std::vector<double> h(plane.size(), 0.0);
    h[3] = 4.0;
    h[20] = 1.0;
    ScalarSize S(E, ScalarSizeKind::Sinf, h);
    const std::vector<double> narrow{2.0, 3.0};
    CHECK_THROWS_AS(outer_lp(S, 2.0, plane.full_mask(), {}, narrow), std::invalid_argument);
    const std::vector<double> wide{0.5, 1.0, 2.0, 4.0, 8.0};
    const auto q = outer_lp(S, 2.0, plane.full_mask(), {}, wide);
    CHECK(q.lower <= q.value);
    CHECK(q.value <= q.upper);
    CHECK_THROWS_AS(ScalarSize(make_structure(plane, Family::Strips), ScalarSizeKind::Sinf1, h), std::invalid_argument);
}

TEST_CASE("randomised size axioms") {
    Rng rng(16);
    const Truncation plane(2, 1);
    auto E = make_structure(plane, Family::Trees);
    for (const auto& X : {BanachSpace::scalar(), BanachSpace::sequence(4, 2)}) {
        for (int t = 0; t < 30; ++t) {
            const auto F = random_tile_function(plane, X, rng, 0.5);
            const auto G = random_tile_function(plane, X, rng, 0.5);
            TileFunction FG = F;
            FG += G;
            TileFunction F3 = F;
            F3 *= cplx(0.0, 3.0);
            RandomizedSize RF(E, F), RG(E, G), RFG(E, FG), R3(E, F3);
            const auto keep = plane.full_mask();
            for (std::size_t g = 0; g < plane.size(); ++g) {
                const double f = RF.evaluate(g, keep);
                CHECK(R3.evaluate(g, keep) == doctest::Approx(3.0 * f).epsilon(1e-10));
                CHECK(RFG.evaluate(g, keep) <= f + RG.evaluate(g, keep) + 1e-10);
                CHECK(RF.parts(g, keep).sup <= f);
            }
        }
    }
    RandomizedSize Z(E, TileFunction(plane, BanachSpace::scalar()));
    CHECK(Z.global(plane.full_mask()) == 0.0);
    CHECK(outer_lp(Z, 2.0).value == 0.0);
}

TEST_CASE("randomised size of a single tritile and of an embedding") {
    const Truncation plane(2, 1);
    auto E = make_structure(plane, Family::Trees);
    TileFunction F(plane, BanachSpace::scalar());
    const std::size_t i = *plane.index({{-1, 0}, {2, 0}});
    F.value(i, 1)(0) = 2.0;
    RandomizedSize R(E, F);
    const auto parts = R.parts(i, plane.full_mask());
    CHECK(parts.sup == doctest::Approx(2.0));
    CHECK(parts.defect == doctest::Approx(2.0));
    CHECK(parts.lacunary[0] == doctest::Approx(2.0));
    CHECK(parts.lacunary[2] == doctest::Approx(2.0));
    CHECK(parts.lacunary[1] == 0.0);

    Rng rng(17);
    const auto f = random_step_function(BanachSpace::scalar(), 2, 1, rng);
    const auto Ef = embed(f, plane);
    RandomizedSize RE(E, Ef);
    const auto D = defect(Ef);
    for (std::size_t g = 0; g < plane.size(); ++g) {
        // Only the finest scale carries a defect, so the chain sum is one term.
        double fin = 0.0;
        for (auto j : E->members(g)) {
            if (plane[j].scale() == plane.min_scale()) fin = std::max(fin, D.triple_norm(j));
        }
        CHECK(RE.parts(g, plane.full_mask()).defect == doctest::Approx(fin).epsilon(1e-9));
    }
}

TEST_CASE("exact randomised superlevel is nonincreasing and below greedy") {
    Rng rng(18);
    const Truncation plane(2, 1);
    auto E = make_structure(plane, Family::Trees);
    for (int t = 0; t < 10; ++t) {
        auto F = random_tile_function(plane, BanachSpace::scalar(), rng, 0.25);
        TritileMask keep = plane.empty_mask();
        for (std::size_t k = 0; k < 6; ++k) keep[rng() % plane.size()] = 1;
        F = F.restricted(keep);
        RandomizedSize R(E, F);
        const auto ex = superlevel_measure(R, SuperlevelOptions{Mode::Exact});
        const auto gr = superlevel_measure(R, SuperlevelOptions{Mode::Greedy});
        for (double lam = 0.0; lam < 20.0; lam += 0.1) {
            CHECK(ex(lam) >= ex(lam + 0.1));
            CHECK(gr(lam) >= ex(lam) - 1e-12);
        }
    }
}

TEST_CASE("iterated quasinorm") {
    const Truncation plane(2, 1);
    auto T = make_structure(plane, Family::Trees);
    const Tritile P{{0, 2}, {1, 1}};
    std::vector<double> h(plane.size(), 0.0);
    h[*plane.index(P)] = 3.0;
    auto inner = std::make_shared<ScalarSize>(T, ScalarSizeKind::Sinf, h);
    for (double q : {1.0, 2.0, 4.0}) {
        CHECK(iterated_outer_lp(inner, kInf, q).value == doctest::Approx(3.0));
        for (double p : {1.0, 2.0, 3.0}) CHECK(iterated_outer_lp(inner, p, q).value == doctest::Approx(3.0));
    }
    IteratedSize It(make_structure(plane, Family::Strips), inner, 2.0);
    const auto top = *It.structure().strip_index({1, 0});
    CHECK(It.evaluate(top, plane.full_mask()) == doctest::Approx(3.0 / std::sqrt(3.0)));
    It.evaluate(top, plane.full_mask());
    CHECK(It.cache_size() == 1);
    auto zero = std::make_shared<ScalarSize>(T, ScalarSizeKind::Sinf, std::vector<double>(plane.size(), 0.0));
    CHECK(iterated_outer_lp(zero, 2.0, 2.0).value == 0.0);

    Rng rng(19);
    for (int t = 0; t < 10; ++t) {
        auto hs = std::make_shared<ScalarSize>(T, ScalarSizeKind::Sinf, random_scalar(plane, rng, 2 + rng() % 6));
        const auto ex = iterated_outer_lp(hs, 2.0, 4.0, SuperlevelOptions{Mode::Exact});
        const auto gr = iterated_outer_lp(hs, 2.0, 4.0, SuperlevelOptions{Mode::Greedy});
        CHECK(ex.exact);
        CHECK(gr.value >= ex.value * (1 - 1e-12));
    }
}

TEST_CASE("Radon-Nikodym domination") {
    const Truncation plane(2, 1);
    std::vector<double> h(plane.size(), 0.0);
    CHECK(rn_domination_ratio(plane, h) == 0.0);
    h[7] = 2.5;
    CHECK(rn_domination_ratio(plane, h) == doctest::Approx(1.0).epsilon(1e-12));
    Rng rng(20);
    for (int t = 0; t < 40; ++t) {
        const double r = rn_domination_ratio(plane, random_scalar(plane, rng, 1 + rng() % 8), {Mode::Exact});
        CHECK(r > 0.0);
        CHECK(r <= 16.0);
    }
}

TEST_CASE("defect forest ratio") {
    Rng rng(21);
    const Truncation plane(2, 2);
    for (int t = 0; t < 60; ++t) {
        const auto F = random_tile_function(plane, BanachSpace::scalar(), rng);
        const Tree T(plane, random_tritile(plane, rng));
        TritileMask A = plane.empty_mask();
        for (int k = 0; k < 3; ++k) {
            const Tree S(plane, random_tritile(plane, rng));
            for (auto i : S.members()) A[i] = 1;
        }
        CHECK(defect_forest_ratio(F, T, A) <= 8.0);
    }
}

TEST_CASE("appendix size") {
    Rng rng(22);
    const Truncation plane(2, 1);
    auto E = make_structure(plane, Family::Trees);
    const auto X = BanachSpace::sequence(3, 2);
    const auto pi = TrilinearForm::product_sum(X, X, X);
    const auto F = random_tile_function(plane, X, rng, 0.5);
    AppendixSize A(E, F, pi, 0, RBoundBudget{4, 10, 5, 1});
    for (std::size_t g = 0; g < plane.size(); g += 5) {
        const auto p = A.parts(g, plane.full_mask());
        for (double x : p) CHECK(std::isfinite(x));
        CHECK(A.evaluate(g, plane.full_mask()) == doctest::Approx(p[0] + p[1] + p[2]));
    }
    CHECK_THROWS_AS(AppendixSize(E, F, TrilinearForm::product_sum(BanachSpace::scalar(), X, X), 0), std::invalid_argument);
}

}
