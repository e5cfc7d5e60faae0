#include "support.hpp"

using namespace walsh3;
using namespace walsh3::test;

namespace {

std::vector<BanachSpace> spaces() {
    return {BanachSpace::scalar(),           BanachSpace::sequence(1, 3),   BanachSpace::sequence(1.5, 3),
            BanachSpace::sequence(2, 4),     BanachSpace::sequence(4, 2),   BanachSpace::sequence(kInf, 3),
            BanachSpace::schatten(1, 2),     BanachSpace::schatten(2, 3),   BanachSpace::schatten(4, 2),
            BanachSpace::schatten(kInf, 3)};
}

// Singular values of a 2×2 complex matrix from the eigenvalues of A*A.
std::array<double, 2> sv2(const Vec& m) {
    const cplx a = m[0], c = m[1], b = m[2], d = m[3];
    const double t = std::norm(a) + std::norm(b) + std::norm(c) + std::norm(d);
    const double det = std::abs(a * d - b * c);
    const double disc = std::sqrt(std::max(0.0, t * t - 4 * det * det));
    return {std::sqrt((t + disc) / 2), std::sqrt(std::max(0.0, (t - disc) / 2))};
}

} // namespace

TEST_SUITE("banach") {

TEST_CASE("norm axioms") {
    Rng rng(1);
    for (const auto& X : spaces()) {
        CAPTURE(X.name());
        CHECK(X.norm(X.zero()) == 0.0);
        for (int t = 0; t < 50; ++t) {
            const Vec x = random_vector(X, rng), y = random_vector(X, rng);
            const cplx s = random_gaussian(rng);
            CHECK(X.norm(x) > 0.0);
            CHECK(X.norm(Vec(x + y)) <= X.norm(x) + X.norm(y) + 1e-12);
            CHECK(std::abs(X.norm(Vec(s * x)) - std::abs(s) * X.norm(x)) <= 1e-12 * (1 + X.norm(Vec(s * x))));
        }
    }
}

TEST_CASE("Schatten norms match an independent singular value computation") {
    Rng rng(2);
    for (double p : {1.0, 1.5, 2.0, 3.0, kInf}) {
        const auto X = BanachSpace::schatten(p, 2);
        for (int t = 0; t < 50; ++t) {
            const Vec m = random_vector(X, rng);
            const auto s = sv2(m);
            const double expect = std::isinf(p) ? s[0] : std::pow(std::pow(s[0], p) + std::pow(s[1], p), 1 / p);
            CHECK(std::abs(X.norm(m) - expect) < 1e-9);
        }
    }
    // S^2 is the Frobenius norm in every dimension.
    const auto X = BanachSpace::schatten(2, 5);
    const Vec m = random_vector(X, rng);
    CHECK(X.norm(m) == doctest::Approx(m.norm()));
}

TEST_CASE("Hilbertian exponents and duals") {
    CHECK(BanachSpace::scalar().hilbertian_exponent() == 2.0);
    CHECK(BanachSpace::sequence(4, 3).hilbertian_exponent() == 4.0);
    CHECK(BanachSpace::sequence(1.5, 3).hilbertian_exponent() == doctest::Approx(3.0));
    CHECK(BanachSpace::schatten(4.0 / 3, 2).hilbertian_exponent() == doctest::Approx(4.0));
    CHECK(BanachSpace::sequence(2, 3).is_hilbert());
    CHECK(BanachSpace::sequence(3, 2).dual().p() == doctest::Approx(1.5));
    CHECK(BanachSpace::sequence(1, 2).dual().p() == kInf);
    CHECK(conjugate_exponent(2) == 2.0);
}

TEST_CASE("duality form is bounded by the dual norm") {
    Rng rng(3);
    for (const auto& X : spaces()) {
        const auto pi = TrilinearForm::duality(X);
        for (int t = 0; t < 30; ++t) {
            const Vec x = random_vector(X, rng), xs = random_vector(X.dual(), rng);
            const Vec l = random_vector(BanachSpace::scalar(), rng);
            CHECK(std::abs(pi(x, xs, l)) <= std::abs(l[0]) * X.norm(x) * X.dual().norm(xs) * (1 + 1e-12));
        }
    }
}

TEST_CASE("Hölder bound for product and trace forms") {
    Rng rng(4);
    const auto s3 = BanachSpace::sequence(3, 3);
    const auto prod = TrilinearForm::product_sum(s3, s3, s3);
    const auto t3 = BanachSpace::schatten(3, 2);
    const auto tr = TrilinearForm::trace_product(t3, t3, t3);
    CHECK(prod.bound() == 1.0);
    for (int t = 0; t < 100; ++t) {
        const Vec a = random_vector(s3, rng), b = random_vector(s3, rng), c = random_vector(s3, rng);
        CHECK(std::abs(prod(a, b, c)) <= s3.norm(a) * s3.norm(b) * s3.norm(c) * (1 + 1e-12));
        const Vec A = random_vector(t3, rng), B = random_vector(t3, rng), C = random_vector(t3, rng);
        CHECK(std::abs(tr(A, B, C)) <= t3.norm(A) * t3.norm(B) * t3.norm(C) * (1 + 1e-12));
        const std::array<Vec, 3> ta{a, b, c}, tb{b, c, a}, tc{c, a, b};
        CHECK(extended_form(prod, ta, tb, tc) == prod(a, c, b));
    }
    CHECK_THROWS(TrilinearForm::product_sum(s3, BanachSpace::sequence(3, 2), s3));
    CHECK_THROWS(TrilinearForm::trace_product(s3, s3, s3));
}

TEST_CASE("embedding norms dominate sampled ratios and are attained") {
    Rng rng(5);
    const auto a = BanachSpace::sequence(3, 3), b = BanachSpace::sequence(2, 3), c = BanachSpace::sequence(6, 3);
    const auto s = BanachSpace::schatten(3, 2);
    for (const auto& pi : {TrilinearForm::product_sum(a, b, c), TrilinearForm::trace_product(s, s, s),
                           TrilinearForm::duality(BanachSpace::sequence(4, 3))}) {
        for (int u = 0; u < 3; ++u) {
            auto [v, w] = pi.others(u);
            const Vec x = random_vector(pi.space(u), rng);
            const double n = pi.embedding_norm(u, x);
            double best = 0;
            for (int t = 0; t < 400; ++t) {
                const Vec y = random_vector(pi.space(v), rng);
                const double r = pi.space(w).dual().norm(pi.functional(u, x, y)) / pi.space(v).norm(y);
                CHECK(r <= n * (1 + 1e-9));
                best = std::max(best, r);
            }
            CHECK(best >= 0.3 * n);
        }
    }
}

TEST_CASE("Rademacher moments") {
    const std::vector<Vec> one{Vec::Constant(1, cplx(3, 4))};
    for (double p : {0.5, 1.0, 2.0, 5.0}) CHECK(rademacher_moment(one, BanachSpace::scalar(), p).value == doctest::Approx(5.0));
    const std::vector<Vec> two{Vec::Constant(1, 1.0), Vec::Constant(1, 1.0)};
    CHECK(rademacher_moment(two, BanachSpace::scalar(), 1).value == doctest::Approx(1.0));

    Rng rng(6);
    for (int t = 0; t < 20; ++t) {
        std::vector<Vec> xs;
        double ss = 0;
        for (int k = 0; k < 7; ++k) {
            xs.push_back(random_vector(BanachSpace::scalar(), rng));
            ss += std::norm(xs.back()[0]);
        }
        CHECK(rademacher_moment(xs, BanachSpace::scalar(), 2).value == doctest::Approx(std::sqrt(ss)));
        // Gray-code enumeration agrees with plain enumeration over all 2^K patterns.
        auto plain = rademacher_expectation(
            xs.size(),
            [&](std::span<const int> e) {
                cplx s = 0;
                for (std::size_t k = 0; k < xs.size(); ++k) s += static_cast<double>(e[k]) * xs[k][0];
                return std::abs(s);
            },
            {});
        CHECK(plain.exact);
        CHECK(rademacher_moment(xs, BanachSpace::scalar(), 1).value == doctest::Approx(plain.value));
    }

    std::vector<Vec> many(20, Vec::Constant(1, 1.0));
    RademacherSampler strict;
    strict.allow_monte_carlo = false;
    CHECK_THROWS(rademacher_moment(many, BanachSpace::scalar(), 2, strict));
    const auto mc = rademacher_moment(many, BanachSpace::scalar(), 2);
    CHECK_FALSE(mc.exact);
    CHECK(std::abs(mc.value - std::sqrt(20.0)) < 6 * mc.std_error + 0.05);
}

TEST_CASE("Kahane-Khintchine ratios") {
    Rng rng(7);
    std::map<double, double> worst;
    for (const auto& X : spaces()) {
        for (int t = 0; t < 10; ++t) {
            std::vector<Vec> xs;
            for (int k = 0; k < 1 + static_cast<int>(rng() % 10); ++k) xs.push_back(random_vector(X, rng));
            const double m1 = rademacher_moment(xs, X, 1).value;
            for (double p : {0.5, 2.0, 4.0, 8.0}) {
                const double r = rademacher_moment(xs, X, p).value / m1;
                CHECK((p < 1 ? r <= 1 + 1e-12 : r >= 1 - 1e-12));
                worst[p] = std::max(worst[p], p < 1 ? 1 / r : r);
            }
        }
    }
    CHECK(worst[2.0] <= worst[4.0] + 1e-12);
    CHECK(worst[4.0] <= worst[8.0] + 1e-12);
    CHECK(worst[8.0] < 4.0);
}

TEST_CASE("contraction principle") {
    Rng rng(8);
    const auto X = BanachSpace::sequence(2, 3);
    std::vector<Vec> xs;
    for (int k = 0; k < 10; ++k) xs.push_back(random_vector(X, rng));
    CHECK(contraction_check(xs, std::vector<cplx>(10, 1.0), X) == doctest::Approx(1.0));
    CHECK(contraction_check(xs, std::vector<cplx>(10, 0.0), X) == 0.0);
    for (int t = 0; t < 20; ++t) {
        std::vector<cplx> uni(10), real(10);
        for (int k = 0; k < 10; ++k) {
            uni[k] = std::polar(1.0, 6.283185307179586 * static_cast<double>(rng() % 1000) / 1000);
            real[k] = static_cast<double>(rng() % 2001) / 1000 - 1;
        }
        CHECK(contraction_check(xs, uni, X) <= 2.0);
        CHECK(contraction_check(xs, real, X) <= 1 + 1e-9);
    }
    CHECK(contraction_check(std::vector<Vec>(3, X.zero()), std::vector<cplx>(3, 1.0), X) == 0.0);
}

TEST_CASE("R-bound intervals") {
    const auto C = BanachSpace::scalar();
    const auto prod = TrilinearForm::product_sum(C, C, C);
    Rng rng(9);
    {
        const auto X = BanachSpace::sequence(3, 3);
        const auto pi = TrilinearForm::product_sum(X, BanachSpace::sequence(3, 3), X);
        const std::vector<Vec> V{random_vector(X, rng)};
        const auto r = r_bound_estimate(pi, 0, V);
        CHECK(std::abs(r.lower - pi.embedding_norm(0, V[0])) < 1e-9);
        CHECK(std::abs(r.upper - pi.embedding_norm(0, V[0])) < 1e-9);
    }
    {
        const std::vector<Vec> V{Vec::Constant(1, 0.5), Vec::Constant(1, -2.0), Vec::Constant(1, 1.0)};
        const auto r = r_bound_estimate(prod, 1, V);
        CHECK(r.lower >= 2.0 - 1e-12);
        CHECK(r.lower <= r.upper);
    }
    {
        const std::vector<Vec> V{Vec::Constant(1, 1.0), Vec::Constant(1, 1.0)};
        const auto r = r_bound_estimate(prod, 0, V);
        CHECK(r.lower <= 1.0 + 1e-12);
        CHECK(r.upper >= 1.0 - 1e-12);
    }
    {
        const auto X = BanachSpace::sequence(4, 2);
        const auto pi = TrilinearForm::product_sum(X, X, BanachSpace::sequence(2, 2));
        std::vector<Vec> V;
        for (int k = 0; k < 3; ++k) V.push_back(random_vector(X, rng));
        const auto r = r_bound_estimate(pi, 0, V);
        CHECK(r.lower <= r.upper);
        RBoundBudget none;
        none.random_trials = 0;
        const auto z = r_bound_estimate(pi, 0, V, none);
        CHECK(z.budget_exhausted);
        CHECK(z.lower <= r.lower + 1e-12);
    }
}

}
