#include "support.hpp"

using namespace walsh3;
using namespace walsh3::test;

TEST_SUITE("walsh") {

TEST_CASE("digitwise addition") {
    const auto one = WalshPoint::from_digits({{0, 1}});
    const auto two = WalshPoint::from_digits({{0, 2}});
    CHECK((one + two).is_zero());
    CHECK(one + WalshPoint() == one);
    const auto four = WalshPoint::from_digits({{1, 1}, {0, 1}});
    const auto five = WalshPoint::from_digits({{1, 1}, {0, 2}});
    CHECK(four.to_real() == 4.0);
    CHECK(five.to_real() == 5.0);
    const auto six = four + five;
    CHECK(six == WalshPoint::from_digits({{1, 2}}));
    CHECK(six.to_real() == 6.0);
    CHECK_THROWS(WalshPoint(3) + WalshPoint(2));
}

TEST_CASE("group of exponent three") {
    Rng rng(7);
    for (int t = 0; t < 300; ++t) {
        const auto x = random_point(rng, -4, 3), y = random_point(rng, -4, 3), z = random_point(rng, -4, 3);
        CHECK(x + y == y + x);
        CHECK((x + y) + z == x + (y + z));
        CHECK((x + (-x)).is_zero());
        CHECK((x + x + x).is_zero());
        CHECK(x - y == x + (-y));
        // Canonical form: no zero digits stored.
        const auto s = x + y;
        for (auto [n, d] : s.digits()) CHECK(d != 0);
    }
}

TEST_CASE("norm and grid") {
    CHECK(WalshPoint().norm() == 0.0);
    CHECK(WalshPoint::from_digits({{2, 1}, {-1, 2}}).norm() == 9.0);
    const auto x = WalshPoint::from_grid(14, -1);
    CHECK(x.to_real() == doctest::Approx(14.0 / 3));
    CHECK(x.grid_index(-1) == 14);
    CHECK(x.grid_index(-2) == 42);
    CHECK_THROWS_AS(x.grid_index(0), GridError);
}

TEST_CASE("characters") {
    const auto xi = WalshPoint::from_digits({{-1, 1}}), x = WalshPoint::from_digits({{0, 1}});
    CHECK(std::abs(character(xi, x) - root_of_unity(1)) < 1e-15);
    CHECK(std::abs(character(WalshPoint(), x) - 1.0) < 1e-15);
    const auto xi2 = WalshPoint::from_digits({{-1, 2}}), x2 = WalshPoint::from_digits({{0, 2}});
    CHECK(std::abs(character(xi2, x2) - std::exp(cplx(0, 2 * M_PI / 3))) < 1e-15);

    Rng rng(11);
    for (int t = 0; t < 200; ++t) {
        const auto e = random_point(rng, -3, 3), a = random_point(rng, -3, 3), b = random_point(rng, -3, 3);
        CHECK(std::abs(character(e, a + b) - character(e, a) * character(e, b)) < 1e-12);
        CHECK(std::abs(character(e, a) - character(a, e)) < 1e-12);
        // grid helper agrees with digit arithmetic
        const int ex = grid_character_exponent(a.grid_index(-3), -3, e.grid_index(-3), -3);
        CHECK(std::abs(root_of_unity(ex) - character(e, a)) < 1e-12);
    }
}

TEST_CASE("open balls are triadic intervals") {
    const TriadicInterval I{1, 2};
    const auto c = I.left_point();
    for (std::int64_t k = 0; k < 27; ++k) {
        const auto y = WalshPoint::from_grid(k, 0);
        CHECK(in_ball(c, 1, y) == I.contains(y));
    }
    CHECK(in_ball(WalshPoint(), 0, WalshPoint::from_grid(2, -1)));
    CHECK_FALSE(in_ball(WalshPoint(), 0, WalshPoint::from_grid(1, 0)));
}

TEST_CASE("triadic intervals nest") {
    Rng rng(3);
    for (int t = 0; t < 2000; ++t) {
        const int s1 = static_cast<int>(rng() % 4) - 1, s2 = static_cast<int>(rng() % 4) - 1;
        const TriadicInterval a{s1, static_cast<std::int64_t>(rng() % ipow(3, 3 - s1))};
        const TriadicInterval b{s2, static_cast<std::int64_t>(rng() % ipow(3, 3 - s2))};
        const bool overlap = std::max(a.left(), b.left()) < std::min(a.right(), b.right());
        CHECK(overlap == a.intersects(b));
        if (overlap) CHECK((a.contains(b) || b.contains(a)));
    }
    const TriadicInterval I{1, 1};
    const auto ch = I.children();
    REQUIRE(ch.size() == 3);
    for (int j = 0; j < 3; ++j) {
        CHECK(ch[j].left_point().digit(0) == j);
        CHECK(ch[j].parent() == I);
        CHECK(ch[j].child_index() == j);
    }
    CHECK(TriadicInterval::from_bounds(3, 6) == I);
    CHECK_THROWS_AS(TriadicInterval::from_bounds(1, 4), GridError);
    CHECK_THROWS_AS(TriadicInterval::from_bounds(0, 2), GridError);
}

TEST_CASE("transform examples") {
    const auto f = StepFunction::indicator({0, 0}, 4, 0);
    const auto fh = wft(f);
    CHECK(fh.fine() == 0);
    CHECK(fh.support() == 4);
    CHECK(max_abs_diff(fh, StepFunction::indicator({0, 0}, 0, 4)) < 1e-12);
    CHECK(max_abs_diff(oracle_wft(f), fh) < 1e-12);

    const StepFunction zero(BanachSpace::scalar(), 2, 1);
    CHECK(lp_norm(wft(zero), kInf) == 0.0);

    const auto eta = WalshPoint::from_grid(1, 0);
    const auto mf = modulate(eta, StepFunction::indicator({0, 0}, 2, 0));
    CHECK(max_abs_diff(wft(mf), StepFunction::indicator({0, 1}, 0, 2)) < 1e-12);
}

TEST_CASE("fast transform matches naive and oracle") {
    Rng rng(5);
    for (int t = 0; t < 60; ++t) {
        const int N = static_cast<int>(rng() % 4), M = static_cast<int>(rng() % 3);
        const auto f = random_step_function(t % 3 ? BanachSpace::scalar() : BanachSpace::sequence(3, 2), N, M, rng);
        const auto fast = wft(f);
        CHECK(max_abs_diff(fast, wft_naive(f)) < 1e-9);
        CHECK(max_abs_diff(fast, oracle_wft(f)) < 1e-9);
        CHECK(max_abs_diff(inverse_wft(fast), f) < 1e-10);
        CHECK(max_abs_diff(inverse_wft_naive(fast), f) < 1e-10);
    }
}

TEST_CASE("Plancherel") {
    Rng rng(9);
    for (int t = 0; t < 100; ++t) {
        const int N = static_cast<int>(rng() % 4), M = static_cast<int>(rng() % 3);
        const auto f = random_step_function(BanachSpace::scalar(), N, M, rng);
        const auto g = random_step_function(BanachSpace::scalar(), N, M, rng);
        const double tol = 1e-9 * (1 + lp_norm(f, 2) * lp_norm(g, 2));
        CHECK(std::abs(inner(wft(f), wft(g)) - inner(f, g)) <= tol);
    }
}

TEST_CASE("symmetries intertwine with the transform") {
    Rng rng(13);
    for (int t = 0; t < 60; ++t) {
        const int N = 1 + static_cast<int>(rng() % 2), M = static_cast<int>(rng() % 2);
        const auto f = random_step_function(BanachSpace::scalar(), N, M, rng);

        // Frequency shift lands on the transform grid: keep eta inside [0, 3^N) at scale -M.
        const auto eta = WalshPoint::from_grid(static_cast<std::int64_t>(rng() % ipow(3, N + M)), -M);
        CHECK(max_abs_diff(wft(modulate(eta, f)), translate(eta, wft(f))) < 1e-9);

        const auto y = WalshPoint::from_grid(static_cast<std::int64_t>(rng() % ipow(3, N + M)), -N);
        CHECK(max_abs_diff(wft(translate(y, f)), modulate(-y, wft(f))) < 1e-9);

        const int n = static_cast<int>(rng() % 3) - 1;
        StepFunction rhs = dilate(-n, wft(f));
        rhs *= rpow(3, -n);
        CHECK(max_abs_diff(wft(dilate(n, f)), rhs) < 1e-9);
    }
}

TEST_CASE("symmetry operators") {
    Rng rng(17);
    const auto f = random_step_function(BanachSpace::scalar(), 2, 1, rng);
    CHECK(max_abs_diff(translate(WalshPoint(), f), f) == 0.0);
    const auto d = dilate(1, StepFunction::indicator({0, 0}, 2, 0));
    CHECK(max_abs_diff(d, (1.0 / 3) * StepFunction::indicator({1, 0}, 1, 1)) < 1e-15);
    for (int t = 0; t < 50; ++t) {
        const auto eta = random_point(rng, -2, 3);
        CHECK(max_abs_diff(modulate(eta, modulate(-eta, f)), f) < 1e-12);
        CHECK(lp_norm(modulate(eta, f), 1) == doctest::Approx(lp_norm(f, 1)));
        const auto y = WalshPoint::from_grid(static_cast<std::int64_t>(rng() % 81), -2);
        CHECK(max_abs_diff(translate(-y, translate(y, f)), f) < 1e-15);
        CHECK(lp_norm(translate(y, f), 1) == doctest::Approx(lp_norm(f, 1)));
        const int n = static_cast<int>(rng() % 3) - 1;
        CHECK(lp_norm(dilate(n, f), 1) == doctest::Approx(lp_norm(f, 1)));
        CHECK(max_abs_diff(dilate(-n, dilate(n, f)), f) < 1e-12);
    }
    CHECK_THROWS_AS(translate(WalshPoint::from_grid(1, -3), f), GridError);
}

TEST_CASE("norms and averages") {
    const auto one = StepFunction::indicator({0, 0}, 2, 2);
    CHECK(std::abs(pairing(one, one)[0] - 1.0) < 1e-15);
    CHECK(lp_norm(StepFunction::indicator({1, 0}, 1, 1), 2) == doctest::Approx(std::sqrt(3.0)));
    CHECK(lp_average(one, {1, 0}, 1) == doctest::Approx(1.0 / 3));
    CHECK(lp_average(one, {0, 0}, kInf) == 1.0);
    const Vec avg = average(one, {2, 0});
    CHECK(std::abs(avg[0] - 1.0 / 9) < 1e-15);
    CHECK(is_holder_triple(3, 3, 3));
    CHECK(is_holder_triple(2, 2, kInf));
    CHECK_FALSE(is_holder_triple(2, 2, 2));

    Rng rng(19);
    for (int t = 0; t < 40; ++t) {
        const auto f = random_step_function(BanachSpace::sequence(4, 3), 2, 1, rng);
        double s = 0;
        for (std::size_t c = 0; c < f.cells(); ++c) s += std::pow(f.space().norm(f.value(c)), 3) / 9;
        CHECK(lp_norm(f, 3) == doctest::Approx(std::cbrt(s)));
        CHECK(lp_average(f, {1, 0}, 3) == doctest::Approx(std::cbrt(s / 3)));
    }
}

TEST_CASE("triadic maximal function") {
    const auto f = StepFunction::indicator({0, 0}, 0, 0);
    const auto m = maximal_function(f, 1, {2, 0});
    for (std::int64_t k = 0; k < 9; ++k) {
        const double v = m.evaluate(WalshPoint::from_grid(k, 0))[0].real();
        if (k == 0) CHECK(v == doctest::Approx(1.0));
        else if (k < 3) CHECK(v == doctest::Approx(1.0 / 3));
        else CHECK(v == doctest::Approx(1.0 / 9));
    }
    const StepFunction zero(BanachSpace::scalar(), 1, 1);
    CHECK(lp_norm(maximal_function(zero, 2, {1, 0}), kInf) == 0.0);

    // Oracle: enumerate every triadic interval containing each cell.
    Rng rng(23);
    for (int t = 0; t < 20; ++t) {
        const auto g = random_step_function(BanachSpace::scalar(), 1, 2, rng, 0.5);
        const TriadicInterval amb{2, 0};
        const auto m1 = maximal_function(g, 1.5, amb), m2 = maximal_function(g, 3, amb);
        for (std::size_t c = 0; c < g.cells(); ++c) {
            const auto x = g.cell_point(c);
            double best = 0;
            for (int s = -1; s <= 2; ++s) best = std::max(best, lp_average(g, TriadicInterval{s, static_cast<std::int64_t>(c) / ipow(3, s + 1)}, 1.5));
            CHECK(m1.evaluate(x)[0].real() == doctest::Approx(best));
            CHECK(m1.evaluate(x)[0].real() <= m2.evaluate(x)[0].real() + 1e-12);
        }
    }
}

}
