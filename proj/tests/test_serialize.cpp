#include "support.hpp"

#include "walsh3/verify.hpp"

#include <set>

using namespace walsh3;
using namespace walsh3::test;

TEST_SUITE("serialize") {

TEST_CASE("exponents and complex numbers") {
    CHECK(exponent_json(kInf) == Json("inf"));
    CHECK(std::isinf(exponent_from_json(Json("inf"))));
    CHECK(exponent_from_json(exponent_json(2.5)) == 2.5);
    CHECK_THROWS(exponent_from_json(Json("two")));
    const cplx z{0.1, -1.0 / 3.0};
    CHECK(cplx_from_json(Json::parse(to_json(z).dump())) == z);
    CHECK(cplx_from_json(Json(2.0)) == cplx(2.0, 0.0));
}

TEST_CASE("spaces and forms round trip") {
    for (const auto& X : {BanachSpace::scalar(), BanachSpace::sequence(1.0, 3), BanachSpace::sequence(kInf, 2),
                          BanachSpace::schatten(3.0, 2), BanachSpace::schatten(kInf, 4)}) {
        CHECK(to_json(space_from_json(to_json(X))) == to_json(X));
        for (const char* kind : {"product", "duality"}) {
            if (X.kind() == SpaceKind::Schatten && std::string(kind) == "product") continue;
            const auto pi = parse_form(kind, X);
            CHECK(to_json(form_from_json(to_json(pi))) == to_json(pi));
        }
    }
    const auto S = BanachSpace::schatten(2.0, 2);
    CHECK(to_json(form_from_json(to_json(parse_form("trace", S)))) == to_json(parse_form("trace", S)));
    CHECK(to_json(parse_space("seq:4:2")) == to_json(BanachSpace::sequence(4.0, 2)));
    CHECK(to_json(parse_space("schatten:inf:3")) == to_json(BanachSpace::schatten(kInf, 3)));
    CHECK(to_json(parse_space("C")) == to_json(BanachSpace::scalar()));
    CHECK_THROWS(parse_space("hilbert"));
    CHECK_THROWS(parse_form("sum", S));
    CHECK_THROWS(space_from_json(Json{{"kind", "lorentz"}, {"p", 2}, {"d", 2}}));
}

TEST_CASE("step functions round trip bit for bit") {
    Rng rng(1);
    for (const auto& X : {BanachSpace::scalar(), BanachSpace::sequence(3.0, 2)}) {
        const auto f = random_step_function(X, 2, 1, rng);
        const auto g = step_from_json(Json::parse(dump(to_json(f))));
        CHECK(max_abs_diff(f, g) == 0.0);
        CHECK(g.fine() == 2);
        CHECK(g.support() == 1);
        CHECK(dump(to_json(g)) == dump(to_json(f)));
    }
    Json bad = to_json(random_step_function(BanachSpace::scalar(), 1, 0, rng));
    bad["cells"][0].erase(0);
    CHECK_THROWS(step_from_json(bad));
    CHECK_THROWS(step_from_json(Json{{"cells", Json::array()}}));
}

TEST_CASE("tile functions round trip") {
    Rng rng(2);
    const Truncation plane(2, 1);
    const auto F = embed(random_step_function(BanachSpace::sequence(2.0, 2), 2, 1, rng), plane);
    const Json j = Json::parse(dump(to_json(F)));
    const auto G = tile_function_from_json(j);
    CHECK(G.support() == F.support());
    for (std::size_t i = 0; i < plane.size(); ++i) {
        for (int u = 0; u < 3; ++u) CHECK(diff(F.value(i, u), G.value(i, u)) == 0.0);
    }
    const auto H = tile_function_from_json(j["entries"], plane, BanachSpace::sequence(2.0, 2));
    CHECK(dump(to_json(H)) == dump(j));
    CHECK_THROWS(tile_function_from_json(j["entries"]));
    Json outside = j;
    outside["truncation"]["ambient"] = 0;
    CHECK_THROWS(tile_function_from_json(outside));
}

TEST_CASE("intervals and tritiles round trip") {
    Rng rng(3);
    const Truncation plane(2, 2);
    for (int k = 0; k < 50; ++k) {
        const Tritile P = random_tritile(plane, rng);
        CHECK(tritile_from_json(to_json(P)) == P);
        CHECK(interval_from_json(to_json(P.time)) == P.time);
    }
}

TEST_CASE("sparse certificate on zero inputs") {
    const auto pi = parse_form("product", BanachSpace::scalar());
    const Truncation plane(2, 1);
    const Triple f{StepFunction(BanachSpace::scalar(), 2, 1), StepFunction(BanachSpace::scalar(), 2, 1),
                   StepFunction(BanachSpace::scalar(), 2, 1)};
    const auto r = sparse_bound_ratio(pi, {3, 3, 3}, {3, 3, 3}, f, plane);
    const Json c = sparse_certificate(r.decomposition);
    REQUIRE(c["generations"].size() == 1);
    CHECK(c["generations"][0] == Json::array({to_json(plane.time_box())}));
    for (const auto& k : c["kSets"]) CHECK(k["K"].empty());
}

TEST_CASE("region tables") {
    const auto R = region_vertices(2, 2, 2);
    const Json j = to_json(R);
    CHECK(j["vertices"].size() == R.vertices.size());
    CHECK(j["empty"] == false);
    CHECK(to_json(region_vertices(4, 4, 4))["empty"] == true);
    const auto csv = region_csv(R);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<long>(R.vertices.size() + 1));
}

} // TEST_SUITE

TEST_SUITE("verify") {

TEST_CASE("registry") {
    std::set<std::string> names;
    for (const auto& c : registered_checks()) {
        CHECK(names.insert(c.name).second);
        CHECK(is_suite(c.suite));
    }
    for (const auto& s : suite_names()) {
        bool any = false;
        for (const auto& c : registered_checks()) any = any || c.suite == s;
        CHECK_MESSAGE(any, s);
    }
    CHECK(is_suite("all"));
    CHECK_FALSE(is_suite("walsh2"));
    CHECK_THROWS(run_suite("walsh2", {}));
    CHECK_THROWS(run_check("no-such-check", {}));
}

TEST_CASE("config parsing") {
    const auto cfg = verify_config_from_json(Json::parse(R"({"seed": 7, "threads": 3, "trials": 5, "mode": "exact",
                                                             "fault": {"wavePacketPhase": true}})"));
    CHECK(cfg.seed == 7);
    CHECK(cfg.threads == 3);
    CHECK(cfg.trials == 5);
    CHECK(cfg.mode == Mode::Exact);
    CHECK(cfg.fault.phase);
    CHECK_THROWS(verify_config_from_json(Json::parse(R"({"mode": "fast"})")));
    CHECK_THROWS(verify_config_from_json(Json::array()));
}

TEST_CASE("checks are seeded and fault injection is caught") {
    VerifyConfig cfg;
    const auto a = run_check("wave-packet-plancherel", cfg), b = run_check("wave-packet-plancherel", cfg);
    CHECK(a.passed);
    CHECK(dump(to_json(a)) == dump(to_json(b)));
    cfg.fault.phase = true;
    const auto c = run_check("wave-packet-plancherel", cfg);
    CHECK_FALSE(c.passed);
    CHECK(c.measured > 1e-3);
    const Json report = verify_report("forms", cfg, {a, c});
    CHECK(report["passed"] == false);
    CHECK(report["faultInjected"] == true);
}

} // TEST_SUITE
