// One PASS/FAIL line per acceptance criterion. Tolerances and instance minima are pinned here
// and applied to the measured values, independently of each check's own verdict.

#include <chrono>
#include <cstdio>
#include <map>
#include <sstream>

#include "walsh3/verify.hpp"

using namespace walsh3;

namespace {

struct Requirement {
    std::string check;
    double tolerance;
    std::size_t min_instances;
};

struct Criterion {
    int id;
    std::string title;
    std::vector<Requirement> reqs;
};

const std::vector<Criterion>& criteria() {
    static const std::vector<Criterion> c{
        {1, "exact identities",
         {{"plancherel", 1e-9, 500},
          {"fast-vs-naive-wft", 1e-9, 500},
          {"inverse-wft", 1e-9, 500},
          {"wave-packet-expansion", 1e-9, 500},
          {"defect-of-embedding", 1e-9, 500},
          {"defect-reconstruction", 1e-9, 500}}},
        {2, "combinatorial postconditions", {{"tile-selection", 0.0, 1000}, {"convexity", 0.0, 1000}}},
        {3, "Walsh tile-type", {{"tile-type-scalar", 1.0 + 1e-6, 1}, {"tile-type-l4", 2.0, 1}}},
        {4, "size-Holder", {{"size-holder", 16.0, 500}}},
        {5, "outer-measure oracle", {{"outer-measure-oracle", 4.0, 200}}},
        {6, "outer Holder and Radon-Nikodym",
         {{"outer-holder", 16.0, 200}, {"radon-nikodym", 16.0, 200}, {"iterated-rn-chain", 16.0, 200}}},
        {7, "embedding-constant stability", {{"embedding-constants", 2.0, 1200}}},
        {8, "sparse domination", {{"sparse-decomposition", 1.0, 200}, {"sparse-bound-stability", 2.0, 200}}},
        {9, "exponent region", {{"exponent-region", 0.0, 1600}}},
        {10, "appendix", {{"r-bound-singleton", 1e-9, 1}, {"appendix-size-holder", kInf, 1}}},
    };
    return c;
}

constexpr double kRuntimeLimit = 120.0;
constexpr double kL4Stability = 1.5;
constexpr double kSingleTritile = 1.0 + 1e-9;

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", x);
    return buf;
}

} // namespace

int main() {
    VerifyConfig cfg;
    cfg.seed = 42;
    cfg.threads = 1;

    std::map<std::string, CheckResult> by_name;
    std::map<std::string, double> seconds;
    std::vector<CheckResult> first;
    for (const auto& c : registered_checks()) {
        const auto t0 = std::chrono::steady_clock::now();
        auto r = run_check(c.name, cfg);
        seconds[c.name] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        by_name[c.name] = r;
        first.push_back(std::move(r));
    }

    int failed = 0;
    auto line = [&](int id, const std::string& title, bool ok, const std::string& detail) {
        std::printf("%s criterion %d (%s): %s\n", ok ? "PASS" : "FAIL", id, title.c_str(), detail.c_str());
        failed += !ok;
    };

    for (const auto& crit : criteria()) {
        bool ok = true;
        std::ostringstream d;
        double runtime = 0.0;
        for (const auto& req : crit.reqs) {
            const auto& r = by_name.at(req.check);
            const bool good = r.passed && r.measured <= req.tolerance && r.instances >= req.min_instances;
            ok = ok && good;
            runtime += seconds[req.check];
            d << req.check << "=" << fmt(r.measured) << " (n=" << r.instances;
            if (std::isfinite(req.tolerance)) d << ", tol " << fmt(req.tolerance);
            d << ")";
            if (!good) d << " [" << (r.detail.empty() ? "below instance minimum" : r.detail) << "]";
            d << "; ";
        }
        switch (crit.id) {
        case 1:
            ok = ok && runtime <= kRuntimeLimit;
            d << "runtime " << fmt(runtime) << " s (limit " << kRuntimeLimit << " s)";
            break;
        case 3: {
            const double stab = by_name.at("tile-type-l4").values.value("stability", kInf);
            ok = ok && stab <= kL4Stability;
            d << "l4 stability " << fmt(stab) << " (limit " << kL4Stability << ")";
            break;
        }
        case 4: {
            const double single = by_name.at("size-holder").values.value("singleTritileMax", kInf);
            ok = ok && single <= kSingleTritile;
            d << "single tritile " << fmt(single);
            break;
        }
        case 8: {
            const auto& v = by_name.at("sparse-decomposition").values;
            d << "nontrivial collections " << v.value("nontrivial", 0) << "/200 under the default policy; refined probe "
              << v.value("refinedInstances", 0) << " nontrivial with norm <= " << fmt(v.value("refinedMaxNorm", 0.0))
              << ", strict norm <= " << fmt(v.value("refinedMaxStrictNorm", 0.0));
            break;
        }
        default: break;
        }
        line(crit.id, crit.title, ok, d.str());
    }

    VerifyConfig two = cfg;
    two.threads = 2;
    const auto second = run_suite("all", two);
    const bool same = dump(verify_report("all", cfg, first)) == dump(verify_report("all", two, second));
    line(11, "determinism", same, same ? "reports byte-identical for 1 and 2 threads" : "reports differ between thread counts");

    std::size_t other_failures = 0;
    for (const auto& r : first) other_failures += !r.passed;
    std::printf("%zu of %zu registered checks failed\n", other_failures, first.size());
    return failed == 0 ? 0 : 1;
}
