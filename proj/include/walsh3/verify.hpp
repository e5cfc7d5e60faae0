#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "walsh3/forms.hpp"
#include "walsh3/serialize.hpp"

namespace walsh3 {

struct VerifyConfig {
    std::uint64_t seed = 42;
    int threads = 1;
    // Trials per scale in the experiment-backed checks.
    std::size_t trials = 100;
    // Mode of the superlevel computations in the quasinorm checks that do not pin one.
    Mode mode = Mode::Auto;
    PacketFault fault{};
};

// Reads {seed, threads, trials, mode, fault: {wavePacketPhase}}; absent keys keep their defaults.
VerifyConfig verify_config_from_json(const Json& j);

struct CheckResult {
    std::string suite;
    std::string name;
    bool passed = true;
    std::size_t instances = 0;
    // The measured constant or worst error, compared against the tolerance.
    double measured = 0.0;
    double tolerance = 0.0;
    std::string detail;
    // Further measured values, in a fixed key order.
    Json values = Json::object();
};

struct Check {
    std::string suite;
    std::string name;
    std::function<CheckResult(const VerifyConfig&)> run;
};

const std::vector<Check>& registered_checks();
// walsh, phase, embedding, sizes, outer, algorithms, forms, appendix.
const std::vector<std::string>& suite_names();
bool is_suite(const std::string& name);

CheckResult run_check(const std::string& name, const VerifyConfig& cfg);
// "all" runs every suite in order.
std::vector<CheckResult> run_suite(const std::string& suite, const VerifyConfig& cfg);

Json to_json(const CheckResult& r);
Json verify_report(const std::string& suite, const VerifyConfig& cfg, const std::vector<CheckResult>& results);

} // namespace walsh3
