// Command-line front end: verification suites, experiments and one-shot evaluations.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "walsh3/verify.hpp"

using namespace walsh3;
namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "1.0.0";

// Usage and configuration errors; exit code 2.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Flags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::vector<int> scales;
    std::optional<int> ambient;
    std::string space;
    std::string form;
    std::optional<std::size_t> trials;
    std::string mode;
    std::string output;
    std::string format = "json";
    std::optional<int> threads;
    std::string input;
    bool inverse = false;
};

Json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw UsageError("'" + path + "' is not valid JSON: " + e.what());
    }
}

// The config file with flag overrides applied.
Json merged_config(const Flags& f) {
    Json c = f.config.empty() ? Json::object() : read_json(f.config);
    if (!c.is_object()) throw UsageError("config must be a JSON object");
    if (f.seed) c["seed"] = *f.seed;
    if (f.threads) c["threads"] = *f.threads;
    if (f.trials) c["trials"] = *f.trials;
    if (!f.mode.empty()) c["mode"] = f.mode;
    if (!f.scales.empty()) c["scales"] = f.scales;
    if (f.ambient) c["ambient"] = *f.ambient;
    if (!f.space.empty()) c["space"] = to_json(parse_space(f.space));
    if (!f.form.empty()) c["form"] = f.form;
    return c;
}

std::string config_hash(const Json& c) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : c.dump()) h = (h ^ ch) * 1099511628211ULL;
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

Mode mode_of(const Json& c) {
    const std::string m = c.value("mode", std::string("auto"));
    if (m == "exact") return Mode::Exact;
    if (m == "greedy") return Mode::Greedy;
    if (m == "auto") return Mode::Auto;
    throw UsageError("mode must be exact, greedy or auto");
}

BanachSpace space_of(const Json& c) { return c.contains("space") ? space_from_json(c["space"]) : BanachSpace::scalar(); }

TrilinearForm form_of(const Json& c) {
    if (!c.contains("form")) return parse_form("product", space_of(c));
    const auto& f = c["form"];
    return f.is_string() ? parse_form(f.get<std::string>(), space_of(c)) : form_from_json(f);
}

std::array<double, 3> triple_of(const Json& c, const char* key, std::array<double, 3> fallback) {
    if (!c.contains(key)) return fallback;
    const auto& a = c[key];
    if (!a.is_array() || a.size() != 3) throw UsageError(std::string(key) + " must be an array of three exponents");
    std::array<double, 3> out{};
    for (std::size_t u = 0; u < 3; ++u) out[u] = exponent_from_json(a[u]);
    return out;
}

void require_exponent(double p, const std::string& what) {
    if (!(p > 0.0)) throw UsageError("invalid exponent " + what);
}

Sampler sampler_of(const Json& c, Sampler fallback) {
    if (!c.contains("sampler")) return fallback;
    const auto s = c["sampler"].get<std::string>();
    if (s == "white") return Sampler::White;
    if (s == "multiscale") return Sampler::Multiscale;
    throw UsageError("sampler must be white or multiscale");
}

struct Output {
    std::string name;
    std::string text;
};

Json run_embedding(const Json& c, Output& out, const std::string& format) {
    EmbeddingConfig e;
    e.space = space_of(c);
    e.p = exponent_from_json(c.value("p", Json(4.0)));
    require_exponent(e.p, "p");
    if (c.contains("q")) {
        e.q = exponent_from_json(c["q"]);
        require_exponent(*e.q, "q");
    }
    if (c.contains("scales")) e.scales = c["scales"].get<std::vector<int>>();
    e.ambient = c.value("ambient", e.ambient);
    e.trials = c.value("trials", e.trials);
    e.seed = c.value("seed", e.seed);
    const auto size = c.value("size", std::string("sup"));
    if (size == "randomized") e.size = EmbeddingSize::Randomized;
    else if (size != "sup") throw UsageError("size must be sup or randomized");
    e.random_convex = c.value("randomConvex", false);
    e.sampler = sampler_of(c, Sampler::White);
    e.sparsity = c.value("sparsity", 0.0);
    e.superlevel.mode = mode_of(c);
    e.threads = c.value("threads", 1);
    const auto T = embedding_constant(e);
    Json j = to_json(T);
    out.text = format == "csv" ? embedding_csv(T) : dump(j);
    return j;
}

Json run_bounds(const Json& c, Output& out, const std::string& format) {
    BoundConfig b;
    b.form = form_of(c);
    b.p = triple_of(c, "p", b.p);
    b.q = triple_of(c, "q", b.q);
    for (std::size_t u = 0; u < 3; ++u) {
        require_exponent(b.p[u], "p");
        require_exponent(b.q[u], "q");
    }
    if (c.contains("scales")) b.scales = c["scales"].get<std::vector<int>>();
    b.ambient = c.value("ambient", b.ambient);
    b.trials = c.value("trials", b.trials);
    b.seed = c.value("seed", b.seed);
    b.sampler = sampler_of(c, Sampler::Multiscale);
    b.sparsity = c.value("sparsity", 0.0);
    b.sparse = c.value("sparse", false);
    b.sparse_options.superlevel.mode = mode_of(c);
    b.threads = c.value("threads", 1);
    const auto T = bound_experiment(b);
    Json j = to_json(T);
    out.text = format == "csv" ? bound_csv(T) : dump(j);
    return j;
}

Json run_sparse(const Json& c, Output& out) {
    const auto pi = form_of(c);
    const auto p = triple_of(c, "p", {3.0, 3.0, 3.0}), q = triple_of(c, "q", {3.0, 3.0, 3.0});
    for (std::size_t u = 0; u < 3; ++u) {
        require_exponent(p[u], "p");
        require_exponent(q[u], "q");
    }
    SparseOptions opt;
    opt.superlevel.mode = mode_of(c);
    if (c.value("policy", std::string("cheapest")) == "smallest-constant") opt.policy = SparsePolicy::SmallestConstant;
    Triple f;
    if (c.contains("functions")) {
        for (std::size_t u = 0; u < 3; ++u) f[u] = step_from_json(c["functions"].at(u));
    } else {
        const int N = c.contains("scales") ? c["scales"].at(0).get<int>() : 2;
        const int M = c.value("ambient", 1);
        Rng rng(trial_seed(c.value("seed", std::uint64_t{42}), 0));
        for (std::size_t u = 0; u < 3; ++u) {
            f[u] = c.value("zero", false) ? StepFunction(pi.space(static_cast<int>(u)), N, M)
                                          : random_schwartz(pi.space(static_cast<int>(u)), N, M, rng, sampler_of(c, Sampler::Multiscale));
        }
    }
    const Truncation plane(f[0].fine(), f[0].support());
    const auto r = sparse_bound_ratio(pi, p, q, f, plane, opt);
    Json j;
    j["form"] = to_json(pi);
    j["truncation"] = {{"fine", plane.fine()}, {"ambient", plane.ambient()}};
    j["formValue"] = r.form;
    j["sparseForm"] = r.sparse;
    j["ratio"] = r.ratio;
    j["certificate"] = sparse_certificate(r.decomposition);
    out.text = dump(j);
    return j;
}

Json run_region(const Json& c, Output& out, const std::string& format) {
    const auto r = triple_of(c, "r", {2.0, 2.0, 2.0});
    for (double x : r) {
        if (!(x >= 2.0)) throw UsageError("every r must be at least 2");
    }
    const auto R = region_vertices(r[0], r[1], r[2]);
    Json j = to_json(R);
    out.text = format == "csv" ? region_csv(R) : dump(j);
    return j;
}

void write_outputs(const Flags& f, const std::string& command, const Json& config, const std::vector<Output>& outs,
                   double seconds) {
    if (f.output.empty()) {
        for (const auto& o : outs) std::cout << o.text;
        return;
    }
    fs::create_directories(f.output);
    Json paths = Json::array();
    for (const auto& o : outs) {
        const auto path = fs::path(f.output) / o.name;
        std::ofstream(path) << o.text;
        paths.push_back(path.string());
    }
    Json m;
    m["command"] = command;
    m["configHash"] = config_hash(config);
    m["config"] = config;
    m["seed"] = config.value("seed", std::uint64_t{42});
    m["versions"] = {{"walsh3", kVersion},
                     {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                   std::to_string(EIGEN_MINOR_VERSION)},
                     {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                           std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                           std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
                     {"cli11", CLI11_VERSION}};
    m["wallTimeSeconds"] = seconds;
    m["outputs"] = paths;
    std::ofstream(fs::path(f.output) / "manifest.json") << dump(m);
}

std::string verify_csv(const std::vector<CheckResult>& results) {
    std::ostringstream os;
    os << "suite,name,passed,instances,measured,tolerance\n";
    char buf[64];
    for (const auto& r : results) {
        os << r.suite << ',' << r.name << ',' << (r.passed ? 1 : 0) << ',' << r.instances << ',';
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", r.measured, r.tolerance);
        os << buf;
    }
    return os.str();
}

int cmd_verify(const std::string& suite, const Flags& f) {
    if (!is_suite(suite)) {
        std::cerr << "unknown suite '" << suite << "'; expected one of all";
        for (const auto& s : suite_names()) std::cerr << ", " << s;
        std::cerr << "\n";
        return 2;
    }
    const Json c = merged_config(f);
    const auto t0 = std::chrono::steady_clock::now();
    const VerifyConfig cfg = verify_config_from_json(c);
    const auto results = run_suite(suite, cfg);
    const Json report = verify_report(suite, cfg, results);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool csv = f.format == "csv";
    write_outputs(f, "verify " + suite, c, {{csv ? "verify.csv" : "verify.json", csv ? verify_csv(results) : dump(report)}}, secs);
    int failed = 0;
    for (const auto& r : results) {
        if (!r.passed) {
            std::cerr << "FAILED " << r.suite << "/" << r.name << ": " << r.detail << "\n";
            ++failed;
        }
    }
    return failed ? 1 : 0;
}

int cmd_experiment(const std::string& kind, const Flags& f) {
    const Json c = merged_config(f);
    const auto t0 = std::chrono::steady_clock::now();
    const bool csv = f.format == "csv";
    Output o{kind + (csv ? ".csv" : ".json"), {}};
    if (kind == "embedding-constants") run_embedding(c, o, f.format);
    else if (kind == "lp-bounds") run_bounds(c, o, f.format);
    else if (kind == "sparse") {
        if (csv) throw UsageError("sparse certificates are JSON only");
        run_sparse(c, o);
    } else if (kind == "region") run_region(c, o, f.format);
    else throw UsageError("unknown experiment '" + kind + "'");
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_outputs(f, "experiment " + kind, c, {o}, secs);
    return 0;
}

Json input_of(const Flags& f) {
    if (f.input.empty()) throw UsageError("--input is required");
    return read_json(f.input);
}

int cmd_transform(const Flags& f) {
    const auto g = step_from_json(input_of(f));
    write_outputs(f, "transform", Json::object(), {{"transform.json", dump(to_json(f.inverse ? inverse_wft(g) : wft(g)))}}, 0.0);
    return 0;
}

int cmd_embed(const Flags& f) {
    const auto g = step_from_json(input_of(f));
    const int N = f.scales.empty() ? g.fine() : f.scales.front();
    const int M = f.ambient.value_or(g.support());
    const Truncation plane(N, M);
    write_outputs(f, "embed", Json::object(), {{"embed.json", dump(to_json(embed(g, plane)))}}, 0.0);
    return 0;
}

// Input: {form, functions: [f0, f1, f2], truncation?: {fine, ambient}}; --form and --space override the form.
int cmd_form(const Flags& f) {
    Json in = input_of(f);
    if (!f.form.empty()) in["form"] = f.form;
    if (!f.space.empty()) in["space"] = to_json(parse_space(f.space));
    const auto pi = form_of(in);
    Triple g;
    if (!in.contains("functions") || in["functions"].size() != 3) throw UsageError("input needs three functions");
    for (std::size_t u = 0; u < 3; ++u) g[u] = step_from_json(in["functions"][u]);
    int N = g[0].fine(), M = g[0].support();
    if (in.contains("truncation")) {
        N = in["truncation"].at("fine").get<int>();
        M = in["truncation"].at("ambient").get<int>();
    }
    if (!f.scales.empty()) N = f.scales.front();
    if (f.ambient) M = *f.ambient;
    const Truncation plane(N, M);
    Json j;
    j["form"] = to_json(pi);
    j["truncation"] = {{"fine", N}, {"ambient", M}};
    j["value"] = to_json(tritile_form(pi, g, plane));
    j["direct"] = to_json(tritile_form_direct(pi, g, plane));
    write_outputs(f, "form", Json::object(), {{"form.json", dump(j)}}, 0.0);
    return 0;
}

void add_common(CLI::App* app, Flags& f) {
    app->add_option("--config", f.config, "JSON config file")->check(CLI::ExistingFile);
    app->add_option("--seed", f.seed, "master seed");
    app->add_option("--scale", f.scales, "fine scale N (repeatable)");
    app->add_option("--ambient", f.ambient, "ambient scale M");
    app->add_option("--space", f.space, "scalar | seq:P:D | schatten:P:D");
    app->add_option("--form", f.form, "product | duality | trace");
    app->add_option("--trials", f.trials, "trials per scale");
    app->add_option("--mode", f.mode, "exact | greedy | auto")->check(CLI::IsMember({"exact", "greedy", "auto"}));
    app->add_option("--output", f.output, "output directory");
    app->add_option("--format", f.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
    app->add_option("--threads", f.threads, "worker threads")->check(CLI::PositiveNumber);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Walsh-model phase-plane toolkit"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    Flags f;
    std::string suite, kind;

    auto* verify = app.add_subcommand("verify", "run an invariant suite");
    verify->add_option("suite", suite, "walsh | phase | embedding | sizes | outer | algorithms | forms | appendix | all")->required();
    add_common(verify, f);

    auto* experiment = app.add_subcommand("experiment", "run an experiment and emit tables");
    experiment->add_option("kind", kind, "embedding-constants | lp-bounds | sparse | region")->required();
    add_common(experiment, f);

    auto* transform = app.add_subcommand("transform", "Walsh-Fourier transform of a serialized function");
    add_common(transform, f);
    transform->add_option("--input", f.input, "step function JSON")->required();
    transform->add_flag("--inverse", f.inverse, "apply the inverse transform");

    auto* embed = app.add_subcommand("embed", "wave-packet embedding of a serialized function");
    add_common(embed, f);
    embed->add_option("--input", f.input, "step function JSON")->required();

    auto* form = app.add_subcommand("form", "evaluate the tritile form on serialized inputs");
    add_common(form, f);
    form->add_option("--input", f.input, "{form, functions, truncation} JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*verify) return cmd_verify(suite, f);
        if (*experiment) return cmd_experiment(kind, f);
        if (*transform) return cmd_transform(f);
        if (*embed) return cmd_embed(f);
        if (*form) return cmd_form(f);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const Json::exception& e) {
        std::cerr << "error: malformed input: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
