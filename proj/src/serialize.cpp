#include "walsh3/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace walsh3 {

namespace {

std::string num(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (std::isnan(x)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

const Json& field(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw std::invalid_argument(std::string("JSON: missing field '") + key + "'");
    return j.at(key);
}

// Real values that may be infinite.
Json real(double x) {
    if (std::isfinite(x)) return x;
    return num(x);
}

} // namespace

Json exponent_json(double p) { return std::isinf(p) ? Json("inf") : Json(p); }

double exponent_from_json(const Json& j) {
    if (j.is_string()) {
        if (j.get<std::string>() == "inf") return kInf;
        throw std::invalid_argument("JSON: exponent must be a number or \"inf\"");
    }
    return j.get<double>();
}

Json to_json(cplx z) { return Json::array({z.real(), z.imag()}); }

cplx cplx_from_json(const Json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (!j.is_array() || j.size() != 2) throw std::invalid_argument("JSON: complex numbers are [re, im]");
    return {j[0].get<double>(), j[1].get<double>()};
}

Json to_json(const Vec& v) {
    Json a = Json::array();
    for (int i = 0; i < v.size(); ++i) a.push_back(to_json(v[i]));
    return a;
}

Vec vec_from_json(const Json& j, int dim) {
    if (!j.is_array() || static_cast<int>(j.size()) != dim) throw std::invalid_argument("JSON: vector of the wrong length");
    Vec v(dim);
    for (int i = 0; i < dim; ++i) v[i] = cplx_from_json(j[static_cast<std::size_t>(i)]);
    return v;
}

Json to_json(const BanachSpace& X) {
    Json j;
    switch (X.kind()) {
    case SpaceKind::Scalar: j["kind"] = "scalar"; break;
    case SpaceKind::Sequence: j["kind"] = "sequence"; break;
    case SpaceKind::Schatten: j["kind"] = "schatten"; break;
    }
    j["p"] = exponent_json(X.p());
    j["d"] = X.d();
    return j;
}

BanachSpace space_from_json(const Json& j) {
    if (j.is_string()) return parse_space(j.get<std::string>());
    const auto kind = field(j, "kind").get<std::string>();
    if (kind == "scalar") return BanachSpace::scalar();
    const double p = exponent_from_json(field(j, "p"));
    const int d = field(j, "d").get<int>();
    if (kind == "sequence") return BanachSpace::sequence(p, d);
    if (kind == "schatten") return BanachSpace::schatten(p, d);
    throw std::invalid_argument("JSON: unknown space kind '" + kind + "'");
}

BanachSpace parse_space(const std::string& text) {
    if (text == "scalar" || text == "C") return BanachSpace::scalar();
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string s; std::getline(ss, s, ':');) parts.push_back(s);
    if (parts.size() == 3) {
        const double p = parts[1] == "inf" ? kInf : std::stod(parts[1]);
        const int d = std::stoi(parts[2]);
        if (parts[0] == "seq") return BanachSpace::sequence(p, d);
        if (parts[0] == "schatten") return BanachSpace::schatten(p, d);
    }
    throw std::invalid_argument("unknown space '" + text + "' (use scalar, seq:P:D or schatten:P:D)");
}

Json to_json(const TrilinearForm& pi) {
    Json j;
    j["kind"] = pi.name();
    j["spaces"] = Json::array({to_json(pi.space(0)), to_json(pi.space(1)), to_json(pi.space(2))});
    return j;
}

TrilinearForm form_from_json(const Json& j) {
    const auto kind = field(j, "kind").get<std::string>();
    const auto& s = field(j, "spaces");
    if (!s.is_array() || s.empty()) throw std::invalid_argument("JSON: form spaces must be a nonempty array");
    if (kind == "duality") return TrilinearForm::duality(space_from_json(s[0]));
    if (s.size() != 3) throw std::invalid_argument("JSON: form needs three spaces");
    const auto a = space_from_json(s[0]), b = space_from_json(s[1]), c = space_from_json(s[2]);
    if (kind == "product") return TrilinearForm::product_sum(a, b, c);
    if (kind == "trace") return TrilinearForm::trace_product(a, b, c);
    throw std::invalid_argument("JSON: unknown form kind '" + kind + "'");
}

TrilinearForm parse_form(const std::string& kind, const BanachSpace& X) {
    if (kind == "product") return TrilinearForm::product_sum(X, X, X);
    if (kind == "duality") return TrilinearForm::duality(X);
    if (kind == "trace") return TrilinearForm::trace_product(X, X, X);
    throw std::invalid_argument("unknown form '" + kind + "' (use product, duality or trace)");
}

Json to_json(const StepFunction& f) {
    Json j;
    j["radix"] = f.radix();
    j["fineScale"] = f.fine();
    j["supportScale"] = f.support();
    j["space"] = to_json(f.space());
    Json cells = Json::array();
    for (int k = 0; k < f.dim(); ++k) {
        Json c = Json::array();
        for (std::size_t i = 0; i < f.cells(); ++i) c.push_back(to_json(f.at(i, k)));
        cells.push_back(std::move(c));
    }
    j["cells"] = std::move(cells);
    return j;
}

StepFunction step_from_json(const Json& j) {
    const int radix = j.contains("radix") ? j.at("radix").get<int>() : kRadix;
    const BanachSpace X = j.contains("space") ? space_from_json(j.at("space")) : BanachSpace::scalar();
    StepFunction f(X, field(j, "fineScale").get<int>(), field(j, "supportScale").get<int>(), radix);
    const auto& cells = field(j, "cells");
    if (!cells.is_array() || static_cast<int>(cells.size()) != f.dim())
        throw std::invalid_argument("JSON: cells must hold one array per coordinate");
    for (int k = 0; k < f.dim(); ++k) {
        const auto& c = cells[static_cast<std::size_t>(k)];
        if (!c.is_array() || c.size() != f.cells()) throw std::invalid_argument("JSON: wrong number of cells");
        for (std::size_t i = 0; i < f.cells(); ++i) f.at(i, k) = cplx_from_json(c[i]);
    }
    return f;
}

Json to_json(const TriadicInterval& I) {
    Json j;
    j["scale"] = I.scale;
    j["offset"] = I.offset;
    return j;
}

TriadicInterval interval_from_json(const Json& j) {
    return {field(j, "scale").get<int>(), field(j, "offset").get<std::int64_t>()};
}

Json to_json(const Tritile& P) {
    Json j;
    j["timeScale"] = P.time.scale;
    j["timeOffset"] = P.time.offset;
    j["freqScale"] = P.freq.scale;
    j["freqOffset"] = P.freq.offset;
    return j;
}

Tritile tritile_from_json(const Json& j) {
    return Tritile::make({field(j, "timeScale").get<int>(), field(j, "timeOffset").get<std::int64_t>()},
                         {field(j, "freqScale").get<int>(), field(j, "freqOffset").get<std::int64_t>()});
}

Json to_json(const TileFunction& F) {
    Json j;
    j["truncation"] = {{"fine", F.plane().fine()}, {"ambient", F.plane().ambient()}};
    j["space"] = to_json(F.space());
    Json entries = Json::array();
    for (auto i : F.support()) {
        Json e;
        e["tritile"] = to_json(F.plane()[i]);
        e["values"] = Json::array({to_json(Vec(F.value(i, 0))), to_json(Vec(F.value(i, 1))), to_json(Vec(F.value(i, 2)))});
        entries.push_back(std::move(e));
    }
    j["entries"] = std::move(entries);
    return j;
}

TileFunction tile_function_from_json(const Json& j, std::optional<Truncation> plane, std::optional<BanachSpace> space) {
    const Json* entries = &j;
    if (j.is_object()) {
        const auto& t = field(j, "truncation");
        plane.emplace(field(t, "fine").get<int>(), field(t, "ambient").get<int>());
        space = space_from_json(field(j, "space"));
        entries = &field(j, "entries");
    }
    if (!plane || !space) throw std::invalid_argument("JSON: a bare tile function needs a truncation and a space");
    if (!entries->is_array()) throw std::invalid_argument("JSON: entries must be an array");
    TileFunction F(*plane, *space);
    for (const auto& e : *entries) {
        const Tritile P = tritile_from_json(field(e, "tritile"));
        const auto idx = plane->index(P);
        if (!idx) throw std::invalid_argument("JSON: tritile outside the truncation: " + P.to_string());
        const auto& v = field(e, "values");
        if (!v.is_array() || v.size() != 3) throw std::invalid_argument("JSON: values must hold three vectors");
        for (int u = 0; u < 3; ++u) F.value(*idx, u) = vec_from_json(v[static_cast<std::size_t>(u)], F.dim());
    }
    return F;
}

Json quasinorm_report(const Quasinorm& q, const OuterStructure& E) {
    Json j;
    j["value"] = real(q.value);
    j["value_lower"] = real(q.lower);
    j["value_upper"] = real(q.upper);
    j["grid"] = q.grid;
    j["mode"] = q.mode;
    j["exact"] = q.exact;
    Json cover = Json::array();
    for (auto g : q.certificate) {
        if (E.family() == Family::Trees) {
            cover.push_back(to_json(E.tree_top(g)));
        } else {
            cover.push_back(to_json(E.interval(g)));
        }
    }
    j["cover_certificate"] = std::move(cover);
    return j;
}

Json sparse_certificate(const SparseDecomposition& D) {
    Json j;
    Json gens = Json::array();
    for (const auto& g : D.generations) {
        Json a = Json::array();
        for (const auto& I : g) a.push_back(to_json(I));
        gens.push_back(std::move(a));
    }
    j["generations"] = std::move(gens);
    Json ks = Json::array(), ratios = Json::array();
    for (const auto& s : D.steps) {
        Json k;
        k["interval"] = to_json(s.interval);
        Json K = Json::array();
        for (const auto& I : s.K) K.push_back(to_json(I));
        k["K"] = std::move(K);
        k["constant"] = s.constant;
        k["kMeasure"] = s.k_measure;
        k["dMeasure"] = s.d_measure;
        ks.push_back(std::move(k));
        ratios.push_back(Json::array({real(s.bound_ratio[0]), real(s.bound_ratio[1]), real(s.bound_ratio[2])}));
    }
    j["kSets"] = std::move(ks);
    j["ratios"] = std::move(ratios);
    j["norm"] = {{"num", D.norm.num}, {"den", D.norm.den}, {"witness", to_json(D.norm.witness)}};
    j["strictNorm"] = {{"num", D.strict_norm.num}, {"den", D.strict_norm.den}, {"witness", to_json(D.strict_norm.witness)}};
    j["lhs"] = real(D.lhs);
    j["rhs"] = real(D.rhs);
    j["exact"] = D.exact;
    return j;
}

Json to_json(const ExponentRegion& R) {
    Json j;
    j["gammas"] = Json::array({R.gammas[0], R.gammas[1], R.gammas[2]});
    j["rho"] = R.rho;
    j["empty"] = R.empty();
    Json v = Json::array();
    for (const auto& b : R.vertices) v.push_back(Json::array({b[0], b[1], b[2]}));
    j["vertices"] = std::move(v);
    return j;
}

namespace {

Json per_scale(const std::vector<std::pair<int, double>>& m) {
    Json a = Json::array();
    for (const auto& [N, x] : m) a.push_back({{"scale", N}, {"max", real(x)}});
    return a;
}

} // namespace

Json to_json(const EmbeddingTable& T) {
    Json j;
    Json rows = Json::array();
    for (const auto& r : T.rows) {
        rows.push_back({{"scale", r.scale},
                        {"trial", r.trial},
                        {"ratio", real(r.ratio)},
                        {"lower", real(r.lower)},
                        {"upper", real(r.upper)},
                        {"mode", r.mode}});
    }
    j["rows"] = std::move(rows);
    j["perScaleMax"] = per_scale(T.per_scale_max);
    j["stability"] = real(T.stability);
    j["outsideRegion"] = T.outside_region;
    return j;
}

Json to_json(const BoundTable& T) {
    Json j;
    Json rows = Json::array();
    for (const auto& r : T.rows) {
        rows.push_back({{"scale", r.scale},
                        {"trial", r.trial},
                        {"ratio", real(r.ratio)},
                        {"sparseRatio", real(r.sparse_ratio)},
                        {"generations", r.generations},
                        {"intervals", r.intervals},
                        {"norm", r.norm},
                        {"strictNorm", r.strict_norm},
                        {"kRatio", r.k_ratio},
                        {"mode", r.mode}});
    }
    j["rows"] = std::move(rows);
    j["perScaleMax"] = per_scale(T.per_scale_max);
    j["perScaleSparseMax"] = per_scale(T.per_scale_sparse_max);
    j["stability"] = real(T.stability);
    j["sparseStability"] = real(T.sparse_stability);
    j["inRegion"] = T.in_region;
    return j;
}

std::string embedding_csv(const EmbeddingTable& T) {
    std::string s = "scale,trial,ratio,lower,upper,mode\n";
    for (const auto& r : T.rows) {
        s += std::to_string(r.scale) + "," + std::to_string(r.trial) + "," + num(r.ratio) + "," + num(r.lower) + "," +
             num(r.upper) + "," + r.mode + "\n";
    }
    return s;
}

std::string bound_csv(const BoundTable& T) {
    std::string s = "scale,trial,ratio,sparse_ratio,generations,intervals,norm,strict_norm,k_ratio,mode\n";
    for (const auto& r : T.rows) {
        s += std::to_string(r.scale) + "," + std::to_string(r.trial) + "," + num(r.ratio) + "," + num(r.sparse_ratio) +
             "," + std::to_string(r.generations) + "," + std::to_string(r.intervals) + "," + num(r.norm) + "," +
             num(r.strict_norm) + "," + num(r.k_ratio) + "," + r.mode + "\n";
    }
    return s;
}

std::string region_csv(const ExponentRegion& R) {
    std::string s = "beta0,beta1,beta2\n";
    for (const auto& b : R.vertices) s += num(b[0]) + "," + num(b[1]) + "," + num(b[2]) + "\n";
    return s;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

} // namespace walsh3
