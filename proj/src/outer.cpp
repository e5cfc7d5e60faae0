#include "walsh3/outer.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <stdexcept>

namespace walsh3 {

namespace {

constexpr double kTol = 1e-12;

// Trees keep their members sorted, so a tree with top scale S and finest scale
// m is laid out as blocks of 3^{S-s} members for s = m, ..., S, each ordered by time.
struct TreeLayout {
    int finest;
    int top;
    std::vector<std::size_t> block_start;

    explicit TreeLayout(const Truncation& plane, int top_scale) : finest(plane.min_scale()), top(top_scale) {
        std::size_t at = 0;
        for (int s = finest; s <= top; ++s) {
            block_start.push_back(at);
            at += static_cast<std::size_t>(ipow(kRadix, top - s));
        }
    }
    std::size_t cells() const { return static_cast<std::size_t>(ipow(kRadix, top - finest)); }
    // Member at scale s above the finest cell k.
    std::size_t at(int s, std::size_t k) const {
        return block_start[static_cast<std::size_t>(s - finest)] + k / static_cast<std::size_t>(ipow(kRadix, s - finest));
    }
};

// max over finest cells of the sum of v along the chain up to the top.
double chain_sup(const Truncation& plane, std::span<const std::size_t> members, int top_scale,
                 const std::function<double(std::size_t)>& v) {
    TreeLayout L(plane, top_scale);
    std::vector<double> acc(members.size(), 0.0);
    for (int s = L.top; s >= L.finest; --s) {
        const std::size_t lo = L.block_start[static_cast<std::size_t>(s - L.finest)];
        const std::size_t n = static_cast<std::size_t>(ipow(kRadix, L.top - s));
        for (std::size_t k = 0; k < n; ++k) {
            double a = v(members[lo + k]);
            if (s < L.top) a += acc[L.block_start[static_cast<std::size_t>(s + 1 - L.finest)] + k / kRadix];
            acc[lo + k] = a;
        }
    }
    const std::size_t lo = L.block_start[0];
    return *std::max_element(acc.begin() + static_cast<std::ptrdiff_t>(lo),
                             acc.begin() + static_cast<std::ptrdiff_t>(lo + L.cells()));
}

// Component of the tree member at scale s: -1 at the top.
int component_at(const Tritile& top, int s) {
    if (s == top.time.scale) return -1;
    return top.freq.ancestor(-s).child_index();
}

std::vector<std::size_t> support_of(const std::vector<double>& h) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < h.size(); ++i) {
        if (h[i] > 0.0) out.push_back(i);
    }
    return out;
}

// Maximal elements of a set of tritile indices.
std::vector<std::size_t> maximal_tritiles(const Truncation& plane, const std::vector<std::size_t>& K) {
    std::vector<std::size_t> out;
    for (auto a : K) {
        const Tritile A = plane[a];
        bool maximal = true;
        for (auto b : K) {
            if (b != a && tritile_leq(A, plane[b])) {
                maximal = false;
                break;
            }
        }
        if (maximal) out.push_back(a);
    }
    return out;
}

std::vector<TriadicInterval> maximal_intervals(std::vector<TriadicInterval> I) {
    std::sort(I.begin(), I.end());
    I.erase(std::unique(I.begin(), I.end()), I.end());
    std::vector<TriadicInterval> out;
    for (const auto& a : I) {
        bool maximal = true;
        for (const auto& b : I) {
            if (b != a && b.contains(a)) {
                maximal = false;
                break;
            }
        }
        if (maximal) out.push_back(a);
    }
    return out;
}

} // namespace

OuterStructure::OuterStructure(const Truncation& plane, Family family) : plane_(plane), family_(family) {
    covering_.resize(plane.size());
    if (family == Family::Trees) {
        for (std::size_t g = 0; g < plane.size(); ++g) {
            Tree T(plane, plane[g]);
            tops_.push_back(plane[g].time);
            members_.emplace_back(T.members().begin(), T.members().end());
        }
    } else {
        for (int s = plane.min_scale(); s <= plane.max_scale(); ++s) {
            for (std::int64_t t = 0; t < plane.time_count(s); ++t) {
                Strip D(plane, {s, t});
                tops_.push_back({s, t});
                members_.emplace_back(D.members().begin(), D.members().end());
            }
        }
    }
    for (std::size_t g = 0; g < members_.size(); ++g) {
        for (auto i : members_[g]) covering_[i].push_back(g);
    }
}

Tritile OuterStructure::tree_top(std::size_t g) const {
    if (family_ != Family::Trees) throw std::logic_error("OuterStructure: not a tree structure");
    return plane_[g];
}

std::optional<std::size_t> OuterStructure::strip_index(const TriadicInterval& I) const {
    if (family_ != Family::Strips) return std::nullopt;
    auto it = std::lower_bound(tops_.begin(), tops_.end(), I);
    if (it == tops_.end() || *it != I) return std::nullopt;
    return static_cast<std::size_t>(it - tops_.begin());
}

std::string OuterStructure::describe(std::size_t g) const {
    return family_ == Family::Trees ? "T(" + plane_[g].to_string() + ")" : "D(" + tops_[g].to_string() + ")";
}

StructurePtr make_structure(const Truncation& plane, Family family) {
    return std::make_shared<const OuterStructure>(plane, family);
}

// ---------------------------------------------------------------------------
// StepMeasure

double StepMeasure::operator()(double lambda) const {
    if (breaks.empty() || lambda >= breaks.back()) return 0.0;
    if (lambda < 0.0) return values.empty() ? 0.0 : values.front();
    auto it = std::upper_bound(breaks.begin(), breaks.end(), lambda);
    return values[static_cast<std::size_t>(it - breaks.begin()) - 1];
}

double StepMeasure::layer_cake(double p) const {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        s += values[i] * (std::pow(breaks[i + 1], p) - std::pow(breaks[i], p));
    }
    return s;
}

double StepMeasure::weak(double p) const {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) s = std::max(s, breaks[i + 1] * std::pow(values[i], 1.0 / p));
    return s;
}

StepMeasure StepMeasure::from_candidates(std::vector<Candidate> cands) {
    std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
        return a.level < b.level || (a.level == b.level && a.cost < b.cost);
    });
    StepMeasure m;
    if (cands.empty() || cands.front().level > 0.0) throw std::logic_error("StepMeasure: no zero-level candidate");
    double best = kInf;
    for (auto& c : cands) {
        if (std::isinf(best) || c.cost < best - kTol * std::max(1.0, best)) {
            best = c.cost;
            if (!m.breaks.empty() && c.level <= m.breaks.back()) {
                m.values.back() = best;
                m.covers.back() = std::move(c.cover);
            } else {
                m.breaks.push_back(std::max(0.0, c.level));
                m.values.push_back(best);
                m.covers.push_back(std::move(c.cover));
            }
        }
    }
    // The final step has cost 0 and only marks where σ vanishes.
    if (m.values.back() > 0.0) throw std::logic_error("StepMeasure: no empty-removal candidate");
    m.values.pop_back();
    m.covers.pop_back();
    if (m.values.empty()) m.breaks.clear();
    return m;
}

// ---------------------------------------------------------------------------
// Sizes

const std::vector<std::size_t>& Size::relevant() const {
    std::call_once(relevant_once_, [&] {
        std::vector<std::uint8_t> seen(structure_->size(), 0);
        for (auto i : support()) {
            for (auto g : structure_->covering(i)) seen[g] = 1;
        }
        for (std::size_t g = 0; g < seen.size(); ++g) {
            if (seen[g]) relevant_.push_back(g);
        }
    });
    return relevant_;
}

double Size::global(const TritileMask& keep) const {
    double s = 0.0;
    for (auto g : relevant()) {
        bool any = false;
        for (auto i : structure_->members(g)) {
            if (keep[i]) {
                any = true;
                break;
            }
        }
        if (any) s = std::max(s, evaluate(g, keep));
    }
    return s;
}

ScalarSize::ScalarSize(StructurePtr structure, ScalarSizeKind kind, std::vector<double> h)
    : Size(std::move(structure)), kind_(kind), h_(std::move(h)) {
    if (h_.size() != this->structure().plane().size()) throw std::invalid_argument("ScalarSize: length mismatch");
    for (double x : h_) {
        if (!(x >= 0.0) || !std::isfinite(x)) throw std::invalid_argument("ScalarSize: values must be finite and >= 0");
    }
    if (kind_ == ScalarSizeKind::Sinf1 && this->structure().family() != Family::Trees) {
        throw std::invalid_argument("ScalarSize: S^(inf,1) is defined on trees only");
    }
    support_ = support_of(h_);
}

std::string ScalarSize::name() const {
    switch (kind_) {
    case ScalarSizeKind::S1: return "S1";
    case ScalarSizeKind::Sinf: return "Sinf";
    case ScalarSizeKind::Sinf1: return "Sinf1";
    }
    return "?";
}

double ScalarSize::evaluate(std::size_t g, const TritileMask& keep) const {
    const auto& E = structure();
    const auto mem = E.members(g);
    switch (kind_) {
    case ScalarSizeKind::Sinf: {
        double s = 0.0;
        for (auto i : mem) {
            if (keep[i]) s = std::max(s, h_[i]);
        }
        return s;
    }
    case ScalarSizeKind::S1: {
        double s = 0.0;
        for (auto i : mem) {
            if (keep[i]) s += h_[i] * E.plane()[i].time.length();
        }
        return s / E.premeasure(g);
    }
    case ScalarSizeKind::Sinf1:
        return chain_sup(E.plane(), mem, E.interval(g).scale, [&](std::size_t i) { return keep[i] ? h_[i] : 0.0; });
    }
    return 0.0;
}

std::optional<StepMeasure> ScalarSize::closed_form(const TritileMask& keep) const {
    if (kind_ != ScalarSizeKind::Sinf) return std::nullopt;
    const Truncation& plane = structure().plane();
    // Removal of {h > λ} is forced, and its cheapest cover is over its maximal
    // elements: tritiles (trees) or time intervals (strips) with gs ≤ λ < h.
    std::vector<std::pair<double, double>> hi_lo; // (h, gs) per candidate
    std::vector<double> weight;
    std::vector<std::size_t> ids;
    if (structure().family() == Family::Trees) {
        std::vector<double> above(plane.size(), 0.0); // max kept h strictly above
        for (std::size_t i = plane.size(); i-- > 0;) {
            double a = 0.0;
            for (auto s : plane.successors(i)) a = std::max({a, above[s], keep[s] ? h_[s] : 0.0});
            above[i] = a;
        }
        for (auto i : support_) {
            if (keep[i] && h_[i] > above[i]) {
                hi_lo.push_back({h_[i], above[i]});
                weight.push_back(plane[i].time.length());
                ids.push_back(i);
            }
        }
    } else {
        std::map<TriadicInterval, double> H;
        for (auto i : support_) {
            if (keep[i]) {
                auto& x = H[plane[i].time];
                x = std::max(x, h_[i]);
            }
        }
        for (const auto& [I, hv] : H) {
            double G = 0.0;
            for (TriadicInterval J = I; J.scale < plane.max_scale();) {
                J = J.parent();
                auto it = H.find(J);
                if (it != H.end()) G = std::max(G, it->second);
            }
            if (hv > G) {
                hi_lo.push_back({hv, G});
                weight.push_back(I.length());
                ids.push_back(*structure().strip_index(I));
            }
        }
    }
    StepMeasure m;
    m.mode = "closed-form";
    std::vector<double> br{0.0};
    for (auto [h, g] : hi_lo) {
        br.push_back(h);
        br.push_back(g);
    }
    std::sort(br.begin(), br.end());
    br.erase(std::unique(br.begin(), br.end()), br.end());
    if (br.size() == 1) return m;
    for (std::size_t k = 0; k + 1 < br.size(); ++k) {
        const double lam = br[k];
        double v = 0.0;
        std::vector<std::size_t> cover;
        for (std::size_t c = 0; c < hi_lo.size(); ++c) {
            if (hi_lo[c].second <= lam && lam < hi_lo[c].first) {
                v += weight[c];
                cover.push_back(ids[c]);
            }
        }
        if (!m.values.empty() && v == m.values.back()) continue;
        m.breaks.push_back(lam);
        m.values.push_back(v);
        m.covers.push_back(std::move(cover));
    }
    m.breaks.push_back(br.back());
    return m;
}

RandomizedSize::RandomizedSize(StructurePtr structure, TileFunction F) : Size(std::move(structure)), F_(std::move(F)) {
    if (this->structure().family() != Family::Trees) throw std::invalid_argument("RandomizedSize: defined on trees only");
    if (!(F_.plane() == this->structure().plane())) throw std::invalid_argument("RandomizedSize: truncation mismatch");
    support_ = F_.support();
}

RandomizedSize::Parts RandomizedSize::parts(std::size_t g, const TritileMask& keep) const {
    const auto& E = structure();
    const Truncation& plane = E.plane();
    const auto mem = E.members(g);
    const Tritile top = plane[g];
    const auto& st = defect_stencil(plane);
    const BanachSpace& X = F_.space();
    Parts out;

    for (auto i : mem) {
        if (keep[i]) out.sup = std::max(out.sup, F_.triple_norm(i));
    }

    // Predecessors of tree members lie in the tree, so 𝖣𝖾𝖿(1_keep F) is local.
    out.defect = chain_sup(plane, mem, top.time.scale, [&](std::size_t i) {
        double m = 0.0;
        for (int u = 0; u < 3; ++u) {
            Vec d = keep[i] ? Vec(F_.value(i, u)) : X.zero();
            if (st[i].has_children) {
                for (int j = 0; j < 3; ++j) {
                    if (keep[st[i].below[j]]) d -= st[i].coeff[u][j] * F_.value(st[i].below[j], st[i].v);
                }
            }
            m = std::max(m, X.norm(d));
        }
        return m;
    });

    TreeLayout L(plane, top.time.scale);
    const std::size_t cells = L.cells();
    for (int u = 0; u < 3; ++u) {
        for (int v = 0; v < 3; ++v) {
            if (v == u) continue;
            double avg = 0.0;
            for (std::size_t k = 0; k < cells; ++k) {
                std::vector<Vec> ys;
                for (int s = L.finest; s <= L.top; ++s) {
                    const int c = component_at(top, s);
                    if (c >= 0 && c != u) continue;
                    const std::size_t i = mem[L.at(s, k)];
                    if (!keep[i]) continue;
                    Vec y = F_.value(i, v);
                    if (y.squaredNorm() > 0.0) ys.push_back(std::move(y));
                }
                if (ys.empty()) continue;
                if (X.is_hilbert()) {
                    for (const auto& y : ys) avg += std::pow(X.norm(y), 2);
                } else {
                    avg += std::pow(rademacher_moment(ys, X, 2.0).value, 2);
                }
            }
            out.lacunary[static_cast<std::size_t>(u)] += std::sqrt(avg / static_cast<double>(cells));
        }
    }
    return out;
}

double RandomizedSize::evaluate(std::size_t g, const TritileMask& keep) const { return parts(g, keep).total(); }

AppendixSize::AppendixSize(StructurePtr structure, TileFunction F, TrilinearForm pi, int u, RBoundBudget budget)
    : Size(std::move(structure)), F_(std::move(F)), pi_(std::move(pi)), u_(u), budget_(budget) {
    if (this->structure().family() != Family::Trees) throw std::invalid_argument("AppendixSize: defined on trees only");
    if (u < 0 || u > 2) throw std::invalid_argument("AppendixSize: slot must be 0, 1 or 2");
    if (!(F_.space() == pi_.space(u))) throw std::invalid_argument("AppendixSize: space does not match the form slot");
    for (std::size_t i = 0; i < F_.size(); ++i) {
        if (F_.component_norm(i, u) > 0.0) support_.push_back(i);
    }
}

std::vector<double> AppendixSize::magnitudes() const {
    std::vector<double> m(F_.size());
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = F_.component_norm(i, u_);
    return m;
}

std::array<double, 3> AppendixSize::parts(std::size_t g, const TritileMask& keep) const {
    const auto& E = structure();
    const Truncation& plane = E.plane();
    const auto mem = E.members(g);
    const Tritile top = plane[g];
    const BanachSpace& X = F_.space();
    TreeLayout L(plane, top.time.scale);
    const std::size_t cells = L.cells();
    std::array<double, 3> out{};
    for (int v = 0; v < 3; ++v) {
        double avg = 0.0;
        for (std::size_t k = 0; k < cells; ++k) {
            std::vector<Vec> ys;
            for (int s = L.finest; s <= L.top; ++s) {
                const int c = component_at(top, s);
                if (c >= 0 && c != v) continue;
                const std::size_t i = mem[L.at(s, k)];
                if (!keep[i]) continue;
                Vec y = F_.value(i, u_);
                if (y.squaredNorm() > 0.0) ys.push_back(std::move(y));
            }
            if (ys.empty()) continue;
            const double r = v == u_ ? r_bound_estimate(pi_, u_, ys, budget_).lower : rademacher_moment(ys, X, 3.0).value;
            avg += r * r * r;
        }
        out[static_cast<std::size_t>(v)] = std::cbrt(avg / static_cast<double>(cells));
    }
    return out;
}

double AppendixSize::evaluate(std::size_t g, const TritileMask& keep) const {
    auto p = parts(g, keep);
    return p[0] + p[1] + p[2];
}

// ---------------------------------------------------------------------------
// Superlevel measures

const char* mode_name(Mode m) {
    switch (m) {
    case Mode::Exact: return "exact";
    case Mode::Greedy: return "greedy";
    case Mode::Auto: return "auto";
    }
    return "?";
}

namespace {

std::vector<std::size_t> kept_support(const Size& S, const TritileMask& keep) {
    std::vector<std::size_t> out;
    for (auto i : S.support()) {
        if (keep[i]) out.push_back(i);
    }
    return out;
}

StepMeasure exact_trees(const Size& S, const TritileMask& keep, const std::vector<std::size_t>& supp) {
    const Truncation& plane = S.structure().plane();
    const std::size_t n = supp.size();
    std::vector<StepMeasure::Candidate> cands;
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
        TritileMask k = keep;
        std::vector<std::size_t> K;
        for (std::size_t b = 0; b < n; ++b) {
            if (m >> b & 1U) {
                k[supp[b]] = 0;
                K.push_back(supp[b]);
            }
        }
        auto top = maximal_tritiles(plane, K);
        double cost = 0.0;
        for (auto i : top) cost += plane[i].time.length();
        cands.push_back({S.global(k), cost, std::move(top)});
    }
    auto out = StepMeasure::from_candidates(std::move(cands));
    out.mode = "exact";
    return out;
}

// Relevant intervals: ancestors of the kept support times, as strip indices.
struct StripForest {
    std::vector<std::size_t> nodes;
    std::map<std::size_t, std::vector<std::size_t>> children;
    std::vector<std::size_t> roots;
};

StripForest strip_forest(const OuterStructure& E, const std::vector<std::size_t>& supp) {
    const Truncation& plane = E.plane();
    std::map<TriadicInterval, std::size_t> seen;
    for (auto i : supp) {
        for (TriadicInterval J = plane[i].time;; J = J.parent()) {
            if (seen.count(J)) break;
            seen[J] = *E.strip_index(J);
            if (J.scale >= plane.max_scale()) break;
        }
    }
    StripForest F;
    for (const auto& [J, g] : seen) {
        F.nodes.push_back(g);
        if (J.scale < plane.max_scale() && seen.count(J.parent())) {
            F.children[seen[J.parent()]].push_back(g);
        } else {
            F.roots.push_back(g);
        }
    }
    return F;
}

// Number of antichains below g, saturating at cap + 1.
std::size_t antichain_count(const StripForest& F, std::size_t g, std::size_t cap) {
    std::size_t prod = 1;
    auto it = F.children.find(g);
    if (it != F.children.end()) {
        for (auto c : it->second) prod = std::min(cap + 1, prod * antichain_count(F, c, cap));
    }
    return std::min(cap + 1, prod + 1);
}

void antichains(const StripForest& F, std::size_t g, std::vector<std::vector<std::size_t>>& out) {
    std::vector<std::vector<std::size_t>> acc{{}};
    auto it = F.children.find(g);
    if (it != F.children.end()) {
        for (auto c : it->second) {
            std::vector<std::vector<std::size_t>> sub;
            antichains(F, c, sub);
            std::vector<std::vector<std::size_t>> next;
            for (const auto& a : acc) {
                for (const auto& b : sub) {
                    auto x = a;
                    x.insert(x.end(), b.begin(), b.end());
                    next.push_back(std::move(x));
                }
            }
            acc = std::move(next);
        }
    }
    acc.push_back({g});
    out = std::move(acc);
}

StepMeasure exact_strips(const Size& S, const TritileMask& keep, const std::vector<std::size_t>& supp,
                         std::size_t cap, bool& too_big) {
    const OuterStructure& E = S.structure();
    auto F = strip_forest(E, supp);
    std::size_t total = 1;
    for (auto r : F.roots) total = std::min(cap + 1, total * antichain_count(F, r, cap));
    too_big = total > cap;
    if (too_big) return {};
    std::vector<std::vector<std::size_t>> all{{}};
    for (auto r : F.roots) {
        std::vector<std::vector<std::size_t>> sub, next;
        antichains(F, r, sub);
        for (const auto& a : all) {
            for (const auto& b : sub) {
                auto x = a;
                x.insert(x.end(), b.begin(), b.end());
                next.push_back(std::move(x));
            }
        }
        all = std::move(next);
    }
    std::vector<StepMeasure::Candidate> cands;
    for (auto& A : all) {
        TritileMask k = keep;
        double cost = 0.0;
        for (auto g : A) {
            cost += E.premeasure(g);
            for (auto i : E.members(g)) k[i] = 0;
        }
        cands.push_back({S.global(k), cost, std::move(A)});
    }
    auto out = StepMeasure::from_candidates(std::move(cands));
    out.mode = "exact";
    return out;
}

StepMeasure greedy_trees(const Size& S, const TritileMask& keep, const std::vector<std::size_t>& supp,
                         const SuperlevelOptions& opt) {
    const OuterStructure& E = S.structure();
    const Truncation& plane = E.plane();
    const auto mag = S.magnitudes();
    std::vector<double> levels;
    for (auto i : supp) levels.push_back(mag[i]);
    std::sort(levels.begin(), levels.end(), std::greater<>());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    if (levels.size() > opt.greedy_thresholds && opt.greedy_thresholds >= 2) {
        std::vector<double> sub;
        const std::size_t n = opt.greedy_thresholds;
        for (std::size_t k = 0; k < n; ++k) sub.push_back(levels[k * (levels.size() - 1) / (n - 1)]);
        sub.erase(std::unique(sub.begin(), sub.end()), sub.end());
        levels = std::move(sub);
    }
    std::vector<StepMeasure::Candidate> cands;
    cands.push_back({S.global(keep), 0.0, {}});
    for (double t : levels) {
        std::vector<std::size_t> K;
        for (auto i : supp) {
            if (mag[i] >= t) K.push_back(i);
        }
        auto top = maximal_tritiles(plane, K);
        TritileMask k = keep;
        double cost = 0.0;
        for (auto g : top) {
            cost += E.premeasure(g);
            for (auto i : E.members(g)) k[i] = 0;
        }
        cands.push_back({S.global(k), cost, std::move(top)});
    }
    // Removing every maximal support tritile leaves nothing.
    auto all = maximal_tritiles(plane, supp);
    double cost = 0.0;
    for (auto g : all) cost += E.premeasure(g);
    cands.push_back({0.0, cost, std::move(all)});
    auto out = StepMeasure::from_candidates(std::move(cands));
    out.exact = false;
    out.mode = "greedy";
    return out;
}

StepMeasure greedy_strips(const Size& S, const TritileMask& keep, const std::vector<std::size_t>& supp,
                          const SuperlevelOptions& opt) {
    const OuterStructure& E = S.structure();
    auto F = strip_forest(E, supp);
    // Finest intervals first.
    std::vector<std::size_t> order = F.nodes;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return E.interval(a).scale < E.interval(b).scale; });

    const double top = S.global(keep);
    std::vector<StepMeasure::Candidate> cands;
    cands.push_back({top, 0.0, {}});
    {
        double cost = 0.0;
        for (auto r : F.roots) cost += E.premeasure(r);
        cands.push_back({0.0, cost, F.roots});
    }
    double lam = top;
    for (std::size_t step = 0; step < opt.grid_levels && lam > 0.0; ++step) {
        lam /= opt.grid_ratio;
        TritileMask k = keep;
        std::vector<std::uint8_t> removed(E.size(), 0);
        for (auto g : order) {
            if (S.evaluate(g, k) > lam) {
                removed[g] = 1;
                for (auto i : E.members(g)) k[i] = 0;
            }
        }
        std::vector<std::size_t> cover;
        double cost = 0.0;
        for (auto g : F.nodes) {
            if (!removed[g]) continue;
            bool maximal = true;
            for (TriadicInterval J = E.interval(g); J.scale < E.plane().max_scale();) {
                J = J.parent();
                if (removed[*E.strip_index(J)]) {
                    maximal = false;
                    break;
                }
            }
            if (maximal) {
                cover.push_back(g);
                cost += E.premeasure(g);
            }
        }
        cands.push_back({S.global(k), cost, std::move(cover)});
    }
    auto out = StepMeasure::from_candidates(std::move(cands));
    out.exact = false;
    out.mode = "greedy";
    return out;
}

} // namespace

StepMeasure superlevel_measure(const Size& S, const TritileMask& keep, const SuperlevelOptions& opt) {
    if (keep.size() != S.structure().plane().size()) throw std::invalid_argument("superlevel: mask size mismatch");
    if (!(opt.grid_ratio > 1.0)) throw std::invalid_argument("superlevel: grid ratio must exceed 1");
    if (auto cf = S.closed_form(keep)) return *cf;
    const auto supp = kept_support(S, keep);
    if (supp.empty()) return StepMeasure{{}, {}, {}, true, "exact"};
    const bool trees = S.structure().family() == Family::Trees;
    if (opt.mode != Mode::Greedy) {
        if (trees) {
            if (supp.size() <= opt.exact_support_cap) return exact_trees(S, keep, supp);
        } else {
            bool too_big = false;
            auto m = exact_strips(S, keep, supp, opt.antichain_cap, too_big);
            if (!too_big) return m;
        }
        if (opt.mode == Mode::Exact) throw std::length_error("superlevel: instance too large for exact mode");
    }
    return trees ? greedy_trees(S, keep, supp, opt) : greedy_strips(S, keep, supp, opt);
}

StepMeasure superlevel_measure(const Size& S, const SuperlevelOptions& opt) {
    return superlevel_measure(S, S.structure().plane().full_mask(), opt);
}

double superlevel(const Size& S, double lambda, const SuperlevelOptions& opt) {
    if (!(lambda >= 0.0)) throw std::invalid_argument("superlevel: lambda must be >= 0");
    return superlevel_measure(S, opt)(lambda);
}

Quasinorm outer_lp(const Size& S, double p, const TritileMask& keep, const SuperlevelOptions& opt,
                   std::span<const double> grid) {
    if (!(p > 0.0)) throw std::invalid_argument("outer_lp: p must be positive");
    Quasinorm q;
    if (std::isinf(p)) {
        q.value = q.lower = q.upper = S.global(keep);
        q.mode = "sup";
        return q;
    }
    const StepMeasure m = superlevel_measure(S, keep, opt);
    q.exact = m.exact;
    q.mode = m.mode;
    if (!m.covers.empty()) q.certificate = m.covers.front();
    if (m.breaks.empty()) return q;
    q.value = std::pow(m.layer_cake(p), 1.0 / p);

    const double hi = m.breaks.back();
    const double lo = m.breaks.size() > 2 ? m.breaks[1] : hi;
    if (grid.empty()) {
        for (double g = hi;; g /= opt.grid_ratio) {
            q.grid.push_back(g);
            if (g < lo) break;
        }
        std::reverse(q.grid.begin(), q.grid.end());
    } else {
        q.grid.assign(grid.begin(), grid.end());
        if (!std::is_sorted(q.grid.begin(), q.grid.end()) || q.grid.front() <= 0.0 || q.grid.front() > lo ||
            q.grid.back() < hi) {
            throw std::invalid_argument("outer_lp: grid does not bracket the superlevel breakpoints");
        }
    }
    double up = m(0.0) * std::pow(q.grid.front(), p), dn = m(q.grid.front()) * std::pow(q.grid.front(), p);
    for (std::size_t i = 0; i + 1 < q.grid.size(); ++i) {
        const double w = std::pow(q.grid[i + 1], p) - std::pow(q.grid[i], p);
        up += m(q.grid[i]) * w;
        dn += m(q.grid[i + 1]) * w;
    }
    q.upper = std::pow(up, 1.0 / p);
    q.lower = std::pow(dn, 1.0 / p);
    return q;
}

Quasinorm outer_lp(const Size& S, double p, const SuperlevelOptions& opt) {
    return outer_lp(S, p, S.structure().plane().full_mask(), opt);
}

Quasinorm outer_lp_weak(const Size& S, double p, const SuperlevelOptions& opt) {
    if (!(p > 0.0) || std::isinf(p)) throw std::invalid_argument("outer_lp_weak: p must be finite and positive");
    const StepMeasure m = superlevel_measure(S, opt);
    Quasinorm q;
    q.exact = m.exact;
    q.mode = m.mode;
    q.value = q.lower = q.upper = m.weak(p);
    return q;
}

double outer_linf(const Size& S) { return S.global(S.structure().plane().full_mask()); }

IteratedSize::IteratedSize(StructurePtr strips, SizePtr inner, double q, SuperlevelOptions inner_options)
    : Size(std::move(strips)), inner_(std::move(inner)), q_(q), inner_options_(inner_options) {
    if (structure().family() != Family::Strips) throw std::invalid_argument("IteratedSize: outer structure must be strips");
    if (inner_->structure().family() != Family::Trees) throw std::invalid_argument("IteratedSize: inner size must be on trees");
    if (!(structure().plane() == inner_->structure().plane())) throw std::invalid_argument("IteratedSize: truncation mismatch");
    if (!(q > 0.0) || std::isinf(q)) throw std::invalid_argument("IteratedSize: q must be finite and positive");
}

std::string IteratedSize::name() const { return "L" + std::to_string(q_) + "(" + inner_->name() + ")"; }

double IteratedSize::evaluate(std::size_t g, const TritileMask& keep) const {
    const auto& E = structure();
    TritileMask k(keep.size(), 0);
    std::string key = std::to_string(g) + ":";
    for (auto i : E.members(g)) {
        k[i] = keep[i];
    }
    for (auto i : inner_->support()) {
        if (k[i]) key += std::to_string(i) + ",";
    }
    {
        std::lock_guard<std::mutex> lock(mutex_);
        if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    }
    const double v = outer_lp(*inner_, q_, k, inner_options_).value * std::pow(E.premeasure(g), -1.0 / q_);
    std::lock_guard<std::mutex> lock(mutex_);
    cache_.emplace(std::move(key), v);
    return v;
}

std::size_t IteratedSize::cache_size() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return cache_.size();
}

Quasinorm iterated_outer_lp(SizePtr inner, double p, double q, const SuperlevelOptions& opt) {
    auto strips = make_structure(inner->structure().plane(), Family::Strips);
    IteratedSize S(std::move(strips), std::move(inner), q, opt);
    return outer_lp(S, p, opt);
}

// ---------------------------------------------------------------------------
// Outer measure of a set

double outer_measure_closed_form(const OuterStructure& E, const TritileMask& A) {
    const Truncation& plane = E.plane();
    std::vector<std::size_t> K;
    for (std::size_t i = 0; i < A.size(); ++i) {
        if (A[i]) K.push_back(i);
    }
    double s = 0.0;
    if (E.family() == Family::Trees) {
        for (auto i : maximal_tritiles(plane, K)) s += plane[i].time.length();
    } else {
        std::vector<TriadicInterval> I;
        for (auto i : K) I.push_back(plane[i].time);
        for (const auto& J : maximal_intervals(I)) s += J.length();
    }
    return s;
}

namespace {

CoverResult greedy_cover(const OuterStructure& E, const std::vector<std::size_t>& elems) {
    const Truncation& plane = E.plane();
    std::vector<std::uint8_t> covered(plane.size(), 1);
    for (auto i : elems) covered[i] = 0;
    std::size_t left = elems.size();
    CoverResult out;
    out.exact = false;
    while (left > 0) {
        std::size_t best = 0;
        double best_ratio = -1.0, best_gain = 0.0;
        std::vector<std::uint8_t> tried(E.size(), 0);
        for (auto i : elems) {
            if (covered[i]) continue;
            for (auto g : E.covering(i)) {
                if (tried[g]) continue;
                tried[g] = 1;
                double gain = 0.0;
                for (auto j : E.members(g)) {
                    if (!covered[j]) gain += plane[j].time.length();
                }
                const double r = gain / E.premeasure(g);
                if (r > best_ratio + kTol || (std::abs(r - best_ratio) <= kTol && gain > best_gain)) {
                    best = g;
                    best_ratio = r;
                    best_gain = gain;
                }
            }
        }
        for (auto j : E.members(best)) {
            if (!covered[j]) {
                covered[j] = 1;
                --left;
            }
        }
        out.cover.push_back(best);
        out.value += E.premeasure(best);
    }
    return out;
}

struct CoverSearch {
    const OuterStructure& E;
    std::vector<std::size_t> elems;
    std::vector<int> count; // times each element is covered
    std::vector<std::size_t> chosen;
    CoverResult best;
    std::size_t nodes = 0;
    std::size_t node_cap = 2'000'000;

    double min_cost(std::size_t e) const {
        double m = kInf;
        for (auto g : E.covering(elems[e])) m = std::min(m, E.premeasure(g));
        return m;
    }
    bool share(std::size_t a, std::size_t b) const {
        auto A = E.covering(elems[a]), B = E.covering(elems[b]);
        std::size_t i = 0, j = 0;
        while (i < A.size() && j < B.size()) {
            if (A[i] == B[j]) return true;
            A[i] < B[j] ? ++i : ++j;
        }
        return false;
    }
    // Uncovered elements no two of which share a generator each need their own.
    double lower_bound(const std::vector<std::size_t>& open) const {
        std::vector<std::pair<double, std::size_t>> c;
        for (auto e : open) c.push_back({min_cost(e), e});
        std::sort(c.begin(), c.end(), std::greater<>());
        std::vector<std::size_t> indep;
        double s = 0.0;
        for (auto [m, e] : c) {
            bool ok = true;
            for (auto f : indep) {
                if (share(e, f)) {
                    ok = false;
                    break;
                }
            }
            if (ok) {
                indep.push_back(e);
                s += m;
            }
        }
        return s;
    }
    void apply(std::size_t g, int d, const std::vector<std::size_t>& pos) {
        for (auto j : E.members(g)) {
            if (pos[j] != SIZE_MAX) count[pos[j]] += d;
        }
    }
    void run(double cost, const std::vector<std::size_t>& pos) {
        if (++nodes > node_cap) {
            best.exact = false;
            return;
        }
        std::vector<std::size_t> open;
        for (std::size_t e = 0; e < elems.size(); ++e) {
            if (count[e] == 0) open.push_back(e);
        }
        if (open.empty()) {
            if (cost < best.value - kTol) {
                best.value = cost;
                best.cover = chosen;
            }
            return;
        }
        if (cost + lower_bound(open) >= best.value - kTol) return;
        std::size_t pick = open.front();
        for (auto e : open) {
            if (E.covering(elems[e]).size() < E.covering(elems[pick]).size()) pick = e;
        }
        std::vector<std::size_t> gens(E.covering(elems[pick]).begin(), E.covering(elems[pick]).end());
        std::sort(gens.begin(), gens.end(), [&](auto a, auto b) { return E.premeasure(a) < E.premeasure(b); });
        for (auto g : gens) {
            apply(g, 1, pos);
            chosen.push_back(g);
            run(cost + E.premeasure(g), pos);
            chosen.pop_back();
            apply(g, -1, pos);
        }
    }
};

} // namespace

CoverResult outer_measure(const OuterStructure& E, const TritileMask& A, Mode mode) {
    if (A.size() != E.plane().size()) throw std::invalid_argument("outer_measure: mask size mismatch");
    std::vector<std::size_t> elems;
    for (std::size_t i = 0; i < A.size(); ++i) {
        if (A[i]) elems.push_back(i);
    }
    if (elems.empty()) return {};
    CoverResult g = greedy_cover(E, elems);
    if (mode == Mode::Greedy) return g;
    CoverSearch s{E, elems, std::vector<int>(elems.size(), 0), {}, g, 0};
    s.best.exact = true;
    std::vector<std::size_t> pos(E.plane().size(), SIZE_MAX);
    for (std::size_t e = 0; e < elems.size(); ++e) pos[elems[e]] = e;
    s.run(0.0, pos);
    if (!s.best.exact && mode == Mode::Exact) throw std::length_error("outer_measure: search budget exhausted");
    return s.best;
}

double rn_domination_ratio(const Truncation& plane, const std::vector<double>& h, const SuperlevelOptions& opt) {
    double num = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) num += h[i] * plane[i].time.length();
    if (num == 0.0) return 0.0;
    ScalarSize S(make_structure(plane, Family::Trees), ScalarSizeKind::S1, h);
    return num / outer_lp(S, 1.0, opt).value;
}

double defect_forest_ratio(const TileFunction& F, const Tree& T, const TritileMask& A) {
    const Truncation& plane = F.plane();
    const auto top = T.top().time.scale;
    const TileFunction D = defect(F), DA = defect(F.restricted(A));
    const double num = chain_sup(plane, T.members(), top, [&](std::size_t i) { return DA.triple_norm(i); });
    double sup = 0.0;
    for (auto i : T.members()) sup = std::max(sup, F.triple_norm(i));
    const double den = sup + chain_sup(plane, T.members(), top, [&](std::size_t i) { return D.triple_norm(i); });
    return den == 0.0 ? 0.0 : num / den;
}

} // namespace walsh3
