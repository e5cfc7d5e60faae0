#include "walsh3/algorithms.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace walsh3 {

SelectionResult tile_selection(const Truncation& plane, std::span<const double> h, double lambda) {
    if (h.size() != plane.size()) throw std::invalid_argument("tile_selection: length mismatch");
    if (!(lambda > 0.0)) throw std::invalid_argument("tile_selection: lambda must be positive");
    // above[i]: largest h strictly above tritile i.
    std::vector<double> above(plane.size(), 0.0);
    for (std::size_t i = plane.size(); i-- > 0;) {
        double a = 0.0;
        for (auto s : plane.successors(i)) a = std::max({a, above[s], h[s]});
        above[i] = a;
    }
    SelectionResult out;
    out.covered = plane.empty_mask();
    for (std::size_t i = 0; i < plane.size(); ++i) {
        if (h[i] > lambda && !(above[i] > lambda)) {
            out.selected.push_back(i);
            out.cost += plane[i].time.length();
            const Tree T(plane, plane[i]);
            for (auto j : T.members()) out.covered[j] = 1;
        }
    }
    return out;
}

SelectionResult tile_selection(const TileFunction& F, double lambda) {
    const auto h = F.triple_norms();
    return tile_selection(F.plane(), h, lambda);
}

void check_selection(const Truncation& plane, std::span<const double> h, double lambda, const SelectionResult& s) {
    for (std::size_t a = 0; a < s.selected.size(); ++a) {
        const Tritile A = plane[s.selected[a]];
        if (!(h[s.selected[a]] > lambda)) throw std::logic_error("tile_selection: selected tritile below level");
        for (std::size_t b = a + 1; b < s.selected.size(); ++b) {
            if (!tritiles_disjoint(A, plane[s.selected[b]])) throw std::logic_error("tile_selection: overlap");
        }
    }
    for (std::size_t i = 0; i < plane.size(); ++i) {
        if (!s.covered[i] && h[i] > lambda) throw std::logic_error("tile_selection: exceedance outside E");
        if (h[i] > lambda) {
            bool inside = false;
            for (auto b : s.selected) inside = inside || tritile_leq(plane[i], plane[b]);
            if (!inside) throw std::logic_error("tile_selection: exceedance not below a selected tritile");
        }
    }
}

namespace {

// ‖f‖ per cell of `ambient`, on a grid fine enough to resolve it.
struct CellNorms {
    int fine = 0;
    TriadicInterval ambient;
    std::vector<double> v;

    CellNorms(const StepFunction& f, const TriadicInterval& amb) : ambient(amb) {
        if (f.radix() != kRadix) throw std::invalid_argument("triadic intervals need radix 3");
        int support = f.support();
        while (!TriadicInterval{support, 0}.contains(amb)) ++support;
        fine = std::max(f.fine(), -amb.scale);
        const StepFunction g = f.regrid(fine, support);
        const auto n = static_cast<std::size_t>(ipow(kRadix, amb.scale + fine));
        const auto lo = static_cast<std::size_t>(amb.offset) * n;
        for (std::size_t c = 0; c < n; ++c) v.push_back(g.space().norm(&g.data()[(lo + c) * g.dim()]));
    }
    double width() const { return rpow(kRadix, -fine); }
    TriadicInterval cell(std::size_t c) const {
        return {-fine, ambient.offset * static_cast<std::int64_t>(v.size()) + static_cast<std::int64_t>(c)};
    }
    // Cell range of J ⊆ ambient.
    std::pair<std::size_t, std::size_t> range(const TriadicInterval& J) const {
        const auto n = static_cast<std::size_t>(ipow(kRadix, J.scale + fine));
        const auto first = static_cast<std::size_t>(J.offset) * n -
                           static_cast<std::size_t>(ambient.offset) * v.size();
        return {first, first + n};
    }
    // Averages of ‖f‖^s over every triadic J ⊆ ambient, coarsest first.
    std::vector<std::pair<TriadicInterval, double>> averages(double s) const {
        std::vector<std::pair<TriadicInterval, double>> out;
        std::vector<double> level(v.size());
        for (std::size_t c = 0; c < v.size(); ++c) level[c] = std::pow(v[c], s);
        std::vector<std::vector<double>> layers{level};
        while (layers.back().size() > 1) {
            const auto& a = layers.back();
            std::vector<double> b(a.size() / kRadix);
            for (std::size_t k = 0; k < b.size(); ++k) b[k] = (a[3 * k] + a[3 * k + 1] + a[3 * k + 2]) / 3.0;
            layers.push_back(std::move(b));
        }
        for (std::size_t L = layers.size(); L-- > 0;) {
            const int scale = -fine + static_cast<int>(L);
            const auto count = static_cast<std::int64_t>(layers[L].size());
            for (std::int64_t k = 0; k < count; ++k) {
                out.push_back({{scale, ambient.offset * count + k}, layers[L][static_cast<std::size_t>(k)]});
            }
        }
        return out;
    }
    // M_s‖f‖ per cell, over triadic intervals inside the ambient interval.
    std::vector<double> maximal(double s) const {
        std::vector<double> M(v.size(), 0.0);
        for (const auto& [J, a] : averages(s)) {
            auto [lo, hi] = range(J);
            for (std::size_t c = lo; c < hi; ++c) M[c] = std::max(M[c], a);
        }
        for (auto& m : M) m = std::pow(m, 1.0 / s);
        return M;
    }
};

std::vector<TriadicInterval> maximal_of(const std::vector<TriadicInterval>& I) {
    std::set<TriadicInterval> S(I.begin(), I.end());
    std::vector<TriadicInterval> out;
    for (const auto& J : S) {
        bool maximal = true;
        for (const auto& K : S) {
            if (K != J && K.contains(J)) {
                maximal = false;
                break;
            }
        }
        if (maximal) out.push_back(J);
    }
    return out;
}

} // namespace

ExceptionalSet exceptional_strips(const StepFunction& f, double p, double r, double lambda, const TriadicInterval& ambient) {
    if (!(p > 1.0) || std::isinf(p)) throw std::invalid_argument("exceptional_strips: p must be in (1, inf)");
    if (!(lambda > 0.0)) throw std::invalid_argument("exceptional_strips: lambda must be positive");
    const double s = std::min(p, r);
    CellNorms N(f, ambient);
    std::vector<TriadicInterval> hit;
    for (const auto& [J, a] : N.averages(s)) {
        if (a > std::pow(lambda, s)) hit.push_back(J);
    }
    ExceptionalSet out;
    out.intervals = maximal_of(hit);
    for (const auto& J : out.intervals) out.cost += J.length();
    double norm = 0.0;
    for (double x : N.v) norm += std::pow(x, p) * N.width();
    out.weak_ratio = norm > 0.0 ? out.cost * std::pow(lambda, p) / norm : 0.0;
    return out;
}

LevelDecomposition level_decomposition(const StepFunction& f, double lambda, double p,
                                       std::span<const TriadicInterval> exceptional, const TriadicInterval& ID,
                                       const TriadicInterval& ambient) {
    if (!(lambda > 0.0)) throw std::invalid_argument("level_decomposition: lambda must be positive");
    if (!ambient.contains(ID)) throw std::invalid_argument("level_decomposition: I_D outside the ambient interval");
    CellNorms N(f, ambient);
    const auto M = N.maximal(p);
    int support = f.support();
    while (!TriadicInterval{support, 0}.contains(ambient)) ++support;
    const StepFunction g = f.regrid(N.fine, support);

    // I_n ∩ I_D for the exceptional intervals meeting I_D.
    std::vector<TriadicInterval> In;
    for (const auto& I : exceptional) {
        if (ID.contains(I)) In.push_back(I);
        else if (I.contains(ID)) In.push_back(ID);
    }
    In = maximal_of(In);

    const auto [dlo, dhi] = N.range(ID);
    std::vector<int> level(N.v.size(), -2); // -2 outside I_D
    for (std::size_t c = dlo; c < dhi; ++c) level[c] = -1;
    LevelDecomposition out;
    for (const auto& I : In) {
        const auto [lo, hi] = N.range(I);
        int kmax = 0;
        for (std::size_t c = lo; c < hi; ++c) {
            int k = 0;
            while (M[c] > std::ldexp(lambda, k + 1)) ++k;
            level[c] = k;
            kmax = std::max(kmax, k);
        }
        // Σ_m |J_{n,k,m}| is the measure of {M > 2^k λ} inside I_n.
        for (int k = 0; k <= kmax + 1; ++k) {
            double meas = 0.0;
            for (std::size_t c = lo; c < hi; ++c) {
                if (M[c] > std::ldexp(lambda, k)) meas += N.width();
            }
            out.measure_ratio = std::max(out.measure_ratio, meas / (std::pow(2.0, -k * p) * I.length()));
        }
    }
    int top = -1;
    for (int k : level) top = std::max(top, k);
    for (int k = -1; k <= top; ++k) out.pieces.emplace_back(f.space(), N.fine, support);
    const auto base = static_cast<std::size_t>(ambient.offset) * N.v.size();
    const int d = f.dim();
    for (std::size_t c = 0; c < N.v.size(); ++c) {
        if (level[c] < -1) continue;
        auto& piece = out.pieces[static_cast<std::size_t>(level[c] + 1)];
        std::copy_n(&g.data()[(base + c) * d], d, &piece.data()[(base + c) * d]);
        out.sup_ratio = std::max(out.sup_ratio, N.v[c] / std::ldexp(lambda, level[c]));
    }
    return out;
}

SparseNorm sparse_norm(std::span<const TriadicInterval> G, bool strict) {
    SparseNorm out;
    out.num = 0;
    if (G.empty()) return out;
    std::set<TriadicInterval> S(G.begin(), G.end());
    int lo = S.begin()->scale, hi = lo;
    for (const auto& J : S) {
        lo = std::min(lo, J.scale);
        hi = std::max(hi, J.scale);
    }
    std::map<TriadicInterval, std::int64_t> mass;
    for (const auto& J : S) {
        const std::int64_t w = ipow(kRadix, J.scale - lo);
        if (!strict) mass[J] += w;
        else mass.try_emplace(J, 0);
        for (TriadicInterval A = J; A.scale < hi;) {
            A = A.parent();
            mass[A] += w;
        }
    }
    out.den = 1;
    for (const auto& [I, m] : mass) {
        const std::int64_t len = ipow(kRadix, I.scale - lo);
        if (static_cast<__int128>(m) * out.den > static_cast<__int128>(out.num) * len) {
            out.num = m;
            out.den = len;
            out.witness = I;
        }
    }
    return out;
}

double sparse_form(std::span<const TriadicInterval> G, const std::array<StepFunction, 3>& f, const std::array<double, 3>& p) {
    double s = 0.0;
    for (const auto& I : G) {
        double t = I.length();
        for (int u = 0; u < 3; ++u) t *= lp_average(f[static_cast<std::size_t>(u)], I, p[static_cast<std::size_t>(u)]);
        s += t;
    }
    return s;
}

std::vector<TriadicInterval> SparseDecomposition::all() const {
    std::vector<TriadicInterval> out;
    for (const auto& g : generations) out.insert(out.end(), g.begin(), g.end());
    return out;
}

SparseDecomposition sparse_decompose(const TrilinearForm& pi, const std::array<const TileFunction*, 3>& F,
                                     const std::array<double, 3>& p, const std::array<double, 3>& q,
                                     const TriadicInterval& I0, const SparseOptions& opt) {
    const Truncation& plane = F[0]->plane();
    for (int u = 0; u < 3; ++u) {
        if (!(F[static_cast<std::size_t>(u)]->plane() == plane)) throw std::invalid_argument("sparse_decompose: truncation mismatch");
        if (!(F[static_cast<std::size_t>(u)]->space() == pi.space(u))) throw std::invalid_argument("sparse_decompose: space mismatch");
        if (!(p[static_cast<std::size_t>(u)] >= 1.0) || std::isinf(p[static_cast<std::size_t>(u)])) {
            throw std::invalid_argument("sparse_decompose: p_u must be in [1, inf)");
        }
    }
    if (!is_holder_triple(q[0], q[1], q[2])) throw std::invalid_argument("sparse_decompose: q must be a Hoelder triple");
    if (!plane.time_box().contains(I0) || I0.scale < plane.min_scale()) {
        throw std::invalid_argument("sparse_decompose: I0 outside the truncation");
    }
    if (opt.constants.empty()) throw std::invalid_argument("sparse_decompose: no constants");
    const TritileMask D0 = Strip(plane, I0).mask();
    for (int u = 0; u < 3; ++u) {
        for (std::size_t i = 0; i < plane.size(); ++i) {
            if (!D0[i] && F[static_cast<std::size_t>(u)]->triple_norm(i) > 0.0) {
                throw std::invalid_argument("sparse_decompose: F_u not supported in D(I0)");
            }
        }
    }

    auto trees = make_structure(plane, Family::Trees);
    auto strips = make_structure(plane, Family::Strips);
    std::array<std::unique_ptr<IteratedSize>, 3> It;
    for (std::size_t u = 0; u < 3; ++u) {
        auto inner = std::make_shared<ScalarSize>(trees, ScalarSizeKind::Sinf, F[u]->triple_norms());
        It[u] = std::make_unique<IteratedSize>(strips, inner, q[u], opt.superlevel);
    }

    SparseDecomposition out;
    std::vector<TriadicInterval> gen{I0};
    while (!gen.empty()) {
        if (out.generations.size() >= opt.max_generations) throw std::runtime_error("sparse_decompose: generation limit reached");
        out.generations.push_back(gen);
        std::vector<TriadicInterval> next;
        for (const auto& I : gen) {
            const TritileMask D = Strip(plane, I).mask();
            const double nuD = I.length();
            std::array<StepMeasure, 3> m;
            std::array<double, 3> A{};
            double term = I.length();
            for (std::size_t u = 0; u < 3; ++u) {
                m[u] = superlevel_measure(*It[u], D, opt.superlevel);
                out.exact = out.exact && m[u].exact;
                A[u] = std::pow(m[u].layer_cake(p[u]), 1.0 / p[u]);
                term *= std::pow(I.length(), -1.0 / p[u]) * A[u];
            }
            out.rhs += term;

            SparseStep best;
            best.interval = I;
            best.d_measure = nuD;
            best.k_measure = kInf;
            for (double c : opt.constants) {
                std::vector<TriadicInterval> K;
                std::array<double, 3> lam{};
                for (std::size_t u = 0; u < 3; ++u) {
                    lam[u] = c * std::pow(nuD, -1.0 / p[u]) * A[u];
                    if (A[u] == 0.0) continue;
                    const auto& br = m[u].breaks;
                    if (br.empty() || lam[u] >= br.back()) continue;
                    const auto k = static_cast<std::size_t>(std::upper_bound(br.begin(), br.end(), lam[u]) - br.begin()) - 1;
                    for (auto g : m[u].covers[k]) {
                        const TriadicInterval J = strips->interval(g);
                        K.push_back(J.contains(I) ? I : J);
                    }
                }
                K = maximal_of(K);
                double nu = 0.0;
                for (const auto& J : K) nu += J.length();
                const bool take = opt.policy == SparsePolicy::Cheapest ? nu < best.k_measure
                                                                        : !(2.0 * best.k_measure <= nuD);
                if (take) {
                    TritileMask rest = D;
                    for (const auto& J : K) {
                        const Strip SJ(plane, J);
                        for (auto i : SJ.members()) rest[i] = 0;
                    }
                    const auto g = *strips->strip_index(I);
                    for (std::size_t u = 0; u < 3; ++u) {
                        const double lhs = It[u]->evaluate(g, rest);
                        best.bound_ratio[u] = A[u] > 0.0 ? lhs / (std::pow(nuD, -1.0 / p[u]) * A[u]) : 0.0;
                        if (best.bound_ratio[u] > c * (1 + 1e-9)) {
                            throw std::logic_error("sparse_decompose: removal does not meet the per-strip bound");
                        }
                    }
                    best.K = K;
                    best.k_measure = nu;
                    best.constant = c;
                }
            }
            if (!(2.0 * best.k_measure <= nuD)) {
                throw std::runtime_error("sparse_decompose: no admissible K for " + I.to_string() + " (nu(K) = " +
                                         std::to_string(best.k_measure) + ", nu(D) = " + std::to_string(nuD) + ")");
            }
            next.insert(next.end(), best.K.begin(), best.K.end());
            out.steps.push_back(std::move(best));
        }
        std::sort(next.begin(), next.end());
        gen = std::move(next);
    }

    for (std::size_t i = 0; i < plane.size(); ++i) {
        if (!D0[i]) continue;
        out.lhs += std::abs(pi.apply(F[0]->raw(i, 0), F[1]->raw(i, 1), F[2]->raw(i, 2))) * plane[i].time.length();
    }
    const auto G = out.all();
    out.norm = sparse_norm(G);
    out.strict_norm = sparse_norm(G, true);
    return out;
}

ExponentRegion region_vertices(double r0, double r1, double r2) {
    ExponentRegion R;
    const std::array<double, 3> r{r0, r1, r2};
    for (int u = 0; u < 3; ++u) {
        if (!(r[static_cast<std::size_t>(u)] >= 2.0) || std::isinf(r[static_cast<std::size_t>(u)])) {
            throw std::invalid_argument("region_vertices: r_u must be in [2, inf)");
        }
        R.gammas[static_cast<std::size_t>(u)] = 1.0 / r[static_cast<std::size_t>(u)];
    }
    R.rho = R.gammas[0] + R.gammas[1] + R.gammas[2] - 1.0;
    if (R.empty()) return R;
    for (int u = 0; u < 3; ++u) {
        for (int w = 0; w < 3; ++w) {
            if (w == u) continue;
            const int v = 3 - u - w;
            std::array<double, 3> b{};
            const double gw = R.gammas[static_cast<std::size_t>(w)];
            b[static_cast<std::size_t>(u)] = R.gammas[static_cast<std::size_t>(u)];
            b[static_cast<std::size_t>(w)] = gw + R.rho * (1.0 / gw - 1.0);
            b[static_cast<std::size_t>(v)] = 1.0 - b[static_cast<std::size_t>(u)] - b[static_cast<std::size_t>(w)];
            R.vertices.push_back(b);
        }
    }
    return R;
}

bool region_contains(const std::array<double, 3>& p, const std::array<double, 3>& r) {
    double s = 0.0;
    for (std::size_t u = 0; u < 3; ++u) {
        if (!(p[u] > 1.0) || std::isinf(p[u])) return false;
        if (!(r[u] >= 2.0)) throw std::invalid_argument("region_contains: r_u must be >= 2");
        s += 1.0 / (conjugate_exponent(std::min(p[u], r[u])) * (r[u] - 1.0));
    }
    return s > 1.0 + 1e-12;
}

bool polygon_contains(const ExponentRegion& R, const std::array<double, 3>& beta) {
    if (R.empty()) return false;
    for (double b : beta) {
        if (!(b > 1e-12 && b < 1.0 - 1e-12)) return false;
    }
    using P2 = std::array<double, 2>;
    std::vector<P2> pts;
    for (const auto& v : R.vertices) pts.push_back({v[0], v[1]});
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    auto cross = [](const P2& o, const P2& a, const P2& b) {
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    };
    std::vector<P2> hull(2 * pts.size());
    std::size_t k = 0;
    for (const auto& pt : pts) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], pt) <= 0) --k;
        hull[k++] = pt;
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
        while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    if (hull.size() < 3) return false;
    const P2 x{beta[0], beta[1]};
    for (std::size_t i = 0; i < hull.size(); ++i) {
        const P2& a = hull[i];
        const P2& b = hull[(i + 1) % hull.size()];
        const double len = std::hypot(b[0] - a[0], b[1] - a[1]);
        if (!(cross(a, b, x) > 1e-12 * len)) return false;
    }
    return true;
}

} // namespace walsh3
