#include "walsh3/forms.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace walsh3 {

namespace {

void check_spaces(const TrilinearForm& pi, const Triple& f) {
    for (int u = 0; u < 3; ++u) {
        if (!(f[static_cast<std::size_t>(u)].space() == pi.space(u)))
            throw std::invalid_argument("tritile form: space of f" + std::to_string(u) + " does not match the form");
    }
}

void check_tiles(const TrilinearForm& pi, const TileTriple& F) {
    for (int u = 0; u < 3; ++u) {
        const auto* Fu = F[static_cast<std::size_t>(u)];
        if (Fu == nullptr) throw std::invalid_argument("tile triple: null function");
        if (!(Fu->space() == pi.space(u))) throw std::invalid_argument("tile triple: space does not match the form");
        if (!(Fu->plane() == F[0]->plane())) throw std::invalid_argument("tile triple: truncation mismatch");
    }
}

double reciprocal_sum(const std::array<double, 3>& p) {
    double s = 0.0;
    for (double x : p) {
        if (!(x >= 1.0)) throw std::invalid_argument("exponents must lie in [1, inf]");
        s += 1.0 / x;
    }
    return s;
}

double outer_norm(const Size& S, double p, const SuperlevelOptions& opt, bool& exact) {
    if (std::isinf(p)) return outer_linf(S);
    const Quasinorm q = outer_lp(S, p, opt);
    exact = exact && q.exact;
    return q.value;
}

// Runs body(k) for k < n on up to `threads` workers.
template <class Body>
void parallel_for(std::size_t n, int threads, Body body) {
    const auto workers = static_cast<std::size_t>(std::max(1, threads));
    if (workers == 1 || n < 2) {
        for (std::size_t k = 0; k < n; ++k) body(k);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mutex;
    for (std::size_t w = 0; w < std::min(workers, n); ++w) {
        pool.emplace_back([&] {
            for (std::size_t k; (k = next++) < n;) {
                try {
                    body(k);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

} // namespace

cplx tritile_form(const TrilinearForm& pi, const Triple& f, const Truncation& plane) {
    check_spaces(pi, f);
    const TileFunction F0 = embed(f[0], plane), F1 = embed(f[1], plane), F2 = embed(f[2], plane);
    cplx sum{};
    for (std::size_t i = 0; i < plane.size(); ++i) {
        sum += pi.apply(F0.raw(i, 0), F1.raw(i, 1), F2.raw(i, 2)) * plane[i].time.length();
    }
    return sum;
}

cplx tritile_form_direct(const TrilinearForm& pi, const Triple& f, const Truncation& plane) {
    check_spaces(pi, f);
    cplx sum{};
    for (std::size_t i = 0; i < plane.size(); ++i) {
        const Tritile P = plane[i];
        const Vec a = packet_coefficient(f[0], P.subtile(0));
        const Vec b = packet_coefficient(f[1], P.subtile(1));
        const Vec c = packet_coefficient(f[2], P.subtile(2));
        sum += pi(a, b, c) * P.time.length();
    }
    return sum;
}

std::vector<double> extended_magnitudes(const TrilinearForm& pi, const TileTriple& F) {
    check_tiles(pi, F);
    std::vector<double> h(F[0]->size());
    for (std::size_t i = 0; i < h.size(); ++i) h[i] = std::abs(pi.apply(F[0]->raw(i, 0), F[1]->raw(i, 1), F[2]->raw(i, 2)));
    return h;
}

double extended_mass(const TrilinearForm& pi, const TileTriple& F) {
    const auto h = extended_magnitudes(pi, F);
    const Truncation& plane = F[0]->plane();
    double s = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) s += h[i] * plane[i].time.length();
    return s;
}

double size_holder_ratio(const StructurePtr& trees, std::size_t top, const TileTriple& F, const TrilinearForm& pi) {
    if (trees->family() != Family::Trees) throw std::invalid_argument("size_holder_ratio: tree structure required");
    const auto h = extended_magnitudes(pi, F);
    const TritileMask all = trees->plane().full_mask();
    const double num = ScalarSize(trees, ScalarSizeKind::S1, h).evaluate(top, all);
    if (num == 0.0) return 0.0;
    double den = 1.0;
    for (const auto* Fu : F) den *= RandomizedSize(trees, *Fu).evaluate(top, all);
    return den == 0.0 ? kInf : num / den;
}

double size_holder_ratio(const Tree& T, const TileTriple& F, const TrilinearForm& pi) {
    const auto trees = make_structure(T.plane(), Family::Trees);
    return size_holder_ratio(trees, *T.plane().index(T.top()), F, pi);
}

ChainRatio outer_holder_ratio(const TrilinearForm& pi, const TileTriple& F, const std::array<double, 3>& p,
                              const SuperlevelOptions& opt) {
    const double inv = reciprocal_sum(p);
    const auto trees = make_structure(F[0]->plane(), Family::Trees);
    ChainRatio out;
    const ScalarSize S(trees, ScalarSizeKind::S1, extended_magnitudes(pi, F));
    out.numerator = inv == 0.0 ? outer_linf(S) : outer_norm(S, 1.0 / inv, opt, out.exact);
    if (out.numerator == 0.0) return out;
    double den = 1.0;
    for (std::size_t u = 0; u < 3; ++u) {
        out.factors[u] = outer_norm(RandomizedSize(trees, *F[u]), p[u], opt, out.exact);
        den *= out.factors[u];
    }
    out.ratio = den == 0.0 ? kInf : out.numerator / den;
    return out;
}

ChainRatio holder_rn_ratio(const TrilinearForm& pi, const TileTriple& F, const std::array<double, 3>& p,
                           const SuperlevelOptions& opt) {
    if (std::abs(reciprocal_sum(p) - 1.0) > 1e-12) throw std::invalid_argument("holder_rn_ratio: p must be a Hölder triple");
    const auto trees = make_structure(F[0]->plane(), Family::Trees);
    ChainRatio out;
    out.numerator = extended_mass(pi, F);
    if (out.numerator == 0.0) return out;
    double den = 1.0;
    for (std::size_t u = 0; u < 3; ++u) {
        out.factors[u] = outer_norm(RandomizedSize(trees, *F[u]), p[u], opt, out.exact);
        den *= out.factors[u];
    }
    out.ratio = den == 0.0 ? kInf : out.numerator / den;
    return out;
}

ChainRatio iterated_rn_ratio(const TrilinearForm& pi, const TileTriple& F, const std::array<double, 3>& p,
                             const std::array<double, 3>& q, const SuperlevelOptions& opt) {
    if (std::abs(reciprocal_sum(p) - 1.0) > 1e-12 || std::abs(reciprocal_sum(q) - 1.0) > 1e-12)
        throw std::invalid_argument("iterated_rn_ratio: p and q must be Hölder triples");
    for (std::size_t u = 0; u < 3; ++u) {
        if (std::isinf(p[u]) || std::isinf(q[u])) throw std::invalid_argument("iterated_rn_ratio: finite exponents required");
    }
    const auto trees = make_structure(F[0]->plane(), Family::Trees);
    ChainRatio out;
    out.numerator = extended_mass(pi, F);
    if (out.numerator == 0.0) return out;
    double den = 1.0;
    for (std::size_t u = 0; u < 3; ++u) {
        const auto q_u = iterated_outer_lp(std::make_shared<RandomizedSize>(trees, *F[u]), p[u], q[u], opt);
        out.exact = out.exact && q_u.exact;
        out.factors[u] = q_u.value;
        den *= q_u.value;
    }
    out.ratio = den == 0.0 ? kInf : out.numerator / den;
    return out;
}

const char* sampler_name(Sampler s) { return s == Sampler::White ? "white" : "multiscale"; }

StepFunction random_schwartz(const BanachSpace& space, int fine, int support, Rng& rng, Sampler sampler,
                             double sparsity) {
    if (sampler == Sampler::White || fine <= 1) return random_step_function(space, fine, support, rng, sparsity);
    const int res = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(fine));
    return random_step_function(space, res, support, rng, sparsity).regrid(fine, support);
}

double stability_of(const std::vector<std::pair<int, double>>& per_scale) {
    if (per_scale.empty()) return 1.0;
    double lo = kInf, hi = 0.0;
    for (const auto& [N, m] : per_scale) {
        lo = std::min(lo, m);
        hi = std::max(hi, m);
    }
    if (hi == 0.0) return 1.0;
    return lo > 0.0 ? hi / lo : kInf;
}

const char* embedding_size_name(EmbeddingSize s) { return s == EmbeddingSize::Sup ? "Sinf" : "RS"; }

TritileMask random_convex_set(const Truncation& plane, Rng& rng) {
    std::vector<Tritile> tops, bottoms;
    const std::size_t k = 1 + rng() % 3;
    for (std::size_t j = 0; j < k; ++j) tops.push_back(random_tritile(plane, rng));
    const TritileMask down = down_closure(plane, plane.mask_of(tops));
    std::vector<std::size_t> below;
    for (std::size_t i = 0; i < down.size(); ++i) {
        if (down[i]) below.push_back(i);
    }
    for (std::size_t j = 0; j < k; ++j) bottoms.push_back(plane[below[rng() % below.size()]]);
    const TritileMask up = up_closure(plane, plane.mask_of(bottoms));
    TritileMask A = plane.empty_mask();
    for (std::size_t i = 0; i < A.size(); ++i) A[i] = down[i] && up[i];
    return A;
}

bool embedding_exponents_admissible(double r, double p, std::optional<double> q) {
    if (!q) return p > r && std::isfinite(p);
    if (!(p > 1.0) || std::isinf(p)) return false;
    return *q > conjugate_exponent(std::min(p, r)) * (r - 1.0);
}

EmbeddingRow embedding_ratio(const StepFunction& f, const Truncation& plane, const TritileMask& A,
                             const EmbeddingConfig& cfg) {
    EmbeddingRow row;
    row.scale = plane.fine();
    const double fp = lp_norm(f, cfg.p);
    const TileFunction F = embed(f, plane).restricted(A);
    const auto trees = make_structure(plane, Family::Trees);
    SizePtr S;
    if (cfg.size == EmbeddingSize::Sup) {
        S = std::make_shared<ScalarSize>(trees, ScalarSizeKind::Sinf, F.triple_norms());
    } else {
        S = std::make_shared<RandomizedSize>(trees, F);
    }
    const Quasinorm n = cfg.q ? iterated_outer_lp(S, cfg.p, *cfg.q, cfg.superlevel) : outer_lp(*S, cfg.p, cfg.superlevel);
    row.mode = n.mode;
    if (fp == 0.0) return row;
    row.ratio = n.value / fp;
    row.lower = n.lower / fp;
    row.upper = n.upper / fp;
    return row;
}

EmbeddingTable embedding_constant(const EmbeddingConfig& cfg) {
    EmbeddingTable table;
    table.outside_region = !embedding_exponents_admissible(cfg.space.hilbertian_exponent(), cfg.p, cfg.q);
    for (int N : cfg.scales) {
        const Truncation plane(N, cfg.ambient);
        std::vector<EmbeddingRow> rows(cfg.trials);
        const std::uint64_t scale_seed = trial_seed(cfg.seed, static_cast<std::uint64_t>(N));
        parallel_for(cfg.trials, cfg.threads, [&](std::size_t t) {
            Rng rng(trial_seed(scale_seed, t));
            const StepFunction f = random_schwartz(cfg.space, N, cfg.ambient, rng, cfg.sampler, cfg.sparsity);
            const TritileMask A = cfg.random_convex ? random_convex_set(plane, rng) : plane.full_mask();
            rows[t] = embedding_ratio(f, plane, A, cfg);
            rows[t].trial = t;
        });
        double mx = 0.0;
        for (const auto& r : rows) mx = std::max(mx, r.ratio);
        table.per_scale_max.push_back({N, mx});
        table.rows.insert(table.rows.end(), rows.begin(), rows.end());
    }
    table.stability = stability_of(table.per_scale_max);
    return table;
}

LpBound lp_bound_ratio(const TrilinearForm& pi, const std::array<double, 3>& p, const Triple& f,
                       const Truncation& plane) {
    LpBound out;
    std::array<double, 3> r{};
    for (int u = 0; u < 3; ++u) r[static_cast<std::size_t>(u)] = pi.space(u).hilbertian_exponent();
    out.in_region = region_contains(p, r);
    out.form = std::abs(tritile_form(pi, f, plane));
    double den = 1.0;
    for (std::size_t u = 0; u < 3; ++u) den *= lp_norm(f[u], p[u]);
    out.ratio = den == 0.0 ? 0.0 : out.form / den;
    return out;
}

SparseBound sparse_bound_ratio(const TrilinearForm& pi, const std::array<double, 3>& p,
                               const std::array<double, 3>& q, const Triple& f, const Truncation& plane,
                               const SparseOptions& opt) {
    check_spaces(pi, f);
    SparseBound out;
    const TileFunction F0 = embed(f[0], plane), F1 = embed(f[1], plane), F2 = embed(f[2], plane);
    out.decomposition = sparse_decompose(pi, {&F0, &F1, &F2}, p, q, plane.time_box(), opt);
    cplx form{};
    for (std::size_t i = 0; i < plane.size(); ++i) form += pi.apply(F0.raw(i, 0), F1.raw(i, 1), F2.raw(i, 2)) * plane[i].time.length();
    out.form = std::abs(form);
    out.sparse = sparse_form(out.decomposition.all(), f, p);
    out.ratio = out.sparse == 0.0 ? 0.0 : out.form / out.sparse;
    return out;
}

BoundTable bound_experiment(const BoundConfig& cfg) {
    BoundTable table;
    std::array<double, 3> r{};
    for (int u = 0; u < 3; ++u) r[static_cast<std::size_t>(u)] = cfg.form.space(u).hilbertian_exponent();
    table.in_region = region_contains(cfg.p, r);
    for (int N : cfg.scales) {
        const Truncation plane(N, cfg.ambient);
        std::vector<BoundRow> rows(cfg.trials);
        const std::uint64_t scale_seed = trial_seed(cfg.seed, static_cast<std::uint64_t>(N));
        parallel_for(cfg.trials, cfg.threads, [&](std::size_t t) {
            Rng rng(trial_seed(scale_seed, t));
            Triple f;
            for (int u = 0; u < 3; ++u)
                f[static_cast<std::size_t>(u)] = random_schwartz(cfg.form.space(u), N, cfg.ambient, rng, cfg.sampler, cfg.sparsity);
            BoundRow& row = rows[t];
            row.scale = N;
            row.trial = t;
            row.mode = "exact";
            row.ratio = lp_bound_ratio(cfg.form, cfg.p, f, plane).ratio;
            if (!cfg.sparse) return;
            const SparseBound s = sparse_bound_ratio(cfg.form, cfg.p, cfg.q, f, plane, cfg.sparse_options);
            const auto& D = s.decomposition;
            row.sparse_ratio = s.ratio;
            row.generations = D.generations.size();
            row.intervals = D.all().size();
            row.norm = D.norm.value();
            row.strict_norm = D.strict_norm.value();
            for (const auto& st : D.steps) row.k_ratio = std::max(row.k_ratio, st.k_measure / st.d_measure);
            if (!D.exact) row.mode = "greedy";
        });
        double mx = 0.0, smx = 0.0;
        for (const auto& row : rows) {
            mx = std::max(mx, row.ratio);
            smx = std::max(smx, row.sparse_ratio);
        }
        table.per_scale_max.push_back({N, mx});
        table.per_scale_sparse_max.push_back({N, smx});
        table.rows.insert(table.rows.end(), rows.begin(), rows.end());
    }
    table.stability = stability_of(table.per_scale_max);
    table.sparse_stability = stability_of(table.per_scale_sparse_max);
    return table;
}

double wave_packet_plancherel(const StepFunction& f, const PacketFault& fault) {
    const int N = f.fine(), M = f.support();
    // Coordinatewise, so the identity holds for any coordinate space.
    double energy = 0.0;
    for (const cplx& z : f.data()) energy += std::norm(z) * f.cell_width();
    if (energy == 0.0) return 0.0;
    double worst = 0.0;
    for (int s = -N; s <= M; ++s) {
        double sum = 0.0;
        for (std::int64_t t = 0; t < ipow(kRadix, M - s); ++t) {
            for (std::int64_t w = 0; w < ipow(kRadix, N + s); ++w) {
                const Tile P{{s, t}, {-s, w}};
                StepFunction packet = wave_packet(P, N, M);
                if (fault.phase && w % kRadix == 1) {
                    // Rotate the middle third of the time interval for every third frequency.
                    const auto n = static_cast<std::size_t>(ipow(kRadix, s + N));
                    const auto first = static_cast<std::size_t>(t) * n;
                    for (std::size_t c = first + n / 3; c < first + 2 * n / 3; ++c) packet.at(c) *= root_of_unity(1);
                }
                const Vec coeff = pairing(f, packet);
                sum += coeff.squaredNorm() * P.time.length();
            }
        }
        worst = std::max(worst, std::abs(sum - energy) / energy);
    }
    return worst;
}

} // namespace walsh3
