#include "walsh3/verify.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "walsh3/randomized.hpp"

namespace walsh3 {

namespace {

std::uint64_t name_hash(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) h = (h ^ c) * 1099511628211ULL;
    return h;
}

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

// Worst value seen, instance count and the first failure.
class Tally {
public:
    Tally(std::string suite, std::string name, double tolerance) {
        r_.suite = std::move(suite);
        r_.name = std::move(name);
        r_.tolerance = tolerance;
    }
    void see(double v) {
        if (std::isnan(v)) v = kInf;
        r_.measured = std::max(r_.measured, v);
    }
    void count(std::size_t n = 1) { r_.instances += n; }
    void require(bool ok, const std::string& why) {
        if (ok) return;
        if (r_.passed) r_.detail = why;
        r_.passed = false;
    }
    Json& values() { return r_.values; }
    CheckResult done(std::string note = {}) {
        if (r_.measured > r_.tolerance) require(false, "measured " + fmt(r_.measured) + " exceeds " + fmt(r_.tolerance));
        if (r_.passed) r_.detail = std::move(note);
        return r_;
    }

private:
    CheckResult r_;
};

Rng check_rng(const VerifyConfig& cfg, const std::string& name) { return Rng(trial_seed(cfg.seed, name_hash(name))); }

double uniform(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }
int pick(Rng& rng, int lo, int hi) { return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1)); }

WalshPoint random_point(Rng& rng, int lo, int hi) {
    std::map<int, int> d;
    for (int n = lo; n <= hi; ++n) d[n] = static_cast<int>(rng() % 3);
    return WalshPoint::from_digits(d);
}

bool real_leq(const TriadicInterval& a, const TriadicInterval& b) { return b.left() <= a.left() && a.right() <= b.right(); }
bool brute_leq(const Tritile& a, const Tritile& b) { return real_leq(a.time, b.time) && real_leq(b.freq, a.freq); }

TritileMask complement(TritileMask m) {
    for (auto& b : m) b = !b;
    return m;
}

TritileMask intersect(TritileMask a, const TritileMask& b) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = a[i] && b[i];
    return a;
}

TritileMask random_set(const Truncation& plane, Rng& rng, std::size_t n) {
    TritileMask A = plane.empty_mask();
    for (std::size_t k = 0; k < n; ++k) A[rng() % plane.size()] = 1;
    return A;
}

TritileMask union_of_trees(const Truncation& plane, Rng& rng, int k) {
    TritileMask A = plane.empty_mask();
    for (int j = 0; j < k; ++j) {
        const Tree S(plane, random_tritile(plane, rng));
        for (auto i : S.members()) A[i] = 1;
    }
    return A;
}

Tile random_tile(Rng& rng, int fine, int support) {
    const int s = pick(rng, -fine, support);
    return {{s, static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(ipow(3, support - s)))},
            {-s, static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(ipow(3, fine + s)))}};
}

void random_cover(const Tile& P, Rng& rng, int dir, int budget, std::vector<Tile>& out) {
    if (budget == 0 || rng() % 3 == 0) {
        out.push_back(P);
        return;
    }
    if (dir == 0) {
        for (const auto& J : P.time.children()) random_cover({J, P.freq.parent()}, rng, dir, budget - 1, out);
    } else {
        for (const auto& w : P.freq.children()) random_cover({P.time.parent(), w}, rng, dir, budget - 1, out);
    }
}

std::vector<Tile> random_disjoint_tiles(const Truncation& plane, Rng& rng, int tries) {
    std::vector<Tile> out;
    for (int t = 0; t < tries; ++t) {
        const Tile P = random_tritile(plane, rng).subtile(static_cast<int>(rng() % 3));
        bool ok = true;
        for (const auto& Q : out) ok = ok && tiles_disjoint(P, Q);
        if (ok) out.push_back(P);
    }
    return out;
}

const TrilinearForm& scalar_form() {
    static const TrilinearForm pi =
        TrilinearForm::product_sum(BanachSpace::scalar(), BanachSpace::scalar(), BanachSpace::scalar());
    return pi;
}

std::vector<BanachSpace> sample_spaces() {
    return {BanachSpace::scalar(),        BanachSpace::sequence(1.0, 3), BanachSpace::sequence(2.0, 3),
            BanachSpace::sequence(4.0, 2), BanachSpace::sequence(kInf, 3), BanachSpace::schatten(1.0, 2),
            BanachSpace::schatten(3.0, 2), BanachSpace::schatten(kInf, 3)};
}

// Random tile functions, or embeddings of random functions, on a truncation.
TileFunction random_tiles_or_embedding(const Truncation& plane, Rng& rng, bool embedded, double density) {
    if (embedded) return embed(random_step_function(BanachSpace::scalar(), plane.fine(), plane.ambient(), rng), plane);
    return random_tile_function(plane, BanachSpace::scalar(), rng, density);
}

// ---------------------------------------------------------------------------
// walsh

CheckResult walsh_plancherel(const VerifyConfig& cfg) {
    Tally t("walsh", "plancherel", 1e-9);
    Rng rng = check_rng(cfg, "plancherel");
    for (int k = 0; k < 500; ++k) {
        const int N = pick(rng, 1, 4), M = pick(rng, 0, 6 - N);
        const auto f = random_step_function(BanachSpace::scalar(), N, M, rng);
        const auto g = random_step_function(BanachSpace::scalar(), N, M, rng);
        const double err = std::abs(inner(wft(f), wft(g)) - inner(f, g));
        t.see(err / (1.0 + lp_norm(f, 2.0) * lp_norm(g, 2.0)));
        t.count();
    }
    return t.done();
}

CheckResult walsh_fast_naive(const VerifyConfig& cfg) {
    Tally t("walsh", "fast-vs-naive-wft", 1e-9);
    Rng rng = check_rng(cfg, "fast-vs-naive-wft");
    for (int k = 0; k < 500; ++k) {
        const int N = pick(rng, 0, 3), M = pick(rng, 0, 5 - N);
        const auto f = random_step_function(k % 4 == 0 ? BanachSpace::sequence(3.0, 2) : BanachSpace::scalar(), N, M, rng);
        t.see(max_abs_diff(wft(f), wft_naive(f)));
        const auto fh = wft(f);
        t.see(max_abs_diff(inverse_wft(fh), inverse_wft_naive(fh)));
        t.count();
    }
    return t.done();
}

CheckResult walsh_inverse(const VerifyConfig& cfg) {
    Tally t("walsh", "inverse-wft", 1e-10);
    Rng rng = check_rng(cfg, "inverse-wft");
    for (int k = 0; k < 500; ++k) {
        const int N = pick(rng, 0, 4), M = pick(rng, 0, 6 - N);
        const auto f = random_step_function(BanachSpace::scalar(), N, M, rng);
        t.see(max_abs_diff(inverse_wft(wft(f)), f));
        t.count();
    }
    return t.done();
}

CheckResult walsh_symmetries(const VerifyConfig& cfg) {
    Tally t("walsh", "symmetries", 1e-9);
    Rng rng = check_rng(cfg, "symmetries");
    for (int k = 0; k < 500; ++k) {
        const int N = pick(rng, 1, 3), M = pick(rng, 0, 2);
        const auto f = random_step_function(BanachSpace::scalar(), N, M, rng);
        const auto eta = WalshPoint::from_grid(static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(ipow(3, N + M))), -M);
        t.see(max_abs_diff(wft(modulate(eta, f)), translate(eta, wft(f))));
        const auto y = WalshPoint::from_grid(static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(ipow(3, N + M))), -N);
        t.see(max_abs_diff(wft(translate(y, f)), modulate(-y, wft(f))));
        const int n = pick(rng, -1, 1);
        StepFunction rhs = dilate(-n, wft(f));
        rhs *= rpow(3, -n);
        t.see(max_abs_diff(wft(dilate(n, f)), rhs));
        t.count();
    }
    return t.done();
}

CheckResult walsh_nesting(const VerifyConfig& cfg) {
    Tally t("walsh", "interval-nesting", 0.0);
    Rng rng = check_rng(cfg, "interval-nesting");
    for (int k = 0; k < 2000; ++k) {
        const int a = pick(rng, -3, 3), b = pick(rng, -3, 3);
        const TriadicInterval I{a, static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(ipow(3, 4 - a)))};
        const TriadicInterval J{b, static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(ipow(3, 4 - b)))};
        const bool overlap = I.left() < J.right() && J.left() < I.right();
        t.require(I.intersects(J) == overlap, "intersection disagrees with the real line: " + I.to_string() + " " + J.to_string());
        if (overlap) t.require(I.contains(J) || J.contains(I), "intersecting intervals not nested");
        t.require(I.contains(J) == real_leq(J, I), "containment disagrees with the real line");
        t.count();
    }
    return t.done();
}

CheckResult walsh_group(const VerifyConfig& cfg) {
    Tally t("walsh", "group-exponent-3", 0.0);
    Rng rng = check_rng(cfg, "group-exponent-3");
    const WalshPoint zero;
    for (int k = 0; k < 1000; ++k) {
        const auto x = random_point(rng, -4, 4), y = random_point(rng, -4, 4), z = random_point(rng, -4, 4);
        t.require(x + y == y + x, "addition not commutative");
        t.require((x + y) + z == x + (y + z), "addition not associative");
        t.require(x + zero == x, "zero is not neutral");
        t.require(x + (-x) == zero, "negation is not inverse");
        t.require(x + x + x == zero, "3x != 0");
        t.count();
    }
    return t.done();
}

// ---------------------------------------------------------------------------
// phase

CheckResult phase_unique_split(const VerifyConfig&) {
    Tally t("phase", "unique-tritile-split", 0.0);
    for (auto [N, M] : {std::pair{2, 1}, std::pair{1, 2}, std::pair{1, 1}, std::pair{3, 0}}) {
        const Truncation plane(N, M);
        for (int s = plane.min_scale(); s <= plane.max_scale(); ++s) {
            for (std::int64_t ti = 0; ti < plane.time_count(s); ++ti) {
                for (std::int64_t w = 0; w < 3 * plane.freq_count(s); ++w) {
                    const Tile P{{s, ti}, {-s, w}};
                    int hits = 0;
                    for (std::size_t i = 0; i < plane.size(); ++i) {
                        for (int v = 0; v < 3; ++v) hits += plane[i].subtile(v) == P;
                    }
                    const auto [Q, v] = P.parent();
                    t.require(hits == 1, "tile " + P.to_string() + " lies in " + std::to_string(hits) + " splits");
                    t.require(Q.subtile(v) == P, "parent does not split back to the tile");
                    t.count();
                }
            }
        }
    }
    return t.done();
}

CheckResult phase_tree_components(const VerifyConfig& cfg) {
    Tally t("phase", "tree-components", 0.0);
    Rng rng = check_rng(cfg, "tree-components");
    for (int k = 0; k < 200; ++k) {
        const Truncation plane(pick(rng, 1, 2), pick(rng, 1, 2));
        const Tritile top = random_tritile(plane, rng);
        const Tree T(plane, top);
        std::vector<int> hits(plane.size(), 0);
        for (int u = 0; u < 3; ++u) {
            for (auto i : T.component(u)) ++hits[i];
        }
        for (std::size_t i = 0; i < plane.size(); ++i) {
            t.require(T.contains(i) == brute_leq(plane[i], top), "tree membership disagrees with the order");
            const int expect = !T.contains(i) ? 0 : (plane[i] == top ? 3 : 1);
            t.require(hits[i] == expect, "components do not partition the tree away from the top");
        }
        t.count();
    }
    return t.done();
}

CheckResult phase_order(const VerifyConfig&) {
    Tally t("phase", "order-brute-force", 0.0);
    for (auto [N, M] : {std::pair{2, 1}, std::pair{1, 2}, std::pair{2, 2}}) {
        const Truncation plane(N, M);
        for (std::size_t i = 0; i < plane.size(); ++i) {
            for (std::size_t j = 0; j < plane.size(); ++j) {
                t.require(tritile_leq(plane[i], plane[j]) == brute_leq(plane[i], plane[j]), "order disagrees on a pair");
                t.count();
            }
        }
    }
    return t.done();
}

bool brute_convex(const Truncation& plane, const TritileMask& A) {
    for (std::size_t q = 0; q < plane.size(); ++q) {
        if (A[q]) continue;
        bool below = false, above = false;
        for (std::size_t p = 0; p < plane.size(); ++p) {
            if (!A[p]) continue;
            below = below || brute_leq(plane[p], plane[q]);
            above = above || brute_leq(plane[q], plane[p]);
        }
        if (below && above) return false;
    }
    return true;
}

CheckResult phase_convexity(const VerifyConfig& cfg) {
    Tally t("phase", "convexity", 0.0);
    Rng rng = check_rng(cfg, "convexity");
    for (int k = 0; k < 1000; ++k) {
        const Truncation plane(pick(rng, 1, 2), pick(rng, 1, 2));
        const Tree T(plane, random_tritile(plane, rng));
        const Strip D(plane, random_tritile(plane, rng).time);
        for (const auto& m : {T.mask(), D.mask(), complement(T.mask()), complement(D.mask()), intersect(T.mask(), D.mask()),
                              intersect(T.mask(), complement(D.mask())), intersect(D.mask(), complement(T.mask()))}) {
            t.require(is_convex(plane, m), "a tree/strip combination is not convex");
        }
        TritileMask r = plane.empty_mask();
        const double density = 0.05 + 0.1 * (k % 6);
        for (auto& b : r) b = uniform(rng) < density;
        t.require(is_convex(plane, r) == brute_convex(plane, r), "is_convex disagrees with the brute-force definition");
        t.count();
    }
    return t.done();
}

// ---------------------------------------------------------------------------
// embedding

CheckResult embedding_orthogonality(const VerifyConfig&) {
    Tally t("embedding", "packet-orthogonality", 1e-12);
    const int fine = 1, support = 1;
    std::vector<Tile> tiles;
    for (int s = -fine; s <= support; ++s) {
        for (std::int64_t a = 0; a < ipow(3, support - s); ++a) {
            for (std::int64_t w = 0; w < ipow(3, fine + s); ++w) tiles.push_back({{s, a}, {-s, w}});
        }
    }
    std::vector<StepFunction> packets;
    for (const auto& P : tiles) packets.push_back(wave_packet(P, fine, support));
    for (std::size_t i = 0; i < tiles.size(); ++i) {
        for (std::size_t j = 0; j < tiles.size(); ++j) {
            const cplx direct = inner(packets[i], packets[j]);
            t.see(std::abs(packet_inner(tiles[i], tiles[j]) - direct));
            if (tiles_disjoint(tiles[i], tiles[j])) t.see(std::abs(direct));
            else t.require(std::abs(direct) > 1e-12, "overlapping tiles with orthogonal packets");
            t.count();
        }
    }
    return t.done();
}

CheckResult embedding_expansion(const VerifyConfig& cfg) {
    Tally t("embedding", "wave-packet-expansion", 1e-10);
    Rng rng = check_rng(cfg, "wave-packet-expansion");
    for (int k = 0; k < 500; ++k) {
        const Tile P = random_tile(rng, 1, 1);
        std::vector<Tile> cover;
        random_cover(P, rng, static_cast<int>(rng() % 2), 2, cover);
        const auto coeffs = expand_wave_packet(P, cover);
        const int fine = 3, support = 3;
        StepFunction sum(BanachSpace::scalar(), fine, support);
        for (const auto& [Q, c] : coeffs) sum += c * wave_packet(Q, fine, support);
        t.see(max_abs_diff(sum, wave_packet(P, fine, support)));
        t.count();
    }
    return t.done();
}

CheckResult embedding_defect(const VerifyConfig& cfg) {
    Tally t("embedding", "defect-of-embedding", 1e-9);
    Rng rng = check_rng(cfg, "defect-of-embedding");
    for (int k = 0; k < 500; ++k) {
        const Truncation plane(pick(rng, 1, 2), pick(rng, 1, 2));
        const int Nf = plane.fine() + pick(rng, 0, 1);
        const auto X = k % 2 ? BanachSpace::scalar() : BanachSpace::sequence(3.0, 2);
        const auto F = embed(random_step_function(X, Nf, plane.ambient(), rng), plane);
        const auto D = defect(F);
        double scale = 1.0;
        for (std::size_t i = 0; i < plane.size(); ++i) scale = std::max(scale, F.triple_norm(i));
        for (std::size_t i = 0; i < plane.size(); ++i) {
            if (plane[i].scale() > plane.min_scale()) t.see(D.triple_norm(i) / scale);
        }
        t.count();
    }
    return t.done();
}

CheckResult embedding_reconstruction(const VerifyConfig& cfg) {
    Tally t("embedding", "defect-reconstruction", 1e-9);
    Rng rng = check_rng(cfg, "defect-reconstruction");
    std::array<std::size_t, 3> per_depth{};
    for (int k = 0; per_depth[0] < 500 || per_depth[1] < 500 || per_depth[2] < 500; ++k) {
        const Truncation plane(4, pick(rng, 0, 1));
        const auto F = random_tile_function(plane, k % 2 ? BanachSpace::scalar() : BanachSpace::sequence(2.0, 2), rng);
        const auto top = plane[plane.scale_range(plane.max_scale()).first + rng() % plane.per_scale()];
        const Tree T(plane, top);
        const auto members = T.members();
        const Tile P = plane[members[rng() % members.size()]].subtile(static_cast<int>(rng() % 3));
        const int maxdepth = std::min(2, P.time.scale - plane.min_scale() - 1);
        for (int depth = 0; depth <= maxdepth; ++depth) {
            const Vec a = reconstruct(F, T, P, depth), b = F.tile_value(P);
            t.see((a - b).cwiseAbs().maxCoeff() / std::max(1.0, b.cwiseAbs().maxCoeff()));
            ++per_depth[static_cast<std::size_t>(depth)];
        }
        t.count();
    }
    t.values()["perDepth"] = per_depth;
    return t.done();
}

CheckResult embedding_defect_forest(const VerifyConfig& cfg) {
    Tally t("embedding", "defect-forest", 8.0);
    Rng rng = check_rng(cfg, "defect-forest");
    for (int k = 0; k < 200; ++k) {
        const Truncation plane(2, 2);
        const auto F = k % 2 ? random_tile_function(plane, BanachSpace::scalar(), rng)
                             : embed(random_step_function(BanachSpace::scalar(), 2, 2, rng), plane);
        const Tree T(plane, random_tritile(plane, rng));
        t.see(defect_forest_ratio(F, T, union_of_trees(plane, rng, pick(rng, 1, 4))));
        t.count();
    }
    return t.done();
}

// ---------------------------------------------------------------------------
// sizes

CheckResult sizes_axioms(const VerifyConfig& cfg) {
    Tally t("sizes", "size-axioms", 8.0);
    Rng rng = check_rng(cfg, "size-axioms");
    const Truncation plane(2, 1);
    const auto trees = make_structure(plane, Family::Trees);
    const auto strips = make_structure(plane, Family::Strips);
    const auto all = plane.full_mask();
    double restriction = 0.0;
    for (int k = 0; k < 100; ++k) {
        const auto X = k % 2 ? BanachSpace::scalar() : BanachSpace::sequence(4.0, 2);
        const auto F = random_tile_function(plane, X, rng, 0.5), G = random_tile_function(plane, X, rng, 0.5);
        TileFunction FG = F, F3 = F;
        FG += G;
        F3 *= cplx(0.0, 3.0);
        const auto A = union_of_trees(plane, rng, pick(rng, 1, 3));
        const auto hF = F.triple_norms(), hG = G.triple_norms();
        std::vector<double> hFG(hF.size()), h3(hF.size());
        for (std::size_t i = 0; i < hF.size(); ++i) {
            hFG[i] = hF[i] + hG[i];
            h3[i] = 3.0 * hF[i];
        }
        for (auto kind : {ScalarSizeKind::S1, ScalarSizeKind::Sinf, ScalarSizeKind::Sinf1}) {
            for (const auto& E : {trees, strips}) {
                if (kind == ScalarSizeKind::Sinf1 && E == strips) continue;
                const ScalarSize a(E, kind, hF), b(E, kind, hG), ab(E, kind, hFG), a3(E, kind, h3);
                for (std::size_t g = 0; g < E->size(); ++g) {
                    const double v = a.evaluate(g, all);
                    t.require(std::abs(a3.evaluate(g, all) - 3.0 * v) <= 1e-10 * (1.0 + v), a.name() + " not homogeneous");
                    t.require(ab.evaluate(g, all) <= v + b.evaluate(g, all) + 1e-10, a.name() + " violates the triangle inequality");
                    t.require(a.evaluate(g, A) <= v + 1e-12, a.name() + " grows under restriction");
                }
            }
        }
        const RandomizedSize RF(trees, F), RG(trees, G), RFG(trees, FG), R3(trees, F3);
        for (std::size_t g = 0; g < trees->size(); ++g) {
            const double v = RF.evaluate(g, all);
            t.require(std::abs(R3.evaluate(g, all) - 3.0 * v) <= 1e-10 * (1.0 + v), "RS not homogeneous");
            t.require(RFG.evaluate(g, all) <= v + RG.evaluate(g, all) + 1e-10, "RS violates the triangle inequality");
            if (v > 0.0) restriction = std::max(restriction, RF.evaluate(g, A) / v);
        }
        t.count();
    }
    t.see(restriction);
    t.values()["rsRestrictionRatio"] = restriction;
    return t.done("RS restricted to unions of trees grows by at most the measured factor");
}

CheckResult sizes_holder(const VerifyConfig& cfg) {
    Tally t("sizes", "size-holder", 16.0);
    Rng rng = check_rng(cfg, "size-holder");
    const auto& pi = scalar_form();
    double single = 0.0;
    {
        const Truncation one(1, 0);
        const auto trees = make_structure(one, Family::Trees);
        for (int k = 0; k < 100; ++k) {
            const auto A = random_tile_function(one, BanachSpace::scalar(), rng);
            const auto B = random_tile_function(one, BanachSpace::scalar(), rng);
            const auto C = random_tile_function(one, BanachSpace::scalar(), rng);
            single = std::max(single, size_holder_ratio(trees, 0, {&A, &B, &C}, pi));
        }
    }
    t.require(single <= 1.0 + 1e-9, "single-tritile ratio " + fmt(single) + " exceeds 1");
    std::size_t n = 0;
    for (auto [N, M] : {std::pair{2, 1}, std::pair{1, 2}, std::pair{3, 0}}) {
        const Truncation plane(N, M);
        const auto trees = make_structure(plane, Family::Trees);
        const auto [lo, hi] = plane.scale_range(plane.max_scale());
        for (int k = 0; k < 170; ++k, ++n) {
            const bool emb = k % 2 == 0;
            const double density = 0.25 * (1 + k % 4);
            const auto A = random_tiles_or_embedding(plane, rng, emb, density);
            const auto B = random_tiles_or_embedding(plane, rng, emb, density);
            const auto C = random_tiles_or_embedding(plane, rng, emb, density);
            t.see(size_holder_ratio(trees, lo + rng() % (hi - lo), {&A, &B, &C}, pi));
            t.count();
        }
    }
    t.values()["singleTritileMax"] = single;
    return t.done();
}

// ---------------------------------------------------------------------------
// outer

double brute_cover(const OuterStructure& E, const TritileMask& A, bool& feasible) {
    std::set<std::size_t> gens;
    for (std::size_t i = 0; i < A.size(); ++i) {
        if (A[i]) gens.insert(E.covering(i).begin(), E.covering(i).end());
    }
    feasible = gens.size() <= 16;
    if (!feasible) return 0.0;
    const std::vector<std::size_t> G(gens.begin(), gens.end());
    double best = kInf;
    for (std::uint32_t m = 0; m < (1U << G.size()); ++m) {
        TritileMask c(A.size(), 0);
        double cost = 0.0;
        for (std::size_t b = 0; b < G.size(); ++b) {
            if (m >> b & 1U) {
                cost += E.premeasure(G[b]);
                for (auto i : E.members(G[b])) c[i] = 1;
            }
        }
        bool ok = true;
        for (std::size_t i = 0; i < A.size(); ++i) ok = ok && (!A[i] || c[i]);
        if (ok) best = std::min(best, cost);
    }
    return best;
}

CheckResult outer_oracle(const VerifyConfig& cfg) {
    Tally t("outer", "outer-measure-oracle", 4.0);
    Rng rng = check_rng(cfg, "outer-measure-oracle");
    std::size_t brute = 0, singles = 0;
    for (auto fam : {Family::Trees, Family::Strips}) {
        for (auto [N, M] : {std::pair{2, 1}, std::pair{1, 2}, std::pair{2, 2}}) {
            const Truncation plane(N, M);
            const auto E = make_structure(plane, fam);
            for (int k = 0; k < 40; ++k) {
                const auto A = random_set(plane, rng, 1 + rng() % 20);
                const auto ex = outer_measure(*E, A, Mode::Exact);
                const auto gr = outer_measure(*E, A, Mode::Greedy);
                t.require(std::abs(ex.value - outer_measure_closed_form(*E, A)) <= 1e-12 * ex.value,
                          "branch and bound disagrees with the closed form");
                bool feasible = false;
                const double b = brute_cover(*E, A, feasible);
                if (feasible) {
                    ++brute;
                    t.require(std::abs(ex.value - b) <= 1e-12 * b, "branch and bound disagrees with brute force");
                }
                t.require(gr.value >= ex.value - 1e-12, "greedy cover cheaper than the exact cover");
                t.see(gr.value / ex.value);
                t.count();
            }
            for (std::size_t g = 0; g < E->size(); ++g) {
                TritileMask A = plane.empty_mask();
                for (auto i : E->members(g)) A[i] = 1;
                t.require(outer_measure(*E, A, Mode::Exact).value == E->premeasure(g), "measure of a generator != |I|");
                ++singles;
            }
        }
    }
    t.values()["bruteForceInstances"] = brute;
    t.values()["singleGeneratorInstances"] = singles;
    return t.done();
}

CheckResult outer_subadditive(const VerifyConfig& cfg) {
    Tally t("outer", "monotone-subadditive", 0.0);
    Rng rng = check_rng(cfg, "monotone-subadditive");
    const Truncation plane(2, 2);
    for (auto fam : {Family::Trees, Family::Strips}) {
        const auto E = make_structure(plane, fam);
        for (int k = 0; k < 100; ++k) {
            const auto A = random_set(plane, rng, 1 + rng() % 20), B = random_set(plane, rng, 1 + rng() % 8);
            TritileMask AB = A;
            for (std::size_t i = 0; i < AB.size(); ++i) AB[i] |= B[i];
            const double a = outer_measure(*E, A).value, b = outer_measure(*E, B).value, ab = outer_measure(*E, AB).value;
            t.require(a <= ab + 1e-12, "outer measure not monotone");
            t.require(ab <= a + b + 1e-12, "outer measure not subadditive");
            t.count();
        }
    }
    return t.done();
}

CheckResult outer_superlevel(const VerifyConfig& cfg) {
    Tally t("outer", "superlevel-monotone", 1e-12);
    Rng rng = check_rng(cfg, "superlevel-monotone");
    const Truncation plane(2, 1);
    for (auto fam : {Family::Trees, Family::Strips}) {
        const auto E = make_structure(plane, fam);
        for (int k = 0; k < 60; ++k) {
            std::vector<double> h(plane.size(), 0.0);
            for (int j = 0; j < 1 + static_cast<int>(rng() % 8); ++j) h[rng() % h.size()] = 0.1 + uniform(rng) * 10.0;
            for (auto kind : {ScalarSizeKind::S1, ScalarSizeKind::Sinf}) {
                const ScalarSize S(E, kind, h);
                SuperlevelOptions opt;
                opt.mode = cfg.mode;
                const StepMeasure m = superlevel_measure(S, opt);
                for (std::size_t i = 1; i < m.values.size(); ++i)
                    t.require(m.values[i] <= m.values[i - 1] + 1e-12, "superlevel measure increases");
                if (kind == ScalarSizeKind::Sinf) {
                    SuperlevelOptions ex;
                    ex.mode = Mode::Exact;
                    const auto cf = outer_lp(S, 2.0, opt).value;
                    // A copy without the closed form goes through the enumeration.
                    struct Plain : Size {
                        const ScalarSize& s;
                        Plain(const ScalarSize& in) : Size(in.structure_ptr()), s(in) {}
                        double evaluate(std::size_t g, const TritileMask& keep) const override { return s.evaluate(g, keep); }
                        const std::vector<std::size_t>& support() const override { return s.support(); }
                        std::vector<double> magnitudes() const override { return s.magnitudes(); }
                        bool monotone() const override { return true; }
                        std::string name() const override { return "plain"; }
                    } plain(S);
                    const auto en = outer_lp(plain, 2.0, ex);
                    if (en.exact) t.see(std::abs(cf - en.value) / std::max(1.0, cf));
                }
            }
            t.count();
        }
    }
    return t.done();
}

ChainRatio iterated_holder_ratio(const TrilinearForm& pi, const TileTriple& F, const std::array<double, 3>& p,
                                 const std::array<double, 3>& q, const SuperlevelOptions& opt) {
    const auto trees = make_structure(F[0]->plane(), Family::Trees);
    double ip = 0.0, iq = 0.0;
    for (std::size_t u = 0; u < 3; ++u) {
        ip += 1.0 / p[u];
        iq += 1.0 / q[u];
    }
    ChainRatio out;
    const auto num = iterated_outer_lp(std::make_shared<ScalarSize>(trees, ScalarSizeKind::S1, extended_magnitudes(pi, F)),
                                       1.0 / ip, 1.0 / iq, opt);
    out.numerator = num.value;
    out.exact = num.exact;
    if (out.numerator == 0.0) return out;
    double den = 1.0;
    for (std::size_t u = 0; u < 3; ++u) {
        const auto f = iterated_outer_lp(std::make_shared<RandomizedSize>(trees, *F[u]), p[u], q[u], opt);
        out.exact = out.exact && f.exact;
        out.factors[u] = f.value;
        den *= f.value;
    }
    out.ratio = den == 0.0 ? kInf : out.numerator / den;
    return out;
}

// Instances on six-tritile truncations, where every superlevel set is enumerated exactly.
template <class Body>
void exact_chain_instances(Rng& rng, int n, Body body) {
    for (int k = 0; k < n; ++k) {
        const Truncation plane = k % 2 ? Truncation(1, 1) : Truncation(2, 0);
        const bool emb = k % 3 == 0;
        const auto A = random_tiles_or_embedding(plane, rng, emb, 0.7);
        const auto B = random_tiles_or_embedding(plane, rng, emb, 0.7);
        const auto C = random_tiles_or_embedding(plane, rng, emb, 0.7);
        body(TileTriple{&A, &B, &C});
    }
}

CheckResult outer_holder(const VerifyConfig& cfg) {
    Tally t("outer", "outer-holder", 16.0);
    Rng rng = check_rng(cfg, "outer-holder");
    SuperlevelOptions ex;
    ex.mode = Mode::Exact;
    const std::array<std::array<double, 3>, 3> triples{{{2.0, 4.0, 4.0}, {3.0, 3.0, 3.0}, {2.0, 2.0, kInf}}};
    std::size_t k = 0;
    exact_chain_instances(rng, 200, [&](const TileTriple& F) {
        const auto r = outer_holder_ratio(scalar_form(), F, triples[k++ % 3], ex);
        t.require(r.exact, "a quasinorm fell back to greedy");
        t.see(r.ratio);
        t.count();
    });
    return t.done("exact mode on every instance");
}

CheckResult outer_rn(const VerifyConfig& cfg) {
    Tally t("outer", "radon-nikodym", 16.0);
    Rng rng = check_rng(cfg, "radon-nikodym");
    SuperlevelOptions ex;
    ex.mode = Mode::Exact;
    double scalar = 0.0, chain = 0.0;
    for (int k = 0; k < 200; ++k) {
        const Truncation plane(2, 1);
        std::vector<double> h(plane.size(), 0.0);
        for (int j = 0; j < 1 + static_cast<int>(rng() % 10); ++j) h[rng() % h.size()] = 0.1 + uniform(rng) * 10.0;
        scalar = std::max(scalar, rn_domination_ratio(plane, h, ex));
        t.count();
    }
    exact_chain_instances(rng, 200, [&](const TileTriple& F) {
        const auto r = holder_rn_ratio(scalar_form(), F, {3.0, 3.0, 3.0}, ex);
        t.require(r.exact, "a quasinorm fell back to greedy");
        chain = std::max(chain, r.ratio);
        t.count();
    });
    t.see(scalar);
    t.see(chain);
    t.values()["scalarDomination"] = scalar;
    t.values()["holderChain"] = chain;
    return t.done("exact mode on every instance");
}

CheckResult outer_iterated_holder(const VerifyConfig& cfg) {
    Tally t("outer", "iterated-holder", 16.0);
    Rng rng = check_rng(cfg, "iterated-holder");
    SuperlevelOptions ex;
    ex.mode = Mode::Exact;
    exact_chain_instances(rng, 100, [&](const TileTriple& F) {
        const auto r = iterated_holder_ratio(scalar_form(), F, {3.0, 3.0, 3.0}, {2.0, 4.0, 4.0}, ex);
        t.require(r.exact, "a quasinorm fell back to greedy");
        t.see(r.ratio);
        t.count();
    });
    return t.done();
}

// ---------------------------------------------------------------------------
// algorithms

CheckResult algorithms_selection(const VerifyConfig& cfg) {
    Tally t("algorithms", "tile-selection", 0.0);
    Rng rng = check_rng(cfg, "tile-selection");
    for (int k = 0; k < 1000; ++k) {
        const Truncation plane(pick(rng, 1, 2), pick(rng, 1, 2));
        std::vector<double> h(plane.size(), 0.0);
        for (auto& x : h) {
            if (uniform(rng) < 0.3) x = static_cast<double>(rng() % 100) / 10.0;
        }
        const double lambda = 0.5 + static_cast<double>(rng() % 90) / 10.0;
        const auto s = tile_selection(plane, h, lambda);
        try {
            check_selection(plane, h, lambda, s);
        } catch (const std::logic_error& e) {
            t.require(false, e.what());
        }
        std::vector<std::size_t> brute;
        for (std::size_t i = 0; i < plane.size(); ++i) {
            if (!(h[i] > lambda)) continue;
            bool maximal = true;
            for (std::size_t j = 0; j < plane.size(); ++j) {
                if (j != i && h[j] > lambda && tritile_leq(plane[i], plane[j])) maximal = false;
            }
            if (maximal) brute.push_back(i);
        }
        t.require(s.selected == brute, "selection is not the set of maximal tritiles");
        for (std::size_t a = 0; a < s.selected.size(); ++a) {
            for (std::size_t b = a + 1; b < s.selected.size(); ++b)
                t.require(tritiles_disjoint(plane[s.selected[a]], plane[s.selected[b]]) ||
                              !(tritile_leq(plane[s.selected[a]], plane[s.selected[b]]) ||
                                tritile_leq(plane[s.selected[b]], plane[s.selected[a]])),
                          "selected tritiles are comparable");
        }
        t.count();
    }
    return t.done();
}

CheckResult algorithms_exceptional(const VerifyConfig& cfg) {
    Tally t("algorithms", "exceptional-strips", 1.0 + 1e-9);
    Rng rng = check_rng(cfg, "exceptional-strips");
    const TriadicInterval amb{2, 0};
    for (int k = 0; k < 200; ++k) {
        const auto g = random_step_function(BanachSpace::sequence(3.0, 2), 1, 2, rng, 0.6);
        const double p = 1.5 + static_cast<double>(rng() % 3), r = 2.0 + static_cast<double>(rng() % 2);
        const double lambda = 0.2 + static_cast<double>(rng() % 20) / 10.0;
        const auto E = exceptional_strips(g, p, r, lambda, amb);
        const double s = std::min(p, r);
        for (int sc = -1; sc <= 2; ++sc) {
            for (std::int64_t j = 0; j < ipow(3, 2 - sc); ++j) {
                const TriadicInterval J{sc, j};
                if (!(lp_average(g, J, s) > lambda)) continue;
                bool inside = false;
                for (const auto& I : E.intervals) inside = inside || I.contains(J);
                t.require(inside, "an exceeding interval is not covered");
            }
        }
        for (const auto& I : E.intervals) {
            t.require(lp_average(g, I, s) > lambda, "a returned interval does not exceed");
            if (I.scale < amb.scale) t.require(!(lp_average(g, I.parent(), s) > lambda), "a returned interval is not maximal");
        }
        t.see(E.weak_ratio);
        t.count();
    }
    return t.done();
}

CheckResult algorithms_levels(const VerifyConfig& cfg) {
    Tally t("algorithms", "level-decomposition", 2.0 + 1e-12);
    Rng rng = check_rng(cfg, "level-decomposition");
    const TriadicInterval amb{2, 0};
    double measure = 0.0;
    for (int k = 0; k < 200; ++k) {
        const auto g = random_step_function(BanachSpace::sequence(4.0, 2), 1, 2, rng, 0.5);
        const double lambda = 0.3 + static_cast<double>(rng() % 10) / 5.0;
        const double p = 1.5 + static_cast<double>(rng() % 2);
        const auto E = exceptional_strips(g, p, 3.0, lambda, amb);
        const TriadicInterval ID = k % 2 ? amb : TriadicInterval{1, static_cast<std::int64_t>(rng() % 3)};
        const auto D = level_decomposition(g, lambda, p, E.intervals, ID, amb);
        StepFunction sum = D.pieces[0];
        for (std::size_t j = 1; j < D.pieces.size(); ++j) sum += D.pieces[j];
        StepFunction restricted = g;
        for (std::size_t c = 0; c < restricted.cells(); ++c) {
            if (!ID.contains(restricted.cell_point(c))) restricted.value(c).setZero();
        }
        t.require(max_abs_diff(sum, restricted) == 0.0, "pieces do not sum to the function");
        t.see(D.sup_ratio);
        measure = std::max(measure, D.measure_ratio);
        t.count();
    }
    t.values()["measureRatio"] = measure;
    return t.done();
}

CheckResult algorithms_sparse(const VerifyConfig& cfg) {
    Tally t("algorithms", "sparse-decomposition", 1.0);
    Rng rng = check_rng(cfg, "sparse-decomposition");
    const auto& pi = scalar_form();
    const std::array<double, 3> p{3.0, 3.0, 3.0}, q{3.0, 3.0, 3.0};
    std::size_t nontrivial = 0, steps = 0, probe_nontrivial = 0;
    double worst_k = 0.0, probe_norm = 0.0, probe_strict = 0.0;
    auto check_steps = [&](const SparseDecomposition& r) {
        for (const auto& st : r.steps) {
            t.require(2.0 * st.k_measure <= st.d_measure, "nu(K) exceeds nu(D)/2");
            worst_k = std::max(worst_k, st.k_measure / st.d_measure);
            for (double b : st.bound_ratio) t.require(b <= st.constant * (1 + 1e-9), "per-strip bound fails");
            ++steps;
        }
    };
    for (int k = 0; k < 200; ++k) {
        const Truncation plane = k % 2 ? Truncation(2, 1) : Truncation(2, 2);
        std::array<TileFunction, 3> F{random_tiles_or_embedding(plane, rng, k % 4 < 2, 0.4),
                                      random_tiles_or_embedding(plane, rng, k % 4 < 2, 0.4),
                                      random_tiles_or_embedding(plane, rng, k % 4 < 2, 0.4)};
        const auto r = sparse_decompose(pi, {&F[0], &F[1], &F[2]}, p, q, plane.time_box());
        check_steps(r);
        t.see(r.norm.value());
        t.require(r.norm.at_most(1), "sparse norm exceeds 1");
        if (r.all().size() > 1) ++nontrivial;
        t.count();
    }
    // Probe: the smallest admissible constant on spiky data forces refinement. Its norms are recorded only.
    SparseOptions small;
    small.policy = SparsePolicy::SmallestConstant;
    const Truncation big(2, 2);
    for (int k = 0; k < 100; ++k) {
        std::array<TileFunction, 3> F{random_tile_function(big, BanachSpace::scalar(), rng, 0.1),
                                      random_tile_function(big, BanachSpace::scalar(), rng, 0.1),
                                      random_tile_function(big, BanachSpace::scalar(), rng, 0.1)};
        for (auto& G : F) {
            for (std::size_t i = 0; i < big.size(); ++i) {
                if (big[i].scale() < 1) G.value(i, static_cast<int>(i % 3)) *= 4.0;
            }
        }
        const auto r = sparse_decompose(pi, {&F[0], &F[1], &F[2]}, p, q, big.time_box(), small);
        check_steps(r);
        if (r.all().size() > 1) ++probe_nontrivial;
        probe_norm = std::max(probe_norm, r.norm.value());
        probe_strict = std::max(probe_strict, r.strict_norm.value());
    }
    t.values()["nontrivial"] = nontrivial;
    t.values()["steps"] = steps;
    t.values()["maxKRatio"] = worst_k;
    t.values()["refinedInstances"] = probe_nontrivial;
    t.values()["refinedMaxNorm"] = probe_norm;
    t.values()["refinedMaxStrictNorm"] = probe_strict;
    return t.done("default policy: " + std::to_string(nontrivial) + " nontrivial collections; refined probe: " +
                  std::to_string(probe_nontrivial) + " nontrivial, norm <= " + fmt(probe_norm) +
                  ", strict norm <= " + fmt(probe_strict));
}

CheckResult algorithms_region(const VerifyConfig&) {
    Tally t("algorithms", "exponent-region", 0.0);
    std::map<std::string, int> inside;
    for (const auto& r : {std::array<double, 3>{2, 2, 2}, std::array<double, 3>{2, 2, 3}, std::array<double, 3>{2, 3, 3},
                          std::array<double, 3>{4, 4, 4}}) {
        const auto R = region_vertices(r[0], r[1], r[2]);
        int in = 0;
        for (int a = 0; a < 20; ++a) {
            for (int b = 0; b < 20; ++b) {
                const std::array<double, 3> beta{(a + 0.5) / 20.0, (b + 0.5) / 20.0, 1.0 - (a + b + 1.0) / 20.0};
                const std::array<double, 3> pp{1 / beta[0], 1 / beta[1], beta[2] > 0 ? 1 / beta[2] : kInf};
                const bool c = beta[2] > 0 && region_contains(pp, r);
                t.require(c == polygon_contains(R, beta), "region_contains and the hull disagree");
                in += c;
                t.count();
            }
        }
        std::ostringstream key;
        key << r[0] << "," << r[1] << "," << r[2];
        inside[key.str()] = in;
        if (r[0] == 4) t.require(R.empty() && in == 0, "r = (4,4,4) is not empty");
        else t.require(in > 0, "region unexpectedly empty");
    }
    Json j = Json::object();
    for (const auto& [k, v] : inside) j[k] = v;
    t.values()["gridPointsInside"] = j;
    return t.done();
}

// ---------------------------------------------------------------------------
// forms

CheckResult forms_paths(const VerifyConfig& cfg) {
    Tally t("forms", "tritile-form-paths", 1e-9);
    Rng rng = check_rng(cfg, "tritile-form-paths");
    const auto l3 = BanachSpace::sequence(3.0, 2), s3 = BanachSpace::schatten(3.0, 2);
    const TrilinearForm forms[] = {scalar_form(), TrilinearForm::product_sum(l3, l3, l3), TrilinearForm::trace_product(s3, s3, s3),
                                   TrilinearForm::duality(l3)};
    for (int k = 0; k < 500; ++k) {
        const auto& pi = forms[k % 4];
        const int N = pick(rng, 1, 2), M = pick(rng, 0, 3 - N);
        const Truncation plane(N, M);
        Triple f;
        for (int u = 0; u < 3; ++u) f[static_cast<std::size_t>(u)] = random_step_function(pi.space(u), N, M, rng);
        const cplx a = tritile_form(pi, f, plane), b = tritile_form_direct(pi, f, plane);
        t.see(std::abs(a - b) / std::max(1.0, std::abs(a)));
        t.count();
    }
    return t.done();
}

CheckResult forms_symmetries(const VerifyConfig& cfg) {
    Tally t("forms", "form-symmetries", 1e-9);
    Rng rng = check_rng(cfg, "form-symmetries");
    const auto& pi = scalar_form();
    for (int k = 0; k < 200; ++k) {
        const int N = pick(rng, 1, 2), M = pick(rng, 1, 2);
        const Truncation plane(N, M);
        Triple f;
        for (auto& g : f) g = random_step_function(BanachSpace::scalar(), N, M, rng);
        const cplx a = tritile_form(pi, f, plane);
        const double scale = std::max(1.0, std::abs(a));
        const auto y = WalshPoint::from_grid(static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(ipow(3, N + M))), -N);
        Triple ty;
        for (std::size_t u = 0; u < 3; ++u) ty[u] = translate(y, f[u]);
        t.see(std::abs(tritile_form(pi, ty, plane) - a) / scale);
        const int n = pick(rng, N > 1 ? -1 : 0, 1);
        Triple dl;
        for (std::size_t u = 0; u < 3; ++u) dl[u] = dilate(n, f[u]);
        t.see(std::abs(tritile_form(pi, dl, Truncation(N - n, M + n)) - rpow(3, -2 * n) * a) / scale);
        t.count();
    }
    return t.done("translation leaves the form unchanged; dilation by 3^n scales it by 3^{-2n}");
}

CheckResult forms_plancherel(const VerifyConfig& cfg) {
    Tally t("forms", "wave-packet-plancherel", 1e-9);
    Rng rng = check_rng(cfg, "wave-packet-plancherel");
    for (int k = 0; k < 50; ++k) {
        const int N = pick(rng, 1, 2), M = pick(rng, 0, 4 - N);
        const auto f = random_step_function(k % 2 ? BanachSpace::scalar() : BanachSpace::sequence(3.0, 2), N, M, rng);
        t.see(wave_packet_plancherel(f, cfg.fault));
        t.count();
    }
    t.values()["faultInjected"] = cfg.fault.phase;
    return t.done();
}

CheckResult forms_embedding_constants(const VerifyConfig& cfg) {
    Tally t("forms", "embedding-constants", 2.0);
    struct Case {
        const char* name;
        BanachSpace space;
        double p;
        std::optional<double> q;
    };
    const Case cases[] = {{"C p=4", BanachSpace::scalar(), 4.0, std::nullopt},
                          {"C (p,q)=(2,4)", BanachSpace::scalar(), 2.0, 4.0},
                          {"l4 p=6", BanachSpace::sequence(4.0, 2), 6.0, std::nullopt},
                          {"l4 (p,q)=(2,8)", BanachSpace::sequence(4.0, 2), 2.0, 8.0}};
    Json rows = Json::array();
    for (const auto& c : cases) {
        EmbeddingConfig e;
        e.space = c.space;
        e.p = c.p;
        e.q = c.q;
        e.scales = {2, 3, 4};
        e.trials = cfg.trials;
        e.seed = trial_seed(cfg.seed, name_hash(c.name));
        e.superlevel.mode = cfg.mode;
        e.threads = cfg.threads;
        const auto T = embedding_constant(e);
        t.require(!T.outside_region, std::string(c.name) + " lies outside the admissible region");
        t.see(T.stability);
        t.count(T.rows.size());
        Json per = Json::array();
        for (const auto& [N, m] : T.per_scale_max) per.push_back({{"scale", N}, {"max", m}});
        std::string mode = T.rows.empty() ? "" : T.rows.back().mode;
        rows.push_back({{"case", c.name}, {"perScaleMax", per}, {"stability", T.stability}, {"modeAtLargestScale", mode}});
    }
    t.values()["cases"] = rows;
    return t.done("stability = max/min over N of per-scale maxima, size S^inf");
}

CheckResult forms_bounds(const VerifyConfig& cfg) {
    Tally t("forms", "sparse-bound-stability", 2.0);
    BoundConfig b;
    b.form = scalar_form();
    b.trials = cfg.trials;
    b.seed = trial_seed(cfg.seed, name_hash("sparse-bound-stability"));
    b.threads = cfg.threads;
    b.sparse_options.superlevel.mode = cfg.mode;
    const auto T = bound_experiment(b);
    for (const auto& row : T.rows) {
        t.require(row.norm <= 1.0, "sparse norm exceeds 1");
        t.require(row.k_ratio <= 0.5, "nu(K) exceeds nu(D)/2");
    }
    t.see(T.sparse_stability);
    t.count(T.rows.size());
    Json per = Json::array();
    for (std::size_t i = 0; i < T.per_scale_max.size(); ++i) {
        per.push_back({{"scale", T.per_scale_max[i].first},
                       {"lpMax", T.per_scale_max[i].second},
                       {"sparseMax", T.per_scale_sparse_max[i].second}});
    }
    t.values()["perScale"] = per;
    t.values()["lpStability"] = T.stability;
    t.values()["sparseStability"] = T.sparse_stability;
    t.values()["sampler"] = sampler_name(b.sampler);
    return t.done("C = max |Lambda| / sparse form per scale");
}

CheckResult forms_iterated_rn(const VerifyConfig& cfg) {
    Tally t("forms", "iterated-rn-chain", 16.0);
    Rng rng = check_rng(cfg, "iterated-rn-chain");
    SuperlevelOptions ex;
    ex.mode = Mode::Exact;
    exact_chain_instances(rng, 200, [&](const TileTriple& F) {
        const auto r = iterated_rn_ratio(scalar_form(), F, {3.0, 3.0, 3.0}, {2.0, 4.0, 4.0}, ex);
        t.require(r.exact, "a quasinorm fell back to greedy");
        t.see(r.ratio);
        t.count();
    });
    return t.done("exact mode on every instance");
}

// ---------------------------------------------------------------------------
// appendix: Banach-space estimates, R-bounds and the appendix size

CheckResult appendix_norms(const VerifyConfig& cfg) {
    Tally t("appendix", "norm-axioms", 1e-12);
    Rng rng = check_rng(cfg, "norm-axioms");
    for (const auto& X : sample_spaces()) {
        for (int k = 0; k < 100; ++k) {
            const Vec a = random_vector(X, rng), b = random_vector(X, rng);
            const cplx s = random_gaussian(rng);
            const double na = X.norm(a), nb = X.norm(b);
            t.see(std::max(0.0, X.norm(a + b) - na - nb) / (1.0 + na + nb));
            t.see(std::abs(X.norm(Vec(s * a)) - std::abs(s) * na) / (1.0 + std::abs(s) * na));
            t.require(na > 0.0 && X.norm(X.zero()) == 0.0, X.name() + " is not definite");
            t.count();
        }
    }
    return t.done();
}

CheckResult appendix_schatten(const VerifyConfig& cfg) {
    Tally t("appendix", "schatten-svd", 1e-9);
    Rng rng = check_rng(cfg, "schatten-svd");
    for (int k = 0; k < 200; ++k) {
        const int d = pick(rng, 1, 4);
        const double p = std::array<double, 4>{1.0, 2.0, 3.5, kInf}[static_cast<std::size_t>(k % 4)];
        const auto X = BanachSpace::schatten(p, d);
        const Vec v = random_vector(X, rng);
        const Eigen::MatrixXcd m = Eigen::Map<const Eigen::MatrixXcd>(v.data(), d, d);
        const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXcd>(m).singularValues();
        const std::vector<double> s(sv.data(), sv.data() + sv.size());
        const double expect = lp_of(s, p);
        t.see(std::abs(X.norm(v) - expect) / (1.0 + expect));
        t.count();
    }
    return t.done();
}

CheckResult appendix_duality(const VerifyConfig& cfg) {
    Tally t("appendix", "duality-bound", 1.0 + 1e-12);
    Rng rng = check_rng(cfg, "duality-bound");
    for (const auto& X : sample_spaces()) {
        const auto pi = TrilinearForm::duality(X);
        for (int k = 0; k < 100; ++k) {
            const Vec x = random_vector(X, rng), y = random_vector(pi.space(1), rng), l = random_vector(pi.space(2), rng);
            const double bound = std::abs(l[0]) * X.norm(x) * pi.space(1).norm(y);
            if (bound > 0.0) t.see(std::abs(pi(x, y, l)) / bound);
            t.count();
        }
    }
    return t.done();
}

CheckResult appendix_kk(const VerifyConfig& cfg) {
    Tally t("appendix", "kahane-khintchine", kInf);
    Rng rng = check_rng(cfg, "kahane-khintchine");
    std::map<double, double> worst;
    for (const auto& X : sample_spaces()) {
        for (int k = 0; k < 20; ++k) {
            std::vector<Vec> xs;
            for (int j = 0; j < pick(rng, 1, 10); ++j) xs.push_back(random_vector(X, rng));
            const double m1 = rademacher_moment(xs, X, 1.0).value;
            for (double p : {0.5, 2.0, 4.0, 8.0}) {
                const double r = rademacher_moment(xs, X, p).value / m1;
                t.require(p < 1 ? r <= 1 + 1e-12 : r >= 1 - 1e-12, "moments not ordered");
                worst[p] = std::max(worst[p], p < 1 ? 1 / r : r);
            }
            t.count();
        }
    }
    t.require(worst[2.0] <= worst[4.0] + 1e-12 && worst[4.0] <= worst[8.0] + 1e-12, "C_p not monotone in p");
    Json j = Json::object();
    for (const auto& [p, c] : worst) j[fmt(p)] = c;
    t.values()["C_p"] = j;
    return t.done("recorded constants");
}

// Odd trials synthesize f from packets on the chosen tiles; even trials use white noise.
double tile_type_scale_max(int N, double r, const BanachSpace& X, Rng& rng, std::size_t trials, double sparsity) {
    const Truncation plane(N, 1);
    double worst = 0.0;
    for (std::size_t k = 0; k < trials; ++k) {
        const auto A = random_disjoint_tiles(plane, rng, 10 * N);
        StepFunction f(X, N, 1);
        if (k % 2) {
            for (const auto& P : A) {
                const auto w = wave_packet(P, N, 1);
                const Vec c = random_vector(X, rng);
                for (std::size_t i = 0; i < f.cells(); ++i) f.value(i) += w.value(i)[0] * c;
            }
        } else {
            f = random_step_function(X, N, 1, rng, sparsity);
        }
        worst = std::max(worst, tile_type_ratio(f, A, r));
    }
    return worst;
}

CheckResult appendix_tile_type_scalar(const VerifyConfig& cfg) {
    Tally t("appendix", "tile-type-scalar", 1.0 + 1e-6);
    Rng rng = check_rng(cfg, "tile-type-scalar");
    for (int N : {2, 3, 4}) {
        t.see(tile_type_scale_max(N, 2.0, BanachSpace::scalar(), rng, cfg.trials, 0.3));
        t.count(cfg.trials);
    }
    return t.done("Bessel inequality for X = C");
}

CheckResult appendix_tile_type_l4(const VerifyConfig& cfg) {
    Tally t("appendix", "tile-type-l4", 2.0);
    Rng rng = check_rng(cfg, "tile-type-l4");
    std::vector<std::pair<int, double>> per;
    for (int N : {2, 3, 4}) {
        const double m = tile_type_scale_max(N, 4.0, BanachSpace::sequence(4.0, 2), rng, cfg.trials, 0.0);
        per.push_back({N, m});
        t.see(m);
        t.count(cfg.trials);
    }
    const double stab = stability_of(per);
    t.require(stab <= 1.5, "max/min across scales " + fmt(stab) + " exceeds 1.5");
    Json j = Json::array();
    for (const auto& [N, m] : per) j.push_back({{"scale", N}, {"max", m}});
    t.values()["perScaleMax"] = j;
    t.values()["stability"] = stab;
    return t.done();
}

CheckResult appendix_rbound(const VerifyConfig& cfg) {
    Tally t("appendix", "r-bound-singleton", 1e-9);
    Rng rng = check_rng(cfg, "r-bound-singleton");
    const auto l3 = BanachSpace::sequence(3.0, 3), s3 = BanachSpace::schatten(3.0, 2);
    const TrilinearForm forms[] = {TrilinearForm::product_sum(l3, l3, l3), TrilinearForm::trace_product(s3, s3, s3),
                                   TrilinearForm::duality(BanachSpace::sequence(4.0, 2)), scalar_form()};
    for (int k = 0; k < 100; ++k) {
        const auto& pi = forms[k % 4];
        const int u = k % 3;
        const std::vector<Vec> V{random_vector(pi.space(u), rng)};
        const auto r = r_bound_estimate(pi, u, V);
        const double n = pi.embedding_norm(u, V[0]);
        t.see(std::abs(r.lower - n) / std::max(1.0, n));
        t.see(std::abs(r.upper - n) / std::max(1.0, n));
        t.count();
    }
    return t.done();
}

CheckResult appendix_size_holder(const VerifyConfig& cfg) {
    Tally t("appendix", "appendix-size-holder", kInf);
    Rng rng = check_rng(cfg, "appendix-size-holder");
    const Truncation plane(2, 1);
    const auto trees = make_structure(plane, Family::Trees);
    const auto X = BanachSpace::sequence(3.0, 2);
    const auto pi = TrilinearForm::product_sum(X, X, X);
    const RBoundBudget budget{4, 10, 5, cfg.seed};
    const auto [lo, hi] = plane.scale_range(plane.max_scale());
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
        const auto A = random_tile_function(plane, X, rng, 0.5), B = random_tile_function(plane, X, rng, 0.5),
                   C = random_tile_function(plane, X, rng, 0.5);
        const std::size_t top = lo + rng() % (hi - lo);
        const auto all = plane.full_mask();
        const double num = ScalarSize(trees, ScalarSizeKind::S1, extended_magnitudes(pi, {&A, &B, &C})).evaluate(top, all);
        const double den = AppendixSize(trees, A, pi, 0, budget).evaluate(top, all) *
                           AppendixSize(trees, B, pi, 1, budget).evaluate(top, all) *
                           AppendixSize(trees, C, pi, 2, budget).evaluate(top, all);
        const double r = num == 0.0 ? 0.0 : num / den;
        t.require(std::isfinite(r), "appendix size ratio is not finite");
        worst = std::max(worst, r);
        t.count();
    }
    t.see(worst);
    t.values()["maxRatio"] = worst;
    return t.done("recorded only: R-bounds are interval estimates");
}

CheckResult appendix_rmf(const VerifyConfig& cfg) {
    Tally t("appendix", "rademacher-maximal", kInf);
    Rng rng = check_rng(cfg, "rademacher-maximal");
    const auto X = BanachSpace::sequence(3.0, 2);
    const auto pi = TrilinearForm::product_sum(X, X, X);
    const TriadicInterval amb{1, 0};
    for (int k = 0; k < 5; ++k) {
        const auto f = random_step_function(X, 1, 1, rng);
        const auto m = rademacher_maximal(pi, 0, f, amb, RBoundBudget{4, 10, 5, cfg.seed});
        const double r = lp_norm(m, 2.0) / lp_norm(f, 2.0);
        t.require(std::isfinite(r), "maximal function not finite");
        t.see(r);
        t.count();
    }
    return t.done("recorded only: L^2 ratio of the lower estimate");
}

std::vector<Check> build_registry() {
    return {
        {"walsh", "plancherel", walsh_plancherel},
        {"walsh", "fast-vs-naive-wft", walsh_fast_naive},
        {"walsh", "inverse-wft", walsh_inverse},
        {"walsh", "symmetries", walsh_symmetries},
        {"walsh", "interval-nesting", walsh_nesting},
        {"walsh", "group-exponent-3", walsh_group},
        {"phase", "unique-tritile-split", phase_unique_split},
        {"phase", "tree-components", phase_tree_components},
        {"phase", "order-brute-force", phase_order},
        {"phase", "convexity", phase_convexity},
        {"embedding", "packet-orthogonality", embedding_orthogonality},
        {"embedding", "wave-packet-expansion", embedding_expansion},
        {"embedding", "defect-of-embedding", embedding_defect},
        {"embedding", "defect-reconstruction", embedding_reconstruction},
        {"embedding", "defect-forest", embedding_defect_forest},
        {"sizes", "size-axioms", sizes_axioms},
        {"sizes", "size-holder", sizes_holder},
        {"outer", "outer-measure-oracle", outer_oracle},
        {"outer", "monotone-subadditive", outer_subadditive},
        {"outer", "superlevel-monotone", outer_superlevel},
        {"outer", "outer-holder", outer_holder},
        {"outer", "radon-nikodym", outer_rn},
        {"outer", "iterated-holder", outer_iterated_holder},
        {"algorithms", "tile-selection", algorithms_selection},
        {"algorithms", "exceptional-strips", algorithms_exceptional},
        {"algorithms", "level-decomposition", algorithms_levels},
        {"algorithms", "sparse-decomposition", algorithms_sparse},
        {"algorithms", "exponent-region", algorithms_region},
        {"forms", "tritile-form-paths", forms_paths},
        {"forms", "form-symmetries", forms_symmetries},
        {"forms", "wave-packet-plancherel", forms_plancherel},
        {"forms", "embedding-constants", forms_embedding_constants},
        {"forms", "sparse-bound-stability", forms_bounds},
        {"forms", "iterated-rn-chain", forms_iterated_rn},
        {"appendix", "norm-axioms", appendix_norms},
        {"appendix", "schatten-svd", appendix_schatten},
        {"appendix", "duality-bound", appendix_duality},
        {"appendix", "kahane-khintchine", appendix_kk},
        {"appendix", "tile-type-scalar", appendix_tile_type_scalar},
        {"appendix", "tile-type-l4", appendix_tile_type_l4},
        {"appendix", "r-bound-singleton", appendix_rbound},
        {"appendix", "appendix-size-holder", appendix_size_holder},
        {"appendix", "rademacher-maximal", appendix_rmf},
    };
}

} // namespace

VerifyConfig verify_config_from_json(const Json& j) {
    VerifyConfig cfg;
    if (!j.is_object()) throw std::invalid_argument("config: expected a JSON object");
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("threads")) cfg.threads = j.at("threads").get<int>();
    if (j.contains("trials")) cfg.trials = j.at("trials").get<std::size_t>();
    if (j.contains("mode")) {
        const auto m = j.at("mode").get<std::string>();
        if (m == "exact") cfg.mode = Mode::Exact;
        else if (m == "greedy") cfg.mode = Mode::Greedy;
        else if (m == "auto") cfg.mode = Mode::Auto;
        else throw std::invalid_argument("config: mode must be exact, greedy or auto");
    }
    if (j.contains("fault")) cfg.fault.phase = j.at("fault").value("wavePacketPhase", false);
    return cfg;
}

const std::vector<Check>& registered_checks() {
    static const std::vector<Check> checks = build_registry();
    return checks;
}

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"walsh", "phase", "embedding", "sizes", "outer", "algorithms", "forms", "appendix"};
    return names;
}

bool is_suite(const std::string& name) {
    if (name == "all") return true;
    const auto& n = suite_names();
    return std::find(n.begin(), n.end(), name) != n.end();
}

CheckResult run_check(const std::string& name, const VerifyConfig& cfg) {
    for (const auto& c : registered_checks()) {
        if (c.name != name) continue;
        try {
            return c.run(cfg);
        } catch (const std::exception& e) {
            CheckResult r;
            r.suite = c.suite;
            r.name = c.name;
            r.passed = false;
            r.detail = std::string("exception: ") + e.what();
            return r;
        }
    }
    throw std::invalid_argument("unknown check '" + name + "'");
}

std::vector<CheckResult> run_suite(const std::string& suite, const VerifyConfig& cfg) {
    if (!is_suite(suite)) throw std::invalid_argument("unknown suite '" + suite + "'");
    std::vector<CheckResult> out;
    for (const auto& c : registered_checks()) {
        if (suite == "all" || c.suite == suite) out.push_back(run_check(c.name, cfg));
    }
    return out;
}

Json to_json(const CheckResult& r) {
    Json j;
    j["suite"] = r.suite;
    j["name"] = r.name;
    j["passed"] = r.passed;
    j["instances"] = r.instances;
    j["measured"] = std::isfinite(r.measured) ? Json(r.measured) : Json(r.measured > 0 ? "inf" : "nan");
    j["tolerance"] = std::isfinite(r.tolerance) ? Json(r.tolerance) : Json("none");
    j["detail"] = r.detail;
    j["values"] = r.values;
    return j;
}

Json verify_report(const std::string& suite, const VerifyConfig& cfg, const std::vector<CheckResult>& results) {
    Json j;
    j["suite"] = suite;
    j["seed"] = cfg.seed;
    j["trials"] = cfg.trials;
    j["mode"] = mode_name(cfg.mode);
    j["faultInjected"] = cfg.fault.phase;
    bool ok = true;
    Json checks = Json::array();
    for (const auto& r : results) {
        ok = ok && r.passed;
        checks.push_back(to_json(r));
    }
    j["passed"] = ok;
    j["checks"] = std::move(checks);
    return j;
}

} // namespace walsh3
