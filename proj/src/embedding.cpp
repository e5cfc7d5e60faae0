#include "walsh3/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace walsh3 {

namespace {

void check_packet_grid(const Tile& P, int fine, int support) {
    if (P.time.scale < -fine) throw GridError("wave_packet: tile finer than the grid");
    if (!TriadicInterval{fine, 0}.contains(P.freq)) throw GridError("wave_packet: frequency not resolved by the grid");
    if (!TriadicInterval{support, 0}.contains(P.time)) throw GridError("wave_packet: tile outside the support");
}

} // namespace

StepFunction wave_packet(const Tile& P, int fine, int support) {
    check_packet_grid(P, fine, support);
    StepFunction w(BanachSpace::scalar(), fine, support);
    const auto n = ipow(kRadix, P.time.scale + fine);
    const double amp = 1.0 / P.time.length();
    for (std::int64_t c = P.time.offset * n; c < (P.time.offset + 1) * n; ++c) {
        const int e = grid_character_exponent(c, -fine, P.freq.offset, P.freq.scale);
        w.at(static_cast<std::size_t>(c)) = amp * root_of_unity(e);
    }
    return w;
}

std::shared_ptr<const StepFunction> WavePacketCache::get(const Tile& P, int fine, int support) {
    const auto key = std::make_tuple(P, fine, support);
    {
        std::lock_guard lock(mutex_);
        if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    }
    auto w = std::make_shared<const StepFunction>(wave_packet(P, fine, support));
    std::lock_guard lock(mutex_);
    return cache_.emplace(key, std::move(w)).first->second;
}

std::size_t WavePacketCache::size() const {
    std::lock_guard lock(mutex_);
    return cache_.size();
}

cplx packet_inner(const Tile& P, const Tile& Q) {
    if (!P.time.intersects(Q.time)) return 0.0;
    const TriadicInterval& J = P.time.scale <= Q.time.scale ? P.time : Q.time;
    const WalshPoint zeta = P.frequency() - Q.frequency();
    // e_ζ is constant on J unless ζ has a digit at a position >= -scale(J).
    if (auto t = zeta.top(); t && *t >= -J.scale) return 0.0;
    const cplx integral = J.length() * character(zeta, J.left_point());
    return integral / (P.time.length() * Q.time.length());
}

Vec packet_coefficient(const StepFunction& f, const Tile& P) {
    if (f.radix() != kRadix) throw std::invalid_argument("packet_coefficient: radix 3 required");
    if (P.time.scale < -f.fine()) throw GridError("packet_coefficient: tile finer than the grid");
    if (!TriadicInterval{f.fine(), 0}.contains(P.freq)) throw GridError("packet_coefficient: frequency not resolved");
    Vec s = Vec::Zero(f.dim());
    const TriadicInterval box{f.support(), 0};
    if (!box.intersects(P.time)) return s;
    // Tiles longer than the support see the zero extension of f.
    std::optional<StepFunction> grown;
    if (!box.contains(P.time)) grown = f.regrid(f.fine(), P.time.scale);
    const StepFunction& g = grown ? *grown : f;
    const auto n = ipow(kRadix, P.time.scale + g.fine());
    for (std::int64_t c = P.time.offset * n; c < (P.time.offset + 1) * n; ++c) {
        const int e = grid_character_exponent(c, -g.fine(), P.freq.offset, P.freq.scale);
        s += std::conj(root_of_unity(e)) * g.value(static_cast<std::size_t>(c));
    }
    return s * (g.cell_width() / P.time.length());
}

TileFunction::TileFunction(const Truncation& plane, const BanachSpace& space)
    : plane_(plane), space_(space), data_(plane.size() * 3 * static_cast<std::size_t>(space.dim())) {}

Vec TileFunction::tile_value(const Tile& P) const {
    auto [T, u] = P.parent();
    auto idx = plane_.index(T);
    if (!idx) return space_.zero();
    return value(*idx, u);
}

double TileFunction::triple_norm(std::size_t idx) const {
    return std::max({component_norm(idx, 0), component_norm(idx, 1), component_norm(idx, 2)});
}

std::vector<double> TileFunction::triple_norms() const {
    std::vector<double> out(size());
    for (std::size_t i = 0; i < size(); ++i) out[i] = triple_norm(i);
    return out;
}

std::vector<std::size_t> TileFunction::support() const {
    std::vector<std::size_t> out;
    const std::size_t stride = 3 * static_cast<std::size_t>(dim());
    for (std::size_t i = 0; i < size(); ++i) {
        for (std::size_t k = 0; k < stride; ++k) {
            if (data_[i * stride + k] != 0.0) {
                out.push_back(i);
                break;
            }
        }
    }
    return out;
}

TileFunction TileFunction::restricted(const TritileMask& keep) const {
    if (keep.size() != size()) throw std::invalid_argument("TileFunction::restricted: mask size mismatch");
    TileFunction g = *this;
    const std::size_t stride = 3 * static_cast<std::size_t>(dim());
    for (std::size_t i = 0; i < size(); ++i) {
        if (!keep[i]) std::fill_n(&g.data_[i * stride], stride, cplx{});
    }
    return g;
}

TileFunction& TileFunction::operator+=(const TileFunction& other) {
    if (!(other.plane_ == plane_) || !(other.space_ == space_)) throw std::invalid_argument("TileFunction: mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
}

TileFunction& TileFunction::operator*=(cplx s) {
    for (auto& v : data_) v *= s;
    return *this;
}

TileFunction embed(const StepFunction& f, const Truncation& plane) {
    if (f.radix() != kRadix) throw std::invalid_argument("embed: radix 3 required");
    if (f.fine() < plane.fine()) throw GridError("embed: function grid coarser than the truncation");
    const StepFunction g = f.support() < plane.ambient() ? f.regrid(f.fine(), plane.ambient()) : f;
    const int Nf = g.fine();
    const int d = g.dim();
    TileFunction F(plane, g.space());
    std::vector<cplx> buf;
    for (int s = plane.min_scale(); s <= plane.max_scale(); ++s) {
        const int L = s + Nf;
        const auto n = static_cast<std::size_t>(ipow(kRadix, L));
        const auto nfreq = static_cast<std::int64_t>(3 * plane.freq_count(s));
        const double scale = rpow(kRadix, -Nf) / rpow(kRadix, s);
        buf.resize(n);
        for (std::int64_t t = 0; t < plane.time_count(s); ++t) {
            // Phase e_ξ(x_I) for each subtile frequency ξ = w·3^{-s}.
            std::vector<cplx> phase(static_cast<std::size_t>(nfreq));
            for (std::int64_t w = 0; w < nfreq; ++w)
                phase[static_cast<std::size_t>(w)] = std::conj(root_of_unity(grid_character_exponent(t, s, w, -s)));
            for (int k = 0; k < d; ++k) {
                for (std::size_t l = 0; l < n; ++l) buf[l] = g.at(static_cast<std::size_t>(t) * n + l, k);
                chrestenson(buf, kRadix, L, -1);
                for (std::int64_t w = 0; w < nfreq; ++w) {
                    const auto idx = plane.index_unchecked(s, t, w / 3);
                    F.value(idx, static_cast<int>(w % 3))[k] =
                        scale * phase[static_cast<std::size_t>(w)] * buf[static_cast<std::size_t>(w)];
                }
            }
        }
    }
    return F;
}

namespace {

double overlap_area(const Tile& a, const Tile& b) {
    if (!a.time.intersects(b.time) || !a.freq.intersects(b.freq)) return 0.0;
    const double t = std::min(a.time.length(), b.time.length());
    const double w = std::min(a.freq.length(), b.freq.length());
    return t * w;
}

} // namespace

std::vector<std::pair<Tile, cplx>> expand_wave_packet(const Tile& P, std::span<const Tile> cover) {
    for (std::size_t i = 0; i < cover.size(); ++i) {
        for (std::size_t j = i + 1; j < cover.size(); ++j) {
            if (!tiles_disjoint(cover[i], cover[j])) throw std::invalid_argument("expand_wave_packet: cover not disjoint");
        }
    }
    double covered = 0.0;
    for (const auto& Q : cover) covered += overlap_area(P, Q);
    if (std::abs(covered - 1.0) > 1e-9) throw std::invalid_argument("expand_wave_packet: cover does not cover the tile");
    std::vector<std::pair<Tile, cplx>> out;
    out.reserve(cover.size());
    for (const auto& Q : cover) out.emplace_back(Q, packet_inner(P, Q) * Q.time.length());
    return out;
}

const std::vector<DefectStencil>& defect_stencil(const Truncation& plane) {
    static std::mutex mutex;
    static std::map<std::pair<int, int>, std::unique_ptr<std::vector<DefectStencil>>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[{plane.fine(), plane.ambient()}];
    if (slot) return *slot;
    auto st = std::make_unique<std::vector<DefectStencil>>(plane.size());
    for (std::size_t i = 0; i < plane.size(); ++i) {
        const Tritile P = plane[i];
        auto preds = plane.predecessors(i);
        if (preds.empty()) continue;
        DefectStencil& d = (*st)[i];
        d.has_children = true;
        d.v = P.freq.child_index();
        const auto vs = vertical_split(P);
        for (int j = 0; j < 3; ++j) {
            d.below[j] = preds[j];
            for (int u = 0; u < 3; ++u) d.coeff[u][j] = packet_inner(vs[j], P.subtile(u)) * vs[j].time.length();
        }
    }
    slot = std::move(st);
    return *slot;
}

Vec defect_at(const TileFunction& F, std::size_t idx, int u) {
    const auto& d = defect_stencil(F.plane())[idx];
    Vec out = F.value(idx, u);
    if (!d.has_children) return out;
    for (int j = 0; j < 3; ++j) out -= d.coeff[u][j] * F.value(d.below[j], d.v);
    return out;
}

TileFunction defect(const TileFunction& F) {
    TileFunction D(F.plane(), F.space());
    for (std::size_t i = 0; i < F.size(); ++i) {
        for (int u = 0; u < 3; ++u) D.value(i, u) = defect_at(F, i, u);
    }
    return D;
}

Vec reconstruct(const TileFunction& F, const Tree& T, const Tile& P, int depth) {
    if (depth < 0) throw std::invalid_argument("reconstruct: negative depth");
    auto [Pt, u] = P.parent();
    auto pidx = F.plane().index(Pt);
    if (!pidx || !T.contains(*pidx)) throw std::invalid_argument("reconstruct: tile not in the tree");
    const int sp = P.time.scale;
    if (sp - depth - 1 < F.plane().min_scale()) throw std::invalid_argument("reconstruct: depth exceeds the truncation");
    Vec out = defect_at(F, *pidx, u);
    for (auto q : T.members()) {
        const Tritile Q = F.plane()[q];
        const int sq = Q.time.scale;
        if (sq >= sp || sq < sp - depth - 1 || !P.time.contains(Q.time)) continue;
        for (int v = 0; v < 3; ++v) {
            const Tile Qv = Q.subtile(v);
            const cplx c = packet_inner(Qv, P);
            if (c == 0.0) continue;
            const Vec val = sq == sp - depth - 1 ? Vec(F.value(q, v)) : defect_at(F, q, v);
            out += c * Qv.time.length() * val;
        }
    }
    return out;
}

ConvexProjection convex_project(const StepFunction& f, const Tree& T, const TritileMask& A) {
    const Truncation& plane = T.plane();
    if (!is_convex(plane, A)) throw std::invalid_argument("convex_project: set is not convex");
    ConvexProjection out;
    out.g = StepFunction(f.space(), f.fine(), std::max(f.support(), plane.ambient()));

    std::vector<std::size_t> AT;
    for (auto i : T.members()) {
        if (A[i]) AT.push_back(i);
    }
    if (AT.empty()) return out;

    std::vector<std::size_t> tops;
    for (auto i : AT) {
        const Tritile P = plane[i];
        bool maximal = true;
        for (auto j : AT) {
            if (j != i && tritile_leq(P, plane[j])) {
                maximal = false;
                break;
            }
        }
        if (maximal) tops.push_back(i);
    }

    const TileFunction E = embed(f, plane);
    for (auto i : AT) out.coefficient_sup = std::max(out.coefficient_sup, E.triple_norm(i));

    for (auto top : tops) {
        const Tree Ti(plane, plane[top]);
        // Minimal elements of the children of time intervals of A ∩ T(O_i),
        // each remembered with the frequency interval of its parent tritile.
        std::map<TriadicInterval, TriadicInterval> kids;
        for (auto i : Ti.members()) {
            if (!A[i]) continue;
            const Tritile P = plane[i];
            for (const auto& J : P.time.children()) kids.emplace(J, P.freq);
        }
        for (const auto& [J, w] : kids) {
            bool minimal = true;
            for (const auto& [K, _] : kids) {
                if (K != J && J.contains(K)) {
                    minimal = false;
                    break;
                }
            }
            if (!minimal) continue;
            const Tile Q{J, w};
            const Vec c = packet_coefficient(f, Q);
            const StepFunction wq = wave_packet(Q, out.g.fine(), out.g.support());
            for (std::size_t cell = 0; cell < wq.cells(); ++cell) {
                const cplx z = wq.at(cell);
                if (z != 0.0) out.g.value(cell) += (z * J.length()) * c;
            }
            out.packets.push_back(Q);
        }
    }
    out.g_sup = lp_norm(out.g, kInf);
    out.ratio = out.coefficient_sup > 0.0 ? out.g_sup / out.coefficient_sup : 0.0;
    return out;
}

} // namespace walsh3
