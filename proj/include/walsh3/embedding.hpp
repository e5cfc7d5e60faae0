#pragma once

#include <array>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <utility>
#include <vector>

#include "walsh3/banach.hpp"
#include "walsh3/phase_plane.hpp"
#include "walsh3/step_function.hpp"

namespace walsh3 {

// w_P = |I_P|^{-1} e_{ξ_P} 1_{I_P} on the grid (fine, support).
StepFunction wave_packet(const Tile& P, int fine, int support);

// Thread-safe memo of materialized wave packets.
class WavePacketCache {
public:
    std::shared_ptr<const StepFunction> get(const Tile& P, int fine, int support);
    std::size_t size() const;

private:
    mutable std::mutex mutex_;
    std::map<std::tuple<Tile, int, int>, std::shared_ptr<const StepFunction>> cache_;
};

// ⟨w_P; w_Q⟩ = ∫ w_P conj(w_Q), in closed form.
cplx packet_inner(const Tile& P, const Tile& Q);
// ⟨f; w_P⟩ by direct summation over the cells of I_P.
Vec packet_coefficient(const StepFunction& f, const Tile& P);

// X-valued function on the tritiles of a truncation, one value per subtile.
class TileFunction {
public:
    TileFunction(const Truncation& plane, const BanachSpace& space);

    const Truncation& plane() const { return plane_; }
    const BanachSpace& space() const { return space_; }
    int dim() const { return space_.dim(); }
    std::size_t size() const { return plane_.size(); }

    Eigen::Map<Vec> value(std::size_t idx, int u) {
        return Eigen::Map<Vec>(&data_[(idx * 3 + static_cast<std::size_t>(u)) * static_cast<std::size_t>(dim())], dim());
    }
    Eigen::Map<const Vec> value(std::size_t idx, int u) const {
        return Eigen::Map<const Vec>(&data_[(idx * 3 + static_cast<std::size_t>(u)) * static_cast<std::size_t>(dim())], dim());
    }
    const cplx* raw(std::size_t idx, int u) const {
        return &data_[(idx * 3 + static_cast<std::size_t>(u)) * static_cast<std::size_t>(dim())];
    }
    std::array<Vec, 3> triple(std::size_t idx) const { return {value(idx, 0), value(idx, 1), value(idx, 2)}; }
    // Value at a tile through its tritile; zero outside the truncation.
    Vec tile_value(const Tile& P) const;

    double component_norm(std::size_t idx, int u) const { return space_.norm(raw(idx, u)); }
    // ‖F(𝐏)‖_{X³} = max_u ‖F(𝐏)_u‖.
    double triple_norm(std::size_t idx) const;
    std::vector<double> triple_norms() const;
    std::vector<std::size_t> support() const;

    TileFunction restricted(const TritileMask& keep) const;
    TileFunction& operator+=(const TileFunction& other);
    TileFunction& operator*=(cplx s);

    std::span<const cplx> data() const { return data_; }
    std::span<cplx> data() { return data_; }

private:
    Truncation plane_;
    BanachSpace space_;
    std::vector<cplx> data_;
};

// ℰ[f](𝐏) = (⟨f; w_{𝐏_u}⟩)_u for every tritile, via one transform per time interval.
TileFunction embed(const StepFunction& f, const Truncation& plane);

// Coefficients ⟨w_P; w_{P_i}⟩|I_{P_i}| of w_P in a disjoint tile cover of P.
std::vector<std::pair<Tile, cplx>> expand_wave_packet(const Tile& P, std::span<const Tile> cover);

// For each tritile above the finest scale: the predecessor tritiles 𝐐_j (time
// children, frequency parent), the subtile v of 𝐐_j forming the vertical
// split, and c[u][j] = ⟨w_{Q_j}; w_{𝐏_u}⟩|I_{Q_j}|.
struct DefectStencil {
    bool has_children = false;
    std::array<std::size_t, 3> below{};
    int v = 0;
    std::array<std::array<cplx, 3>, 3> coeff{};
};
const std::vector<DefectStencil>& defect_stencil(const Truncation& plane);

// 𝖣𝖾𝖿F(𝐏)_u = F(𝐏_u) - Σ_{Q∈vs(𝐏)} F(Q)⟨w_Q; w_{𝐏_u}⟩|I_Q|; equal to F at the finest scale.
TileFunction defect(const TileFunction& F);
Vec defect_at(const TileFunction& F, std::size_t idx, int u);

// Right-hand side of the depth-N reconstruction of F(P) from defects on the tree T.
Vec reconstruct(const TileFunction& F, const Tree& T, const Tile& P, int depth);

struct ConvexProjection {
    StepFunction g;
    std::vector<Tile> packets;
    double g_sup = 0.0;
    double coefficient_sup = 0.0;
    double ratio = 0.0;
};

// g with ℰ[g] = ℰ[f] on T ∩ A, built from packets Q_J over the minimal child intervals.
ConvexProjection convex_project(const StepFunction& f, const Tree& T, const TritileMask& A);

} // namespace walsh3
