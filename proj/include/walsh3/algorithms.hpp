#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "walsh3/embedding.hpp"
#include "walsh3/outer.hpp"
#include "walsh3/step_function.hpp"

namespace walsh3 {

struct SelectionResult {
    std::vector<std::size_t> selected;
    TritileMask covered;
    double cost = 0.0;
};

// Maximal elements of {𝐏 : h(𝐏) > λ} and the union of their trees.
SelectionResult tile_selection(const Truncation& plane, std::span<const double> h, double lambda);
SelectionResult tile_selection(const TileFunction& F, double lambda);
// Throws std::logic_error if disjointness, exceedance or the bound outside E fails.
void check_selection(const Truncation& plane, std::span<const double> h, double lambda, const SelectionResult& s);

struct ExceptionalSet {
    std::vector<TriadicInterval> intervals;
    double cost = 0.0;
    // ν(K_λ) λ^p / ‖f‖_p^p.
    double weak_ratio = 0.0;
};

// Maximal triadic I ⊆ ambient with M_{min(p,r)}‖f‖ > λ on I.
ExceptionalSet exceptional_strips(const StepFunction& f, double p, double r, double lambda, const TriadicInterval& ambient);

struct LevelDecomposition {
    // pieces[0] is f_{-1}, pieces[k + 1] is f_k.
    std::vector<StepFunction> pieces;
    // max_k ‖f_k‖_∞ / (2^k λ) and max_{n,k} Σ_m |J_{n,k,m}| / (2^{-kp}|I_n|).
    double sup_ratio = 0.0;
    double measure_ratio = 0.0;
};

LevelDecomposition level_decomposition(const StepFunction& f, double lambda, double p,
                                       std::span<const TriadicInterval> exceptional, const TriadicInterval& ID,
                                       const TriadicInterval& ambient);

// Exact value of sup_I |I|^{-1} Σ_{J ∈ 𝒢, J ⊆ I} |J| as a ratio of integers.
struct SparseNorm {
    std::int64_t num = 0;
    std::int64_t den = 1;
    TriadicInterval witness{};
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    bool at_most(std::int64_t k) const { return num <= k * den; }
};

// strict = true sums over J ⊊ I only.
SparseNorm sparse_norm(std::span<const TriadicInterval> G, bool strict = false);
double sparse_form(std::span<const TriadicInterval> G, const std::array<StepFunction, 3>& f,
                   const std::array<double, 3>& p);

enum class SparsePolicy {
    // Cheapest K over all constants.
    Cheapest,
    // K for the smallest constant with ν(K) ≤ ν(D)/2.
    SmallestConstant,
};

struct SparseOptions {
    // Constants tried for the per-strip bound, ascending.
    std::vector<double> constants{1.0, 2.0, 4.0, 8.0};
    SparsePolicy policy = SparsePolicy::Cheapest;
    SuperlevelOptions superlevel{};
    std::size_t max_generations = 64;
};

struct SparseStep {
    TriadicInterval interval;
    std::vector<TriadicInterval> K;
    double constant = 0.0;
    // ν(K) and ν(D).
    double k_measure = 0.0;
    double d_measure = 0.0;
    // Per-slot LHS / RHS of the per-strip bound, for the chosen constant.
    std::array<double, 3> bound_ratio{};
};

struct SparseDecomposition {
    std::vector<std::vector<TriadicInterval>> generations;
    std::vector<SparseStep> steps;
    SparseNorm norm;
    SparseNorm strict_norm;
    // Σ_𝐏 |Π*(F)||I_𝐏| over D(I₀), and Σ_{I∈𝒢} |I| ∏_u |I|^{-1/p_u}‖1_{D(I)}F_u‖.
    double lhs = 0.0;
    double rhs = 0.0;
    bool exact = true;
    std::vector<TriadicInterval> all() const;
};

// Strip-by-strip construction with ν(K_D) ≤ ν(D)/2 and inner size S^∞.
SparseDecomposition sparse_decompose(const TrilinearForm& pi, const std::array<const TileFunction*, 3>& F,
                                     const std::array<double, 3>& p, const std::array<double, 3>& q,
                                     const TriadicInterval& I0, const SparseOptions& opt = {});

struct ExponentRegion {
    std::array<double, 3> gammas{};
    double rho = 0.0;
    // (β_0, β_1, β_2) for each ordered pair u ≠ w.
    std::vector<std::array<double, 3>> vertices;
    bool empty() const { return !(rho > 0.0); }
};

ExponentRegion region_vertices(double r0, double r1, double r2);
// Σ_u 1/(min(p_u, r_u)'(r_u - 1)) > 1, with every 1/p_u in (0, 1).
bool region_contains(const std::array<double, 3>& p, const std::array<double, 3>& r);
// Interior of the hull of the vertices, within (0,1)^3; β must sum to 1.
bool polygon_contains(const ExponentRegion& R, const std::array<double, 3>& beta);

} // namespace walsh3
