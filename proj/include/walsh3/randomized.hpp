#pragma once

#include <span>
#include <vector>

#include "walsh3/banach.hpp"
#include "walsh3/embedding.hpp"

namespace walsh3 {

// (Σ_{P∈A} ‖⟨f; w_P⟩‖^r |I_P|)^{1/r} / ‖f‖_{L^r}; A must be pairwise disjoint.
double tile_type_ratio(const StepFunction& f, std::span<const Tile> A, double r);

// Tiles P_v with P ∈ T^u for some u ≠ v: the lacunary part of a tree.
std::vector<Tile> lacunary_tiles(const Tree& T);

// (𝔼‖Σ_{P_v lacunary} ε_{P_v} ⟨f; w_{P_v}⟩ w_{P_v} |I_P|‖^p_{L^p})^{1/p} / ‖f‖_{L^p},
// enumerated exactly per cell.
double lacunary_projection_ratio(const Tree& T, const StepFunction& f, double p, const RademacherSampler& sampler = {});

// ℳ_Π f(x): lower R-bound estimate of {⟨f⟩_I : x ∈ I ⊆ ambient} as operators ι^u.
StepFunction rademacher_maximal(const TrilinearForm& pi, int u, const StepFunction& f, const TriadicInterval& ambient,
                                const RBoundBudget& budget = {});

} // namespace walsh3
