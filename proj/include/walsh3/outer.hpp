#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "walsh3/banach.hpp"
#include "walsh3/embedding.hpp"
#include "walsh3/phase_plane.hpp"

namespace walsh3 {

enum class Family { Trees, Strips };

// Generating sets of a truncation with premeasure |I|: every tree T(𝐏), or
// every strip D(I) with |I| ≥ the finest tritile scale.
class OuterStructure {
public:
    OuterStructure(const Truncation& plane, Family family);

    const Truncation& plane() const { return plane_; }
    Family family() const { return family_; }
    std::size_t size() const { return tops_.size(); }
    const TriadicInterval& interval(std::size_t g) const { return tops_[g]; }
    double premeasure(std::size_t g) const { return tops_[g].length(); }
    std::span<const std::size_t> members(std::size_t g) const { return members_[g]; }
    // Generators containing tritile i.
    std::span<const std::size_t> covering(std::size_t i) const { return covering_[i]; }
    // Trees only: the top tritile, which has the same index as the generator.
    Tritile tree_top(std::size_t g) const;
    // Strips only.
    std::optional<std::size_t> strip_index(const TriadicInterval& I) const;
    std::string describe(std::size_t g) const;

private:
    Truncation plane_;
    Family family_;
    std::vector<TriadicInterval> tops_;
    std::vector<std::vector<std::size_t>> members_;
    std::vector<std::vector<std::size_t>> covering_;
};

using StructurePtr = std::shared_ptr<const OuterStructure>;
StructurePtr make_structure(const Truncation& plane, Family family);

// Nonincreasing right-continuous step function λ ↦ σ(λ): value[i] on
// [breaks[i], breaks[i+1]) with breaks[0] = 0, and 0 from breaks.back() on.
struct StepMeasure {
    std::vector<double> breaks;
    std::vector<double> values;
    // Generators removed to reach each step.
    std::vector<std::vector<std::size_t>> covers;
    bool exact = true;
    std::string mode;

    double operator()(double lambda) const;
    // ∫_0^∞ p λ^{p-1} σ(λ) dλ.
    double layer_cake(double p) const;
    // sup_λ λ σ(λ)^{1/p}.
    double weak(double p) const;
    double sup_level() const { return breaks.empty() ? 0.0 : breaks.back(); }

    // σ(λ) = min{cost : level ≤ λ} over candidate removals.
    struct Candidate {
        double level;
        double cost;
        std::vector<std::size_t> cover;
    };
    static StepMeasure from_candidates(std::vector<Candidate> candidates);
};

// A size with its function bound in: ‖1_keep F‖_{S(E_g)} for each generator.
class Size {
public:
    explicit Size(StructurePtr structure) : structure_(std::move(structure)) {}
    virtual ~Size() = default;

    const OuterStructure& structure() const { return *structure_; }
    const StructurePtr& structure_ptr() const { return structure_; }
    virtual double evaluate(std::size_t g, const TritileMask& keep) const = 0;
    // Tritiles where F is nonzero, ascending.
    virtual const std::vector<std::size_t>& support() const = 0;
    // Per-tritile magnitudes that drive the greedy tile-selection removal.
    virtual std::vector<double> magnitudes() const = 0;
    // Removing tritiles never increases the size.
    virtual bool monotone() const { return false; }
    virtual std::optional<StepMeasure> closed_form(const TritileMask&) const { return std::nullopt; }
    virtual std::string name() const = 0;

    // ‖1_keep F‖_S = sup over generators that meet the kept support.
    double global(const TritileMask& keep) const;
    // Generators meeting the support.
    const std::vector<std::size_t>& relevant() const;

private:
    StructurePtr structure_;
    mutable std::once_flag relevant_once_;
    mutable std::vector<std::size_t> relevant_;
};

using SizePtr = std::shared_ptr<const Size>;

enum class ScalarSizeKind { S1, Sinf, Sinf1 };

// Deterministic sizes of a nonnegative function h on the tritiles.
class ScalarSize : public Size {
public:
    ScalarSize(StructurePtr structure, ScalarSizeKind kind, std::vector<double> h);
    double evaluate(std::size_t g, const TritileMask& keep) const override;
    const std::vector<std::size_t>& support() const override { return support_; }
    std::vector<double> magnitudes() const override { return h_; }
    bool monotone() const override { return true; }
    std::optional<StepMeasure> closed_form(const TritileMask& keep) const override;
    std::string name() const override;
    ScalarSizeKind kind() const { return kind_; }

private:
    ScalarSizeKind kind_;
    std::vector<double> h_;
    std::vector<std::size_t> support_;
};

// The randomised X³-size: S^∞ of ‖F‖, S^{(∞,1)} of ‖Def F‖ and the three
// lacunary square-function terms, on trees.
class RandomizedSize : public Size {
public:
    RandomizedSize(StructurePtr structure, TileFunction F);
    double evaluate(std::size_t g, const TritileMask& keep) const override;
    const std::vector<std::size_t>& support() const override { return support_; }
    std::vector<double> magnitudes() const override { return F_.triple_norms(); }
    std::string name() const override { return "RS"; }

    struct Parts {
        double sup = 0.0;
        double defect = 0.0;
        std::array<double, 3> lacunary{};
        double total() const { return sup + defect + lacunary[0] + lacunary[1] + lacunary[2]; }
    };
    Parts parts(std::size_t g, const TritileMask& keep) const;
    const TileFunction& function() const { return F_; }

private:
    TileFunction F_;
    std::vector<std::size_t> support_;
};

// The X_u-size built from R-bounds (v = u) and third Rademacher moments
// (v ≠ u), applied to the u-th component of F.
class AppendixSize : public Size {
public:
    AppendixSize(StructurePtr structure, TileFunction F, TrilinearForm pi, int u, RBoundBudget budget = {});
    double evaluate(std::size_t g, const TritileMask& keep) const override;
    const std::vector<std::size_t>& support() const override { return support_; }
    std::vector<double> magnitudes() const override;
    std::string name() const override { return "RS_R" + std::to_string(u_); }
    std::array<double, 3> parts(std::size_t g, const TritileMask& keep) const;

private:
    TileFunction F_;
    TrilinearForm pi_;
    int u_;
    RBoundBudget budget_;
    std::vector<std::size_t> support_;
};

enum class Mode { Exact, Greedy, Auto };
const char* mode_name(Mode m);

struct SuperlevelOptions {
    Mode mode = Mode::Auto;
    // Largest support enumerated subset by subset in exact tree mode.
    std::size_t exact_support_cap = 12;
    // Largest number of strip antichains enumerated in exact strip mode.
    std::size_t antichain_cap = 20000;
    // Tile-selection thresholds tried by the greedy tree mode.
    std::size_t greedy_thresholds = 64;
    // Geometric grid ratio for Riemann bounds and greedy strip levels.
    double grid_ratio = 1.0905077326652577; // 2^{1/8}
    std::size_t grid_levels = 96;
};

// λ ↦ σ(‖1_keep F‖_S > λ).
StepMeasure superlevel_measure(const Size& S, const TritileMask& keep, const SuperlevelOptions& opt = {});
StepMeasure superlevel_measure(const Size& S, const SuperlevelOptions& opt = {});
double superlevel(const Size& S, double lambda, const SuperlevelOptions& opt = {});

struct Quasinorm {
    double value = 0.0;
    // Riemann bounds on the geometric grid.
    double lower = 0.0;
    double upper = 0.0;
    std::vector<double> grid;
    bool exact = true;
    std::string mode;
    std::vector<std::size_t> certificate;
};

// Explicit λ grid, ascending; it must bracket the breakpoints of σ.
Quasinorm outer_lp(const Size& S, double p, const TritileMask& keep, const SuperlevelOptions& opt = {},
                   std::span<const double> grid = {});
Quasinorm outer_lp(const Size& S, double p, const SuperlevelOptions& opt = {});
Quasinorm outer_lp_weak(const Size& S, double p, const SuperlevelOptions& opt = {});
double outer_linf(const Size& S);

// |I_D|^{-1/q} ‖1_D F‖_{L^q_μ S} on strips, with the inner size on trees.
class IteratedSize : public Size {
public:
    IteratedSize(StructurePtr strips, SizePtr inner, double q, SuperlevelOptions inner_options = {});
    double evaluate(std::size_t g, const TritileMask& keep) const override;
    const std::vector<std::size_t>& support() const override { return inner_->support(); }
    std::vector<double> magnitudes() const override { return inner_->magnitudes(); }
    bool monotone() const override { return inner_->monotone(); }
    std::string name() const override;
    std::size_t cache_size() const;

private:
    SizePtr inner_;
    double q_;
    SuperlevelOptions inner_options_;
    mutable std::mutex mutex_;
    mutable std::unordered_map<std::string, double> cache_;
};

Quasinorm iterated_outer_lp(SizePtr inner, double p, double q, const SuperlevelOptions& opt = {});

struct CoverResult {
    double value = 0.0;
    std::vector<std::size_t> cover;
    bool exact = true;
};

// σ(A): cheapest cover by generators, by branch and bound or greedily.
CoverResult outer_measure(const OuterStructure& E, const TritileMask& A, Mode mode = Mode::Exact);
// Σ|I_𝐏| over the maximal elements of A (trees) or over its maximal time intervals (strips).
double outer_measure_closed_form(const OuterStructure& E, const TritileMask& A);

// Σ_𝐏 |F(𝐏)||I_𝐏| / ‖F‖_{L^1_μ S^1}; 0 for F = 0.
double rn_domination_ratio(const Truncation& plane, const std::vector<double>& h, const SuperlevelOptions& opt = {});

// S^{(∞,1)}(T) of ‖Def(1_A F)‖ over S^∞(T) of ‖F‖ plus S^{(∞,1)}(T) of ‖Def F‖.
double defect_forest_ratio(const TileFunction& F, const Tree& T, const TritileMask& A);

} // namespace walsh3
