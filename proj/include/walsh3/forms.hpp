#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "walsh3/algorithms.hpp"
#include "walsh3/embedding.hpp"
#include "walsh3/outer.hpp"
#include "walsh3/random.hpp"

namespace walsh3 {

using Triple = std::array<StepFunction, 3>;
using TileTriple = std::array<const TileFunction*, 3>;

// Λ_Π(f₀, f₁, f₂) = Σ_𝐏 Π(⟨f₀; w_{𝐏₀}⟩, ⟨f₁; w_{𝐏₁}⟩, ⟨f₂; w_{𝐏₂}⟩)|I_𝐏| over the truncation,
// through the fast embedding.
cplx tritile_form(const TrilinearForm& pi, const Triple& f, const Truncation& plane);
// The same sum with every coefficient paired cell by cell.
cplx tritile_form_direct(const TrilinearForm& pi, const Triple& f, const Truncation& plane);

// |Π*(F₀(𝐏), F₁(𝐏), F₂(𝐏))| for every tritile.
std::vector<double> extended_magnitudes(const TrilinearForm& pi, const TileTriple& F);
// Σ_𝐏 |Π*(F(𝐏))||I_𝐏|.
double extended_mass(const TrilinearForm& pi, const TileTriple& F);

// ‖Π*(F₀,F₁,F₂)‖_{S¹(T)} / ∏_u ‖F_u‖_{RS(T)}; 0 when the numerator vanishes.
double size_holder_ratio(const Tree& T, const TileTriple& F, const TrilinearForm& pi);
// Same, with a prebuilt tree structure and T given by its top index.
double size_holder_ratio(const StructurePtr& trees, std::size_t top, const TileTriple& F, const TrilinearForm& pi);

struct ChainRatio {
    double ratio = 0.0;
    double numerator = 0.0;
    std::array<double, 3> factors{};
    bool exact = true;
};

// ‖Π*(F)‖_{L^p_μ S¹} / ∏_u ‖F_u‖_{L^{p_u}_μ RS} with 1/p = Σ 1/p_u.
ChainRatio outer_holder_ratio(const TrilinearForm& pi, const TileTriple& F, const std::array<double, 3>& p,
                              const SuperlevelOptions& opt = {});
// Σ_𝐏 |Π*(F)||I_𝐏| / ∏_u ‖F_u‖_{L^{p_u}_μ RS} for a Hölder triple.
ChainRatio holder_rn_ratio(const TrilinearForm& pi, const TileTriple& F, const std::array<double, 3>& p,
                           const SuperlevelOptions& opt = {});
// Σ_𝐏 |Π*(F)||I_𝐏| / ∏_u ‖F_u‖_{L^{p_u}_ν ⨏L^{q_u}_μ RS} for Hölder triples p and q.
ChainRatio iterated_rn_ratio(const TrilinearForm& pi, const TileTriple& F, const std::array<double, 3>& p,
                             const std::array<double, 3>& q, const SuperlevelOptions& opt = {});

enum class Sampler {
    // Gaussian cell values at the resolution of the truncation.
    White,
    // Gaussian cell values at a resolution drawn uniformly from 1..N, refined to N.
    Multiscale,
};
const char* sampler_name(Sampler s);
StepFunction random_schwartz(const BanachSpace& space, int fine, int support, Rng& rng, Sampler sampler,
                             double sparsity = 0.0);

enum class EmbeddingSize { Sup, Randomized };
const char* embedding_size_name(EmbeddingSize s);

// Down-closure of one random tritile set intersected with the up-closure of another.
TritileMask random_convex_set(const Truncation& plane, Rng& rng);

struct EmbeddingConfig {
    BanachSpace space = BanachSpace::scalar();
    double p = 4.0;
    // Set for the iterated L^p_ν ⨏L^q_μ quasinorm.
    std::optional<double> q;
    std::vector<int> scales{2, 3, 4};
    int ambient = 1;
    std::size_t trials = 100;
    std::uint64_t seed = 42;
    EmbeddingSize size = EmbeddingSize::Sup;
    bool random_convex = false;
    Sampler sampler = Sampler::White;
    double sparsity = 0.0;
    SuperlevelOptions superlevel{};
    int threads = 1;
};

struct EmbeddingRow {
    int scale = 0;
    std::size_t trial = 0;
    double ratio = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    std::string mode;
};

struct EmbeddingTable {
    std::vector<EmbeddingRow> rows;
    // (scale, max ratio over trials), in the order of the configured scales.
    std::vector<std::pair<int, double>> per_scale_max;
    // max over scales / min over scales of the per-scale maxima.
    double stability = 0.0;
    bool outside_region = false;
};

// Whether (p, q) lies where the embedding bounds are asserted for r-Hilbertian X.
bool embedding_exponents_admissible(double r, double p, std::optional<double> q);

// One trial: ‖1_A ℰ[f]‖ / ‖f‖_p for f on the grid of plane.
EmbeddingRow embedding_ratio(const StepFunction& f, const Truncation& plane, const TritileMask& A,
                             const EmbeddingConfig& cfg);
EmbeddingTable embedding_constant(const EmbeddingConfig& cfg);

struct LpBound {
    double ratio = 0.0;
    double form = 0.0;
    bool in_region = true;
};

// |Λ_Π(f)| / ∏_u ‖f_u‖_{p_u}.
LpBound lp_bound_ratio(const TrilinearForm& pi, const std::array<double, 3>& p, const Triple& f,
                       const Truncation& plane);

struct SparseBound {
    double ratio = 0.0;
    double form = 0.0;
    double sparse = 0.0;
    SparseDecomposition decomposition;
};

// |Λ_Π(f)| / sparse_form(𝒢, f, p) with 𝒢 from the strip-by-strip decomposition of ℰ[f_u].
SparseBound sparse_bound_ratio(const TrilinearForm& pi, const std::array<double, 3>& p,
                               const std::array<double, 3>& q, const Triple& f, const Truncation& plane,
                               const SparseOptions& opt = {});

struct BoundConfig {
    TrilinearForm form;
    std::array<double, 3> p{3.0, 3.0, 3.0};
    // Inner exponents of the sparse decomposition.
    std::array<double, 3> q{3.0, 3.0, 3.0};
    std::vector<int> scales{2, 3};
    int ambient = 1;
    std::size_t trials = 100;
    std::uint64_t seed = 42;
    Sampler sampler = Sampler::Multiscale;
    double sparsity = 0.0;
    bool sparse = true;
    SparseOptions sparse_options{};
    int threads = 1;
};

struct BoundRow {
    int scale = 0;
    std::size_t trial = 0;
    double ratio = 0.0;
    double sparse_ratio = 0.0;
    std::size_t generations = 0;
    std::size_t intervals = 0;
    double norm = 0.0;
    double strict_norm = 0.0;
    // max over steps of ν(K)/ν(D).
    double k_ratio = 0.0;
    std::string mode;
};

struct BoundTable {
    std::vector<BoundRow> rows;
    std::vector<std::pair<int, double>> per_scale_max;
    std::vector<std::pair<int, double>> per_scale_sparse_max;
    double stability = 0.0;
    double sparse_stability = 0.0;
    bool in_region = true;
};

BoundTable bound_experiment(const BoundConfig& cfg);

// max/min of per-scale maxima; 1 when all vanish.
double stability_of(const std::vector<std::pair<int, double>>& per_scale);

// Deliberate corruption of the materialized wave packets, for exercising the checks.
struct PacketFault {
    bool phase = false;
};

// max over scales s of |Σ_{|I_P| = 3^s} |⟨f; w_P⟩|²|I_P| - ‖f‖₂²| / ‖f‖₂², with each
// coefficient paired against a materialized wave packet.
double wave_packet_plancherel(const StepFunction& f, const PacketFault& fault = {});

} // namespace walsh3
