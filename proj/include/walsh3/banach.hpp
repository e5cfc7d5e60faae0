#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "walsh3/walsh.hpp"

namespace walsh3 {

using Vec = Eigen::VectorXcd;

constexpr double kInf = std::numeric_limits<double>::infinity();

// Conjugate exponent p' with 1/p + 1/p' = 1.
double conjugate_exponent(double p);

enum class SpaceKind { Scalar, Sequence, Schatten };

// Finite-dimensional Banach space: ℂ, ℓ^p_d, or d×d matrices with the Schatten-p norm.
// Matrices are stored column-major as vectors of length d².
class BanachSpace {
public:
    BanachSpace() = default;
    static BanachSpace scalar();
    static BanachSpace sequence(double p, int d);
    static BanachSpace schatten(double p, int d);

    SpaceKind kind() const { return kind_; }
    double p() const { return p_; }
    int d() const { return d_; }
    int dim() const { return kind_ == SpaceKind::Schatten ? d_ * d_ : d_; }

    double norm(const Vec& v) const;
    double norm(const cplx* v) const;
    // The dual under the bilinear pairing Σ_i a_i b_i.
    BanachSpace dual() const;
    // r with the space r-Hilbertian: 2 for ℂ, max(p, p') for ℓ^p and S^p.
    double hilbertian_exponent() const;
    bool is_hilbert() const;

    Vec zero() const { return Vec::Zero(dim()); }
    std::string name() const;

    friend bool operator==(const BanachSpace&, const BanachSpace&) = default;

private:
    SpaceKind kind_ = SpaceKind::Scalar;
    double p_ = 2.0;
    int d_ = 1;
};

// ℓ^p norm of a real vector (p may be infinite).
double lp_of(std::span<const double> v, double p);
// Singular values of a d×d matrix stored column-major.
std::vector<double> singular_values(const Vec& m, int d);

enum class FormKind { Duality, ProductSum, TraceProduct };

class TrilinearForm {
public:
    TrilinearForm() = default;
    // Π(x, x*, λ) = λ·x*(x) on X × X* × ℂ.
    static TrilinearForm duality(const BanachSpace& x);
    // Π(a, b, c) = Σ_i a_i b_i c_i on ℓ^{r0}_d × ℓ^{r1}_d × ℓ^{r2}_d (or ℂ³).
    static TrilinearForm product_sum(const BanachSpace& a, const BanachSpace& b, const BanachSpace& c);
    // Π(A, B, C) = tr(ABC) on Schatten triples.
    static TrilinearForm trace_product(const BanachSpace& a, const BanachSpace& b, const BanachSpace& c);

    FormKind kind() const { return kind_; }
    const BanachSpace& space(int u) const { return spaces_[u]; }

    cplx operator()(const Vec& a, const Vec& b, const Vec& c) const;
    cplx apply(const cplx* a, const cplx* b, const cplx* c) const;

    // Upper bound for |Π(a,b,c)| / (‖a‖‖b‖‖c‖): 1 under the Hölder condition.
    double bound() const;

    // The other two slots (v, w), v < w, for the slot u.
    std::pair<int, int> others(int u) const;
    // ι^u(x)(y) as an element of X_w^* in coordinates (Σ φ_i z_i = Π with z in slot w).
    Vec functional(int u, const Vec& x, const Vec& y) const;
    // Norm of y ↦ ι^u(x)(y) as an operator X_v → X_w^*.
    double embedding_norm(int u, const Vec& x) const;

    std::string name() const;

private:
    FormKind kind_ = FormKind::ProductSum;
    std::array<BanachSpace, 3> spaces_{};
};

// Π*((a), (b), (c)) = Π(a_0, b_1, c_2).
cplx extended_form(const TrilinearForm& pi, const std::array<Vec, 3>& a, const std::array<Vec, 3>& b,
                   const std::array<Vec, 3>& c);

struct RademacherSampler {
    std::size_t exact_threshold = 16;
    std::size_t samples = 20000;
    std::uint64_t seed = 0;
    bool allow_monte_carlo = true;
};

struct MomentEstimate {
    double value = 0.0;
    double std_error = 0.0;
    bool exact = true;
};

// 𝔼 g(ε) over K independent signs; g receives ±1 entries.
MomentEstimate rademacher_expectation(std::size_t K, const std::function<double(std::span<const int>)>& g,
                                      const RademacherSampler& sampler);

// (𝔼‖Σ ε_n x_n‖^p)^{1/p}.
MomentEstimate rademacher_moment(std::span<const Vec> xs, const BanachSpace& space, double p,
                                 const RademacherSampler& sampler = {});

// 𝔼‖Σ ε_n a_n x_n‖ / 𝔼‖Σ ε_n x_n‖; 0 when the denominator vanishes.
double contraction_check(std::span<const Vec> xs, std::span<const cplx> coefficients, const BanachSpace& space,
                         const RademacherSampler& sampler = {});

struct RBoundBudget {
    int max_terms = 4;
    int random_trials = 60;
    int ascent_steps = 20;
    std::uint64_t seed = 1;
};

struct RBoundInterval {
    double lower = 0.0;
    double upper = 0.0;
    bool budget_exhausted = false;
};

// Interval containing the R-bound of {ι^u(x) : x ∈ V} ⊂ L(X_v, X_w^*).
RBoundInterval r_bound_estimate(const TrilinearForm& pi, int u, std::span<const Vec> V,
                                const RBoundBudget& budget = {});

} // namespace walsh3
