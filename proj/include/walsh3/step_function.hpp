#pragma once

#include <span>
#include <vector>

#include "walsh3/banach.hpp"
#include "walsh3/walsh.hpp"

namespace walsh3 {

// Piecewise constant X-valued function on the Walsh group: cells of width
// radix^{-fine} covering [0, radix^support). Cell c holds the value on the
// points whose digit a - fine equals digit a of c.
class StepFunction {
public:
    StepFunction() = default;
    StepFunction(BanachSpace space, int fine, int support, int radix = kRadix);

    static StepFunction scalar(int fine, int support, std::vector<cplx> values, int radix = kRadix);
    static StepFunction indicator(const TriadicInterval& I, int fine, int support);

    int fine() const { return fine_; }
    int support() const { return support_; }
    int radix() const { return radix_; }
    const BanachSpace& space() const { return space_; }
    int dim() const { return space_.dim(); }
    std::size_t cells() const { return cells_; }
    int digits() const { return fine_ + support_; }
    double cell_width() const { return rpow(radix_, -fine_); }

    Eigen::Map<const Vec> value(std::size_t cell) const { return Eigen::Map<const Vec>(&data_[cell * dim()], dim()); }
    Eigen::Map<Vec> value(std::size_t cell) { return Eigen::Map<Vec>(&data_[cell * dim()], dim()); }
    cplx at(std::size_t cell, int coord = 0) const { return data_[cell * dim() + coord]; }
    cplx& at(std::size_t cell, int coord = 0) { return data_[cell * dim() + coord]; }
    std::span<const cplx> data() const { return data_; }
    std::span<cplx> data() { return data_; }

    WalshPoint cell_point(std::size_t cell) const { return WalshPoint::from_grid(static_cast<std::int64_t>(cell), -fine_, radix_); }
    // Cell containing x, or -1 if x lies outside the support.
    std::int64_t cell_of(const WalshPoint& x) const;
    Vec evaluate(const WalshPoint& x) const;

    // Same function on a finer and/or larger grid.
    StepFunction regrid(int fine, int support) const;
    // Pointwise norm as a scalar function.
    StepFunction pointwise_norm() const;
    StepFunction coordinate(int k) const;

    StepFunction& operator+=(const StepFunction& other);
    StepFunction& operator-=(const StepFunction& other);
    StepFunction& operator*=(cplx s);
    friend StepFunction operator+(StepFunction a, const StepFunction& b) { return a += b; }
    friend StepFunction operator-(StepFunction a, const StepFunction& b) { return a -= b; }
    friend StepFunction operator*(cplx s, StepFunction a) { return a *= s; }

private:
    BanachSpace space_{};
    int fine_ = 0;
    int support_ = 0;
    int radix_ = kRadix;
    std::size_t cells_ = 1;
    std::vector<cplx> data_ = std::vector<cplx>(1);
};

// In-place Chrestenson transform with digit reversal over L digits:
// a_d ← Σ_c a_c ω^{±Σ_k c_k d_{L-1-k}}, sign = -1 for the forward kernel.
void chrestenson(std::span<cplx> a, int radix, int L, int sign);

// f̂(ξ) = ∫ f(x) conj(e_ξ(x)) dx on fine scale -support and support [0, radix^fine).
StepFunction wft(const StepFunction& f);
StepFunction wft_naive(const StepFunction& f);
StepFunction inverse_wft(const StepFunction& fhat);
StepFunction inverse_wft_naive(const StepFunction& fhat);

StepFunction modulate(const WalshPoint& eta, const StepFunction& f);
StepFunction translate(const WalshPoint& y, const StepFunction& f);
// Dil_{3^n} f(x) = 3^{-n} f(3^{-n} x).
StepFunction dilate(int n, const StepFunction& f);

// Largest pointwise distance after regridding both onto a common grid.
double max_abs_diff(const StepFunction& f, const StepFunction& g);

// ⟨f; g⟩ = ∫ f conj(g); g is scalar.
Vec pairing(const StepFunction& f, const StepFunction& g);
// ∫ f conj(g) for two scalar functions.
cplx inner(const StepFunction& f, const StepFunction& g);
double lp_norm(const StepFunction& f, double p);
double lp_average(const StepFunction& f, const TriadicInterval& I, double p);
Vec average(const StepFunction& f, const TriadicInterval& I);
bool is_holder_triple(double p0, double p1, double p2);

// M_p f(x) = sup over triadic I ∋ x with I ⊆ ambient of the L^p(I)-average of ‖f‖.
StepFunction maximal_function(const StepFunction& f, double p, const TriadicInterval& ambient);

} // namespace walsh3
