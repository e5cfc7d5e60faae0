#include "walsh3/step_function.hpp"

#include <algorithm>
#include <cmath>

namespace walsh3 {

StepFunction::StepFunction(BanachSpace space, int fine, int support, int radix)
    : space_(space), fine_(fine), support_(support), radix_(radix) {
    if (fine + support < 0) throw std::invalid_argument("StepFunction: support finer than a cell");
    if (fine + support > 18) throw std::invalid_argument("StepFunction: grid too large");
    cells_ = static_cast<std::size_t>(ipow(radix, fine + support));
    data_.assign(cells_ * static_cast<std::size_t>(space.dim()), cplx{});
}

StepFunction StepFunction::scalar(int fine, int support, std::vector<cplx> values, int radix) {
    StepFunction f(BanachSpace::scalar(), fine, support, radix);
    if (values.size() != f.cells()) throw std::invalid_argument("StepFunction::scalar: wrong number of cells");
    f.data_ = std::move(values);
    return f;
}

StepFunction StepFunction::indicator(const TriadicInterval& I, int fine, int support) {
    StepFunction f(BanachSpace::scalar(), fine, support);
    if (I.scale < -fine) throw GridError("indicator: interval finer than the grid");
    const auto w = ipow(kRadix, I.scale + fine);
    for (std::int64_t c = I.offset * w; c < (I.offset + 1) * w; ++c) {
        if (c >= 0 && static_cast<std::size_t>(c) < f.cells()) f.at(static_cast<std::size_t>(c)) = 1.0;
    }
    return f;
}

std::int64_t StepFunction::cell_of(const WalshPoint& x) const {
    std::int64_t c = 0;
    for (auto [n, d] : x.digits()) {
        if (n >= support_) return -1;
        if (n >= -fine_) c += d * ipow(radix_, n + fine_);
    }
    return c;
}

Vec StepFunction::evaluate(const WalshPoint& x) const {
    const auto c = cell_of(x);
    if (c < 0) return space_.zero();
    return value(static_cast<std::size_t>(c));
}

StepFunction StepFunction::regrid(int fine, int support) const {
    if (fine < fine_ || support < support_) throw GridError("regrid: target grid must be finer and larger");
    StepFunction g(space_, fine, support, radix_);
    const auto shrink = ipow(radix_, fine - fine_);
    const auto limit = static_cast<std::size_t>(ipow(radix_, fine + support_));
    const int d = dim();
    for (std::size_t c = 0; c < limit; ++c) {
        const std::size_t src = c / static_cast<std::size_t>(shrink);
        std::copy_n(&data_[src * d], d, &g.data_[c * d]);
    }
    return g;
}

StepFunction StepFunction::pointwise_norm() const {
    StepFunction g(BanachSpace::scalar(), fine_, support_, radix_);
    for (std::size_t c = 0; c < cells_; ++c) g.data_[c] = space_.norm(&data_[c * dim()]);
    return g;
}

StepFunction StepFunction::coordinate(int k) const {
    StepFunction g(BanachSpace::scalar(), fine_, support_, radix_);
    for (std::size_t c = 0; c < cells_; ++c) g.data_[c] = data_[c * dim() + k];
    return g;
}

static void check_same_grid(const StepFunction& a, const StepFunction& b) {
    if (a.fine() != b.fine() || a.support() != b.support() || a.radix() != b.radix() || !(a.space() == b.space()))
        throw GridError("StepFunction: grid or space mismatch");
}

StepFunction& StepFunction::operator+=(const StepFunction& other) {
    check_same_grid(*this, other);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
}

StepFunction& StepFunction::operator-=(const StepFunction& other) {
    check_same_grid(*this, other);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
    return *this;
}

StepFunction& StepFunction::operator*=(cplx s) {
    for (auto& v : data_) v *= s;
    return *this;
}

void chrestenson(std::span<cplx> a, int radix, int L, int sign) {
    const auto n = static_cast<std::size_t>(ipow(radix, L));
    if (a.size() != n) throw std::invalid_argument("chrestenson: length must be radix^L");
    std::vector<cplx> w(radix);
    for (int k = 0; k < radix; ++k) w[k] = root_of_unity(sign * k, radix);
    std::vector<cplx> in(radix), out(radix);
    std::size_t stride = 1;
    for (int k = 0; k < L; ++k, stride *= radix) {
        const std::size_t block = stride * radix;
        for (std::size_t base = 0; base < n; base += block) {
            for (std::size_t off = 0; off < stride; ++off) {
                for (int j = 0; j < radix; ++j) in[j] = a[base + off + j * stride];
                for (int m = 0; m < radix; ++m) {
                    cplx s = 0.0;
                    for (int j = 0; j < radix; ++j) s += in[j] * w[(j * m) % radix];
                    out[m] = s;
                }
                for (int m = 0; m < radix; ++m) a[base + off + m * stride] = out[m];
            }
        }
    }
    // Digit reversal turns Σ c_k e_k into Σ c_k d_{L-1-k}.
    std::vector<cplx> b(a.begin(), a.end());
    for (std::size_t d = 0; d < n; ++d) {
        std::size_t r = 0, t = d;
        for (int k = 0; k < L; ++k, t /= radix) r = r * radix + t % radix;
        a[d] = b[r];
    }
}

namespace {

StepFunction transform(const StepFunction& f, int sign, bool naive) {
    const int N = f.fine(), M = f.support(), L = N + M, r = f.radix();
    StepFunction g(f.space(), M, N, r);
    const double scale = rpow(r, -N);
    const std::size_t n = f.cells();
    const int d = f.dim();
    std::vector<cplx> buf(n);
    for (int k = 0; k < d; ++k) {
        if (naive) {
            for (std::size_t e = 0; e < n; ++e) {
                cplx s = 0.0;
                for (std::size_t c = 0; c < n; ++c) {
                    const int ex = grid_character_exponent(static_cast<std::int64_t>(c), -N,
                                                           static_cast<std::int64_t>(e), -M, r);
                    s += f.at(c, k) * root_of_unity(sign * ex, r);
                }
                g.at(e, k) = scale * s;
            }
        } else {
            for (std::size_t c = 0; c < n; ++c) buf[c] = f.at(c, k);
            chrestenson(buf, r, L, sign);
            for (std::size_t e = 0; e < n; ++e) g.at(e, k) = scale * buf[e];
        }
    }
    return g;
}

} // namespace

StepFunction wft(const StepFunction& f) { return transform(f, -1, false); }
StepFunction wft_naive(const StepFunction& f) { return transform(f, -1, true); }
StepFunction inverse_wft(const StepFunction& fhat) { return transform(fhat, +1, false); }
StepFunction inverse_wft_naive(const StepFunction& fhat) { return transform(fhat, +1, true); }

StepFunction modulate(const WalshPoint& eta, const StepFunction& f) {
    if (eta.radix() != f.radix()) throw std::invalid_argument("modulate: radix mismatch");
    if (eta.is_zero()) return f;
    // e_η is constant on cells only if η has no digits at positions >= fine.
    const int fine = std::max(f.fine(), *eta.top() + 1);
    StepFunction g = f.regrid(fine, f.support());
    const int e = *eta.bottom();
    const auto d = eta.grid_index(e);
    for (std::size_t c = 0; c < g.cells(); ++c) {
        const int ex = grid_character_exponent(static_cast<std::int64_t>(c), -fine, d, e, f.radix());
        if (ex != 0) g.value(c) *= root_of_unity(ex, f.radix());
    }
    return g;
}

StepFunction translate(const WalshPoint& y, const StepFunction& f) {
    if (y.radix() != f.radix()) throw std::invalid_argument("translate: radix mismatch");
    if (y.is_zero()) return f;
    const auto yi = y.grid_index(-f.fine());
    const int support = std::max(f.support(), *y.top() + 1);
    StepFunction g(f.space(), f.fine(), support, f.radix());
    for (std::size_t c = 0; c < g.cells(); ++c) {
        const auto src = digit_sub(static_cast<std::int64_t>(c), yi, f.radix());
        if (static_cast<std::size_t>(src) < f.cells()) g.value(c) = f.value(static_cast<std::size_t>(src));
    }
    return g;
}

StepFunction dilate(int n, const StepFunction& f) {
    StepFunction g(f.space(), f.fine() - n, f.support() + n, f.radix());
    const double s = rpow(f.radix(), -n);
    for (std::size_t i = 0; i < f.data().size(); ++i) g.data()[i] = s * f.data()[i];
    return g;
}

double max_abs_diff(const StepFunction& f, const StepFunction& g) {
    if (!(f.space() == g.space())) throw std::invalid_argument("max_abs_diff: space mismatch");
    const int fine = std::max(f.fine(), g.fine()), support = std::max(f.support(), g.support());
    const StepFunction a = f.regrid(fine, support), b = g.regrid(fine, support);
    double m = 0.0;
    for (std::size_t i = 0; i < a.data().size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
    return m;
}

Vec pairing(const StepFunction& f, const StepFunction& g) {
    if (g.dim() != 1) throw std::invalid_argument("pairing: second argument must be scalar");
    if (f.radix() != g.radix()) throw std::invalid_argument("pairing: radix mismatch");
    const int fine = std::max(f.fine(), g.fine()), support = std::max(f.support(), g.support());
    const StepFunction a = f.regrid(fine, support), b = g.regrid(fine, support);
    Vec s = Vec::Zero(f.dim());
    for (std::size_t c = 0; c < a.cells(); ++c) {
        const cplx gc = std::conj(b.at(c));
        if (gc != 0.0) s += gc * a.value(c);
    }
    return s * a.cell_width();
}

cplx inner(const StepFunction& f, const StepFunction& g) {
    if (f.dim() != 1) throw std::invalid_argument("inner: scalar functions required");
    return pairing(f, g)[0];
}

double lp_norm(const StepFunction& f, double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be in [1, inf]");
    std::vector<double> v(f.cells());
    for (std::size_t c = 0; c < f.cells(); ++c) v[c] = f.space().norm(&f.data()[c * f.dim()]);
    if (std::isinf(p)) return lp_of(v, p);
    return lp_of(v, p) * std::pow(f.cell_width(), 1.0 / p);
}

namespace {

// Range of cells of f inside I, clipped to the support.
std::pair<std::size_t, std::size_t> cell_range(const StepFunction& f, const TriadicInterval& I) {
    const auto w = ipow(f.radix(), I.scale + f.fine());
    const auto lo = std::min<std::int64_t>(I.offset * w, static_cast<std::int64_t>(f.cells()));
    const auto hi = std::min<std::int64_t>((I.offset + 1) * w, static_cast<std::int64_t>(f.cells()));
    return {static_cast<std::size_t>(lo), static_cast<std::size_t>(hi)};
}

} // namespace

double lp_average(const StepFunction& f, const TriadicInterval& I, double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("lp_average: p must be in [1, inf]");
    if (f.radix() != kRadix) throw std::invalid_argument("lp_average: triadic intervals need radix 3");
    if (I.scale < -f.fine()) {
        const auto c = f.cell_of(I.left_point());
        return c < 0 ? 0.0 : f.space().norm(&f.data()[static_cast<std::size_t>(c) * f.dim()]);
    }
    auto [lo, hi] = cell_range(f, I);
    std::vector<double> v;
    for (std::size_t c = lo; c < hi; ++c) v.push_back(f.space().norm(&f.data()[c * f.dim()]));
    if (std::isinf(p)) return lp_of(v, p);
    return lp_of(v, p) * std::pow(f.cell_width() / I.length(), 1.0 / p);
}

Vec average(const StepFunction& f, const TriadicInterval& I) {
    if (f.radix() != kRadix) throw std::invalid_argument("average: triadic intervals need radix 3");
    if (I.scale < -f.fine()) return f.evaluate(I.left_point());
    auto [lo, hi] = cell_range(f, I);
    Vec s = Vec::Zero(f.dim());
    for (std::size_t c = lo; c < hi; ++c) s += f.value(c);
    return s * (f.cell_width() / I.length());
}

bool is_holder_triple(double p0, double p1, double p2) {
    double s = 0.0;
    for (double p : {p0, p1, p2}) {
        if (!(p >= 1.0)) return false;
        s += std::isinf(p) ? 0.0 : 1.0 / p;
    }
    return std::abs(s - 1.0) <= 1e-12;
}

StepFunction maximal_function(const StepFunction& f, double p, const TriadicInterval& ambient) {
    if (!(p >= 1.0)) throw std::invalid_argument("maximal_function: p must be in [1, inf]");
    if (f.radix() != kRadix) throw std::invalid_argument("maximal_function: radix 3 required");
    int support = f.support();
    while (!TriadicInterval{support, 0}.contains(ambient)) ++support;
    const int fine = std::max(f.fine(), -ambient.scale);
    const StepFunction g = f.regrid(fine, support);
    StepFunction out(BanachSpace::scalar(), fine, support);

    auto [lo, hi] = cell_range(g, ambient);
    const std::size_t n = hi - lo;
    const bool sup = std::isinf(p);
    std::vector<double> level(n), best(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double v = g.space().norm(&g.data()[(lo + i) * g.dim()]);
        level[i] = sup ? v : std::pow(v, p);
        best[i] = v;
    }
    std::size_t width = 1;
    for (std::size_t len = n; len > 1; len /= kRadix) {
        std::vector<double> next(len / kRadix);
        for (std::size_t b = 0; b < next.size(); ++b) {
            double a = 0.0;
            for (int j = 0; j < kRadix; ++j) a = sup ? std::max(a, level[b * kRadix + j]) : a + level[b * kRadix + j];
            next[b] = sup ? a : a / kRadix;
        }
        width *= kRadix;
        for (std::size_t i = 0; i < n; ++i) {
            const double v = next[i / width];
            best[i] = std::max(best[i], sup ? v : std::pow(v, 1.0 / p));
        }
        level.swap(next);
    }
    for (std::size_t i = 0; i < n; ++i) out.at(lo + i) = best[i];
    return out;
}

} // namespace walsh3
