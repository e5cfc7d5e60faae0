#include "walsh3/banach.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace walsh3 {

double conjugate_exponent(double p) {
    if (p == 1.0) return kInf;
    if (std::isinf(p)) return 1.0;
    return p / (p - 1.0);
}

double lp_of(std::span<const double> v, double p) {
    if (std::isinf(p)) {
        double m = 0.0;
        for (double x : v) m = std::max(m, std::abs(x));
        return m;
    }
    // Scale by the max entry to keep large p stable.
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    if (m == 0.0) return 0.0;
    double s = 0.0;
    for (double x : v) s += std::pow(std::abs(x) / m, p);
    return m * std::pow(s, 1.0 / p);
}

std::vector<double> singular_values(const Vec& m, int d) {
    Eigen::Map<const Eigen::MatrixXcd> a(m.data(), d, d);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a);
    const auto& s = svd.singularValues();
    return {s.data(), s.data() + s.size()};
}

BanachSpace BanachSpace::scalar() { return BanachSpace{}; }

BanachSpace BanachSpace::sequence(double p, int d) {
    if (!(p >= 1.0)) throw std::invalid_argument("BanachSpace: p must be in [1, inf]");
    if (d < 1) throw std::invalid_argument("BanachSpace: dimension must be positive");
    BanachSpace s;
    s.kind_ = SpaceKind::Sequence;
    s.p_ = p;
    s.d_ = d;
    return s;
}

BanachSpace BanachSpace::schatten(double p, int d) {
    if (!(p >= 1.0)) throw std::invalid_argument("BanachSpace: p must be in [1, inf]");
    if (d < 1 || d > 8) throw std::invalid_argument("BanachSpace: Schatten dimension must be in [1, 8]");
    BanachSpace s;
    s.kind_ = SpaceKind::Schatten;
    s.p_ = p;
    s.d_ = d;
    return s;
}

double BanachSpace::norm(const Vec& v) const {
    if (v.size() != dim()) throw std::invalid_argument("BanachSpace::norm: dimension mismatch");
    return norm(v.data());
}

double BanachSpace::norm(const cplx* v) const {
    switch (kind_) {
    case SpaceKind::Scalar:
        return std::abs(v[0]);
    case SpaceKind::Sequence: {
        std::vector<double> a(d_);
        for (int i = 0; i < d_; ++i) a[i] = std::abs(v[i]);
        return lp_of(a, p_);
    }
    case SpaceKind::Schatten: {
        Vec m = Eigen::Map<const Vec>(v, dim());
        return lp_of(singular_values(m, d_), p_);
    }
    }
    return 0.0;
}

BanachSpace BanachSpace::dual() const {
    if (kind_ == SpaceKind::Scalar) return *this;
    BanachSpace s = *this;
    s.p_ = conjugate_exponent(p_);
    return s;
}

double BanachSpace::hilbertian_exponent() const {
    if (kind_ == SpaceKind::Scalar) return 2.0;
    return p_ >= 2.0 ? p_ : conjugate_exponent(p_);
}

bool BanachSpace::is_hilbert() const { return kind_ == SpaceKind::Scalar || p_ == 2.0; }

std::string BanachSpace::name() const {
    std::ostringstream os;
    switch (kind_) {
    case SpaceKind::Scalar: return "C";
    case SpaceKind::Sequence: os << "l" << p_ << "_" << d_; break;
    case SpaceKind::Schatten: os << "S" << p_ << "_" << d_; break;
    }
    return os.str();
}

namespace {

double inv(double p) { return std::isinf(p) ? 0.0 : 1.0 / p; }

double holder_sum(const std::array<BanachSpace, 3>& s) {
    double t = 0.0;
    for (const auto& x : s) t += x.kind() == SpaceKind::Scalar ? 1.0 / 3.0 : inv(x.p());
    return t;
}

} // namespace

TrilinearForm TrilinearForm::duality(const BanachSpace& x) {
    TrilinearForm f;
    f.kind_ = FormKind::Duality;
    f.spaces_ = {x, x.dual(), BanachSpace::scalar()};
    return f;
}

TrilinearForm TrilinearForm::product_sum(const BanachSpace& a, const BanachSpace& b, const BanachSpace& c) {
    for (const auto* s : {&a, &b, &c}) {
        if (s->kind() == SpaceKind::Schatten) throw std::invalid_argument("product_sum: sequence spaces required");
        if (s->dim() != a.dim()) throw std::invalid_argument("product_sum: dimension mismatch");
    }
    TrilinearForm f;
    f.kind_ = FormKind::ProductSum;
    f.spaces_ = {a, b, c};
    return f;
}

TrilinearForm TrilinearForm::trace_product(const BanachSpace& a, const BanachSpace& b, const BanachSpace& c) {
    for (const auto* s : {&a, &b, &c}) {
        if (s->kind() != SpaceKind::Schatten) throw std::invalid_argument("trace_product: Schatten spaces required");
        if (s->d() != a.d()) throw std::invalid_argument("trace_product: dimension mismatch");
    }
    TrilinearForm f;
    f.kind_ = FormKind::TraceProduct;
    f.spaces_ = {a, b, c};
    return f;
}

cplx TrilinearForm::apply(const cplx* a, const cplx* b, const cplx* c) const {
    switch (kind_) {
    case FormKind::Duality: {
        cplx s = 0.0;
        for (int i = 0; i < spaces_[0].dim(); ++i) s += a[i] * b[i];
        return c[0] * s;
    }
    case FormKind::ProductSum: {
        cplx s = 0.0;
        for (int i = 0; i < spaces_[0].dim(); ++i) s += a[i] * b[i] * c[i];
        return s;
    }
    case FormKind::TraceProduct: {
        const int d = spaces_[0].d();
        Eigen::Map<const Eigen::MatrixXcd> A(a, d, d), B(b, d, d), C(c, d, d);
        return (A * B * C).trace();
    }
    }
    return 0.0;
}

cplx TrilinearForm::operator()(const Vec& a, const Vec& b, const Vec& c) const {
    for (int u = 0; u < 3; ++u) {
        const Vec& x = u == 0 ? a : (u == 1 ? b : c);
        if (x.size() != spaces_[u].dim()) throw std::invalid_argument("TrilinearForm: operand dimension mismatch");
    }
    return apply(a.data(), b.data(), c.data());
}

double TrilinearForm::bound() const {
    if (kind_ == FormKind::Duality) return 1.0;
    const double t = holder_sum(spaces_);
    if (t >= 1.0 - 1e-12) return 1.0;
    return std::pow(static_cast<double>(spaces_[0].d()), 1.0 - t);
}

std::pair<int, int> TrilinearForm::others(int u) const {
    switch (u) {
    case 0: return {1, 2};
    case 1: return {0, 2};
    case 2: return {0, 1};
    }
    throw std::invalid_argument("TrilinearForm: slot must be 0, 1 or 2");
}

Vec TrilinearForm::functional(int u, const Vec& x, const Vec& y) const {
    auto [v, w] = others(u);
    const int n = spaces_[w].dim();
    Vec phi(n);
    Vec e = Vec::Zero(n);
    std::array<const cplx*, 3> slots{};
    slots[u] = x.data();
    slots[v] = y.data();
    for (int i = 0; i < n; ++i) {
        e.setZero();
        e[i] = 1.0;
        slots[w] = e.data();
        phi[i] = apply(slots[0], slots[1], slots[2]);
    }
    return phi;
}

double TrilinearForm::embedding_norm(int u, const Vec& x) const {
    auto [v, w] = others(u);
    if (kind_ == FormKind::Duality) {
        if (u == 2) return std::abs(x[0]);
        return spaces_[u].norm(x);
    }
    // Sup of |Π(x, y, z)| over unit y, z: products yz fill the unit ball of
    // ℓ^c (resp. S^c) with 1/c = 1/r_v + 1/r_w, so the answer is the dual norm.
    const double ic = inv(spaces_[v].p()) + inv(spaces_[w].p());
    const double q = ic >= 1.0 ? kInf : conjugate_exponent(1.0 / ic);
    if (kind_ == FormKind::ProductSum) {
        std::vector<double> a(x.size());
        for (int i = 0; i < x.size(); ++i) a[i] = std::abs(x[i]);
        return lp_of(a, q);
    }
    return lp_of(singular_values(x, spaces_[u].d()), q);
}

std::string TrilinearForm::name() const {
    switch (kind_) {
    case FormKind::Duality: return "duality";
    case FormKind::ProductSum: return "product";
    case FormKind::TraceProduct: return "trace";
    }
    return "";
}

cplx extended_form(const TrilinearForm& pi, const std::array<Vec, 3>& a, const std::array<Vec, 3>& b,
                   const std::array<Vec, 3>& c) {
    return pi(a[0], b[1], c[2]);
}

MomentEstimate rademacher_expectation(std::size_t K, const std::function<double(std::span<const int>)>& g,
                                      const RademacherSampler& sampler) {
    std::vector<int> eps(K, 1);
    MomentEstimate out;
    if (K <= sampler.exact_threshold) {
        const std::uint64_t n = std::uint64_t{1} << K;
        double s = 0.0;
        for (std::uint64_t m = 0; m < n; ++m) {
            for (std::size_t k = 0; k < K; ++k) eps[k] = (m >> k) & 1 ? -1 : 1;
            s += g(eps);
        }
        out.value = s / static_cast<double>(n);
        return out;
    }
    if (!sampler.allow_monte_carlo) throw std::invalid_argument("rademacher: too many terms for exact enumeration");
    std::mt19937_64 rng(sampler.seed);
    double s = 0.0, s2 = 0.0;
    for (std::size_t t = 0; t < sampler.samples; ++t) {
        for (std::size_t k = 0; k < K; ++k) eps[k] = (rng() >> 11) & 1 ? -1 : 1;
        const double v = g(eps);
        s += v;
        s2 += v * v;
    }
    const double n = static_cast<double>(sampler.samples);
    out.value = s / n;
    out.std_error = std::sqrt(std::max(0.0, s2 / n - out.value * out.value) / n);
    out.exact = false;
    return out;
}

namespace {

// 𝔼‖Σ ε_n x_n‖^p, exact by Gray-code enumeration with ε_0 = +1 (the norm is even).
double exact_power_mean(std::span<const Vec> xs, const BanachSpace& space, double p) {
    const std::size_t K = xs.size();
    Vec s = Vec::Zero(space.dim());
    for (const auto& x : xs) s += x;
    if (K == 1) return std::pow(space.norm(s), p);
    std::vector<int> eps(K, 1);
    const std::uint64_t n = std::uint64_t{1} << (K - 1);
    double acc = std::pow(space.norm(s), p);
    for (std::uint64_t i = 1; i < n; ++i) {
        const int bit = std::countr_zero(i) + 1;
        eps[bit] = -eps[bit];
        s += 2.0 * eps[bit] * xs[bit];
        acc += std::pow(space.norm(s), p);
    }
    return acc / static_cast<double>(n);
}

} // namespace

MomentEstimate rademacher_moment(std::span<const Vec> xs, const BanachSpace& space, double p,
                                 const RademacherSampler& sampler) {
    if (xs.empty()) throw std::invalid_argument("rademacher_moment: empty list");
    if (!(p > 0.0) || std::isinf(p)) throw std::invalid_argument("rademacher_moment: p must be in (0, inf)");
    MomentEstimate out;
    if (xs.size() <= sampler.exact_threshold) {
        out.value = std::pow(exact_power_mean(xs, space, p), 1.0 / p);
        return out;
    }
    auto est = rademacher_expectation(
        xs.size(),
        [&](std::span<const int> eps) {
            Vec s = Vec::Zero(space.dim());
            for (std::size_t k = 0; k < xs.size(); ++k) s += static_cast<double>(eps[k]) * xs[k];
            return std::pow(space.norm(s), p);
        },
        sampler);
    out.exact = false;
    out.value = std::pow(est.value, 1.0 / p);
    out.std_error = est.value > 0 ? est.std_error * out.value / (p * est.value) : 0.0;
    return out;
}

double contraction_check(std::span<const Vec> xs, std::span<const cplx> coefficients, const BanachSpace& space,
                         const RademacherSampler& sampler) {
    if (xs.size() != coefficients.size()) throw std::invalid_argument("contraction_check: length mismatch");
    for (auto a : coefficients) {
        if (std::abs(a) > 1.0 + 1e-12) throw std::invalid_argument("contraction_check: coefficient exceeds 1");
    }
    const double den = rademacher_moment(xs, space, 1.0, sampler).value;
    if (den == 0.0) return 0.0;
    std::vector<Vec> ax(xs.begin(), xs.end());
    for (std::size_t i = 0; i < ax.size(); ++i) ax[i] *= coefficients[i];
    return rademacher_moment(ax, space, 1.0, sampler).value / den;
}

RBoundInterval r_bound_estimate(const TrilinearForm& pi, int u, std::span<const Vec> V, const RBoundBudget& budget) {
    if (V.empty()) throw std::invalid_argument("r_bound_estimate: empty set");
    auto [v, w] = pi.others(u);
    const BanachSpace& Xv = pi.space(v);
    const BanachSpace Xw_dual = pi.space(w).dual();

    std::vector<Vec> nz;
    std::vector<double> norms;
    for (const auto& x : V) {
        const double n = pi.embedding_norm(u, x);
        if (n > 0.0) {
            nz.push_back(x);
            norms.push_back(n);
        }
    }
    RBoundInterval out;
    if (nz.empty()) return out;
    const double nmax = *std::max_element(norms.begin(), norms.end());
    out.lower = nmax;

    // Upper bound: decompose Σ ε T_n x_n by distinct operators and use the
    // contraction principle (constant 1 for real, π/2 for complex multipliers).
    const std::size_t imax = static_cast<std::size_t>(std::max_element(norms.begin(), norms.end()) - norms.begin());
    const Vec& v0 = nz[imax];
    const cplx v0n = v0.squaredNorm();
    bool parallel = true, real_ratio = true;
    for (const auto& x : nz) {
        const cplx t = v0.dot(x) / v0n;
        if ((x - t * v0).norm() > 1e-12 * (1.0 + x.norm())) {
            parallel = false;
            break;
        }
        if (std::abs(t.imag()) > 1e-12 * (1.0 + std::abs(t))) real_ratio = false;
    }
    if (parallel) {
        out.upper = real_ratio ? nmax : 0.5 * std::numbers::pi * nmax;
    } else {
        double s = 0.0;
        for (double n : norms) s += n;
        out.upper = s;
    }
    if (out.upper <= out.lower) {
        out.upper = out.lower;
        return out;
    }

    if (budget.random_trials <= 0 || budget.max_terms < 2) {
        out.budget_exhausted = true;
        return out;
    }
    std::mt19937_64 rng(budget.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto rand_vec = [&](int n) {
        Vec x(n);
        for (int i = 0; i < n; ++i) x[i] = cplx(gauss(rng), gauss(rng));
        return x;
    };
    auto ratio = [&](const std::vector<std::size_t>& ops, const std::vector<Vec>& xs) {
        std::vector<Vec> tx(xs.size());
        for (std::size_t n = 0; n < xs.size(); ++n) tx[n] = pi.functional(u, nz[ops[n]], xs[n]);
        const double den = rademacher_moment(xs, Xv, 1.0).value;
        if (den == 0.0) return 0.0;
        return rademacher_moment(tx, Xw_dual, 1.0).value / den;
    };
    for (int t = 0; t < budget.random_trials; ++t) {
        const int N = 2 + static_cast<int>(rng() % static_cast<std::uint64_t>(budget.max_terms - 1));
        std::vector<std::size_t> ops(N);
        std::vector<Vec> xs(N);
        for (int n = 0; n < N; ++n) {
            ops[n] = rng() % nz.size();
            xs[n] = rand_vec(Xv.dim());
        }
        double best = ratio(ops, xs);
        for (int s = 0; s < budget.ascent_steps; ++s) {
            const int n = static_cast<int>(rng() % static_cast<std::uint64_t>(N));
            Vec keep = xs[n];
            xs[n] += 0.3 * xs[n].norm() * rand_vec(Xv.dim()) / std::sqrt(2.0 * Xv.dim());
            const double r = ratio(ops, xs);
            if (r > best) best = r;
            else xs[n] = keep;
        }
        out.lower = std::max(out.lower, best);
    }
    out.lower = std::min(out.lower, out.upper);
    return out;
}

} // namespace walsh3
