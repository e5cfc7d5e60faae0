#include "walsh3/walsh.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace walsh3 {

std::int64_t ipow(int radix, int k) {
    if (k < 0) throw std::invalid_argument("ipow: negative exponent");
    std::int64_t r = 1;
    for (int i = 0; i < k; ++i) {
        if (r > INT64_MAX / radix) throw std::overflow_error("ipow: overflow");
        r *= radix;
    }
    return r;
}

double rpow(int radix, int k) {
    double r = 1.0;
    if (k >= 0) {
        for (int i = 0; i < k; ++i) r *= radix;
    } else {
        for (int i = 0; i < -k; ++i) r *= radix;
        r = 1.0 / r;
    }
    return r;
}

std::int64_t digit_add(std::int64_t a, std::int64_t b, int radix) {
    std::int64_t out = 0, place = 1;
    while (a > 0 || b > 0) {
        out += ((a % radix + b % radix) % radix) * place;
        a /= radix;
        b /= radix;
        place *= radix;
    }
    return out;
}

std::int64_t digit_sub(std::int64_t a, std::int64_t b, int radix) {
    std::int64_t out = 0, place = 1;
    while (a > 0 || b > 0) {
        out += ((a % radix - b % radix + radix) % radix) * place;
        a /= radix;
        b /= radix;
        place *= radix;
    }
    return out;
}

int grid_character_exponent(std::int64_t c, int ex, std::int64_t d, int exi, int radix) {
    // x_k = digit (k - ex) of c, ξ_j = digit (j - exi) of d, with j = -1 - k.
    std::vector<int> dd;
    for (std::int64_t t = d; t > 0; t /= radix) dd.push_back(static_cast<int>(t % radix));
    int s = 0;
    int a = 0;
    for (std::int64_t t = c; t > 0; t /= radix, ++a) {
        const int xa = static_cast<int>(t % radix);
        if (xa == 0) continue;
        const int b = -1 - (a + ex) - exi;
        if (b >= 0 && b < static_cast<int>(dd.size())) s += xa * dd[b];
    }
    return s % radix;
}

cplx root_of_unity(int k, int radix) {
    k %= radix;
    if (k < 0) k += radix;
    if (k == 0) return {1.0, 0.0};
    if (radix == 3) {
        // Exact-as-possible constants for the common case.
        static const double h = std::sqrt(3.0) / 2.0;
        return k == 1 ? cplx(-0.5, h) : cplx(-0.5, -h);
    }
    const double t = 2.0 * std::numbers::pi * k / radix;
    return {std::cos(t), std::sin(t)};
}

WalshPoint::WalshPoint(int radix) : radix_(radix) {
    if (radix < 2) throw std::invalid_argument("WalshPoint: radix must be >= 2");
}

WalshPoint WalshPoint::from_digits(const std::map<int, int>& digits, int radix) {
    WalshPoint p(radix);
    for (auto [n, d] : digits) {
        const int r = ((d % radix) + radix) % radix;
        if (r != 0) p.digits_[n] = r;
    }
    return p;
}

WalshPoint WalshPoint::from_grid(std::int64_t index, int exponent, int radix) {
    if (index < 0) throw std::invalid_argument("WalshPoint::from_grid: negative index");
    WalshPoint p(radix);
    for (int n = exponent; index > 0; index /= radix, ++n) {
        const int d = static_cast<int>(index % radix);
        if (d != 0) p.digits_[n] = d;
    }
    return p;
}

int WalshPoint::digit(int n) const {
    auto it = digits_.find(n);
    return it == digits_.end() ? 0 : it->second;
}

std::optional<int> WalshPoint::top() const {
    if (digits_.empty()) return std::nullopt;
    return digits_.rbegin()->first;
}

std::optional<int> WalshPoint::bottom() const {
    if (digits_.empty()) return std::nullopt;
    return digits_.begin()->first;
}

double WalshPoint::norm() const {
    auto t = top();
    return t ? rpow(radix_, *t) : 0.0;
}

double WalshPoint::to_real() const {
    double s = 0.0;
    for (auto [n, d] : digits_) s += d * rpow(radix_, n);
    return s;
}

std::int64_t WalshPoint::grid_index(int exponent) const {
    std::int64_t v = 0;
    if (!digits_.empty() && digits_.begin()->first < exponent)
        throw GridError("WalshPoint: point not on grid " + std::to_string(exponent));
    for (auto [n, d] : digits_) v += d * ipow(radix_, n - exponent);
    return v;
}

WalshPoint WalshPoint::operator-() const {
    WalshPoint p(radix_);
    for (auto [n, d] : digits_) p.digits_[n] = radix_ - d;
    return p;
}

static void check_radix(const WalshPoint& a, const WalshPoint& b) {
    if (a.radix() != b.radix()) throw std::invalid_argument("WalshPoint: radix mismatch");
}

WalshPoint operator+(const WalshPoint& a, const WalshPoint& b) {
    check_radix(a, b);
    std::map<int, int> d = a.digits_;
    for (auto [n, v] : b.digits_) d[n] += v;
    return WalshPoint::from_digits(d, a.radix_);
}

WalshPoint operator-(const WalshPoint& a, const WalshPoint& b) { return a + (-b); }

std::string WalshPoint::to_string() const {
    std::ostringstream os;
    os << "{";
    bool first = true;
    for (auto [n, d] : digits_) {
        if (!first) os << ", ";
        os << n << ":" << d;
        first = false;
    }
    os << "}";
    return os.str();
}

int character_exponent(const WalshPoint& xi, const WalshPoint& x) {
    check_radix(xi, x);
    int s = 0;
    for (auto [j, d] : xi.digits()) s += d * x.digit(-1 - j);
    return s % xi.radix();
}

cplx character(const WalshPoint& xi, const WalshPoint& x) {
    return root_of_unity(character_exponent(xi, x), xi.radix());
}

bool in_ball(const WalshPoint& center, int n, const WalshPoint& y) {
    auto t = (y - center).top();
    return !t || *t < n;
}

bool TriadicInterval::contains(const TriadicInterval& other) const {
    if (other.scale > scale) return false;
    return other.ancestor(scale).offset == offset;
}

bool TriadicInterval::contains(const WalshPoint& x) const {
    if (x.radix() != kRadix) throw std::invalid_argument("TriadicInterval: radix mismatch");
    std::int64_t hi = 0;
    for (auto [n, d] : x.digits()) {
        if (n >= scale) hi += d * ipow(kRadix, n - scale);
    }
    return hi == offset;
}

TriadicInterval TriadicInterval::ancestor(int at_scale) const {
    if (at_scale < scale) throw std::invalid_argument("TriadicInterval::ancestor: finer scale");
    TriadicInterval r = *this;
    while (r.scale < at_scale) r = r.parent();
    return r;
}

std::vector<TriadicInterval> TriadicInterval::children() const {
    return {child(0), child(1), child(2)};
}

TriadicInterval TriadicInterval::from_bounds(double a, double b) {
    const double len = b - a;
    if (!(len > 0)) throw GridError("TriadicInterval: empty interval");
    const double ls = std::log(len) / std::log(3.0);
    const int s = static_cast<int>(std::lround(ls));
    const double unit = rpow(kRadix, s);
    if (std::abs(unit - len) > 1e-12 * len) throw GridError("TriadicInterval: length is not a power of 3");
    const double q = a / unit;
    const auto m = std::llround(q);
    if (m < 0 || std::abs(q - static_cast<double>(m)) > 1e-9) throw GridError("TriadicInterval: misaligned endpoints");
    return {s, m};
}

std::string TriadicInterval::to_string() const {
    std::ostringstream os;
    os << "[" << offset << "*3^" << scale << ", " << (offset + 1) << "*3^" << scale << ")";
    return os.str();
}

} // namespace walsh3
