#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace walsh3 {

using cplx = std::complex<double>;

constexpr int kRadix = 3;

// Raised when a value does not sit on the grid an operation needs.
class GridError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// radix^k for k >= 0, checked against int64 overflow.
std::int64_t ipow(int radix, int k);
// radix^k as a double, any sign of k.
double rpow(int radix, int k);

// Digit a (least significant first) of a non-negative integer in the given radix.
inline int digit_of(std::int64_t v, int a, int radix = kRadix) {
    for (int i = 0; i < a; ++i) v /= radix;
    return static_cast<int>(v % radix);
}

// Digitwise sum mod radix of two non-negative integers (no carries).
std::int64_t digit_add(std::int64_t a, std::int64_t b, int radix = kRadix);
std::int64_t digit_sub(std::int64_t a, std::int64_t b, int radix = kRadix);

// Exponent Σ_{j+k=-1} ξ_j x_k (mod radix) for grid points x = c·radix^ex and
// ξ = d·radix^eξ with c, d non-negative integers.
int grid_character_exponent(std::int64_t c, int ex, std::int64_t d, int exi, int radix = kRadix);

// e^{2πi k / radix}
cplx root_of_unity(int k, int radix = kRadix);

class WalshPoint {
public:
    explicit WalshPoint(int radix = kRadix);

    // Digits are reduced mod radix; zero digits are dropped.
    static WalshPoint from_digits(const std::map<int, int>& digits, int radix = kRadix);
    // The point index·radix^exponent.
    static WalshPoint from_grid(std::int64_t index, int exponent, int radix = kRadix);

    int radix() const { return radix_; }
    int digit(int n) const;
    const std::map<int, int>& digits() const { return digits_; }
    bool is_zero() const { return digits_.empty(); }

    std::optional<int> top() const;
    std::optional<int> bottom() const;

    // |x| = radix^top, |0| = 0.
    double norm() const;
    double to_real() const;

    // Integer i with x = i·radix^exponent; throws GridError if x has digits below exponent.
    std::int64_t grid_index(int exponent) const;

    WalshPoint operator-() const;
    friend WalshPoint operator+(const WalshPoint& a, const WalshPoint& b);
    friend WalshPoint operator-(const WalshPoint& a, const WalshPoint& b);
    friend bool operator==(const WalshPoint& a, const WalshPoint& b) = default;

    std::string to_string() const;

private:
    int radix_;
    std::map<int, int> digits_;
};

int character_exponent(const WalshPoint& xi, const WalshPoint& x);
cplx character(const WalshPoint& xi, const WalshPoint& x);

// Open ball B_r(x) with r = radix^n contains y iff |y - x| < r.
bool in_ball(const WalshPoint& center, int n, const WalshPoint& y);

// [offset·3^scale, (offset+1)·3^scale)
struct TriadicInterval {
    int scale = 0;
    std::int64_t offset = 0;

    double length() const { return rpow(kRadix, scale); }
    double left() const { return static_cast<double>(offset) * length(); }
    double right() const { return static_cast<double>(offset + 1) * length(); }
    WalshPoint left_point() const { return WalshPoint::from_grid(offset, scale); }

    bool contains(const TriadicInterval& other) const;
    bool contains(const WalshPoint& x) const;
    bool intersects(const TriadicInterval& other) const {
        return contains(other) || other.contains(*this);
    }
    TriadicInterval parent() const { return {scale + 1, offset / kRadix}; }
    TriadicInterval ancestor(int at_scale) const;
    TriadicInterval child(int j) const { return {scale - 1, offset * kRadix + j}; }
    std::vector<TriadicInterval> children() const;
    // Index of this interval among its parent's children.
    int child_index() const { return static_cast<int>(offset % kRadix); }

    // Aligned interval [a, b); throws GridError otherwise.
    static TriadicInterval from_bounds(double a, double b);

    friend auto operator<=>(const TriadicInterval&, const TriadicInterval&) = default;
    std::string to_string() const;
};

} // namespace walsh3
