#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "walsh3/walsh.hpp"

namespace walsh3 {

struct Tritile;

// Rectangle I × ω with |I|·|ω| = 1.
struct Tile {
    TriadicInterval time;
    TriadicInterval freq;

    static Tile make(TriadicInterval time, TriadicInterval freq);
    WalshPoint center() const { return time.left_point(); }
    WalshPoint frequency() const { return freq.left_point(); }
    // The tritile whose horizontal split contains this tile, and the index of this tile in it.
    std::pair<Tritile, int> parent() const;

    friend auto operator<=>(const Tile&, const Tile&) = default;
    std::string to_string() const;
};

bool tiles_disjoint(const Tile& a, const Tile& b);

// Rectangle I × ω with |I|·|ω| = 3.
struct Tritile {
    TriadicInterval time;
    TriadicInterval freq;

    static Tritile make(TriadicInterval time, TriadicInterval freq);
    int scale() const { return time.scale; }
    // 𝐏_v = I × ch_v(ω).
    Tile subtile(int v) const { return {time, freq.child(v)}; }
    WalshPoint center() const { return time.left_point(); }
    WalshPoint frequency() const { return freq.left_point(); }

    friend auto operator<=>(const Tritile& a, const Tritile& b) {
        if (auto c = a.time.scale <=> b.time.scale; c != 0) return c;
        if (auto c = a.time.offset <=> b.time.offset; c != 0) return c;
        return a.freq.offset <=> b.freq.offset;
    }
    friend bool operator==(const Tritile&, const Tritile&) = default;
    std::string to_string() const;
};

// a ≤ b iff I_a ⊆ I_b and ω_a ⊇ ω_b.
bool tritile_leq(const Tritile& a, const Tritile& b);
bool tritiles_disjoint(const Tritile& a, const Tritile& b);

// {J × ω_𝐏 : J ∈ ch(I_𝐏)}: the three tiles below 𝐏 used by the defect.
std::array<Tile, 3> vertical_split(const Tritile& P);

using TritileMask = std::vector<std::uint8_t>;

// All tritiles I × ω with I ⊆ [0, 3^ambient), ω ⊆ [0, 3^fine) and time scales
// from 1 - fine (the finest whose frequency fits the box) up to ambient.
// Indices run over (scale, time offset, freq offset) in lexicographic order.
class Truncation {
public:
    Truncation(int fine, int ambient);

    int fine() const { return fine_; }
    int ambient() const { return ambient_; }
    int min_scale() const { return 1 - fine_; }
    int max_scale() const { return ambient_; }
    int scale_count() const { return ambient_ + fine_; }
    std::size_t size() const { return per_scale_ * static_cast<std::size_t>(scale_count()); }
    std::size_t per_scale() const { return per_scale_; }
    // Number of frequency intervals at time scale s.
    std::int64_t freq_count(int s) const { return ipow(kRadix, fine_ + s - 1); }
    std::int64_t time_count(int s) const { return ipow(kRadix, ambient_ - s); }

    Tritile operator[](std::size_t i) const;
    std::optional<std::size_t> index(const Tritile& P) const;
    std::size_t index_unchecked(int s, std::int64_t t, std::int64_t w) const {
        return static_cast<std::size_t>(s - min_scale()) * per_scale_ + static_cast<std::size_t>(t * freq_count(s) + w);
    }
    bool contains(const Tritile& P) const { return index(P).has_value(); }
    TriadicInterval time_box() const { return {ambient_, 0}; }
    TriadicInterval freq_box() const { return {fine_, 0}; }
    // Index range of tritiles at time scale s.
    std::pair<std::size_t, std::size_t> scale_range(int s) const;

    // Up to three tritiles directly below (time children, frequency parent) and above.
    std::vector<std::size_t> predecessors(std::size_t i) const;
    std::vector<std::size_t> successors(std::size_t i) const;

    TritileMask empty_mask() const { return TritileMask(size(), 0); }
    TritileMask full_mask() const { return TritileMask(size(), 1); }
    TritileMask mask_of(std::span<const Tritile> set) const;
    std::vector<Tritile> members(const TritileMask& m) const;

    friend bool operator==(const Truncation&, const Truncation&) = default;

private:
    int fine_;
    int ambient_;
    std::size_t per_scale_;
};

// The tree T(top) = {𝐐 ≤ top} inside a truncation.
class Tree {
public:
    Tree(const Truncation& plane, const Tritile& top);

    const Tritile& top() const { return top_; }
    const Truncation& plane() const { return plane_; }
    std::span<const std::size_t> members() const { return members_; }
    bool contains(std::size_t idx) const;
    // -1 for the top, else the unique u with 𝐐 ∈ T^u.
    int component_of(std::size_t idx) const;
    bool in_component(std::size_t idx, int u) const {
        const int c = component_of(idx);
        return c < 0 || c == u;
    }
    std::vector<std::size_t> component(int u) const;
    TritileMask mask() const;

private:
    Truncation plane_;
    Tritile top_;
    std::vector<std::size_t> members_;
};

// The strip D(I) = {𝐏 : I_𝐏 ⊆ I} inside a truncation.
class Strip {
public:
    Strip(const Truncation& plane, const TriadicInterval& top);

    const TriadicInterval& top() const { return top_; }
    std::span<const std::size_t> members() const { return members_; }
    bool contains(std::size_t idx) const;
    TritileMask mask() const;

private:
    Truncation plane_;
    TriadicInterval top_;
    std::vector<std::size_t> members_;
};

// For every tritile: is it ≤ (resp. ≥) some element of A. Both include A itself.
TritileMask down_closure(const Truncation& plane, const TritileMask& A);
TritileMask up_closure(const Truncation& plane, const TritileMask& A);

bool is_convex(const Truncation& plane, const TritileMask& A);
bool is_convex(const Truncation& plane, std::span<const Tritile> A);

} // namespace walsh3
