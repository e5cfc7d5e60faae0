#include "walsh3/phase_plane.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace walsh3 {

Tile Tile::make(TriadicInterval time, TriadicInterval freq) {
    if (time.scale + freq.scale != 0) throw std::invalid_argument("Tile: area must be 1");
    if (time.offset < 0 || freq.offset < 0) throw std::invalid_argument("Tile: negative offset");
    return {time, freq};
}

std::pair<Tritile, int> Tile::parent() const { return {Tritile{time, freq.parent()}, freq.child_index()}; }

std::string Tile::to_string() const { return time.to_string() + "x" + freq.to_string(); }

bool tiles_disjoint(const Tile& a, const Tile& b) {
    return !(a.time.intersects(b.time) && a.freq.intersects(b.freq));
}

Tritile Tritile::make(TriadicInterval time, TriadicInterval freq) {
    if (time.scale + freq.scale != 1) throw std::invalid_argument("Tritile: area must be 3");
    if (time.offset < 0 || freq.offset < 0) throw std::invalid_argument("Tritile: negative offset");
    return {time, freq};
}

std::string Tritile::to_string() const { return time.to_string() + "x" + freq.to_string(); }

bool tritile_leq(const Tritile& a, const Tritile& b) { return b.time.contains(a.time) && a.freq.contains(b.freq); }

bool tritiles_disjoint(const Tritile& a, const Tritile& b) {
    return !(a.time.intersects(b.time) && a.freq.intersects(b.freq));
}

std::array<Tile, 3> vertical_split(const Tritile& P) {
    return {Tile{P.time.child(0), P.freq}, Tile{P.time.child(1), P.freq}, Tile{P.time.child(2), P.freq}};
}

Truncation::Truncation(int fine, int ambient) : fine_(fine), ambient_(ambient) {
    if (fine + ambient < 1) throw std::invalid_argument("Truncation: need fine + ambient >= 1");
    if (fine + ambient > 12) throw std::invalid_argument("Truncation: too large");
    per_scale_ = static_cast<std::size_t>(ipow(kRadix, fine + ambient - 1));
}

Tritile Truncation::operator[](std::size_t i) const {
    if (i >= size()) throw std::out_of_range("Truncation: index out of range");
    const int s = min_scale() + static_cast<int>(i / per_scale_);
    const auto r = static_cast<std::int64_t>(i % per_scale_);
    const auto F = freq_count(s);
    return {{s, r / F}, {1 - s, r % F}};
}

std::optional<std::size_t> Truncation::index(const Tritile& P) const {
    const int s = P.time.scale;
    if (P.freq.scale != 1 - s || s < min_scale() || s > max_scale()) return std::nullopt;
    if (P.time.offset < 0 || P.time.offset >= time_count(s)) return std::nullopt;
    if (P.freq.offset < 0 || P.freq.offset >= freq_count(s)) return std::nullopt;
    return index_unchecked(s, P.time.offset, P.freq.offset);
}

std::pair<std::size_t, std::size_t> Truncation::scale_range(int s) const {
    const auto lo = static_cast<std::size_t>(s - min_scale()) * per_scale_;
    return {lo, lo + per_scale_};
}

std::vector<std::size_t> Truncation::predecessors(std::size_t i) const {
    const Tritile P = (*this)[i];
    const int s = P.time.scale;
    if (s - 1 < min_scale()) return {};
    std::vector<std::size_t> out;
    for (int j = 0; j < kRadix; ++j) out.push_back(index_unchecked(s - 1, P.time.offset * kRadix + j, P.freq.offset / kRadix));
    return out;
}

std::vector<std::size_t> Truncation::successors(std::size_t i) const {
    const Tritile P = (*this)[i];
    const int s = P.time.scale;
    if (s + 1 > max_scale()) return {};
    std::vector<std::size_t> out;
    for (int j = 0; j < kRadix; ++j) out.push_back(index_unchecked(s + 1, P.time.offset / kRadix, P.freq.offset * kRadix + j));
    return out;
}

TritileMask Truncation::mask_of(std::span<const Tritile> set) const {
    TritileMask m = empty_mask();
    for (const auto& P : set) {
        auto i = index(P);
        if (!i) throw std::invalid_argument("Truncation: tritile outside the truncation: " + P.to_string());
        m[*i] = 1;
    }
    return m;
}

std::vector<Tritile> Truncation::members(const TritileMask& m) const {
    std::vector<Tritile> out;
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (m[i]) out.push_back((*this)[i]);
    }
    return out;
}

Tree::Tree(const Truncation& plane, const Tritile& top) : plane_(plane), top_(top) {
    if (!plane.contains(top)) throw std::invalid_argument("Tree: top outside the truncation");
    const int st = top.time.scale;
    for (int s = plane.min_scale(); s <= st; ++s) {
        const auto n = ipow(kRadix, st - s);
        const auto w = top.freq.ancestor(1 - s).offset;
        for (std::int64_t k = 0; k < n; ++k) members_.push_back(plane.index_unchecked(s, top.time.offset * n + k, w));
    }
    std::sort(members_.begin(), members_.end());
}

bool Tree::contains(std::size_t idx) const { return std::binary_search(members_.begin(), members_.end(), idx); }

int Tree::component_of(std::size_t idx) const {
    const Tritile Q = plane_[idx];
    if (Q == top_) return -1;
    if (!contains(idx)) throw std::invalid_argument("Tree: tritile not in tree");
    return top_.freq.ancestor(-Q.time.scale).child_index();
}

std::vector<std::size_t> Tree::component(int u) const {
    std::vector<std::size_t> out;
    for (auto i : members_) {
        if (in_component(i, u)) out.push_back(i);
    }
    return out;
}

TritileMask Tree::mask() const {
    TritileMask m = plane_.empty_mask();
    for (auto i : members_) m[i] = 1;
    return m;
}

Strip::Strip(const Truncation& plane, const TriadicInterval& top) : plane_(plane), top_(top) {
    if (!plane.time_box().contains(top)) throw std::invalid_argument("Strip: top outside the truncation");
    for (int s = plane.min_scale(); s <= top.scale; ++s) {
        const auto n = ipow(kRadix, top.scale - s);
        const auto F = plane.freq_count(s);
        for (std::int64_t k = 0; k < n; ++k) {
            const auto base = plane.index_unchecked(s, top.offset * n + k, 0);
            for (std::int64_t w = 0; w < F; ++w) members_.push_back(base + static_cast<std::size_t>(w));
        }
    }
}

bool Strip::contains(std::size_t idx) const { return std::binary_search(members_.begin(), members_.end(), idx); }

TritileMask Strip::mask() const {
    TritileMask m = plane_.empty_mask();
    for (auto i : members_) m[i] = 1;
    return m;
}

TritileMask down_closure(const Truncation& plane, const TritileMask& A) {
    TritileMask d = A;
    for (std::size_t i = 0; i < plane.size(); ++i) {
        if (d[i]) continue;
        for (auto p : plane.predecessors(i)) {
            if (d[p]) {
                d[i] = 1;
                break;
            }
        }
    }
    return d;
}

TritileMask up_closure(const Truncation& plane, const TritileMask& A) {
    TritileMask u = A;
    for (std::size_t k = plane.size(); k-- > 0;) {
        if (u[k]) continue;
        for (auto s : plane.successors(k)) {
            if (u[s]) {
                u[k] = 1;
                break;
            }
        }
    }
    return u;
}

bool is_convex(const Truncation& plane, const TritileMask& A) {
    if (A.size() != plane.size()) throw std::invalid_argument("is_convex: mask size mismatch");
    const TritileMask d = down_closure(plane, A), u = up_closure(plane, A);
    for (std::size_t i = 0; i < plane.size(); ++i) {
        if (!A[i] && d[i] && u[i]) return false;
    }
    return true;
}

bool is_convex(const Truncation& plane, std::span<const Tritile> A) { return is_convex(plane, plane.mask_of(A)); }

} // namespace walsh3
