#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace fmdp {

using VarId = int;

/// Strictly ascending set of variable ids. Construction normalizes (sorts and removes
/// duplicates), so every Scope value satisfies the ordering invariant.
class Scope {
public:
    Scope() = default;
    Scope(std::initializer_list<VarId> vars) : vars_(vars) { normalize(); }
    explicit Scope(std::vector<VarId> vars) : vars_(std::move(vars)) { normalize(); }

    std::size_t size() const noexcept { return vars_.size(); }
    bool empty() const noexcept { return vars_.empty(); }
    VarId operator[](std::size_t i) const { return vars_[i]; }
    auto begin() const noexcept { return vars_.begin(); }
    auto end() const noexcept { return vars_.end(); }
    const std::vector<VarId>& vars() const noexcept { return vars_; }

    bool contains(VarId v) const { return std::binary_search(vars_.begin(), vars_.end(), v); }

    /// Position of `v` inside the scope, or -1.
    int position(VarId v) const {
        auto it = std::lower_bound(vars_.begin(), vars_.end(), v);
        return (it != vars_.end() && *it == v) ? static_cast<int>(it - vars_.begin()) : -1;
    }

    bool subset_of(const Scope& other) const {
        return std::includes(other.vars_.begin(), other.vars_.end(), vars_.begin(), vars_.end());
    }

    bool intersects(const Scope& other) const {
        auto a = vars_.begin();
        auto b = other.vars_.begin();
        while (a != vars_.end() && b != other.vars_.end()) {
            if (*a == *b) return true;
            if (*a < *b) ++a; else ++b;
        }
        return false;
    }

    friend Scope operator|(const Scope& a, const Scope& b) {
        Scope out;
        std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out.vars_));
        return out;
    }
    friend Scope operator&(const Scope& a, const Scope& b) {
        Scope out;
        std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                              std::back_inserter(out.vars_));
        return out;
    }
    friend Scope operator-(const Scope& a, const Scope& b) {
        Scope out;
        std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out.vars_));
        return out;
    }
    Scope& operator|=(const Scope& other) { return *this = *this | other; }

    friend bool operator==(const Scope&, const Scope&) = default;
    friend auto operator<=>(const Scope&, const Scope&) = default;

private:
    void normalize() {
        std::sort(vars_.begin(), vars_.end());
        vars_.erase(std::unique(vars_.begin(), vars_.end()), vars_.end());
    }

    std::vector<VarId> vars_;
};

/// Number of joint assignments of variables with the given cardinalities.
inline std::size_t table_size(std::span<const int> cards) {
    std::size_t n = 1;
    for (int c : cards) n *= static_cast<std::size_t>(c);
    return n;
}

/// Walks every assignment of an outer scope in table order (last variable fastest) while
/// tracking the flat offset of the current assignment inside any number of sub-tables whose
/// scopes are subsets of the outer scope.
class JointWalker {
public:
    explicit JointWalker(std::span<const int> cards)
        : cards_(cards.begin(), cards.end()), values_(cards.size(), 0) {}

    /// Registers a sub-table; `positions[d]` is the position in the sub-scope of outer
    /// variable d (or -1), `sub_cards` the sub-table's cardinalities.
    std::size_t track(std::span<const int> positions, std::span<const int> sub_cards) {
        std::vector<std::size_t> sub_strides(sub_cards.size(), 1);
        for (std::size_t i = sub_cards.size(); i-- > 1;)
            sub_strides[i - 1] = sub_strides[i] * static_cast<std::size_t>(sub_cards[i]);
        std::vector<std::size_t> strides(cards_.size(), 0);
        for (std::size_t d = 0; d < cards_.size(); ++d)
            if (positions[d] >= 0) strides[d] = sub_strides[static_cast<std::size_t>(positions[d])];
        strides_.push_back(std::move(strides));
        offsets_.push_back(0);
        return offsets_.size() - 1;
    }

    /// Convenience overload: `sub` must be a subset of `outer`.
    std::size_t track(const Scope& outer, const Scope& sub, std::span<const int> sub_cards) {
        std::vector<int> positions(outer.size());
        for (std::size_t d = 0; d < outer.size(); ++d) positions[d] = sub.position(outer[d]);
        return track(positions, sub_cards);
    }

    /// Advances to the next assignment; returns false after the last one.
    bool next() {
        for (std::size_t d = cards_.size(); d-- > 0;) {
            ++values_[d];
            for (std::size_t h = 0; h < offsets_.size(); ++h) offsets_[h] += strides_[h][d];
            if (values_[d] < cards_[d]) return true;
            for (std::size_t h = 0; h < offsets_.size(); ++h)
                offsets_[h] -= strides_[h][d] * static_cast<std::size_t>(cards_[d]);
            values_[d] = 0;
        }
        return false;
    }

    std::size_t offset(std::size_t handle) const { return offsets_[handle]; }
    const std::vector<int>& values() const noexcept { return values_; }

private:
    std::vector<int> cards_;
    std::vector<int> values_;
    std::vector<std::vector<std::size_t>> strides_;
    std::vector<std::size_t> offsets_;
};

}  // namespace fmdp
