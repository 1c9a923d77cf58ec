#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fmdp/scope.hpp"

namespace fmdp {

/// A partial assignment: one value per variable of `scope`, in scope order.
struct Assignment {
    Scope scope;
    std::vector<int> values;

    /// True when `state` (a full assignment indexed by variable id) agrees with every value.
    bool consistent_with(std::span<const int> state) const {
        for (std::size_t i = 0; i < scope.size(); ++i)
            if (state[static_cast<std::size_t>(scope[i])] != values[i]) return false;
        return true;
    }

    friend bool operator==(const Assignment&, const Assignment&) = default;
};

/// A real-valued function restricted to a small scope, stored as a dense table in
/// mixed-radix order with the last scope variable varying fastest.
class Factor {
public:
    /// The constant 0 over the empty scope.
    Factor() : table_(1, 0.0) {}
    Factor(Scope scope, std::vector<int> cards, std::vector<double> table);

    static Factor constant(double value);
    static Factor filled(Scope scope, std::vector<int> cards, double value);
    /// 1 at `values`, 0 elsewhere.
    static Factor indicator(Scope scope, std::vector<int> cards, std::span<const int> values);

    const Scope& scope() const noexcept { return scope_; }
    const std::vector<int>& cards() const noexcept { return cards_; }
    std::size_t size() const noexcept { return table_.size(); }
    std::span<const double> table() const noexcept { return table_; }
    std::span<double> table() noexcept { return table_; }

    double operator[](std::size_t i) const { return table_[i]; }
    double& operator[](std::size_t i) { return table_[i]; }

    /// Flat index of an assignment to this factor's scope (values in scope order).
    std::size_t index_of(std::span<const int> values) const;
    /// Inverse of index_of.
    std::vector<int> values_at(std::size_t index) const;
    /// Value at a full state indexed by variable id.
    double at_state(std::span<const int> state) const;

    Factor& operator*=(double s);

    friend bool operator==(const Factor&, const Factor&) = default;

private:
    Scope scope_;
    std::vector<int> cards_;
    std::vector<double> table_;
};

}  // namespace fmdp
