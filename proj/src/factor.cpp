#include "fmdp/factor.hpp"

#include <string>

#include "fmdp/errors.hpp"

namespace fmdp {

Factor::Factor(Scope scope, std::vector<int> cards, std::vector<double> table)
    : scope_(std::move(scope)), cards_(std::move(cards)), table_(std::move(table)) {
    if (cards_.size() != scope_.size())
        throw ModelError("factor: " + std::to_string(cards_.size()) + " cardinalities for a scope of " +
                         std::to_string(scope_.size()) + " variables");
    if (table_.size() != table_size(cards_))
        throw ModelError("factor: table has " + std::to_string(table_.size()) +
                         " entries, expected " + std::to_string(table_size(cards_)));
}

Factor Factor::constant(double value) { return Factor({}, {}, {value}); }

Factor Factor::filled(Scope scope, std::vector<int> cards, double value) {
    const std::size_t n = table_size(cards);
    return Factor(std::move(scope), std::move(cards), std::vector<double>(n, value));
}

Factor Factor::indicator(Scope scope, std::vector<int> cards, std::span<const int> values) {
    Factor f = filled(std::move(scope), std::move(cards), 0.0);
    f.table_[f.index_of(values)] = 1.0;
    return f;
}

std::size_t Factor::index_of(std::span<const int> values) const {
    std::size_t index = 0;
    for (std::size_t i = 0; i < cards_.size(); ++i)
        index = index * static_cast<std::size_t>(cards_[i]) + static_cast<std::size_t>(values[i]);
    return index;
}

std::vector<int> Factor::values_at(std::size_t index) const {
    std::vector<int> values(cards_.size());
    for (std::size_t i = cards_.size(); i-- > 0;) {
        values[i] = static_cast<int>(index % static_cast<std::size_t>(cards_[i]));
        index /= static_cast<std::size_t>(cards_[i]);
    }
    return values;
}

double Factor::at_state(std::span<const int> state) const {
    std::size_t index = 0;
    for (std::size_t i = 0; i < cards_.size(); ++i)
        index = index * static_cast<std::size_t>(cards_[i]) +
                static_cast<std::size_t>(state[static_cast<std::size_t>(scope_[i])]);
    return table_[index];
}

Factor& Factor::operator*=(double s) {
    for (double& v : table_) v *= s;
    return *this;
}

}  // namespace fmdp
