#pragma once

#include <cstddef>
#include <span>

#include "fmdp/factor.hpp"
#include "fmdp/model.hpp"

namespace fmdp {

/// Default cap on the number of entries any materialized table may have.
inline constexpr std::size_t kDefaultTableCap = std::size_t{1} << 22;

/// Pointwise product over the union of the two scopes.
Factor multiply(const Factor& f, const Factor& g, std::size_t cap = kDefaultTableCap);

/// Pointwise sum over the union of the two scopes.
Factor add(const Factor& f, const Factor& g, std::size_t cap = kDefaultTableCap);

/// Sums out every variable of `f` not in `keep`.
Factor marginalize(const Factor& f, const Scope& keep);

/// Maximizes out every variable of `f` not in `keep`.
Factor max_marginalize(const Factor& f, const Scope& keep);

/// Sum over all states of f(x) g(x), computed as |Dom(X)|/|Dom(W)| times the sum over the
/// union scope W. `inner_terms`, when given, receives |Dom(W)|.
double dot_product(const Factor& f, const Factor& g, const Domain& domain,
                   std::size_t* inner_terms = nullptr, std::size_t cap = kDefaultTableCap);

/// rho summed onto `scope`: the product of each cluster marginal summed onto its overlap with
/// the scope. Variables in no cluster contribute a factor of 1.
Factor weight_marginal(const FactoredWeights& rho, const Scope& scope, std::span<const int> cards,
                       std::size_t cap = kDefaultTableCap);

/// Sum over all states of rho(x) f(x) g(x) for a cluster-factored rho.
double weighted_dot_product(const Factor& f, const Factor& g, const FactoredWeights& rho,
                            std::size_t cap = kDefaultTableCap);

/// Expectation of f (read over next-state copies) under `action`'s dynamics, as a factor over
/// the union of the parents of scope(f).
Factor back_project(const Factor& f, const FactoredMDP& model, ActionIndex action,
                    std::size_t cap = kDefaultTableCap);

/// Gamma_a(Y): union of the parents of the next-state copies of Y under `action`.
Scope back_projected_scope(const Scope& scope, const FactoredMDP& model, ActionIndex action);

/// Sum_j weights[j] * functions[j](state).
double evaluate(std::span<const Factor> functions, std::span<const double> weights,
                std::span<const int> state);

/// Sum_j terms[j](state).
double evaluate(std::span<const Factor> terms, std::span<const int> state);

}  // namespace fmdp
