#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fmdp/factor_ops.hpp"
#include "fmdp/model.hpp"

namespace fmdp {

/// Q_a = R + gamma * sum_j w_j [P_a h_j], kept as a list of restricted-scope terms.
struct QFunction {
    ActionIndex action = kDefaultAction;
    std::vector<Factor> terms;

    double operator()(std::span<const int> state) const { return evaluate(terms, state); }
};

/// delta_a = Q_a - Q_d, a factor over T_a.
struct DeltaFunction {
    ActionIndex action = kDefaultAction;
    Factor factor;
    /// Basis indices i with Effects[a] n C_i non-empty.
    std::vector<std::size_t> affected;
};

struct Conditional {
    Assignment t;
    ActionIndex action = kDefaultAction;
    double delta = 0.0;
};

/// Ordered conditionals; a state takes the first one it is consistent with, else `fallback`.
struct DecisionListPolicy {
    std::vector<Conditional> conditionals;
    std::optional<ActionIndex> fallback;
    /// Length before pruning negative-delta conditionals.
    std::size_t unpruned_size = 0;
};

/// Structural equality: same conditionals (assignment and action) in the same order, same
/// fallback. Deltas are ignored.
bool same_structure(const DecisionListPolicy& a, const DecisionListPolicy& b);

/// Coefficients of `basis`, or ModelError when absent.
const std::vector<double>& coefficients_of(const Basis& basis);

QFunction q_function(const FactoredMDP& model, const Basis& basis, ActionIndex action,
                     std::size_t cap = kDefaultTableCap);

/// I_a: indices of basis functions whose scope meets Effects[a].
std::vector<std::size_t> affected_basis(const FactoredMDP& model, const Basis& basis, ActionIndex action);

DeltaFunction delta_function(const FactoredMDP& model, const Basis& basis, ActionIndex action,
                             std::size_t cap = kDefaultTableCap);

struct ExtractOptions {
    /// Drop conditionals with delta < 0. Only honoured when the default action is executable.
    bool prune = true;
};

/// The greedy policy of the basis coefficients as a decision list: every <t, a, delta_a(t)>,
/// sorted by delta descending, then action index, then t in table order. With an executable
/// default, pruning drops the negative conditionals; without pruning they are kept behind an
/// explicit <empty, d, 0> that realizes the default's zero advantage. unpruned_size counts
/// the <t, a, delta> entries only.
DecisionListPolicy extract_decision_list(const FactoredMDP& model, const Basis& basis, ExtractOptions options = {},
                                         std::size_t cap = kDefaultTableCap);

/// First consistent conditional's action, else the fallback.
ActionIndex apply_policy(const DecisionListPolicy& policy, std::span<const int> state);

/// Index of the first consistent conditional, or conditionals.size() for the fallback.
std::size_t matching_branch(const DecisionListPolicy& policy, std::span<const int> state);

/// The list <empty, action, 0>: take `action` everywhere.
DecisionListPolicy catch_all(ActionIndex action);

/// One line per conditional: "if X_1=1 ∧ X_2=0 → a_2 (δ=0.1371)".
std::string render(const DecisionListPolicy& policy, const FactoredMDP& model);

}  // namespace fmdp
