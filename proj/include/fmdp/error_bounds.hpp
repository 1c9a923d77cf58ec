#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "fmdp/elimination.hpp"
#include "fmdp/policy.hpp"

namespace fmdp {

/// Additive penalty that encodes a violated hard constraint.
inline constexpr double kConstraintPenalty = -1e18;

struct HardConstraint {
    Assignment assignment;
    /// true: the state must agree with `assignment`; false: it must disagree somewhere.
    bool consistent = true;
};

/// max_x sum(terms)(x) subject to hard constraints.
struct CostNetwork {
    std::vector<Factor> terms;
    std::vector<HardConstraint> constraints;
};

struct MaxResult {
    double value = 0.0;
    std::vector<int> witness;  ///< full state, indexed by variable id
    /// False when no state satisfies the hard constraints; value is then -infinity.
    bool feasible = true;
};

/// Max-sum variable elimination with a min-fill order (when `order` is empty) and traceback.
MaxResult maximize(const CostNetwork& network, const Domain& domain, std::span<const VarId> order = {},
                   std::size_t cap = kDefaultTableCap);

enum class ErrorDirection { OneSided, Symmetric };

struct ErrorReport {
    double epsilon = 0.0;
    std::vector<int> witness;
    double loss_bound = 0.0;  ///< 2 epsilon / (1 - gamma)
    ErrorDirection direction = ErrorDirection::Symmetric;
    /// Action (greedy error) or list branch (policy error) whose network attains epsilon.
    ActionIndex action = kDefaultAction;
    std::size_t branch = 0;
    /// +1 when epsilon maximizes backup minus value (Q_a - V), -1 when it maximizes V - Q_a.
    int sign = 1;
};

/// max_a max_x [Q_a(x) - V(x)]. In symmetric mode the other side, max_x [V(x) - max_a Q_a(x)],
/// is evaluated exactly through the greedy decision list and the larger magnitude reported.
ErrorReport bellman_error_greedy(const FactoredMDP& model, const Basis& basis,
                                 ErrorDirection direction = ErrorDirection::Symmetric,
                                 std::size_t cap = kDefaultTableCap);

/// max_x [V(x) - (gamma P_pi V + R)(x)] for a decision-list policy, one network per branch.
ErrorReport bellman_error_policy(const FactoredMDP& model, const Basis& basis, const DecisionListPolicy& policy,
                                 ErrorDirection direction = ErrorDirection::Symmetric,
                                 std::size_t cap = kDefaultTableCap);

/// Terms of Q_a - V (sign +1) or V - Q_a (sign -1).
std::vector<Factor> residual_terms(const FactoredMDP& model, const Basis& basis, ActionIndex action, int sign,
                                   std::size_t cap = kDefaultTableCap);

}  // namespace fmdp
