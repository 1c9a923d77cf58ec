#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fmdp/model.hpp"
#include "fmdp/policy.hpp"
#include "fmdp/value_determination.hpp"

namespace fmdp::oracle {

/// Dense N x N matrices make anything past a few thousand states impractical.
inline constexpr std::size_t kDefaultStateCap = std::size_t{1} << 12;

/// Explicit-state view of a factored model. State index is the mixed-radix index of the full
/// assignment, last variable fastest.
struct FlatMDP {
    Domain domain;
    std::size_t N = 0;
    Eigen::MatrixXd default_P;
    std::vector<Eigen::MatrixXd> P;  ///< per listed action
    Eigen::VectorXd R;
    double gamma = 0.9;
    std::vector<ActionIndex> executable;

    const Eigen::MatrixXd& transition(ActionIndex a) const {
        return a == kDefaultAction ? default_P : P[static_cast<std::size_t>(a)];
    }
    std::vector<int> state(std::size_t index) const;
    std::size_t index(std::span<const int> state) const;
};

/// One action per state.
using FlatPolicy = std::vector<ActionIndex>;

/// Throws StateSpaceTooLarge above `cap` states.
FlatMDP flatten(const FactoredMDP& model, std::size_t cap = kDefaultStateCap);

Eigen::MatrixXd policy_matrix(const FlatMDP& flat, const FlatPolicy& policy);
FlatPolicy constant_policy(const FlatMDP& flat, ActionIndex action);
FlatPolicy flat_policy(const FlatMDP& flat, const DecisionListPolicy& policy);

/// Solves (I - gamma P_pi) V = R.
Eigen::VectorXd exact_policy_value(const FlatMDP& flat, const FlatPolicy& policy);

/// Iterates V <- R + gamma P_pi V until the max-norm step is below `tolerance`.
Eigen::VectorXd iterate_policy_value(const FlatMDP& flat, const FlatPolicy& policy, double tolerance = 1e-12);

/// Optimal values by value iteration.
Eigen::VectorXd value_iteration(const FlatMDP& flat, double tolerance = 1e-12);

Eigen::VectorXd q_values(const FlatMDP& flat, const Eigen::VectorXd& V, ActionIndex action);

/// argmax_a Q_a per state. Ties within `tolerance` go to the lowest listed action index, and
/// to the default action only when it is strictly better.
FlatPolicy greedy_policy(const FlatMDP& flat, const Eigen::VectorXd& V, double tolerance = 1e-12);

struct ExactSolution {
    FlatPolicy policy;
    Eigen::VectorXd V;
    int iterations = 0;
};

ExactSolution exact_policy_iteration(const FlatMDP& flat, int max_iterations = 1000);

/// Unique stationary distribution of P_pi. Throws NonUniqueStationary when the chain has more
/// than one closed communicating class.
Eigen::VectorXd stationary_distribution(const FlatMDP& flat, const FlatPolicy& policy);

/// N x k matrix whose columns are the basis functions.
Eigen::MatrixXd basis_matrix(const FlatMDP& flat, const Basis& basis);

/// Values of sum(terms) at every state.
Eigen::VectorXd values_of(const FlatMDP& flat, std::span<const Factor> terms);

/// The joint distribution of cluster-factored weights.
Eigen::VectorXd joint_weights(const FlatMDP& flat, const FactoredWeights& rho);

/// A^T L A, A^T L P_pi A and A^T L R with L = diag(weights).
GramSystem exact_gram(const FlatMDP& flat, const Basis& basis, const Eigen::VectorXd& weights,
                      const FlatPolicy& policy);

/// (A^T L A)^-1 A^T L v.
Eigen::VectorXd exact_projection(const FlatMDP& flat, const Basis& basis, const Eigen::VectorXd& weights,
                                 const Eigen::VectorXd& v);

/// w solving the explicit projected fixed point A w = Proj(gamma P_pi A w + R).
Eigen::VectorXd exact_fixed_point(const FlatMDP& flat, const Basis& basis, const Eigen::VectorXd& weights,
                                  const FlatPolicy& policy);

struct ExactError {
    double one_sided = 0.0;   ///< max_a max_x [Q_a - V] (greedy) or max_x [V - backup] (policy)
    double other_side = 0.0;  ///< max_x [V - max_a Q_a] (greedy) or max_x [backup - V] (policy)
    std::size_t argmax = 0;
    double symmetric() const { return std::max(one_sided, other_side); }
};

ExactError bellman_error_greedy(const FlatMDP& flat, const Eigen::VectorXd& V);
ExactError bellman_error_policy(const FlatMDP& flat, const Eigen::VectorXd& V, const FlatPolicy& policy);

}  // namespace fmdp::oracle
