#pragma once

#include <span>

#include <Eigen/Dense>

#include "fmdp/factor_ops.hpp"
#include "fmdp/model.hpp"

namespace fmdp {

/// The k x k least-squares fixed-point system (M - gamma C) w = r with
/// M[i][j] = (h_i . h_j)_rho, C[i][j] = (h_i . P h_j)_rho and r[i] = (h_i . R)_rho.
struct GramSystem {
    Eigen::MatrixXd M;
    Eigen::MatrixXd C;
    Eigen::VectorXd r;
    double gamma = 0.0;
};

struct Solution {
    Eigen::VectorXd w;
    double gamma_used = 0.0;
    bool perturbed = false;
    /// Max-norm of (M - gamma_used C) w - r.
    double residual = 0.0;
    /// 1-norm condition estimate of M - gamma_used C.
    double condition = 0.0;
    bool ill_conditioned = false;
};

inline constexpr double kSingularPivotRatio = 1e-12;
inline constexpr double kIllConditioned = 1e12;
inline constexpr int kPerturbationAttempts = 8;

/// Policy-independent parts of the system: M and r.
Eigen::MatrixXd gram_matrix(const Basis& basis, const FactoredWeights& rho, std::size_t cap = kDefaultTableCap);
Eigen::VectorXd reward_vector(const FactoredMDP& model, const Basis& basis, const FactoredWeights& rho,
                              std::size_t cap = kDefaultTableCap);

/// The full system for the policy that always takes `action`.
GramSystem build_gram_fixed_action(const FactoredMDP& model, const Basis& basis, const FactoredWeights& rho,
                                   ActionIndex action, std::size_t cap = kDefaultTableCap);

/// Solves (M - gamma C) w = r by partial-pivot elimination. A numerically singular matrix
/// (relative pivot below kSingularPivotRatio) is retried with gamma * (1 +/- 1e-6 * 2^t).
/// Throws SingularSystem when M itself is singular or every perturbation fails.
Solution solve_fixed_point(const GramSystem& system);

/// rho-weighted least-squares coefficients of the function sum(v_terms) on the basis.
Eigen::VectorXd project(const Basis& basis, const FactoredWeights& rho, std::span<const Factor> v_terms,
                        std::size_t cap = kDefaultTableCap);

/// Dense solve with the same pivot rule; returns false when singular.
bool solve_dense(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, Eigen::VectorXd& x,
                 double* condition = nullptr);

}  // namespace fmdp
