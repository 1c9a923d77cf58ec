#pragma once

#include <cstddef>
#include <map>
#include <utility>
#include <vector>

#include "fmdp/elimination.hpp"
#include "fmdp/policy.hpp"
#include "fmdp/value_determination.hpp"

namespace fmdp {

/// Membership in S_l (consistent with t_l, inconsistent with every earlier t_m), probed
/// over the scope Z.
struct BranchConstraintSystem {
    Assignment positive;
    std::vector<Assignment> negatives;
    Scope probe;
};

/// Builds the system for list position l; l == conditionals.size() denotes the fallback.
BranchConstraintSystem branch_system(const DecisionListPolicy& policy, std::size_t l, Scope probe);

/// Per z over `scope`: the rho-mass (weighted) or state count (counting) of S_l consistent with z.
struct CountTable {
    Factor table;
    int induced_width = 0;
    std::size_t max_table_entries = 1;
};

/// A null `rho` selects counting mode.
CountTable branch_mass(const BranchConstraintSystem& system, const FactoredWeights* rho, const Domain& domain,
                       std::size_t cap = kDefaultTableCap);

/// Entries (h_i . P_pi h_j)_rho for a decision-list policy, with branch masses memoized per
/// (list position, probe scope).
class ListGram {
public:
    /// A null `rho` computes unweighted sums over all states instead.
    ListGram(const FactoredMDP& model, const Basis& basis, const DecisionListPolicy& policy,
             const FactoredWeights* rho, std::size_t cap = kDefaultTableCap);

    double entry(std::size_t i, std::size_t j);
    Eigen::MatrixXd matrix();

    /// Number of branches: list positions plus the fallback, if any.
    std::size_t branches() const { return branch_actions_.size(); }
    const CountTable& mass(std::size_t l, const Scope& probe);

    int max_induced_width() const { return max_width_; }
    /// Largest table touched: branch masses, elimination cliques and the h_i * P h_j products.
    std::size_t max_table_entries() const { return max_entries_; }

private:
    const Factor& projected(std::size_t l, std::size_t j);

    const FactoredMDP& model_;
    const Basis& basis_;
    const DecisionListPolicy& policy_;
    const FactoredWeights* rho_;
    std::size_t cap_;
    std::vector<ActionIndex> branch_actions_;
    std::map<std::pair<std::size_t, Scope>, CountTable> masses_;
    std::map<std::pair<ActionIndex, std::size_t>, Factor> projections_;
    int max_width_ = 0;
    std::size_t max_entries_ = 1;
};

/// One entry of the decision-list Gram matrix, computed without a shared cache.
double list_gram_entry(std::size_t i, std::size_t j, const DecisionListPolicy& policy, const FactoredMDP& model,
                       const Basis& basis, const FactoredWeights& rho, std::size_t cap = kDefaultTableCap);

/// The full system for a decision-list policy (M and r do not depend on the policy).
GramSystem build_gram_decision_list(const FactoredMDP& model, const Basis& basis, const FactoredWeights& rho,
                                    const DecisionListPolicy& policy, std::size_t cap = kDefaultTableCap);

Solution solve_decision_list_policy(const FactoredMDP& model, const Basis& basis, const FactoredWeights& rho,
                                    const DecisionListPolicy& policy, std::size_t cap = kDefaultTableCap);

}  // namespace fmdp
