#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fmdp/factor.hpp"
#include "fmdp/factor_ops.hpp"
#include "fmdp/model.hpp"

namespace fmdp {

struct EliminationOrder {
    std::vector<VarId> order;
    /// Largest neighbour count of a variable at the moment it is eliminated.
    int induced_width = 0;
    /// Entries of the largest clique table (variable plus neighbours) the order creates.
    std::size_t max_clique_entries = 1;
};

/// Greedy min-fill order over the interaction graph of `scopes`, eliminating exactly the
/// variables of `eliminate`. Ties go to the smallest variable id.
EliminationOrder min_fill_order(std::span<const Scope> scopes, const Scope& eliminate, const Domain& domain);

struct SumElimination {
    Factor marginal;  ///< over exactly `keep`
    int induced_width = 0;
    std::size_t max_table_entries = 1;
};

/// Sum-product elimination of every variable outside `keep`, in `order`. A variable that no
/// factor mentions is skipped rather than summed (it would only scale the result by its
/// cardinality); callers that want raw counts add unit factors for such variables.
/// Throws WidthExceeded when a clique table would exceed `cap`.
SumElimination sum_eliminate(std::vector<Factor> factors, const Scope& keep, std::span<const VarId> order,
                             const Domain& domain, std::size_t cap = kDefaultTableCap);

struct MaxElimination {
    double value = 0.0;
    std::vector<int> state;  ///< argmax, indexed by variable id; unconstrained variables are 0
    int induced_width = 0;
};

/// Max-sum elimination of every variable in `order` with argmax traceback.
/// `order` must cover every variable that appears in `terms`.
MaxElimination max_eliminate(std::vector<Factor> terms, std::span<const VarId> order, const Domain& domain,
                             std::size_t cap = kDefaultTableCap);

}  // namespace fmdp
