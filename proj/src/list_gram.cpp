#include "fmdp/list_gram.hpp"

#include <algorithm>

#include "fmdp/errors.hpp"
#include "fmdp/factor_ops.hpp"

namespace fmdp {

BranchConstraintSystem branch_system(const DecisionListPolicy& policy, std::size_t l, Scope probe) {
    if (l > policy.conditionals.size() || (l == policy.conditionals.size() && !policy.fallback))
        throw ModelError("branch index " + std::to_string(l) + " out of range");
    BranchConstraintSystem sys;
    if (l < policy.conditionals.size()) sys.positive = policy.conditionals[l].t;
    for (std::size_t m = 0; m < l; ++m) sys.negatives.push_back(policy.conditionals[m].t);
    sys.probe = std::move(probe);
    return sys;
}

CountTable branch_mass(const BranchConstraintSystem& system, const FactoredWeights* rho, const Domain& domain,
                       std::size_t cap) {
    const auto& pos = system.positive;
    if (pos.scope.empty() && system.negatives.empty()) {
        // An unconstrained branch: the mass is the weight marginal, or a constant count.
        const std::vector<int> cards = domain.cards(system.probe);
        if (rho) {
            Factor m = weight_marginal(*rho, system.probe, cards, cap);
            std::size_t largest = m.size();
            for (const Factor& c : rho->marginals) largest = std::max(largest, c.size());
            return {std::move(m), 0, largest};
        }
        double outside = 1.0;
        for (VarId v : domain.all() - system.probe) outside *= domain.cardinality(v);
        Factor m = Factor::filled(system.probe, cards, outside);
        const std::size_t size = m.size();
        return {std::move(m), 0, size};
    }

    std::vector<Factor> factors;
    if (!pos.scope.empty()) factors.push_back(Factor::indicator(pos.scope, domain.cards(pos.scope), pos.values));
    for (const Assignment& neg : system.negatives) {
        Factor f = Factor::filled(neg.scope, domain.cards(neg.scope), 1.0);
        f[f.index_of(neg.values)] = 0.0;
        factors.push_back(std::move(f));
    }
    if (rho) {
        factors.insert(factors.end(), rho->marginals.begin(), rho->marginals.end());
    } else {
        // Counting: every variable outside Z contributes a factor of 1 per value.
        for (VarId v : domain.all() - system.probe)
            factors.push_back(Factor::filled(Scope{v}, {domain.cardinality(v)}, 1.0));
    }

    std::vector<Scope> scopes;
    for (const Factor& f : factors) scopes.push_back(f.scope());
    scopes.push_back(system.probe);
    const EliminationOrder order = min_fill_order(scopes, domain.all() - system.probe, domain);
    SumElimination r = sum_eliminate(std::move(factors), system.probe, order.order, domain, cap);
    return {std::move(r.marginal), r.induced_width, r.max_table_entries};
}

ListGram::ListGram(const FactoredMDP& model, const Basis& basis, const DecisionListPolicy& policy,
                   const FactoredWeights* rho, std::size_t cap)
    : model_(model), basis_(basis), policy_(policy), rho_(rho), cap_(cap) {
    for (const auto& c : policy.conditionals) branch_actions_.push_back(c.action);
    if (policy.fallback) branch_actions_.push_back(*policy.fallback);
}

const CountTable& ListGram::mass(std::size_t l, const Scope& probe) {
    auto key = std::make_pair(l, probe);
    auto it = masses_.find(key);
    if (it == masses_.end()) {
        CountTable t = branch_mass(branch_system(policy_, l, probe), rho_, model_.variables, cap_);
        max_width_ = std::max(max_width_, t.induced_width);
        max_entries_ = std::max(max_entries_, t.max_table_entries);
        it = masses_.emplace(std::move(key), std::move(t)).first;
    }
    return it->second;
}

const Factor& ListGram::projected(std::size_t l, std::size_t j) {
    auto key = std::make_pair(branch_actions_[l], j);
    auto it = projections_.find(key);
    if (it == projections_.end())
        it = projections_.emplace(key, back_project(basis_.functions[j], model_, branch_actions_[l], cap_)).first;
    return it->second;
}

double ListGram::entry(std::size_t i, std::size_t j) {
    double total = 0.0;
    for (std::size_t l = 0; l < branches(); ++l) {
        const Factor f = multiply(basis_.functions[i], projected(l, j), cap_);
        max_entries_ = std::max(max_entries_, f.size());
        const Factor& n = mass(l, f.scope()).table;
        // n and f share the scope Z and the table layout.
        for (std::size_t z = 0; z < f.size(); ++z) total += n[z] * f[z];
    }
    return total;
}

Eigen::MatrixXd ListGram::matrix() {
    const auto k = static_cast<Eigen::Index>(basis_.size());
    Eigen::MatrixXd c(k, k);
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = 0; j < k; ++j) c(i, j) = entry(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    return c;
}

double list_gram_entry(std::size_t i, std::size_t j, const DecisionListPolicy& policy, const FactoredMDP& model,
                       const Basis& basis, const FactoredWeights& rho, std::size_t cap) {
    ListGram gram(model, basis, policy, &rho, cap);
    return gram.entry(i, j);
}

GramSystem build_gram_decision_list(const FactoredMDP& model, const Basis& basis, const FactoredWeights& rho,
                                    const DecisionListPolicy& policy, std::size_t cap) {
    GramSystem sys;
    sys.gamma = model.gamma;
    sys.M = gram_matrix(basis, rho, cap);
    sys.r = reward_vector(model, basis, rho, cap);
    sys.C = ListGram(model, basis, policy, &rho, cap).matrix();
    return sys;
}

Solution solve_decision_list_policy(const FactoredMDP& model, const Basis& basis, const FactoredWeights& rho,
                                    const DecisionListPolicy& policy, std::size_t cap) {
    return solve_fixed_point(build_gram_decision_list(model, basis, rho, policy, cap));
}

}  // namespace fmdp
