#include "fmdp/error_bounds.hpp"

#include <cmath>
#include <limits>

#include "fmdp/errors.hpp"

namespace fmdp {

namespace {

Factor penalty_factor(const HardConstraint& c, const Domain& domain) {
    const auto& a = c.assignment;
    Factor f = Factor::filled(a.scope, domain.cards(a.scope), c.consistent ? kConstraintPenalty : 0.0);
    f[f.index_of(a.values)] = c.consistent ? 0.0 : kConstraintPenalty;
    return f;
}

bool satisfies(const HardConstraint& c, std::span<const int> state) {
    return c.assignment.consistent_with(state) == c.consistent;
}

}  // namespace

MaxResult maximize(const CostNetwork& network, const Domain& domain, std::span<const VarId> order, std::size_t cap) {
    std::vector<Factor> terms = network.terms;
    for (const HardConstraint& c : network.constraints) terms.push_back(penalty_factor(c, domain));

    Scope involved;
    std::vector<Scope> scopes;
    for (const Factor& f : terms) {
        involved |= f.scope();
        scopes.push_back(f.scope());
    }
    std::vector<VarId> chosen(order.begin(), order.end());
    if (chosen.empty()) chosen = min_fill_order(scopes, involved, domain).order;

    const MaxElimination r = max_eliminate(std::move(terms), chosen, domain, cap);
    MaxResult out;
    out.witness = r.state;
    for (const HardConstraint& c : network.constraints)
        if (!satisfies(c, out.witness)) {
            out.feasible = false;
            out.value = -std::numeric_limits<double>::infinity();
            return out;
        }
    // Re-evaluate the unpenalized objective at the witness.
    out.value = evaluate(network.terms, out.witness);
    return out;
}

std::vector<Factor> residual_terms(const FactoredMDP& model, const Basis& basis, ActionIndex action, int sign,
                                   std::size_t cap) {
    const auto& w = coefficients_of(basis);
    std::vector<Factor> terms;
    for (const Factor& r : model.reward.terms) {
        terms.push_back(r);
        terms.back() *= sign;
    }
    for (std::size_t j = 0; j < basis.size(); ++j) {
        if (w[j] == 0.0) continue;
        Factor next = back_project(basis.functions[j], model, action, cap);
        next *= sign * model.gamma * w[j];
        terms.push_back(std::move(next));
        Factor now = basis.functions[j];
        now *= -sign * w[j];
        terms.push_back(std::move(now));
    }
    if (terms.empty()) terms.push_back(Factor::constant(0.0));
    return terms;
}

namespace {

// Maximum over list branches of sign * (Q_{a_l} - V) restricted to S_l.
ErrorReport branch_maximum(const FactoredMDP& model, const Basis& basis, const DecisionListPolicy& policy, int sign,
                           std::size_t cap) {
    ErrorReport best;
    best.epsilon = -std::numeric_limits<double>::infinity();
    const std::size_t branches = policy.conditionals.size() + (policy.fallback ? 1 : 0);
    for (std::size_t l = 0; l < branches; ++l) {
        const ActionIndex a = l < policy.conditionals.size() ? policy.conditionals[l].action : *policy.fallback;
        CostNetwork net;
        net.terms = residual_terms(model, basis, a, sign, cap);
        if (l < policy.conditionals.size()) net.constraints.push_back({policy.conditionals[l].t, true});
        for (std::size_t m = 0; m < l && m < policy.conditionals.size(); ++m)
            net.constraints.push_back({policy.conditionals[m].t, false});
        const MaxResult r = maximize(net, model.variables, {}, cap);
        if (r.feasible && r.value > best.epsilon) {
            best.epsilon = r.value;
            best.witness = r.witness;
            best.action = a;
            best.branch = l;
            best.sign = sign;
        }
    }
    return best;
}

void finish(ErrorReport& report, const FactoredMDP& model, ErrorDirection direction) {
    report.direction = direction;
    report.loss_bound = 2.0 * report.epsilon / (1.0 - model.gamma);
}

}  // namespace

ErrorReport bellman_error_greedy(const FactoredMDP& model, const Basis& basis, ErrorDirection direction,
                                 std::size_t cap) {
    ErrorReport report;
    report.epsilon = -std::numeric_limits<double>::infinity();
    for (ActionIndex a : model.executable_actions()) {
        CostNetwork net{residual_terms(model, basis, a, +1, cap), {}};
        const MaxResult r = maximize(net, model.variables, {}, cap);
        if (r.value > report.epsilon) {
            report.epsilon = r.value;
            report.witness = r.witness;
            report.action = a;
            report.sign = +1;
        }
    }
    if (direction == ErrorDirection::Symmetric) {
        // On S_l the greedy policy takes a_l, so V - max_a Q_a equals V - Q_{a_l} there.
        const DecisionListPolicy greedy = extract_decision_list(model, basis, {.prune = false}, cap);
        ErrorReport other = branch_maximum(model, basis, greedy, -1, cap);
        if (other.epsilon > report.epsilon) report = other;
    }
    finish(report, model, direction);
    return report;
}

ErrorReport bellman_error_policy(const FactoredMDP& model, const Basis& basis, const DecisionListPolicy& policy,
                                 ErrorDirection direction, std::size_t cap) {
    // Displayed expression: V - (gamma P_pi V + R) = -(Q_{a_l} - V) on S_l.
    ErrorReport report = branch_maximum(model, basis, policy, -1, cap);
    if (direction == ErrorDirection::Symmetric) {
        ErrorReport other = branch_maximum(model, basis, policy, +1, cap);
        if (other.epsilon > report.epsilon) report = other;
    }
    finish(report, model, direction);
    return report;
}

}  // namespace fmdp
