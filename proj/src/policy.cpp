#include "fmdp/policy.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "fmdp/errors.hpp"

namespace fmdp {

bool same_structure(const DecisionListPolicy& a, const DecisionListPolicy& b) {
    if (a.fallback != b.fallback || a.conditionals.size() != b.conditionals.size()) return false;
    for (std::size_t i = 0; i < a.conditionals.size(); ++i)
        if (a.conditionals[i].action != b.conditionals[i].action || !(a.conditionals[i].t == b.conditionals[i].t))
            return false;
    return true;
}

const std::vector<double>& coefficients_of(const Basis& basis) {
    if (!basis.coefficients) throw ModelError("basis has no coefficients");
    if (basis.coefficients->size() != basis.size()) throw ModelError("coefficient count does not match basis size");
    return *basis.coefficients;
}

QFunction q_function(const FactoredMDP& model, const Basis& basis, ActionIndex action, std::size_t cap) {
    const auto& w = coefficients_of(basis);
    QFunction q;
    q.action = action;
    q.terms = model.reward.terms;
    for (std::size_t j = 0; j < basis.size(); ++j) {
        if (w[j] == 0.0) continue;
        Factor term = back_project(basis.functions[j], model, action, cap);
        term *= model.gamma * w[j];
        q.terms.push_back(std::move(term));
    }
    return q;
}

std::vector<std::size_t> affected_basis(const FactoredMDP& model, const Basis& basis, ActionIndex action) {
    const Scope eff = effects(model, action);
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < basis.size(); ++i)
        if (basis.functions[i].scope().intersects(eff)) out.push_back(i);
    return out;
}

DeltaFunction delta_function(const FactoredMDP& model, const Basis& basis, ActionIndex action, std::size_t cap) {
    const auto& w = coefficients_of(basis);
    DeltaFunction d;
    d.action = action;
    d.affected = affected_basis(model, basis, action);

    // T_a covers both back-projections so the difference is exact even when an override
    // drops a default parent.
    Scope t_scope;
    for (std::size_t i : d.affected) {
        t_scope |= back_projected_scope(basis.functions[i].scope(), model, action);
        t_scope |= back_projected_scope(basis.functions[i].scope(), model, kDefaultAction);
    }
    Factor delta = Factor::filled(t_scope, model.variables.cards(t_scope), 0.0);
    for (std::size_t i : d.affected) {
        Factor pa = back_project(basis.functions[i], model, action, cap);
        Factor pd = back_project(basis.functions[i], model, kDefaultAction, cap);
        pa *= model.gamma * w[i];
        pd *= -model.gamma * w[i];
        delta = add(add(delta, pa, cap), pd, cap);
    }
    d.factor = std::move(delta);
    return d;
}

DecisionListPolicy extract_decision_list(const FactoredMDP& model, const Basis& basis, ExtractOptions options,
                                         std::size_t cap) {
    struct Entry {
        Conditional c;
        std::size_t t_index;
    };
    std::vector<Entry> entries;
    for (std::size_t a = 0; a < model.actions.size(); ++a) {
        const DeltaFunction d = delta_function(model, basis, static_cast<ActionIndex>(a), cap);
        for (std::size_t t = 0; t < d.factor.size(); ++t)
            entries.push_back({{{d.factor.scope(), d.factor.values_at(t)}, static_cast<ActionIndex>(a), d.factor[t]}, t});
    }
    std::stable_sort(entries.begin(), entries.end(), [](const Entry& x, const Entry& y) {
        if (x.c.delta != y.c.delta) return x.c.delta > y.c.delta;
        if (x.c.action != y.c.action) return x.c.action < y.c.action;
        return x.t_index < y.t_index;
    });

    DecisionListPolicy policy;
    policy.unpruned_size = entries.size();
    const bool prune = options.prune && model.default_is_action;
    bool default_placed = !model.default_is_action;
    for (auto& e : entries) {
        if (e.c.delta < 0.0 && !default_placed) {
            if (prune) break;
            // The executable default has delta 0 everywhere, so it precedes every negative
            // conditional; those stay in the list but are never reached.
            policy.conditionals.push_back({Assignment{}, kDefaultAction, 0.0});
            default_placed = true;
        }
        policy.conditionals.push_back(std::move(e.c));
    }
    if (model.default_is_action) policy.fallback = kDefaultAction;
    return policy;
}

std::size_t matching_branch(const DecisionListPolicy& policy, std::span<const int> state) {
    for (std::size_t l = 0; l < policy.conditionals.size(); ++l)
        if (policy.conditionals[l].t.consistent_with(state)) return l;
    return policy.conditionals.size();
}

ActionIndex apply_policy(const DecisionListPolicy& policy, std::span<const int> state) {
    const std::size_t l = matching_branch(policy, state);
    if (l < policy.conditionals.size()) return policy.conditionals[l].action;
    if (!policy.fallback) throw ModelError("decision list covers no conditional for the state and has no fallback");
    return *policy.fallback;
}

DecisionListPolicy catch_all(ActionIndex action) {
    DecisionListPolicy p;
    p.conditionals.push_back({Assignment{}, action, 0.0});
    p.unpruned_size = 1;
    return p;
}

std::string render(const DecisionListPolicy& policy, const FactoredMDP& model) {
    std::ostringstream out;
    char delta[64];
    for (const Conditional& c : policy.conditionals) {
        out << "if ";
        if (c.t.scope.empty()) out << "true";
        for (std::size_t i = 0; i < c.t.scope.size(); ++i) {
            if (i) out << " ∧ ";
            out << model.variables[c.t.scope[i]].name << '=' << c.t.values[i];
        }
        std::snprintf(delta, sizeof delta, "%.4g", c.delta);
        out << " → " << model.action_name(c.action) << " (δ=" << delta << ")\n";
    }
    if (policy.fallback) out << "else → " << model.action_name(*policy.fallback) << '\n';
    return out.str();
}

}  // namespace fmdp
