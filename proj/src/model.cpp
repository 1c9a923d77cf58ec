#include "fmdp/model.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "fmdp/errors.hpp"

namespace fmdp {

namespace {

constexpr double kNormTolerance = 1e-9;

bool valid_var(const Domain& domain, VarId v) {
    return v >= 0 && static_cast<std::size_t>(v) < domain.size();
}

void check_scope(const Domain& domain, const Scope& scope, std::span<const int> cards,
                 const std::string& path, std::vector<Diagnostic>& out) {
    for (VarId v : scope)
        if (!valid_var(domain, v))
            out.push_back({path + ".scope", "unknown variable id " + std::to_string(v)});
    if (cards.size() != scope.size()) {
        out.push_back({path + ".scope", "cardinality list does not match scope"});
        return;
    }
    for (std::size_t i = 0; i < scope.size(); ++i)
        if (valid_var(domain, scope[i]) && cards[i] != domain.cardinality(scope[i]))
            out.push_back({path + ".scope", "cardinality of variable " + std::to_string(scope[i]) +
                                                " does not match its declaration"});
}

void check_factor(const Domain& domain, const Factor& f, const std::string& path,
                  std::vector<Diagnostic>& out) {
    check_scope(domain, f.scope(), f.cards(), path, out);
    for (std::size_t i = 0; i < f.size(); ++i)
        if (!std::isfinite(f[i])) {
            out.push_back({path + ".table[" + std::to_string(i) + "]", "entry not finite"});
            break;
        }
}

void check_cpd(const Domain& domain, const Cpd& cpd, VarId expected_child, const std::string& path,
               std::vector<Diagnostic>& out) {
    if (cpd.child != expected_child) {
        out.push_back({path + ".child", "CPD child " + std::to_string(cpd.child) + " stored under variable " +
                                            std::to_string(expected_child)});
        return;
    }
    if (!valid_var(domain, cpd.child)) {
        out.push_back({path + ".child", "unknown variable id " + std::to_string(cpd.child)});
        return;
    }
    if (cpd.child_card != domain.cardinality(cpd.child)) {
        out.push_back({path + ".child", "child cardinality does not match its declaration"});
        return;
    }
    const std::size_t before = out.size();
    check_scope(domain, cpd.parents, cpd.parent_cards, path + ".parents", out);
    if (out.size() != before) return;
    const std::size_t width = static_cast<std::size_t>(cpd.child_card);
    if (cpd.table.size() != cpd.rows() * width) {
        out.push_back({path + ".table", "expected " + std::to_string(cpd.rows() * width) + " entries, got " +
                                            std::to_string(cpd.table.size())});
        return;
    }
    for (std::size_t r = 0; r < cpd.rows(); ++r) {
        double sum = 0.0;
        bool ok = true;
        for (std::size_t c = 0; c < width; ++c) {
            const double p = cpd.table[r * width + c];
            if (!std::isfinite(p) || p < 0.0) ok = false;
            sum += p;
        }
        const std::string row_path = path + ".table row " + std::to_string(r);
        if (!ok)
            out.push_back({row_path, "row has a negative or non-finite probability"});
        else if (std::abs(sum - 1.0) > kNormTolerance)
            out.push_back({row_path, "row not normalized (sums to " + std::to_string(sum) + ")"});
    }
}

}  // namespace

std::vector<int> Domain::cards(const Scope& scope) const {
    std::vector<int> out;
    out.reserve(scope.size());
    for (VarId v : scope) out.push_back(cardinality(v));
    return out;
}

Scope Domain::all() const {
    std::vector<VarId> ids(variables_.size());
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<VarId>(i);
    return Scope(std::move(ids));
}

double Domain::state_count() const {
    double n = 1.0;
    for (const auto& v : variables_) n *= v.cardinality;
    return n;
}

ActionIndex FactoredMDP::action_index(const std::string& id) const {
    for (std::size_t a = 0; a < actions.size(); ++a)
        if (actions[a].id == id) return static_cast<ActionIndex>(a);
    if (id == default_id) return kDefaultAction;
    throw ModelError("unknown action id '" + id + "'");
}

const std::string& FactoredMDP::action_name(ActionIndex a) const {
    if (a == kDefaultAction) return default_id;
    if (a < 0 || static_cast<std::size_t>(a) >= actions.size())
        throw ModelError("action index " + std::to_string(a) + " out of range");
    return actions[static_cast<std::size_t>(a)].id;
}

std::vector<ActionIndex> FactoredMDP::executable_actions() const {
    std::vector<ActionIndex> out;
    for (std::size_t a = 0; a < actions.size(); ++a) out.push_back(static_cast<ActionIndex>(a));
    if (default_is_action) out.push_back(kDefaultAction);
    return out;
}

std::vector<Diagnostic> validate(const FactoredMDP& model) {
    std::vector<Diagnostic> out;
    const Domain& domain = model.variables;

    if (domain.size() == 0) out.push_back({"variables", "model has no variables"});
    for (std::size_t i = 0; i < domain.size(); ++i) {
        const auto& v = domain.variables()[i];
        const std::string path = "variables[" + std::to_string(i) + "]";
        if (v.id != static_cast<VarId>(i))
            out.push_back({path + ".id", "ids must be contiguous 0..n-1; found " + std::to_string(v.id)});
        if (v.cardinality < 2) out.push_back({path + ".cardinality", "cardinality must be >= 2"});
    }
    if (!out.empty()) return out;

    if (model.default_model.size() != domain.size())
        out.push_back({"default", "expected one CPD per variable (" + std::to_string(domain.size()) +
                                      "), got " + std::to_string(model.default_model.size())});
    for (std::size_t i = 0; i < model.default_model.size(); ++i)
        check_cpd(domain, model.default_model[i], static_cast<VarId>(i), "default[" + std::to_string(i) + "]",
                  out);

    if (model.actions.empty() && !model.default_is_action)
        out.push_back({"actions", "model has no executable action"});
    std::set<std::string> ids;
    for (std::size_t a = 0; a < model.actions.size(); ++a) {
        const auto& action = model.actions[a];
        const std::string path = "actions[" + std::to_string(a) + "]";
        if (action.id.empty()) out.push_back({path + ".id", "empty action id"});
        if (!ids.insert(action.id).second) out.push_back({path + ".id", "duplicate action id '" + action.id + "'"});
        if (action.id == model.default_id)
            out.push_back({path + ".id", "action id collides with the default model id '" + model.default_id + "'"});
        for (const auto& [var, cpd] : action.overrides) {
            const std::string opath = path + ".overrides[" + std::to_string(var) + "]";
            if (!valid_var(domain, var)) {
                out.push_back({opath, "unknown variable id " + std::to_string(var)});
                continue;
            }
            check_cpd(domain, cpd, var, opath, out);
        }
    }

    for (std::size_t i = 0; i < model.reward.terms.size(); ++i)
        check_factor(domain, model.reward.terms[i], "rewards[" + std::to_string(i) + "]", out);

    if (!(model.gamma > 0.0 && model.gamma < 1.0))
        out.push_back({"gamma", "discount must lie strictly inside (0, 1)"});
    return out;
}

std::vector<Diagnostic> validate(const Basis& basis, const Domain& domain) {
    std::vector<Diagnostic> out;
    if (basis.functions.empty()) out.push_back({"basis", "basis must contain at least one function"});
    for (std::size_t i = 0; i < basis.functions.size(); ++i)
        check_factor(domain, basis.functions[i], "basis[" + std::to_string(i) + "]", out);
    if (basis.coefficients && basis.coefficients->size() != basis.functions.size())
        out.push_back({"coefficients", "expected " + std::to_string(basis.functions.size()) +
                                           " coefficients, got " + std::to_string(basis.coefficients->size())});
    return out;
}

std::vector<Diagnostic> validate(const FactoredWeights& weights, const Domain& domain) {
    std::vector<Diagnostic> out;
    std::vector<int> owner(domain.size(), -1);
    for (std::size_t c = 0; c < weights.marginals.size(); ++c) {
        const Factor& m = weights.marginals[c];
        const std::string path = "weights.clusters[" + std::to_string(c) + "]";
        const std::size_t before = out.size();
        check_factor(domain, m, path, out);
        if (out.size() != before) continue;
        if (m.scope().empty()) out.push_back({path + ".scope", "empty cluster"});
        for (VarId v : m.scope()) {
            if (owner[static_cast<std::size_t>(v)] >= 0)
                out.push_back({path + ".scope", "clusters not disjoint: variable " + std::to_string(v) +
                                                    " also in cluster " +
                                                    std::to_string(owner[static_cast<std::size_t>(v)])});
            else
                owner[static_cast<std::size_t>(v)] = static_cast<int>(c);
        }
        double sum = 0.0;
        bool nonneg = true;
        for (double p : m.table()) {
            sum += p;
            if (p < 0.0) nonneg = false;
        }
        if (!nonneg) out.push_back({path + ".table", "marginal has a negative entry"});
        if (std::abs(sum - 1.0) > kNormTolerance)
            out.push_back({path + ".table", "marginal not normalized (sums to " + std::to_string(sum) + ")"});
    }
    for (std::size_t v = 0; v < owner.size(); ++v)
        if (owner[v] < 0)
            out.push_back({"weights.clusters", "clusters not exhaustive: variable " + std::to_string(v) +
                                                   " is in no cluster"});
    return out;
}

Scope effects(const FactoredMDP& model, ActionIndex action) {
    if (action == kDefaultAction) return {};
    model.action_name(action);  // range check
    std::vector<VarId> vars;
    for (const auto& [var, cpd] : model.actions[static_cast<std::size_t>(action)].overrides) vars.push_back(var);
    return Scope(std::move(vars));
}

FactoredWeights uniform_weights(const Domain& domain) {
    FactoredWeights w;
    for (std::size_t v = 0; v < domain.size(); ++v) {
        const int card = domain.cardinality(static_cast<VarId>(v));
        w.marginals.push_back(Factor::filled(Scope{static_cast<VarId>(v)}, {card}, 1.0 / card));
    }
    return w;
}

const Cpd& action_cpd(const FactoredMDP& model, ActionIndex action, VarId var) {
    if (var < 0 || static_cast<std::size_t>(var) >= model.default_model.size())
        throw ModelError("unknown variable id " + std::to_string(var));
    if (action != kDefaultAction) {
        model.action_name(action);  // range check
        const auto& overrides = model.actions[static_cast<std::size_t>(action)].overrides;
        if (auto it = overrides.find(var); it != overrides.end()) return it->second;
    }
    return model.default_model[static_cast<std::size_t>(var)];
}

Cpd make_cpd(const Domain& domain, VarId child, Scope parents, std::vector<double> table) {
    Cpd cpd;
    cpd.child = child;
    cpd.child_card = domain.cardinality(child);
    cpd.parent_cards = domain.cards(parents);
    cpd.parents = std::move(parents);
    cpd.table = std::move(table);
    if (cpd.table.size() != cpd.rows() * static_cast<std::size_t>(cpd.child_card))
        throw ModelError("CPD for variable " + std::to_string(child) + ": expected " +
                         std::to_string(cpd.rows() * static_cast<std::size_t>(cpd.child_card)) + " entries");
    return cpd;
}

Factor make_factor(const Domain& domain, Scope scope, std::vector<double> table) {
    auto cards = domain.cards(scope);
    return Factor(std::move(scope), std::move(cards), std::move(table));
}

}  // namespace fmdp
