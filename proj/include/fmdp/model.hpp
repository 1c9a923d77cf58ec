#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fmdp/factor.hpp"
#include "fmdp/scope.hpp"

namespace fmdp {

/// Index of an action in FactoredMDP::actions, or kDefaultAction for the default model d.
using ActionIndex = int;
inline constexpr ActionIndex kDefaultAction = -1;

struct VariableSpec {
    VarId id = 0;
    std::string name;
    int cardinality = 2;

    friend bool operator==(const VariableSpec&, const VariableSpec&) = default;
};

/// The state variables of a model.
class Domain {
public:
    Domain() = default;
    explicit Domain(std::vector<VariableSpec> variables) : variables_(std::move(variables)) {}

    std::size_t size() const noexcept { return variables_.size(); }
    const VariableSpec& operator[](VarId v) const { return variables_.at(static_cast<std::size_t>(v)); }
    const std::vector<VariableSpec>& variables() const noexcept { return variables_; }
    int cardinality(VarId v) const { return (*this)[v].cardinality; }
    std::vector<int> cards(const Scope& scope) const;
    Scope all() const;
    /// |Dom(X)| as a double; exact up to 2^53.
    double state_count() const;

    friend bool operator==(const Domain&, const Domain&) = default;

private:
    std::vector<VariableSpec> variables_;
};

/// P(X'_child | parents). Row r is the distribution for the parent assignment with flat index r.
struct Cpd {
    VarId child = 0;
    int child_card = 2;
    Scope parents;
    std::vector<int> parent_cards;
    std::vector<double> table;

    std::size_t rows() const { return table_size(parent_cards); }
    double prob(std::size_t row, int value) const {
        return table[row * static_cast<std::size_t>(child_card) + static_cast<std::size_t>(value)];
    }

    friend bool operator==(const Cpd&, const Cpd&) = default;
};

/// One CPD per variable, indexed by variable id.
using TransitionModel = std::vector<Cpd>;

struct ActionSpec {
    std::string id;
    std::map<VarId, Cpd> overrides;

    friend bool operator==(const ActionSpec&, const ActionSpec&) = default;
};

struct RewardModel {
    std::vector<Factor> terms;

    friend bool operator==(const RewardModel&, const RewardModel&) = default;
};

struct FactoredMDP {
    Domain variables;
    TransitionModel default_model;
    std::vector<ActionSpec> actions;
    RewardModel reward;
    double gamma = 0.9;
    bool default_is_action = false;
    std::string default_id = "d";

    /// Throws ModelError for an unknown id. "d" (default_id) maps to kDefaultAction.
    ActionIndex action_index(const std::string& id) const;
    const std::string& action_name(ActionIndex a) const;
    /// Actions a policy may choose: every listed action, then d when executable.
    std::vector<ActionIndex> executable_actions() const;

    friend bool operator==(const FactoredMDP&, const FactoredMDP&) = default;
};

/// h_1..h_k and, once solved, their coefficients.
struct Basis {
    std::vector<Factor> functions;
    std::optional<std::vector<double>> coefficients;

    std::size_t size() const noexcept { return functions.size(); }

    friend bool operator==(const Basis&, const Basis&) = default;
};

/// Projection weights as a product of normalized marginals over disjoint clusters.
/// Each marginal's scope is its cluster.
struct FactoredWeights {
    std::vector<Factor> marginals;

    friend bool operator==(const FactoredWeights&, const FactoredWeights&) = default;
};

struct Diagnostic {
    std::string path;
    std::string message;
};

std::vector<Diagnostic> validate(const FactoredMDP& model);
std::vector<Diagnostic> validate(const Basis& basis, const Domain& domain);
std::vector<Diagnostic> validate(const FactoredWeights& weights, const Domain& domain);

/// Effects[a]: the variables whose CPD the action overrides. Empty for kDefaultAction.
Scope effects(const FactoredMDP& model, ActionIndex action);

/// One cluster per variable, uniform marginals.
FactoredWeights uniform_weights(const Domain& domain);

/// The CPD of X'_var under `action`: its override when var is in Effects[action], else the
/// default CPD.
const Cpd& action_cpd(const FactoredMDP& model, ActionIndex action, VarId var);

/// Builds a CPD, filling parent cardinalities from the domain.
Cpd make_cpd(const Domain& domain, VarId child, Scope parents, std::vector<double> table);

/// Builds a factor over `scope`, filling cardinalities from the domain.
Factor make_factor(const Domain& domain, Scope scope, std::vector<double> table);

}  // namespace fmdp
