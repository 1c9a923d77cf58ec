#include "fmdp/document.hpp"

#include <cstdio>
#include <cstdlib>

namespace fmdp {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ParseError(path + ": " + what);
}

const json& field(const json& obj, const char* key, const std::string& path) {
    if (!obj.is_object()) fail(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) fail(path, std::string("missing key \"") + key + "\"");
    return *it;
}

const json& array_at(const json& obj, const char* key, const std::string& path) {
    const json& j = field(obj, key, path);
    if (!j.is_array()) fail(path + "." + key, "expected an array");
    return j;
}

std::vector<double> numbers(const json& j, const std::string& path) {
    if (!j.is_array()) fail(path, "expected an array of numbers");
    std::vector<double> out;
    for (const json& x : j) {
        if (!x.is_number()) fail(path, "expected an array of numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

Scope scope_of(const json& j, const Domain& domain, const std::string& path) {
    if (!j.is_array()) fail(path, "expected an array of variable ids");
    std::vector<VarId> ids;
    for (const json& x : j) {
        if (!x.is_number_integer()) fail(path, "expected an array of variable ids");
        const VarId v = x.get<VarId>();
        if (v < 0 || static_cast<std::size_t>(v) >= domain.size()) fail(path, "unknown variable id " + std::to_string(v));
        if (!ids.empty() && v <= ids.back()) fail(path, "scope must be strictly ascending");
        ids.push_back(v);
    }
    return Scope(std::move(ids));
}

Factor factor_of(const json& j, const Domain& domain, const std::string& path) {
    Scope scope = scope_of(field(j, "scope", path), domain, path + ".scope");
    std::vector<double> table = numbers(field(j, "table", path), path + ".table");
    const auto cards = domain.cards(scope);
    if (table.size() != table_size(cards))
        fail(path + ".table", "expected " + std::to_string(table_size(cards)) + " entries, got " +
                                  std::to_string(table.size()));
    return Factor(std::move(scope), cards, std::move(table));
}

Cpd cpd_of(const json& j, const Domain& domain, const std::string& path) {
    const json& child = field(j, "child", path);
    if (!child.is_number_integer()) fail(path + ".child", "expected a variable id");
    Cpd cpd;
    cpd.child = child.get<VarId>();
    if (cpd.child < 0 || static_cast<std::size_t>(cpd.child) >= domain.size())
        fail(path + ".child", "unknown variable id " + std::to_string(cpd.child));
    cpd.child_card = domain.cardinality(cpd.child);
    cpd.parents = scope_of(field(j, "parents", path), domain, path + ".parents");
    cpd.parent_cards = domain.cards(cpd.parents);
    cpd.table = numbers(field(j, "table", path), path + ".table");
    return cpd;
}

json scope_json(const Scope& s) { return json(s.vars()); }

json rounded(std::span<const double> xs) {
    json out = json::array();
    for (double x : xs) out.push_back(report_number(x));
    return out;
}


// Documents keep full precision so exported models re-import bit-exactly.
json exact_factor_json(const Factor& f) {
    return {{"scope", scope_json(f.scope())}, {"table", std::vector<double>(f.table().begin(), f.table().end())}};
}

json cpd_json(const Cpd& c) {
    return {{"child", c.child}, {"parents", scope_json(c.parents)}, {"table", c.table}};
}

}  // namespace

json parse_json(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1, column = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        throw ParseError("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + e.what());
    }
}

ModelDocument parse_model_document(const std::string& text) {
    const json j = parse_json(text);
    if (!j.is_object()) fail("document", "expected a JSON object");
    ModelDocument doc;
    FactoredMDP& m = doc.model;

    std::vector<VariableSpec> vars;
    const json& jv = array_at(j, "variables", "document");
    for (std::size_t i = 0; i < jv.size(); ++i) {
        const std::string path = "variables[" + std::to_string(i) + "]";
        VariableSpec v;
        v.id = static_cast<VarId>(i);
        const json& name = field(jv[i], "name", path);
        if (!name.is_string()) fail(path + ".name", "expected a string");
        v.name = name.get<std::string>();
        const json& card = field(jv[i], "cardinality", path);
        if (!card.is_number_integer()) fail(path + ".cardinality", "expected an integer");
        v.cardinality = card.get<int>();
        if (v.cardinality < 1) fail(path + ".cardinality", "must be positive");
        vars.push_back(std::move(v));
    }
    m.variables = Domain(std::move(vars));
    const Domain& dom = m.variables;

    const json& jd = array_at(j, "default", "document");
    for (std::size_t i = 0; i < jd.size(); ++i) m.default_model.push_back(cpd_of(jd[i], dom, "default[" + std::to_string(i) + "]"));

    const json& ja = array_at(j, "actions", "document");
    for (std::size_t a = 0; a < ja.size(); ++a) {
        const std::string path = "actions[" + std::to_string(a) + "]";
        ActionSpec spec;
        const json& id = field(ja[a], "id", path);
        if (!id.is_string()) fail(path + ".id", "expected a string");
        spec.id = id.get<std::string>();
        const json& ov = array_at(ja[a], "overrides", path);
        for (std::size_t o = 0; o < ov.size(); ++o) {
            Cpd cpd = cpd_of(ov[o], dom, path + ".overrides[" + std::to_string(o) + "]");
            const VarId child = cpd.child;
            if (!spec.overrides.emplace(child, std::move(cpd)).second)
                fail(path + ".overrides", "variable " + std::to_string(child) + " overridden twice");
        }
        m.actions.push_back(std::move(spec));
    }

    const json& dia = field(j, "default_is_action", "document");
    if (!dia.is_boolean()) fail("default_is_action", "expected a boolean");
    m.default_is_action = dia.get<bool>();
    if (auto it = j.find("default_id"); it != j.end()) {
        if (!it->is_string()) fail("default_id", "expected a string");
        m.default_id = it->get<std::string>();
    }

    const json& jr = array_at(j, "rewards", "document");
    for (std::size_t i = 0; i < jr.size(); ++i) m.reward.terms.push_back(factor_of(jr[i], dom, "rewards[" + std::to_string(i) + "]"));

    const json& g = field(j, "gamma", "document");
    if (!g.is_number()) fail("gamma", "expected a number");
    m.gamma = g.get<double>();

    const json& jb = array_at(j, "basis", "document");
    for (std::size_t i = 0; i < jb.size(); ++i) doc.basis.functions.push_back(factor_of(jb[i], dom, "basis[" + std::to_string(i) + "]"));

    if (auto it = j.find("weights"); it != j.end() && !it->is_null()) doc.weights = parse_weights(*it, dom);
    if (auto it = j.find("coefficients"); it != j.end() && !it->is_null())
        doc.basis.coefficients = numbers(*it, "coefficients");
    return doc;
}

json to_json(const ModelDocument& doc) {
    const FactoredMDP& m = doc.model;
    json j;
    j["variables"] = json::array();
    for (const auto& v : m.variables.variables()) j["variables"].push_back({{"name", v.name}, {"cardinality", v.cardinality}});
    j["default"] = json::array();
    for (const Cpd& c : m.default_model) j["default"].push_back(cpd_json(c));
    j["actions"] = json::array();
    for (const ActionSpec& a : m.actions) {
        json ov = json::array();
        for (const auto& [var, cpd] : a.overrides) ov.push_back(cpd_json(cpd));
        j["actions"].push_back({{"id", a.id}, {"overrides", ov}});
    }
    j["default_is_action"] = m.default_is_action;
    j["default_id"] = m.default_id;
    j["rewards"] = json::array();
    for (const Factor& r : m.reward.terms) j["rewards"].push_back(exact_factor_json(r));
    j["gamma"] = m.gamma;
    j["basis"] = json::array();
    for (const Factor& h : doc.basis.functions) j["basis"].push_back(exact_factor_json(h));
    if (doc.weights) j["weights"] = to_json(*doc.weights);
    if (doc.basis.coefficients) j["coefficients"] = *doc.basis.coefficients;
    return j;
}

FactoredWeights parse_weights(const json& j, const Domain& domain) {
    if (j.is_object() && !j.contains("clusters") && j.contains("weights")) return parse_weights(j["weights"], domain);
    FactoredWeights w;
    const json& clusters = array_at(j, "clusters", "weights");
    for (std::size_t c = 0; c < clusters.size(); ++c)
        w.marginals.push_back(factor_of(clusters[c], domain, "weights.clusters[" + std::to_string(c) + "]"));
    return w;
}

json to_json(const FactoredWeights& weights) {
    json clusters = json::array();
    for (const Factor& c : weights.marginals) clusters.push_back(exact_factor_json(c));
    return {{"clusters", clusters}};
}

double report_number(double x) {
    if (!std::isfinite(x)) return x;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return std::strtod(buf, nullptr);
}

json to_json(const DecisionListPolicy& policy, const FactoredMDP& model) {
    json conds = json::array();
    for (const Conditional& c : policy.conditionals)
        conds.push_back({{"scope", scope_json(c.t.scope)},
                         {"values", c.t.values},
                         {"action", model.action_name(c.action)},
                         {"delta", report_number(c.delta)}});
    json j = {{"conditionals", conds}, {"unpruned_size", policy.unpruned_size}};
    j["fallback"] = policy.fallback ? json(model.action_name(*policy.fallback)) : json(nullptr);
    j["text"] = render(policy, model);
    return j;
}

DecisionListPolicy parse_decision_list(const json& j, const FactoredMDP& model) {
    DecisionListPolicy p;
    const json& conds = array_at(j, "conditionals", "policy");
    for (std::size_t i = 0; i < conds.size(); ++i) {
        const std::string path = "policy.conditionals[" + std::to_string(i) + "]";
        Conditional c;
        c.t.scope = scope_of(field(conds[i], "scope", path), model.variables, path + ".scope");
        for (double v : numbers(field(conds[i], "values", path), path + ".values")) c.t.values.push_back(static_cast<int>(v));
        if (c.t.values.size() != c.t.scope.size()) fail(path + ".values", "one value per scope variable expected");
        for (std::size_t k = 0; k < c.t.values.size(); ++k)
            if (c.t.values[k] < 0 || c.t.values[k] >= model.variables.cardinality(c.t.scope[k]))
                fail(path + ".values", "value out of range");
        const json& action = field(conds[i], "action", path);
        if (!action.is_string()) fail(path + ".action", "expected an action id");
        try {
            c.action = model.action_index(action.get<std::string>());
        } catch (const ModelError& e) {
            fail(path + ".action", e.what());
        }
        if (auto it = conds[i].find("delta"); it != conds[i].end() && it->is_number()) c.delta = it->get<double>();
        p.conditionals.push_back(std::move(c));
    }
    if (auto it = j.find("fallback"); it != j.end() && !it->is_null()) {
        if (!it->is_string()) fail("policy.fallback", "expected an action id or null");
        try {
            p.fallback = model.action_index(it->get<std::string>());
        } catch (const ModelError& e) {
            fail("policy.fallback", e.what());
        }
    }
    p.unpruned_size = p.conditionals.size();
    if (auto it = j.find("unpruned_size"); it != j.end() && it->is_number_integer()) p.unpruned_size = it->get<std::size_t>();
    return p;
}

json to_json(const ErrorReport& report, const FactoredMDP& model) {
    json witness = json::object();
    std::string text;
    for (std::size_t v = 0; v < report.witness.size(); ++v) {
        const std::string& name = model.variables[static_cast<VarId>(v)].name;
        witness[name] = report.witness[v];
        text += (v ? " " : "") + name + "=" + std::to_string(report.witness[v]);
    }
    return {{"epsilon", report_number(report.epsilon)},
            {"loss_bound", report_number(report.loss_bound)},
            {"direction", report.direction == ErrorDirection::Symmetric ? "symmetric" : "one-sided"},
            {"witness", witness},
            {"witness_text", text},
            {"action", model.action_name(report.action)},
            {"branch", report.branch},
            {"sign", report.sign}};
}

json to_json(const Solution& s) {
    return {{"coefficients", rounded(std::span<const double>(s.w.data(), static_cast<std::size_t>(s.w.size())))},
            {"gamma_used", report_number(s.gamma_used)},
            {"perturbed", s.perturbed},
            {"residual", report_number(s.residual)},
            {"condition", report_number(s.condition)},
            {"ill_conditioned", s.ill_conditioned}};
}

json to_json(const RunTrace& trace, const FactoredMDP& model) {
    json iters = json::array();
    for (const IterationRecord& r : trace.iterations) {
        json it = {{"iteration", r.iteration}, {"solution", to_json(r.solution)}, {"policy", to_json(r.policy, model)}};
        if (const std::string s = policy_string(model, r.policy); !s.empty()) it["policy_string"] = s;
        if (r.greedy_error) it["greedy_error"] = to_json(*r.greedy_error, model);
        if (r.policy_error) it["policy_error"] = to_json(*r.policy_error, model);
        iters.push_back(std::move(it));
    }
    json j = {{"status", to_string(trace.status)},
              {"start_action", model.action_name(trace.start_action)},
              {"iterations", iters},
              {"cycle_length", trace.cycle_length}};
    if (!trace.error.empty()) j["error"] = trace.error;
    if (!trace.refinements.empty()) {
        json rounds = json::array();
        for (const RefinementRecord& r : trace.refinements)
            rounds.push_back({{"round", r.round},
                              {"epsilon", report_number(r.epsilon)},
                              {"witness", r.witness},
                              {"coefficients", rounded(std::span<const double>(r.w.data(), static_cast<std::size_t>(r.w.size())))}});
        j["refinement"] = rounds;
    }
    return j;
}

std::vector<double> parse_coefficients(const std::string& text) {
    const json j = parse_json(text);
    if (j.is_object()) return numbers(field(j, "coefficients", "document"), "coefficients");
    return numbers(j, "coefficients");
}

}  // namespace fmdp
