#include "fmdp/demos.hpp"

#include "fmdp/errors.hpp"

namespace fmdp {

namespace {

// Row s of the chain transition for an action whose intended direction is `dir`.
std::vector<double> chain_rows(int dir, BoundaryConvention boundary) {
    std::vector<double> table(16, 0.0);
    for (int s = 0; s < 4; ++s) {
        for (auto [step, p] : {std::pair{dir, 0.9}, std::pair{-dir, 0.1}}) {
            int t = s + step;
            if (t < 0 || t > 3) t = boundary == BoundaryConvention::SelfLoop ? s : s - step;
            table[static_cast<std::size_t>(s * 4 + t)] += p;
        }
    }
    return table;
}

}  // namespace

DemoModel chain4(BoundaryConvention boundary, double gamma) {
    DemoModel demo;
    demo.name = "chain4";
    FactoredMDP& m = demo.model;
    m.variables = Domain({{0, "s", 4}});
    const Domain& dom = m.variables;
    std::vector<double> stay(16, 0.0);
    for (int s = 0; s < 4; ++s) stay[static_cast<std::size_t>(s * 5)] = 1.0;
    m.default_model = {make_cpd(dom, 0, {0}, stay)};
    m.actions.push_back({"L", {{0, make_cpd(dom, 0, {0}, chain_rows(-1, boundary))}}});
    m.actions.push_back({"R", {{0, make_cpd(dom, 0, {0}, chain_rows(+1, boundary))}}});
    m.reward.terms = {make_factor(dom, {0}, {0.0, 1.0, 1.0, 0.0})};
    m.gamma = gamma;
    m.default_is_action = false;

    demo.basis.functions = {Factor::constant(1.0), make_factor(dom, {0}, {0.0, 1.0, 2.0, 3.0}),
                            make_factor(dom, {0}, {0.0, 1.0, 4.0, 9.0})};
    return demo;
}

DemoModel dbn5(double gamma) {
    DemoModel demo;
    demo.name = "dbn5";
    FactoredMDP& m = demo.model;
    std::vector<VariableSpec> vars;
    for (int i = 0; i < 5; ++i) vars.push_back({i, "X_" + std::to_string(i + 1), 2});
    m.variables = Domain(std::move(vars));
    const Domain& dom = m.variables;

    m.default_model.push_back(make_cpd(dom, 0, {0}, {1.0, 0.0, 0.1, 0.9}));
    for (int i = 1; i < 5; ++i)
        // parents (X_{i-1}, X_i): 00, 01, 10, 11 -> P(on) = 0, 0.9, 0.1, 1.0
        m.default_model.push_back(make_cpd(dom, i, {i - 1, i}, {1.0, 0.0, 0.1, 0.9, 0.9, 0.1, 0.0, 1.0}));

    for (int i = 0; i < 5; ++i) {
        const Scope parents = m.default_model[static_cast<std::size_t>(i)].parents;
        std::vector<double> table;
        for (std::size_t r = 0; r < table_size(dom.cards(parents)); ++r) table.insert(table.end(), {0.05, 0.95});
        m.actions.push_back({"a_" + std::to_string(i + 1), {{i, make_cpd(dom, i, parents, table)}}});
    }
    m.reward.terms = {make_factor(dom, {4}, {0.0, 1.0})};
    m.gamma = gamma;
    m.default_is_action = true;

    for (int i = 0; i < 5; ++i) demo.basis.functions.push_back(make_factor(dom, {i}, {0.0, 1.0}));
    return demo;
}

DemoModel build_demo(const std::string& name) {
    if (name == "chain4") return chain4();
    if (name == "dbn5") return dbn5();
    throw ModelError("unknown demo '" + name + "' (expected chain4 or dbn5)");
}

}  // namespace fmdp
