#include <doctest.h>

#include "fmdp/demos.hpp"
#include "fmdp/oracle.hpp"
#include "fmdp/policy.hpp"
#include "fmdp/policy_iteration.hpp"
#include "fmdp/value_determination.hpp"
#include "support/random_instances.hpp"

using namespace fmdp;

namespace {

Basis fitted(const DemoModel& demo, const FactoredWeights& rho, ActionIndex action) {
    Basis b = demo.basis;
    const Solution s = solve_fixed_point(build_gram_fixed_action(demo.model, b, rho, action));
    b.coefficients = std::vector<double>(s.w.data(), s.w.data() + s.w.size());
    return b;
}

// Stationary distribution of a fixed action as one-cluster weights.
FactoredWeights stationary_weights(const FactoredMDP& m, ActionIndex action) {
    const oracle::FlatMDP flat = oracle::flatten(m);
    const Eigen::VectorXd d = oracle::stationary_distribution(flat, oracle::constant_policy(flat, action));
    const Scope all = m.variables.all();
    FactoredWeights w;
    w.marginals.push_back(Factor(all, m.variables.cards(all), std::vector<double>(d.data(), d.data() + d.size())));
    return w;
}

// Oracle Q_a at every state from the flat model.
Eigen::VectorXd oracle_q(const oracle::FlatMDP& flat, const Basis& b, ActionIndex a) {
    const Eigen::VectorXd V = oracle::basis_matrix(flat, b) * testing::to_eigen(*b.coefficients);
    return oracle::q_values(flat, V, a);
}

}  // namespace

TEST_CASE("zero coefficients give Q_a = R") {
    const DemoModel demo = dbn5();
    Basis b = demo.basis;
    b.coefficients = std::vector<double>(b.size(), 0.0);
    const oracle::FlatMDP flat = oracle::flatten(demo.model);
    for (ActionIndex a : demo.model.executable_actions()) {
        const QFunction q = q_function(demo.model, b, a);
        for (std::size_t s = 0; s < flat.N; ++s) CHECK(q(flat.state(s)) == doctest::Approx(flat.R[static_cast<Eigen::Index>(s)]));
    }
}

TEST_CASE("copy dynamics make every action equivalent") {
    FactoredMDP m;
    m.variables = Domain({{0, "A", 2}, {1, "B", 2}});
    for (VarId v = 0; v < 2; ++v) m.default_model.push_back(make_cpd(m.variables, v, {v}, {1, 0, 0, 1}));
    m.actions.push_back({"x", {{0, make_cpd(m.variables, 0, {0}, {1, 0, 0, 1})}}});
    m.actions.push_back({"y", {{1, make_cpd(m.variables, 1, {1}, {1, 0, 0, 1})}}});
    m.default_is_action = false;
    m.reward.terms = {make_factor(m.variables, {0, 1}, {0, 1, 2, 3})};
    Basis b;
    b.functions = {Factor::constant(1.0), make_factor(m.variables, {0}, {0, 1}), make_factor(m.variables, {1}, {0, 1})};
    b.coefficients = std::vector<double>{0.5, -1.0, 2.0};
    const QFunction qx = q_function(m, b, 0);
    const QFunction qy = q_function(m, b, 1);
    for (int s0 = 0; s0 < 2; ++s0)
        for (int s1 = 0; s1 < 2; ++s1) {
            const std::vector<int> x{s0, s1};
            CHECK(qx(x) == doctest::Approx(qy(x)));
        }
    // With every delta zero the list picks the tie-break action (lowest index) everywhere.
    const DecisionListPolicy p = extract_decision_list(m, b);
    for (int s0 = 0; s0 < 2; ++s0)
        for (int s1 = 0; s1 < 2; ++s1) CHECK(apply_policy(p, std::vector<int>{s0, s1}) == 0);
}

TEST_CASE("delta functions") {
    const DemoModel demo = dbn5();
    Basis b = demo.basis;
    b.coefficients = std::vector<double>{1, 2, 3, 4, 5};
    const DeltaFunction d2 = delta_function(demo.model, b, demo.model.action_index("a_2"));
    CHECK(d2.factor.scope() == Scope{0, 1});
    CHECK(d2.affected == std::vector<std::size_t>{1});
    const DeltaFunction d1 = delta_function(demo.model, b, demo.model.action_index("a_1"));
    CHECK(d1.factor.scope() == Scope{0});

    FactoredMDP m = demo.model;
    m.actions.push_back({"noop", {}});
    const DeltaFunction dz = delta_function(m, b, m.action_index("noop"));
    CHECK(dz.factor.scope().empty());
    CHECK(dz.factor[0] == 0.0);
    CHECK(dz.affected.empty());
}

TEST_CASE("dbn5 decision list has 18 conditionals before pruning") {
    const DemoModel demo = dbn5();
    const Basis b = fitted(demo, uniform_weights(demo.model.variables), demo.model.action_index("a_1"));
    const DecisionListPolicy full = extract_decision_list(demo.model, b, {false});
    CHECK(full.unpruned_size == 18);
    std::size_t real = 0;
    for (const Conditional& c : full.conditionals) real += c.action != kDefaultAction;
    CHECK(real == 18);
    REQUIRE(full.fallback);
    CHECK(*full.fallback == kDefaultAction);
    const DecisionListPolicy pruned = extract_decision_list(demo.model, b);
    CHECK(pruned.unpruned_size == 18);
    CHECK(pruned.conditionals.size() <= 18);
    for (const Conditional& c : pruned.conditionals) CHECK(c.delta >= 0.0);
    for (std::size_t i = 1; i < full.conditionals.size(); ++i)
        CHECK(full.conditionals[i - 1].delta >= full.conditionals[i].delta);
}

TEST_CASE("chain4 greedy policies") {
    const DemoModel demo = chain4();
    const ActionIndex R = demo.model.action_index("R");
    const Basis uniform_fit = fitted(demo, uniform_weights(demo.model.variables), R);
    const DecisionListPolicy p = extract_decision_list(demo.model, uniform_fit);
    CHECK(policy_string(demo.model, p) == "RLLL");
    CHECK_FALSE(p.fallback);

    const Basis stationary_fit = fitted(demo, stationary_weights(demo.model, R), R);
    CHECK(policy_string(demo.model, extract_decision_list(demo.model, stationary_fit)) == "LLLL");

    // Q values against the oracle for the stationary fit.
    const oracle::FlatMDP flat = oracle::flatten(demo.model);
    for (ActionIndex a : demo.model.executable_actions()) {
        const QFunction q = q_function(demo.model, stationary_fit, a);
        const Eigen::VectorXd e = oracle_q(flat, stationary_fit, a);
        for (std::size_t s = 0; s < 4; ++s) CHECK(q(flat.state(s)) == doctest::Approx(e[static_cast<Eigen::Index>(s)]).epsilon(1e-8));
    }
}

TEST_CASE("apply_policy") {
    const DecisionListPolicy all = catch_all(3);
    CHECK(apply_policy(all, std::vector<int>{0, 1, 0}) == 3);
    CHECK(matching_branch(all, std::vector<int>{1, 1, 1}) == 0);

    DecisionListPolicy p;
    p.conditionals.push_back({Assignment{Scope{0}, {1}}, 0, 1.0});
    p.conditionals.push_back({Assignment{Scope{1}, {1}}, 1, 0.5});
    p.fallback = kDefaultAction;
    CHECK(apply_policy(p, std::vector<int>{1, 1}) == 0);
    CHECK(apply_policy(p, std::vector<int>{0, 1}) == 1);
    CHECK(apply_policy(p, std::vector<int>{0, 0}) == kDefaultAction);
    CHECK(matching_branch(p, std::vector<int>{0, 0}) == 2);
    CHECK(same_structure(p, p));
    DecisionListPolicy q = p;
    q.conditionals[0].delta = 7.0;
    CHECK(same_structure(p, q));
    q.conditionals[1].action = 0;
    CHECK_FALSE(same_structure(p, q));

    const FactoredMDP m = dbn5().model;
    DecisionListPolicy r;
    r.conditionals.push_back({Assignment{Scope{0, 1}, {1, 0}}, m.action_index("a_2"), 0.1371});
    r.fallback = kDefaultAction;
    CHECK(render(r, m) == "if X_1=1 ∧ X_2=0 → a_2 (δ=0.1371)\nelse → d\n");
}

TEST_CASE("extracted lists agree with the oracle on random models") {
    testing::Rng rng(41);
    for (int trial = 0; trial < 60; ++trial) {
        testing::Instance inst = testing::random_instance(rng);
        const FactoredMDP& m = inst.model;
        inst.basis.coefficients = testing::random_coefficients(rng, inst.basis.size());
        const oracle::FlatMDP flat = oracle::flatten(m);
        const Eigen::VectorXd V = oracle::basis_matrix(flat, inst.basis) * testing::to_eigen(*inst.basis.coefficients);

        // delta_a equals Q_a - Q_d everywhere.
        std::size_t bound = 0;
        const Eigen::VectorXd qd = oracle::q_values(flat, V, kDefaultAction);
        for (std::size_t a = 0; a < m.actions.size(); ++a) {
            const DeltaFunction d = delta_function(m, inst.basis, static_cast<ActionIndex>(a));
            bound += d.factor.size();
            const Eigen::VectorXd qa = oracle::q_values(flat, V, static_cast<ActionIndex>(a));
            double worst = 0.0;
            for (std::size_t s = 0; s < flat.N; ++s) {
                const Eigen::Index i = static_cast<Eigen::Index>(s);
                worst = std::max(worst, std::abs(d.factor.at_state(flat.state(s)) - (qa[i] - qd[i])));
            }
            CHECK(worst <= 1e-10 * std::max(1.0, V.cwiseAbs().maxCoeff()));
        }

        const DecisionListPolicy full = extract_decision_list(m, inst.basis, {false});
        CHECK(full.unpruned_size == bound);
        CHECK(full.conditionals.size() <= bound + 1);
        const DecisionListPolicy pruned = extract_decision_list(m, inst.basis);
        CHECK(pruned.unpruned_size == bound);
        CHECK(pruned.conditionals.size() <= bound);

        // The list realizes argmax_a Q_a with the oracle's tie-break.
        const oracle::FlatPolicy greedy = oracle::greedy_policy(flat, V, 1e-9);
        std::vector<Eigen::VectorXd> q;
        for (ActionIndex a : m.executable_actions()) q.push_back(oracle::q_values(flat, V, a));
        bool attains = true, same = true;
        for (std::size_t s = 0; s < flat.N; ++s) {
            const auto x = flat.state(s);
            const ActionIndex chosen = apply_policy(pruned, x);
            CHECK(apply_policy(full, x) == chosen);
            double best = -1e300;
            for (const auto& qa : q) best = std::max(best, qa[static_cast<Eigen::Index>(s)]);
            const auto acts = m.executable_actions();
            const auto it = std::find(acts.begin(), acts.end(), chosen);
            REQUIRE(it != acts.end());
            const double got = q[static_cast<std::size_t>(it - acts.begin())][static_cast<Eigen::Index>(s)];
            attains = attains && got >= best - 1e-9 * std::max(1.0, std::abs(best));
            same = same && chosen == greedy[s];
        }
        CHECK(attains);
        CHECK(same);
    }
}
