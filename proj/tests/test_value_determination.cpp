#include <doctest.h>

#include "fmdp/demos.hpp"
#include "fmdp/errors.hpp"
#include "fmdp/oracle.hpp"
#include "fmdp/value_determination.hpp"
#include "support/random_instances.hpp"

using namespace fmdp;

namespace {

Basis indicator_basis(const Domain& dom) {
    Basis b;
    const Scope all = dom.all();
    const auto cards = dom.cards(all);
    const Factor shape = Factor::filled(all, cards, 0.0);
    for (std::size_t s = 0; s < shape.size(); ++s) b.functions.push_back(Factor::indicator(all, cards, shape.values_at(s)));
    return b;
}

double expected_reward(const FactoredMDP& m, const FactoredWeights& rho) {
    const oracle::FlatMDP flat = oracle::flatten(m);
    return oracle::joint_weights(flat, rho).dot(flat.R);
}

}  // namespace

TEST_CASE("constant basis reduces to a scalar fixed point") {
    testing::Rng rng(21);
    for (int trial = 0; trial < 10; ++trial) {
        testing::Instance inst = testing::random_instance(rng);
        inst.basis.functions = {Factor::constant(1.0)};
        const FactoredMDP& m = inst.model;
        for (ActionIndex a : m.executable_actions()) {
            const GramSystem sys = build_gram_fixed_action(m, inst.basis, inst.rho, a);
            CHECK(sys.M(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(sys.C(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
            const double er = expected_reward(m, inst.rho);
            CHECK(sys.r[0] == doctest::Approx(er).epsilon(1e-12));
            const Solution s = solve_fixed_point(sys);
            CHECK(s.w[0] == doctest::Approx(er / (1.0 - m.gamma)).epsilon(1e-10));
            CHECK_FALSE(s.perturbed);
        }
    }
}

TEST_CASE("Bernoulli moments of the dbn5 indicator basis") {
    const DemoModel demo = dbn5();
    const Eigen::MatrixXd M = gram_matrix(demo.basis, uniform_weights(demo.model.variables));
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) CHECK(M(i, j) == doctest::Approx(i == j ? 0.5 : 0.25));
}

TEST_CASE("fixed-action Gram systems match explicit matrices") {
    testing::Rng rng(22);
    for (int trial = 0; trial < 40; ++trial) {
        const testing::Instance inst = testing::random_instance(rng);
        const FactoredMDP& m = inst.model;
        const oracle::FlatMDP flat = oracle::flatten(m);
        const Eigen::VectorXd rho = oracle::joint_weights(flat, inst.rho);
        for (ActionIndex a : m.executable_actions()) {
            const GramSystem f = build_gram_fixed_action(m, inst.basis, inst.rho, a);
            const GramSystem e = oracle::exact_gram(flat, inst.basis, rho, oracle::constant_policy(flat, a));
            CHECK(testing::close(f.M, e.M, 1e-9));
            CHECK(testing::close(f.C, e.C, 1e-9));
            CHECK(testing::close(Eigen::MatrixXd(f.r), Eigen::MatrixXd(e.r), 1e-9));
        }
    }
}

TEST_CASE("an exact basis reproduces the policy value") {
    const DemoModel demo = chain4();
    Basis basis = indicator_basis(demo.model.variables);
    const oracle::FlatMDP flat = oracle::flatten(demo.model);
    const FactoredWeights rho = uniform_weights(demo.model.variables);
    for (ActionIndex a : demo.model.executable_actions()) {
        const Solution s = solve_fixed_point(build_gram_fixed_action(demo.model, basis, rho, a));
        const Eigen::VectorXd v = oracle::exact_policy_value(flat, oracle::constant_policy(flat, a));
        for (int i = 0; i < 4; ++i) CHECK(s.w[i] == doctest::Approx(v[i]).epsilon(1e-8));
    }
}

TEST_CASE("chain4 RRRR under uniform weights matches the explicit projected fixed point") {
    const DemoModel demo = chain4();
    const oracle::FlatMDP flat = oracle::flatten(demo.model);
    const FactoredWeights rho = uniform_weights(demo.model.variables);
    const ActionIndex R = demo.model.action_index("R");
    const Solution s = solve_fixed_point(build_gram_fixed_action(demo.model, demo.basis, rho, R));
    const Eigen::VectorXd e =
        oracle::exact_fixed_point(flat, demo.basis, oracle::joint_weights(flat, rho), oracle::constant_policy(flat, R));
    CHECK(testing::close(Eigen::MatrixXd(s.w), Eigen::MatrixXd(e), 1e-8));
}

TEST_CASE("fixed-point identity and agreement with the iterative scheme") {
    testing::Rng rng(23);
    int iterated = 0;
    for (int trial = 0; trial < 60; ++trial) {
        const testing::Instance inst = testing::random_instance(rng);
        const FactoredMDP& m = inst.model;
        const ActionIndex a = m.executable_actions().front();
        const GramSystem sys = build_gram_fixed_action(m, inst.basis, inst.rho, a);
        const Solution s = solve_fixed_point(sys);
        // w = M^-1 (gamma C w + r)
        const Eigen::VectorXd rhs = sys.M.fullPivLu().solve(s.gamma_used * sys.C * s.w + sys.r);
        CHECK((rhs - s.w).cwiseAbs().maxCoeff() <= 1e-8 * std::max(1.0, s.w.cwiseAbs().maxCoeff()));

        // w(t+1) = M^-1 (gamma C w(t) + r) from w = 0, when it converges.
        const Eigen::FullPivLU<Eigen::MatrixXd> lu(sys.M);
        Eigen::VectorXd w = Eigen::VectorXd::Zero(s.w.size());
        bool converged = false;
        for (int t = 0; t < 10000; ++t) {
            const Eigen::VectorXd next = lu.solve(sys.gamma * sys.C * w + sys.r);
            if (!next.allFinite() || next.cwiseAbs().maxCoeff() > 1e12) break;
            const double step = (next - w).cwiseAbs().maxCoeff();
            w = next;
            if (step < 1e-13) {
                converged = true;
                break;
            }
        }
        if (converged) {
            ++iterated;
            CHECK((w - s.w).cwiseAbs().maxCoeff() <= 1e-6);
        }
    }
    CHECK(iterated > 0);
}

TEST_CASE("singular systems") {
    SUBCASE("a dependent basis is reported, not regularized") {
        const DemoModel demo = dbn5();
        Basis basis = demo.basis;
        basis.functions.push_back(basis.functions[0]);
        CHECK_THROWS_AS(
            solve_fixed_point(build_gram_fixed_action(demo.model, basis, uniform_weights(demo.model.variables), kDefaultAction)),
            SingularSystem);
    }
    SUBCASE("M - gamma C singular at gamma is rescued by perturbation") {
        GramSystem sys;
        sys.M = Eigen::MatrixXd::Identity(2, 2);
        sys.C = Eigen::Vector2d(2.0, 1.0).asDiagonal();
        sys.r = Eigen::VectorXd::Ones(2);
        sys.gamma = 0.5;
        const Solution s = solve_fixed_point(sys);
        CHECK(s.perturbed);
        CHECK(s.gamma_used != 0.5);
        CHECK(std::abs(s.gamma_used - 0.5) <= 0.5 * 1e-6 * 16);
        CHECK(s.residual <= 1e-8);
        // Only one direction degenerates, so the condition number is about 0.5 / (1e-6 * 0.5).
        CHECK(s.condition > 1e5);
        CHECK_FALSE(s.ill_conditioned);
    }
    SUBCASE("a nonsingular system is not perturbed") {
        GramSystem sys;
        sys.M = Eigen::MatrixXd::Identity(2, 2);
        sys.C = Eigen::MatrixXd::Identity(2, 2);
        sys.r = Eigen::VectorXd::Ones(2);
        sys.gamma = 0.5;
        const Solution s = solve_fixed_point(sys);
        CHECK_FALSE(s.perturbed);
        CHECK(s.w[0] == doctest::Approx(2.0));
        CHECK_FALSE(s.ill_conditioned);
    }
}

TEST_CASE("projection") {
    const DemoModel demo = dbn5();
    const FactoredWeights rho = uniform_weights(demo.model.variables);
    Basis basis;
    basis.functions = {Factor::constant(1.0), demo.basis.functions[0], demo.basis.functions[2]};

    SUBCASE("the span is fixed") {
        Factor a = basis.functions[1];
        Factor b = basis.functions[0];
        a *= 2.0;
        b *= 3.0;
        const std::vector<Factor> v{a, b};
        const Eigen::VectorXd w = project(basis, rho, v);
        CHECK(w[0] == doctest::Approx(3.0).epsilon(1e-10));
        CHECK(w[1] == doctest::Approx(2.0).epsilon(1e-10));
        CHECK(std::abs(w[2]) <= 1e-10);
    }
    SUBCASE("orthogonal functions project to zero") {
        // (X_2 - 1/2)(X_4 - 1/2) is orthogonal to 1, X_1 and X_3 under uniform weights.
        const std::vector<Factor> v{make_factor(demo.model.variables, {1, 3}, {0.25, -0.25, -0.25, 0.25})};
        const Eigen::VectorXd w = project(basis, rho, v);
        CHECK(w.cwiseAbs().maxCoeff() <= 1e-12);
    }
    SUBCASE("random targets match the normal equations") {
        testing::Rng rng(24);
        for (int trial = 0; trial < 30; ++trial) {
            const testing::Instance inst = testing::random_instance(rng);
            const int n = static_cast<int>(inst.model.variables.size());
            std::vector<Factor> v;
            for (int t = 0; t < 3; ++t)
                v.push_back(testing::random_factor(rng, inst.model.variables, testing::random_scope(rng, n, 2), -1, 1));
            const oracle::FlatMDP flat = oracle::flatten(inst.model);
            const Eigen::VectorXd e =
                oracle::exact_projection(flat, inst.basis, oracle::joint_weights(flat, inst.rho), oracle::values_of(flat, v));
            CHECK(testing::close(Eigen::MatrixXd(project(inst.basis, inst.rho, v)), Eigen::MatrixXd(e), 1e-9));
        }
    }
}

TEST_CASE("solve_dense") {
    Eigen::MatrixXd a(3, 3);
    a << 0, 2, 1, 1, 1, 1, 2, 0, 3;
    const Eigen::VectorXd b = Eigen::Vector3d(1, 2, 3);
    Eigen::VectorXd x;
    double cond = 0.0;
    REQUIRE(solve_dense(a, b, x, &cond));
    CHECK((a * x - b).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(cond >= 1.0);
    Eigen::MatrixXd s(2, 2);
    s << 1, 2, 2, 4;
    CHECK_FALSE(solve_dense(s, Eigen::Vector2d(1, 1), x));
}
