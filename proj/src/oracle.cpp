#include "fmdp/oracle.hpp"

#include <cmath>
#include <functional>
#include <limits>

#include "fmdp/errors.hpp"

namespace fmdp::oracle {

std::vector<int> FlatMDP::state(std::size_t index) const {
    std::vector<int> s(domain.size());
    for (std::size_t v = domain.size(); v-- > 0;) {
        const auto c = static_cast<std::size_t>(domain.cardinality(static_cast<VarId>(v)));
        s[v] = static_cast<int>(index % c);
        index /= c;
    }
    return s;
}

std::size_t FlatMDP::index(std::span<const int> state) const {
    std::size_t idx = 0;
    for (std::size_t v = 0; v < domain.size(); ++v)
        idx = idx * static_cast<std::size_t>(domain.cardinality(static_cast<VarId>(v))) + static_cast<std::size_t>(state[v]);
    return idx;
}

namespace {

Eigen::MatrixXd transition_matrix(const FactoredMDP& model, const FlatMDP& flat, ActionIndex a,
                                  const std::vector<std::vector<int>>& states) {
    const std::size_t n = flat.N;
    const std::size_t vars = flat.domain.size();
    std::vector<const Cpd*> cpds(vars);
    for (std::size_t v = 0; v < vars; ++v) cpds[v] = &action_cpd(model, a, static_cast<VarId>(v));
    Eigen::MatrixXd P(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    std::vector<std::size_t> rows(vars);
    for (std::size_t s = 0; s < n; ++s) {
        for (std::size_t v = 0; v < vars; ++v) {
            std::size_t r = 0;
            for (std::size_t i = 0; i < cpds[v]->parents.size(); ++i)
                r = r * static_cast<std::size_t>(cpds[v]->parent_cards[i]) +
                    static_cast<std::size_t>(states[s][static_cast<std::size_t>(cpds[v]->parents[i])]);
            rows[v] = r;
        }
        for (std::size_t t = 0; t < n; ++t) {
            double p = 1.0;
            for (std::size_t v = 0; v < vars && p != 0.0; ++v) p *= cpds[v]->prob(rows[v], states[t][v]);
            P(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(t)) = p;
        }
    }
    return P;
}

}  // namespace

FlatMDP flatten(const FactoredMDP& model, std::size_t cap) {
    const double count = model.variables.state_count();
    if (count > static_cast<double>(cap))
        throw StateSpaceTooLarge("state space of " + std::to_string(count) + " states exceeds the oracle cap of " +
                                 std::to_string(cap));
    FlatMDP flat;
    flat.domain = model.variables;
    flat.N = static_cast<std::size_t>(count);
    flat.gamma = model.gamma;
    flat.executable = model.executable_actions();
    std::vector<std::vector<int>> states(flat.N);
    for (std::size_t s = 0; s < flat.N; ++s) states[s] = flat.state(s);
    flat.default_P = transition_matrix(model, flat, kDefaultAction, states);
    for (std::size_t a = 0; a < model.actions.size(); ++a)
        flat.P.push_back(transition_matrix(model, flat, static_cast<ActionIndex>(a), states));
    flat.R.resize(static_cast<Eigen::Index>(flat.N));
    for (std::size_t s = 0; s < flat.N; ++s) flat.R(static_cast<Eigen::Index>(s)) = evaluate(model.reward.terms, states[s]);
    return flat;
}

Eigen::MatrixXd policy_matrix(const FlatMDP& flat, const FlatPolicy& policy) {
    Eigen::MatrixXd P(static_cast<Eigen::Index>(flat.N), static_cast<Eigen::Index>(flat.N));
    for (std::size_t s = 0; s < flat.N; ++s)
        P.row(static_cast<Eigen::Index>(s)) = flat.transition(policy[s]).row(static_cast<Eigen::Index>(s));
    return P;
}

FlatPolicy constant_policy(const FlatMDP& flat, ActionIndex action) { return FlatPolicy(flat.N, action); }

FlatPolicy flat_policy(const FlatMDP& flat, const DecisionListPolicy& policy) {
    FlatPolicy out(flat.N);
    for (std::size_t s = 0; s < flat.N; ++s) out[s] = apply_policy(policy, flat.state(s));
    return out;
}

Eigen::VectorXd exact_policy_value(const FlatMDP& flat, const FlatPolicy& policy) {
    const auto n = static_cast<Eigen::Index>(flat.N);
    const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) - flat.gamma * policy_matrix(flat, policy);
    return a.partialPivLu().solve(flat.R);
}

Eigen::VectorXd iterate_policy_value(const FlatMDP& flat, const FlatPolicy& policy, double tolerance) {
    const Eigen::MatrixXd P = policy_matrix(flat, policy);
    Eigen::VectorXd V = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(flat.N));
    for (int it = 0; it < 1000000; ++it) {
        Eigen::VectorXd next = flat.R + flat.gamma * P * V;
        const double step = (next - V).cwiseAbs().maxCoeff();
        V = std::move(next);
        if (step < tolerance * (1.0 - flat.gamma)) break;
    }
    return V;
}

Eigen::VectorXd q_values(const FlatMDP& flat, const Eigen::VectorXd& V, ActionIndex action) {
    return flat.R + flat.gamma * flat.transition(action) * V;
}

Eigen::VectorXd value_iteration(const FlatMDP& flat, double tolerance) {
    Eigen::VectorXd V = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(flat.N));
    for (int it = 0; it < 1000000; ++it) {
        Eigen::VectorXd next = Eigen::VectorXd::Constant(V.size(), -std::numeric_limits<double>::infinity());
        for (ActionIndex a : flat.executable) next = next.cwiseMax(q_values(flat, V, a));
        const double step = (next - V).cwiseAbs().maxCoeff();
        V = std::move(next);
        if (step < tolerance * (1.0 - flat.gamma)) break;
    }
    return V;
}

FlatPolicy greedy_policy(const FlatMDP& flat, const Eigen::VectorXd& V, double tolerance) {
    std::vector<Eigen::VectorXd> q;
    for (ActionIndex a : flat.executable) q.push_back(q_values(flat, V, a));
    FlatPolicy out(flat.N);
    for (std::size_t s = 0; s < flat.N; ++s) {
        const auto si = static_cast<Eigen::Index>(s);
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& qa : q) best = std::max(best, qa(si));
        // executable lists listed actions in index order, then d.
        for (std::size_t k = 0; k < q.size(); ++k)
            if (q[k](si) >= best - tolerance * (1.0 + std::abs(best))) {
                out[s] = flat.executable[k];
                break;
            }
    }
    return out;
}

ExactSolution exact_policy_iteration(const FlatMDP& flat, int max_iterations) {
    ExactSolution sol;
    sol.policy = constant_policy(flat, flat.executable.front());
    for (sol.iterations = 1; sol.iterations <= max_iterations; ++sol.iterations) {
        sol.V = exact_policy_value(flat, sol.policy);
        FlatPolicy next = greedy_policy(flat, sol.V);
        if (next == sol.policy) break;
        sol.policy = std::move(next);
    }
    return sol;
}

namespace {

// Number of closed communicating classes of the chain with transition matrix P.
std::size_t closed_classes(const Eigen::MatrixXd& P) {
    const auto n = static_cast<std::size_t>(P.rows());
    std::vector<std::vector<std::size_t>> adj(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (P(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) > 0.0) adj[i].push_back(j);

    // Tarjan's strongly connected components.
    std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    int counter = 0, comps = 0;
    std::function<void(std::size_t)> visit = [&](std::size_t v) {
        index[v] = low[v] = counter++;
        stack.push_back(v);
        on_stack[v] = true;
        for (std::size_t w : adj[v]) {
            if (index[w] < 0) {
                visit(w);
                low[v] = std::min(low[v], low[w]);
            } else if (on_stack[w]) {
                low[v] = std::min(low[v], index[w]);
            }
        }
        if (low[v] == index[v]) {
            std::size_t w;
            do {
                w = stack.back();
                stack.pop_back();
                on_stack[w] = false;
                comp[w] = comps;
            } while (w != v);
            ++comps;
        }
    };
    for (std::size_t v = 0; v < n; ++v)
        if (index[v] < 0) visit(v);

    std::vector<bool> leaks(static_cast<std::size_t>(comps), false);
    for (std::size_t v = 0; v < n; ++v)
        for (std::size_t w : adj[v])
            if (comp[v] != comp[w]) leaks[static_cast<std::size_t>(comp[v])] = true;
    return static_cast<std::size_t>(std::count(leaks.begin(), leaks.end(), false));
}

}  // namespace

Eigen::VectorXd stationary_distribution(const FlatMDP& flat, const FlatPolicy& policy) {
    const Eigen::MatrixXd P = policy_matrix(flat, policy);
    if (closed_classes(P) != 1)
        throw NonUniqueStationary("induced chain has more than one closed class; stationary distribution not unique");
    const auto n = P.rows();

    // The lazy chain (I + P) / 2 is aperiodic and shares the stationary distribution.
    const Eigen::MatrixXd lazy = 0.5 * (Eigen::MatrixXd::Identity(n, n) + P);
    Eigen::RowVectorXd pi = Eigen::RowVectorXd::Constant(n, 1.0 / static_cast<double>(n));
    for (int it = 0; it < 200000; ++it) {
        pi = pi * lazy;
        if (it % 16 == 0 && (pi * P - pi).cwiseAbs().maxCoeff() < 1e-14) return pi.transpose() / pi.sum();
    }
    // Fallback: solve pi (P - I) = 0 with the last equation replaced by sum(pi) = 1.
    Eigen::MatrixXd a = (P - Eigen::MatrixXd::Identity(n, n)).transpose();
    a.row(n - 1).setOnes();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    b(n - 1) = 1.0;
    return a.fullPivLu().solve(b);
}

Eigen::MatrixXd basis_matrix(const FlatMDP& flat, const Basis& basis) {
    Eigen::MatrixXd A(static_cast<Eigen::Index>(flat.N), static_cast<Eigen::Index>(basis.size()));
    for (std::size_t s = 0; s < flat.N; ++s) {
        const auto state = flat.state(s);
        for (std::size_t j = 0; j < basis.size(); ++j)
            A(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(j)) = basis.functions[j].at_state(state);
    }
    return A;
}

Eigen::VectorXd values_of(const FlatMDP& flat, std::span<const Factor> terms) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(flat.N));
    for (std::size_t s = 0; s < flat.N; ++s) v(static_cast<Eigen::Index>(s)) = evaluate(terms, flat.state(s));
    return v;
}

Eigen::VectorXd joint_weights(const FlatMDP& flat, const FactoredWeights& rho) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(flat.N));
    for (std::size_t s = 0; s < flat.N; ++s) {
        const auto state = flat.state(s);
        double p = 1.0;
        for (const Factor& m : rho.marginals) p *= m.at_state(state);
        v(static_cast<Eigen::Index>(s)) = p;
    }
    return v;
}

GramSystem exact_gram(const FlatMDP& flat, const Basis& basis, const Eigen::VectorXd& weights,
                      const FlatPolicy& policy) {
    const Eigen::MatrixXd A = basis_matrix(flat, basis);
    const Eigen::MatrixXd LA = weights.asDiagonal() * A;
    GramSystem sys;
    sys.gamma = flat.gamma;
    sys.M = A.transpose() * LA;
    sys.C = LA.transpose() * policy_matrix(flat, policy) * A;
    sys.r = LA.transpose() * flat.R;
    return sys;
}

Eigen::VectorXd exact_projection(const FlatMDP& flat, const Basis& basis, const Eigen::VectorXd& weights,
                                 const Eigen::VectorXd& v) {
    const Eigen::MatrixXd A = basis_matrix(flat, basis);
    const Eigen::MatrixXd LA = weights.asDiagonal() * A;
    return (A.transpose() * LA).fullPivLu().solve(LA.transpose() * v);
}

Eigen::VectorXd exact_fixed_point(const FlatMDP& flat, const Basis& basis, const Eigen::VectorXd& weights,
                                  const FlatPolicy& policy) {
    const GramSystem sys = exact_gram(flat, basis, weights, policy);
    return (sys.M - sys.gamma * sys.C).fullPivLu().solve(sys.r);
}

ExactError bellman_error_greedy(const FlatMDP& flat, const Eigen::VectorXd& V) {
    ExactError e;
    e.one_sided = -std::numeric_limits<double>::infinity();
    Eigen::VectorXd best = Eigen::VectorXd::Constant(V.size(), -std::numeric_limits<double>::infinity());
    for (ActionIndex a : flat.executable) {
        const Eigen::VectorXd q = q_values(flat, V, a);
        best = best.cwiseMax(q);
        Eigen::Index arg;
        const double m = (q - V).maxCoeff(&arg);
        if (m > e.one_sided) {
            e.one_sided = m;
            e.argmax = static_cast<std::size_t>(arg);
        }
    }
    e.other_side = (V - best).maxCoeff();
    return e;
}

ExactError bellman_error_policy(const FlatMDP& flat, const Eigen::VectorXd& V, const FlatPolicy& policy) {
    const Eigen::VectorXd backup = flat.R + flat.gamma * policy_matrix(flat, policy) * V;
    ExactError e;
    Eigen::Index arg;
    e.one_sided = (V - backup).maxCoeff(&arg);
    e.argmax = static_cast<std::size_t>(arg);
    e.other_side = (backup - V).maxCoeff();
    return e;
}

}  // namespace fmdp::oracle
