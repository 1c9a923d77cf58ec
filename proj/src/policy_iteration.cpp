#include "fmdp/policy_iteration.hpp"

#include <chrono>
#include <limits>
#include <random>

#include "fmdp/errors.hpp"
#include "fmdp/list_gram.hpp"
#include "fmdp/oracle.hpp"

namespace fmdp {

const char* to_string(RunStatus status) {
    switch (status) {
        case RunStatus::Converged: return "Converged";
        case RunStatus::Oscillating: return "Oscillating";
        case RunStatus::MaxIterations: return "MaxIterations";
        case RunStatus::Failed: return "Failed";
    }
    return "?";
}

namespace {

Basis with_coefficients(const Basis& basis, const Eigen::VectorXd& w) {
    Basis out = basis;
    out.coefficients = std::vector<double>(w.data(), w.data() + w.size());
    return out;
}

ActionIndex choose_start(const FactoredMDP& model, const RunConfig& config) {
    const auto actions = model.executable_actions();
    if (config.start_action.empty()) return actions.front();
    if (config.start_action == "random") {
        std::mt19937_64 rng(config.seed);
        std::uniform_int_distribution<std::size_t> pick(0, actions.size() - 1);
        return actions[pick(rng)];
    }
    return model.action_index(config.start_action);
}

bool always_takes(const DecisionListPolicy& policy, ActionIndex action) {
    for (const auto& c : policy.conditionals)
        if (c.action != action) return false;
    return !policy.fallback || *policy.fallback == action;
}

// Evaluates either the fixed start action (policy == nullptr) or a decision list.
class Evaluator {
public:
    Evaluator(const FactoredMDP& model, const Basis& basis, const RunConfig& config)
        : model_(model), basis_(basis), config_(config) {
        switch (config.weight_mode) {
            case WeightMode::Uniform: weights_ = uniform_weights(model.variables); break;
            case WeightMode::Custom:
                if (!config.weights) throw ModelError("custom weight mode requires weights");
                weights_ = *config.weights;
                break;
            case WeightMode::StationaryOracle: flat_ = oracle::flatten(model); break;
        }
    }

    Solution solve(ActionIndex start, const DecisionListPolicy* policy) const {
        if (flat_) {
            const oracle::FlatPolicy fp =
                policy ? oracle::flat_policy(*flat_, *policy) : oracle::constant_policy(*flat_, start);
            const Eigen::VectorXd rho = oracle::stationary_distribution(*flat_, fp);
            return solve_fixed_point(oracle::exact_gram(*flat_, basis_, rho, fp));
        }
        if (!policy) return solve_fixed_point(build_gram_fixed_action(model_, basis_, weights_, start, config_.cap));
        return solve_decision_list_policy(model_, basis_, weights_, *policy, config_.cap);
    }

    const FactoredWeights* factored() const { return flat_ ? nullptr : &weights_; }

private:
    const FactoredMDP& model_;
    const Basis& basis_;
    const RunConfig& config_;
    FactoredWeights weights_;
    std::optional<oracle::FlatMDP> flat_;
};

}  // namespace

RunTrace run_policy_iteration(const FactoredMDP& model, const Basis& basis, const RunConfig& config, bool rethrow) {
    if (config.max_iterations < 1) throw ModelError("max iterations must be at least 1");
    RunTrace trace;
    try {
        trace.start_action = choose_start(model, config);
        const Evaluator evaluator(model, basis, config);
        for (int it = 1; it <= config.max_iterations; ++it) {
            const auto started = std::chrono::steady_clock::now();
            const DecisionListPolicy* evaluated = it == 1 ? nullptr : &trace.iterations.back().policy;

            IterationRecord rec;
            rec.iteration = it;
            rec.solution = evaluator.solve(trace.start_action, evaluated);
            const Basis solved = with_coefficients(basis, rec.solution.w);
            rec.policy = extract_decision_list(model, solved, {.prune = config.prune}, config.cap);
            if (config.bounds) {
                rec.greedy_error = bellman_error_greedy(model, solved, *config.bounds, config.cap);
                rec.policy_error = bellman_error_policy(model, solved, evaluated ? *evaluated : catch_all(trace.start_action),
                                                        *config.bounds, config.cap);
            }
            rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
            trace.iterations.push_back(std::move(rec));

            const DecisionListPolicy& latest = trace.iterations.back().policy;
            if (it == 1 && always_takes(latest, trace.start_action)) {
                trace.status = RunStatus::Converged;
                break;
            }
            if (it >= 2 && same_structure(latest, trace.iterations[trace.iterations.size() - 2].policy)) {
                trace.status = RunStatus::Converged;
                break;
            }
            bool cycled = false;
            for (std::size_t s = 0; s + 2 < trace.iterations.size(); ++s)
                if (same_structure(latest, trace.iterations[s].policy)) {
                    trace.status = RunStatus::Oscillating;
                    trace.cycle_length = static_cast<int>(trace.iterations.size() - 1 - s);
                    cycled = true;
                    break;
                }
            if (cycled) break;
            trace.status = RunStatus::MaxIterations;
        }
    } catch (const Error& e) {
        trace.status = RunStatus::Failed;
        trace.error = e.what();
        if (rethrow) throw;
    }
    return trace;
}

FactoredWeights boost_witness(const FactoredWeights& weights, std::span<const int> witness, double eta) {
    FactoredWeights out = weights;
    for (Factor& m : out.marginals) {
        std::vector<int> values;
        for (VarId v : m.scope()) values.push_back(witness[static_cast<std::size_t>(v)]);
        m[m.index_of(values)] *= 1.0 + eta;
        double sum = 0.0;
        for (double p : m.table()) sum += p;
        m *= 1.0 / sum;
    }
    return out;
}

FactoredWeights refine_weights(const FactoredMDP& model, const Basis& basis, const RunConfig& config,
                               const FactoredWeights& initial, RunTrace& trace) {
    if (trace.iterations.empty()) throw ModelError("refinement needs a trace with at least one iteration");
    const DecisionListPolicy& policy = trace.final_policy();
    const ErrorDirection direction = config.bounds.value_or(ErrorDirection::OneSided);
    FactoredWeights current = initial;
    FactoredWeights best = initial;
    double best_eps = std::numeric_limits<double>::infinity();
    for (int round = 0; round <= config.refine_rounds; ++round) {
        const Solution sol = solve_decision_list_policy(model, basis, current, policy, config.cap);
        const Basis solved = with_coefficients(basis, sol.w);
        const ErrorReport err = bellman_error_policy(model, solved, policy, direction, config.cap);
        trace.refinements.push_back({round, err.epsilon, err.witness, sol.w});
        if (err.epsilon < best_eps) {
            best_eps = err.epsilon;
            best = current;
        }
        if (err.epsilon <= config.refine_threshold || round == config.refine_rounds) break;
        current = boost_witness(current, err.witness, config.refine_eta);
    }
    return best;
}

std::string policy_string(const FactoredMDP& model, const DecisionListPolicy& policy) {
    if (model.variables.state_count() > 64) return {};
    const oracle::FlatMDP flat = oracle::flatten(model);
    bool single = model.default_id.size() == 1;
    for (const ActionSpec& a : model.actions) single = single && a.id.size() == 1;
    std::string out;
    for (std::size_t s = 0; s < flat.N; ++s) {
        if (!single && s > 0) out += ',';
        out += model.action_name(apply_policy(policy, flat.state(s)));
    }
    return out;
}

}  // namespace fmdp
