#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fmdp/error_bounds.hpp"
#include "fmdp/policy.hpp"
#include "fmdp/value_determination.hpp"

namespace fmdp {

enum class WeightMode {
    Uniform,
    Custom,
    /// Stationary distribution of the current policy, computed on the explicit state space.
    /// Small models only; exists to reproduce the failure of stationary-weighted projection.
    StationaryOracle,
};

struct RunConfig {
    int max_iterations = 50;
    WeightMode weight_mode = WeightMode::Uniform;
    std::optional<FactoredWeights> weights;  ///< required for WeightMode::Custom
    bool prune = true;
    /// Compute Bellman errors every iteration in this mode.
    std::optional<ErrorDirection> bounds;
    int refine_rounds = 0;
    double refine_eta = 0.5;
    double refine_threshold = 1e-9;
    std::uint64_t seed = 0;
    /// Action of the initial fixed policy; the first listed action when empty, "random" to
    /// draw one with `seed`.
    std::string start_action;
    std::size_t cap = kDefaultTableCap;
};

enum class RunStatus { Converged, Oscillating, MaxIterations, Failed };

const char* to_string(RunStatus status);

struct IterationRecord {
    int iteration = 0;
    Solution solution;
    DecisionListPolicy policy;  ///< greedy policy extracted from this iteration's solution
    std::optional<ErrorReport> greedy_error;
    std::optional<ErrorReport> policy_error;
    double wall_seconds = 0.0;
};

struct RefinementRecord {
    int round = 0;
    double epsilon = 0.0;
    std::vector<int> witness;
    Eigen::VectorXd w;
};

struct RunTrace {
    ActionIndex start_action = kDefaultAction;
    std::vector<IterationRecord> iterations;
    RunStatus status = RunStatus::MaxIterations;
    int cycle_length = 0;
    std::string error;
    std::vector<RefinementRecord> refinements;

    const DecisionListPolicy& final_policy() const { return iterations.back().policy; }
};

/// Approximate policy iteration from a fixed-action policy. Stops when the extracted list
/// repeats the previous one (Converged), repeats an older one (Oscillating), or after
/// max_iterations. Errors abort the run with status Failed; the exception is rethrown
/// when `rethrow` is set.
RunTrace run_policy_iteration(const FactoredMDP& model, const Basis& basis, const RunConfig& config,
                              bool rethrow = false);

/// Multiplies each cluster marginal's entry at the witness by (1 + eta) and renormalizes.
FactoredWeights boost_witness(const FactoredWeights& weights, std::span<const int> witness, double eta);

/// Witness-boosting loop on the final policy of `trace`: evaluate, measure the policy's
/// Bellman error, boost the witness, repeat for config.refine_rounds. Returns the weights
/// that gave the smallest error and appends one record per round to the trace.
/// The error direction is config.bounds, one-sided when unset. In symmetric mode the
/// witness can alternate between states and the error need not fall.
FactoredWeights refine_weights(const FactoredMDP& model, const Basis& basis, const RunConfig& config,
                               const FactoredWeights& initial, RunTrace& trace);

/// Action ids per state concatenated ("RRLL"), comma-separated when some id is longer than one
/// character. Empty for models with more than 64 states.
std::string policy_string(const FactoredMDP& model, const DecisionListPolicy& policy);

}  // namespace fmdp
