#pragma once

#include <string>

#include "fmdp/model.hpp"

namespace fmdp {

struct DemoModel {
    std::string name;
    FactoredMDP model;
    Basis basis;
};

/// What happens to a move that would leave the chain.
enum class BoundaryConvention {
    SelfLoop,  ///< the move fails in place
    Reflect,   ///< the move goes to the other neighbour instead
};

/// Four states s_0..s_3 as one 4-valued variable; actions L and R move in their direction
/// with probability 0.9 and the other way with 0.1; reward 1 in s_1 and s_2; basis {1, x, x^2}.
/// The non-executable default model stays put.
DemoModel chain4(BoundaryConvention boundary = BoundaryConvention::SelfLoop, double gamma = 0.9);

/// Five binary variables. Default: X'_1 persists with 0.9; X'_i (i >= 2) turns on with
/// probability 0.9 [X_i] + 0.1 [X_{i-1}]. Action a_i sets X'_i on with probability 0.95
/// (same parents as the default). Executable default d. R = [X_5 = 1], h_i = [X_i = 1].
DemoModel dbn5(double gamma = 0.9);

/// Throws ModelError for a name other than "chain4" or "dbn5".
DemoModel build_demo(const std::string& name);

}  // namespace fmdp
