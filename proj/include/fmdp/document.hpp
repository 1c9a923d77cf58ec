#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "fmdp/error_bounds.hpp"
#include "fmdp/errors.hpp"
#include "fmdp/model.hpp"
#include "fmdp/policy.hpp"
#include "fmdp/policy_iteration.hpp"

namespace fmdp {

/// A document that is not valid JSON or does not have the expected shape.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Model file contents: the MDP, its basis, and optional weights and coefficients.
struct ModelDocument {
    FactoredMDP model;
    Basis basis;
    std::optional<FactoredWeights> weights;
};

ModelDocument parse_model_document(const std::string& text);
nlohmann::json to_json(const ModelDocument& doc);

/// Weights as {"clusters": [...]}, or a model document carrying a "weights" key.
FactoredWeights parse_weights(const nlohmann::json& j, const Domain& domain);
nlohmann::json to_json(const FactoredWeights& weights);

/// Rounds to 12 significant digits, the precision every report number carries.
double report_number(double x);

nlohmann::json to_json(const DecisionListPolicy& policy, const FactoredMDP& model);
DecisionListPolicy parse_decision_list(const nlohmann::json& j, const FactoredMDP& model);

nlohmann::json to_json(const ErrorReport& report, const FactoredMDP& model);
nlohmann::json to_json(const Solution& solution);
nlohmann::json to_json(const RunTrace& trace, const FactoredMDP& model);

/// Reads a numeric array, e.g. a coefficient file ([..] or {"coefficients": [..]}).
std::vector<double> parse_coefficients(const std::string& text);

/// Parses text as JSON, reporting syntax errors with line and column.
nlohmann::json parse_json(const std::string& text);

}  // namespace fmdp
