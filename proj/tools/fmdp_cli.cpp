// fmdp: command-line front end for the factored MDP planner.
//
// Exit codes: 0 ok / converged, 1 diagnostics, 2 parse error, 3 oscillating,
// 4 max iterations, 5 solver error, 6 width or table cap exceeded, 7 state space too large.

#include <CLI11.hpp>

#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

#include "fmdp/demos.hpp"
#include "fmdp/document.hpp"
#include "fmdp/error_bounds.hpp"
#include "fmdp/errors.hpp"
#include "fmdp/list_gram.hpp"
#include "fmdp/oracle.hpp"
#include "fmdp/policy.hpp"
#include "fmdp/policy_iteration.hpp"
#include "fmdp/value_determination.hpp"

using nlohmann::json;
using namespace fmdp;

namespace {

enum Exit { kOk = 0, kDiagnostics = 1, kParse = 2, kOscillating = 3, kMaxIter = 4, kSolver = 5, kWidth = 6, kTooLarge = 7 };

struct Options {
    std::string model;
    std::string weights;
    std::string policy;
    std::string coefficients;
    std::string out;
    std::string export_file;
    std::string start;
    std::optional<double> gamma;
    int max_iter = 50;
    bool prune = true;
    bool bounds = false;
    bool symmetric = false;
    bool json_stdout = false;
    int refine = 0;
    std::uint64_t seed = 0;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path + ": cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ModelDocument load_model(const Options& o) {
    ModelDocument doc;
    if (o.model == "chain4" || o.model == "dbn5") {
        DemoModel demo = build_demo(o.model);
        doc.model = std::move(demo.model);
        doc.basis = std::move(demo.basis);
    } else {
        doc = parse_model_document(read_file(o.model));
    }
    if (o.gamma) doc.model.gamma = *o.gamma;
    return doc;
}

std::vector<Diagnostic> diagnostics(const ModelDocument& doc) {
    std::vector<Diagnostic> all = validate(doc.model);
    for (auto& d : validate(doc.basis, doc.model.variables)) all.push_back(d);
    if (doc.weights)
        for (auto& d : validate(*doc.weights, doc.model.variables)) all.push_back(d);
    for (const Diagnostic& d : all) std::cerr << d.path << ": " << d.message << "\n";
    return all;
}

json diagnostics_json(const std::vector<Diagnostic>& diags) {
    json out = json::array();
    for (const Diagnostic& d : diags) out.push_back({{"path", d.path}, {"message", d.message}});
    return out;
}

FactoredWeights load_weights(const Options& o, const ModelDocument& doc) {
    if (o.weights.empty()) return doc.weights ? *doc.weights : uniform_weights(doc.model.variables);
    if (o.weights == "uniform") return uniform_weights(doc.model.variables);
    FactoredWeights w = parse_weights(parse_json(read_file(o.weights)), doc.model.variables);
    auto diags = validate(w, doc.model.variables);
    if (!diags.empty()) throw ModelError("weights: " + diags.front().path + ": " + diags.front().message);
    return w;
}

std::vector<std::string> split_actions(const std::string& s) {
    std::vector<std::string> out;
    if (s.find(',') != std::string::npos) {
        std::stringstream ss(s);
        for (std::string item; std::getline(ss, item, ',');) out.push_back(item);
    } else {
        for (char c : s) out.emplace_back(1, c);
    }
    return out;
}

// fixed:ACTION, fixed-string:RRLL (one action per state, comma-separated for longer ids), or a
// decision-list file.
DecisionListPolicy load_policy(const std::string& spec, const FactoredMDP& model) {
    if (spec.rfind("fixed:", 0) == 0) return catch_all(model.action_index(spec.substr(6)));
    if (spec.rfind("fixed-string:", 0) == 0) {
        const std::vector<std::string> ids = split_actions(spec.substr(13));
        const Scope all = model.variables.all();
        const std::vector<int> cards = model.variables.cards(all);
        if (static_cast<double>(ids.size()) != model.variables.state_count())
            throw ParseError("fixed-string policy has " + std::to_string(ids.size()) + " actions for " +
                             std::to_string(table_size(cards)) + " states");
        DecisionListPolicy p;
        const Factor index(all, cards, std::vector<double>(ids.size(), 0.0));
        for (std::size_t s = 0; s < ids.size(); ++s)
            p.conditionals.push_back({Assignment{all, index.values_at(s)}, model.action_index(ids[s]), 0.0});
        p.unpruned_size = p.conditionals.size();
        return p;
    }
    json j = parse_json(read_file(spec));
    if (j.is_object() && j.contains("policy") && !j.contains("conditionals")) j = j["policy"];
    return parse_decision_list(j, model);
}

json witness_json(const FactoredMDP& model, std::span<const int> state) {
    json w = json::object();
    for (std::size_t v = 0; v < state.size(); ++v) w[model.variables[static_cast<VarId>(v)].name] = state[v];
    return w;
}

json vector_json(const Eigen::VectorXd& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(report_number(v[i]));
    return out;
}

std::string fmt(double x) {
    std::ostringstream ss;
    ss.precision(12);
    ss << x;
    return ss.str();
}

std::string flat_string(const FactoredMDP& model, const oracle::FlatPolicy& p) {
    std::string s;
    bool single = true;
    for (ActionIndex a : p) single = single && model.action_name(a).size() == 1;
    for (std::size_t i = 0; i < p.size(); ++i) s += (single || i == 0 ? "" : ",") + model.action_name(p[i]);
    return s;
}

// Where reports go with --json. With --json the narrative moves to stderr so stdout holds
// only the report.
std::ostream* report_stream = &std::cout;

void write_report(json body, const std::string& command, int code, const Options& o, double wall) {
    body["command"] = command;
    body["exit_code"] = code;
    const std::time_t now = std::time(nullptr);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    body["timing"] = {{"timestamp", stamp}, {"wall_seconds", wall}};
    if (!o.out.empty()) {
        std::ofstream out(o.out, std::ios::binary);
        out << body.dump(2) << "\n";
        if (!out) std::cerr << "error: cannot write " << o.out << "\n";
    }
    if (o.json_stdout) *report_stream << body.dump(2) << "\n" << std::flush;
}

class Reporter {
public:
    Reporter(std::string command, const Options& o) : command_(std::move(command)), options_(o) {
        started_ = std::chrono::steady_clock::now();
    }

    // The report carries everything except timing in fields that are identical across runs.
    int finish(json body, int code) {
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started_).count();
        write_report(std::move(body), command_, code, options_, wall);
        return code;
    }

    // Validation failures end the command with their diagnostics as the report.
    std::optional<int> reject(const ModelDocument& doc) {
        const auto diags = diagnostics(doc);
        if (diags.empty()) return std::nullopt;
        return finish({{"diagnostics", diagnostics_json(diags)}}, kDiagnostics);
    }

private:
    std::string command_;
    const Options& options_;
    std::chrono::steady_clock::time_point started_;
};

int cmd_validate(const Options& o) {
    Reporter rep("validate", o);
    ModelDocument doc = load_model(o);
    if (auto code = rep.reject(doc)) return *code;
    std::cout << "ok: " << doc.model.variables.size() << " variables, " << doc.model.actions.size() << " actions, "
              << doc.basis.size() << " basis functions\n";
    return rep.finish({{"diagnostics", json::array()},
                       {"variables", doc.model.variables.size()},
                       {"actions", doc.model.actions.size()},
                       {"basis_functions", doc.basis.size()}},
                      kOk);
}

RunConfig run_config(const Options& o, const ModelDocument& doc) {
    RunConfig config;
    config.max_iterations = o.max_iter;
    config.prune = o.prune;
    if (o.bounds) config.bounds = o.symmetric ? ErrorDirection::Symmetric : ErrorDirection::OneSided;
    config.refine_rounds = o.refine;
    config.seed = o.seed;
    config.start_action = o.start;
    if (o.weights == "stationary-oracle") {
        config.weight_mode = WeightMode::StationaryOracle;
    } else {
        config.weight_mode = WeightMode::Custom;
        config.weights = load_weights(o, doc);
    }
    return config;
}

void print_trace(const RunTrace& trace, const FactoredMDP& model) {
    std::string start = model.action_name(trace.start_action);
    std::cout << "start: always " << start << "\n";
    for (const IterationRecord& r : trace.iterations) {
        std::cout << "iteration " << r.iteration << ": w = [";
        for (Eigen::Index i = 0; i < r.solution.w.size(); ++i) std::cout << (i ? ", " : "") << fmt(r.solution.w[i]);
        std::cout << "]" << (r.solution.perturbed ? " (gamma perturbed)" : "") << "\n";
        std::cout << "  decision list: " << r.policy.conditionals.size() << " conditionals ("
                  << r.policy.unpruned_size << " before pruning)\n";
        if (const std::string s = policy_string(model, r.policy); !s.empty()) std::cout << "  policy: " << s << "\n";
        if (r.greedy_error)
            std::cout << "  greedy Bellman error: " << fmt(r.greedy_error->epsilon)
                      << ", loss bound: " << fmt(r.greedy_error->loss_bound) << "\n";
        if (r.policy_error) std::cout << "  policy Bellman error: " << fmt(r.policy_error->epsilon) << "\n";
    }
    std::cout << "status: " << to_string(trace.status);
    if (trace.status == RunStatus::Oscillating) std::cout << " (cycle length " << trace.cycle_length << ")";
    std::cout << "\n";
    if (!trace.error.empty()) std::cout << "error: " << trace.error << "\n";
    for (const RefinementRecord& r : trace.refinements)
        std::cout << "refinement " << r.round << ": epsilon " << fmt(r.epsilon) << "\n";
    if (!trace.iterations.empty()) std::cout << render(trace.final_policy(), model);
}

int status_code(RunStatus s) {
    switch (s) {
        case RunStatus::Converged: return kOk;
        case RunStatus::Oscillating: return kOscillating;
        case RunStatus::MaxIterations: return kMaxIter;
        case RunStatus::Failed: return kSolver;
    }
    return kSolver;
}

int cmd_solve(const Options& o) {
    Reporter rep("solve", o);
    ModelDocument doc = load_model(o);
    if (auto code = rep.reject(doc)) return *code;
    RunConfig config = run_config(o, doc);
    RunTrace trace = run_policy_iteration(doc.model, doc.basis, config, true);
    if (config.refine_rounds > 0 && config.weight_mode != WeightMode::StationaryOracle && !trace.iterations.empty())
        refine_weights(doc.model, doc.basis, config, *config.weights, trace);
    print_trace(trace, doc.model);
    json body = {{"trace", to_json(trace, doc.model)}};
    if (!trace.iterations.empty()) {
        const IterationRecord& last = trace.iterations.back();
        body["solution"] = to_json(last.solution);
        body["policy"] = to_json(last.policy, doc.model);
        if (last.greedy_error) body["error"] = to_json(*last.greedy_error, doc.model);
    }
    return rep.finish(body, status_code(trace.status));
}

int cmd_evaluate(const Options& o) {
    Reporter rep("evaluate", o);
    ModelDocument doc = load_model(o);
    if (auto code = rep.reject(doc)) return *code;
    const FactoredWeights rho = load_weights(o, doc);
    const DecisionListPolicy policy = load_policy(o.policy, doc.model);
    const Solution s = solve_decision_list_policy(doc.model, doc.basis, rho, policy);
    std::cout << "w = [";
    for (Eigen::Index i = 0; i < s.w.size(); ++i) std::cout << (i ? ", " : "") << fmt(s.w[i]);
    std::cout << "]\nresidual: " << fmt(s.residual) << "\n";
    if (s.perturbed) std::cout << "gamma perturbed to " << fmt(s.gamma_used) << "\n";
    if (s.ill_conditioned) std::cout << "warning: ill-conditioned system (condition " << fmt(s.condition) << ")\n";
    return rep.finish({{"solution", to_json(s)}, {"policy", to_json(policy, doc.model)}}, kOk);
}

Basis with_coefficients(const Options& o, Basis basis) {
    std::vector<double> w = parse_coefficients(read_file(o.coefficients));
    if (w.size() != basis.size())
        throw ParseError("coefficients: expected " + std::to_string(basis.size()) + " numbers, got " +
                         std::to_string(w.size()));
    basis.coefficients = std::move(w);
    return basis;
}

int cmd_bellman(const Options& o) {
    Reporter rep("bellman-error", o);
    ModelDocument doc = load_model(o);
    if (auto code = rep.reject(doc)) return *code;
    const Basis basis = with_coefficients(o, doc.basis);
    const ErrorDirection dir = o.symmetric ? ErrorDirection::Symmetric : ErrorDirection::OneSided;
    json body;
    ErrorReport report;
    if (o.policy.empty()) {
        report = bellman_error_greedy(doc.model, basis, dir);
    } else {
        const DecisionListPolicy policy = load_policy(o.policy, doc.model);
        report = bellman_error_policy(doc.model, basis, policy, dir);
        body["policy"] = to_json(policy, doc.model);
    }
    body["error"] = to_json(report, doc.model);
    std::cout << "epsilon: " << fmt(report.epsilon) << "\nloss bound: " << fmt(report.loss_bound)
              << "\nwitness: " << body["error"]["witness_text"].get<std::string>() << "\n";
    return rep.finish(body, kOk);
}

oracle::FlatPolicy load_flat_policy(const Options& o, const oracle::FlatMDP& flat, const FactoredMDP& model) {
    if (o.policy.empty()) throw ParseError("--policy is required");
    return oracle::flat_policy(flat, load_policy(o.policy, model));
}

int cmd_exact(const Options& o, const std::string& what) {
    Reporter rep("exact " + what, o);
    ModelDocument doc = load_model(o);
    if (auto code = rep.reject(doc)) return *code;
    const oracle::FlatMDP flat = oracle::flatten(doc.model);
    json body;
    if (what == "solve") {
        const oracle::ExactSolution s = oracle::exact_policy_iteration(flat);
        const std::string p = flat_string(doc.model, s.policy);
        std::cout << "optimal policy: " << p << "\niterations: " << s.iterations << "\n";
        body = {{"policy_string", p}, {"values", vector_json(s.V)}, {"iterations", s.iterations}};
    } else if (what == "value") {
        const oracle::FlatPolicy pi = load_flat_policy(o, flat, doc.model);
        const Eigen::VectorXd v = oracle::exact_policy_value(flat, pi);
        body = {{"policy_string", flat_string(doc.model, pi)}, {"values", vector_json(v)}};
        std::cout << "V = " << body["values"].dump() << "\n";
    } else if (what == "stationary") {
        const oracle::FlatPolicy pi = load_flat_policy(o, flat, doc.model);
        const Eigen::VectorXd d = oracle::stationary_distribution(flat, pi);
        body = {{"policy_string", flat_string(doc.model, pi)}, {"distribution", vector_json(d)}};
        std::cout << "stationary distribution: " << body["distribution"].dump() << "\n";
    } else {
        const Basis basis = with_coefficients(o, doc.basis);
        const Eigen::VectorXd V = oracle::basis_matrix(flat, basis) *
                                  Eigen::Map<const Eigen::VectorXd>(basis.coefficients->data(),
                                                                    static_cast<Eigen::Index>(basis.size()));
        oracle::ExactError e;
        if (o.policy.empty()) {
            e = oracle::bellman_error_greedy(flat, V);
        } else {
            e = oracle::bellman_error_policy(flat, V, load_flat_policy(o, flat, doc.model));
        }
        const double eps = o.symmetric ? e.symmetric() : e.one_sided;
        const double bound = 2.0 * eps / (1.0 - doc.model.gamma);
        body = {{"error",
                 {{"epsilon", report_number(eps)},
                  {"one_sided", report_number(e.one_sided)},
                  {"other_side", report_number(e.other_side)},
                  {"loss_bound", report_number(bound)},
                  {"direction", o.symmetric ? "symmetric" : "one-sided"},
                  {"witness", witness_json(doc.model, flat.state(e.argmax))}}}};
        std::cout << "epsilon: " << fmt(eps) << "\nloss bound: " << fmt(bound) << "\n";
    }
    return rep.finish(body, kOk);
}

int demo_chain4(const Options& o) {
    Reporter rep("demo chain4", o);
    const DemoModel demo = chain4();
    json body;
    RunConfig config;
    config.start_action = "R";

    const RunTrace uniform = run_policy_iteration(demo.model, demo.basis, config, true);
    std::string seq = "RRRR";
    for (const IterationRecord& r : uniform.iterations) seq += " -> " + policy_string(demo.model, r.policy);
    std::cout << "uniform weights: " << seq << " (" << to_string(uniform.status) << ")\n";
    body["uniform"] = to_json(uniform, demo.model);

    config.weight_mode = WeightMode::StationaryOracle;
    const RunTrace stationary = run_policy_iteration(demo.model, demo.basis, config, true);
    seq = "RRRR";
    for (const IterationRecord& r : stationary.iterations) seq += " -> " + policy_string(demo.model, r.policy);
    std::cout << "stationary weights: " << seq << " (" << to_string(stationary.status);
    if (stationary.status == RunStatus::Oscillating) std::cout << ", cycle length " << stationary.cycle_length;
    std::cout << ")\n";
    body["stationary"] = to_json(stationary, demo.model);

    const oracle::FlatMDP flat = oracle::flatten(demo.model);
    const oracle::ExactSolution exact = oracle::exact_policy_iteration(flat);
    std::cout << "exact policy iteration: " << flat_string(demo.model, exact.policy) << "\n";
    body["exact_policy"] = flat_string(demo.model, exact.policy);

    const Eigen::VectorXd d =
        oracle::stationary_distribution(flat, oracle::constant_policy(flat, demo.model.action_index("R")));
    std::cout << "stationary distribution of RRRR: " << vector_json(d).dump() << "\n";
    body["stationary_distribution"] = vector_json(d);
    return rep.finish(body, kOk);
}

int demo_dbn5(const Options& o) {
    Reporter rep("demo dbn5", o);
    const DemoModel demo = dbn5();
    const FactoredMDP& m = demo.model;
    const FactoredWeights rho = uniform_weights(m.variables);

    std::size_t inner = 0;
    dot_product(demo.basis.functions[0], demo.basis.functions[1], m.variables, &inner);
    std::cout << "dot product (h_1, h_2): " << inner << " inner terms\n";

    RunConfig config;
    config.prune = false;
    config.max_iterations = 1;
    const RunTrace first = run_policy_iteration(m, demo.basis, config, true);
    const DecisionListPolicy& list = first.final_policy();
    std::cout << "decision list: " << list.unpruned_size << " conditionals\n";

    ListGram gram(m, demo.basis, list, &rho);
    gram.matrix();
    std::cout << "largest table: " << gram.max_table_entries() << " entries\n";
    std::cout << "branch counting induced width: " << gram.max_induced_width() << "\n";

    config.prune = true;
    config.max_iterations = 50;
    config.bounds = ErrorDirection::Symmetric;
    const RunTrace run = run_policy_iteration(m, demo.basis, config, true);
    print_trace(run, m);
    json body = {{"inner_terms", inner},
                 {"unpruned_conditionals", list.unpruned_size},
                 {"max_table_entries", gram.max_table_entries()},
                 {"induced_width", gram.max_induced_width()},
                 {"trace", to_json(run, m)}};
    return rep.finish(body, kOk);
}

int cmd_demo(const Options& o) {
    if (!o.export_file.empty()) {
        Reporter rep("demo " + o.model, o);
        const DemoModel demo = build_demo(o.model);
        std::ofstream out(o.export_file, std::ios::binary);
        out << to_json(ModelDocument{demo.model, demo.basis, std::nullopt}).dump(2) << "\n";
        if (!out) throw std::runtime_error(o.export_file + ": cannot write");
        std::cout << "wrote " << o.export_file << "\n";
        return rep.finish({{"exported", o.export_file}}, kOk);
    }
    return o.model == "chain4" ? demo_chain4(o) : demo_dbn5(o);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Factored MDP planning with linear value functions and decision-list policies"};
    app.require_subcommand(1);
    Options o;

    auto add_report = [&](CLI::App* c) {
        c->add_option("--out", o.out, "Write the JSON report to this file");
        c->add_flag("--json", o.json_stdout, "Print the JSON report to stdout");
    };
    auto add_model = [&](CLI::App* c) {
        c->add_option("model", o.model, "Model document, or a built-in demo name (chain4, dbn5)")->required();
        c->add_option("--gamma", o.gamma, "Override the discount factor");
    };
    auto add_weights = [&](CLI::App* c, const std::string& help) { c->add_option("--weights", o.weights, help); };

    auto* validate_cmd = app.add_subcommand("validate", "Check a model document");
    add_model(validate_cmd);
    add_report(validate_cmd);

    auto* solve = app.add_subcommand("solve", "Approximate policy iteration");
    add_model(solve);
    add_weights(solve, "uniform, a weights file, or stationary-oracle. The last computes the stationary "
                       "distribution of each policy on the explicit state space (small models only); it exists "
                       "to reproduce the failure of stationary-weighted projection.");
    solve->add_option("--max-iter", o.max_iter, "Iteration limit")->check(CLI::PositiveNumber);
    solve->add_flag("--prune,!--no-prune", o.prune, "Drop conditionals with negative advantage");
    solve->add_flag("--bounds", o.bounds, "Compute Bellman errors every iteration");
    solve->add_flag("--symmetric", o.symmetric, "Use the symmetric Bellman error with --bounds");
    solve->add_option("--refine", o.refine, "Witness-boosting refinement rounds");
    solve->add_option("--seed", o.seed, "Seed for --start random");
    solve->add_option("--start", o.start, "Initial fixed action, or random");
    add_report(solve);

    auto* evaluate = app.add_subcommand("evaluate", "Value determination for one policy");
    add_model(evaluate);
    add_weights(evaluate, "uniform or a weights file");
    evaluate->add_option("--policy", o.policy, "fixed:ACTION, fixed-string:ACTIONS or a decision-list file")
        ->required();
    add_report(evaluate);

    auto* bellman = app.add_subcommand("bellman-error", "Max-norm Bellman error of a value function");
    add_model(bellman);
    bellman->add_option("--coefficients", o.coefficients, "Coefficient file")->required();
    bellman->add_option("--policy", o.policy, "Measure against this policy instead of the greedy one");
    bellman->add_flag("--symmetric", o.symmetric, "Report the larger of both error directions");
    add_report(bellman);

    auto* exact = app.add_subcommand("exact", "Explicit-state oracle for small models");
    std::string exact_what;
    exact->add_option("model", o.model, "Model document or demo name")->required();
    exact->add_option("what", exact_what, "solve, value, stationary or bellman-error")
        ->required()
        ->check(CLI::IsMember({"solve", "value", "stationary", "bellman-error"}));
    exact->add_option("--gamma", o.gamma, "Override the discount factor");
    exact->add_option("--policy", o.policy, "fixed:ACTION, fixed-string:ACTIONS or a decision-list file");
    exact->add_option("--coefficients", o.coefficients, "Coefficient file (bellman-error)");
    exact->add_flag("--symmetric", o.symmetric, "Report the larger of both error directions");
    add_report(exact);

    auto* demo = app.add_subcommand("demo", "Run a built-in example");
    demo->add_option("name", o.model, "chain4 or dbn5")->required()->check(CLI::IsMember({"chain4", "dbn5"}));
    demo->add_option("--export", o.export_file, "Write the model document instead of running it");
    add_report(demo);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kParse;
    }

    // Narrative to stderr when stdout carries the report.
    std::ostream report_out(std::cout.rdbuf());
    if (o.json_stdout) {
        report_stream = &report_out;
        std::cout.rdbuf(std::cerr.rdbuf());
    }
    std::string command = app.get_subcommands().front()->get_name();
    if (*exact) command += " " + exact_what;
    if (*demo) command += " " + o.model;
    const auto started = std::chrono::steady_clock::now();
    auto fail = [&](int code, const char* kind, const std::string& message) {
        std::cerr << kind << ": " << message << "\n";
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        write_report({{"failure", {{"kind", kind}, {"message", message}}}}, command, code, o, wall);
        return code;
    };

    try {
        if (*validate_cmd) return cmd_validate(o);
        if (*solve) return cmd_solve(o);
        if (*evaluate) return cmd_evaluate(o);
        if (*bellman) return cmd_bellman(o);
        if (*exact) {
            if (exact_what == "bellman-error" && o.coefficients.empty()) throw ParseError("--coefficients is required");
            return cmd_exact(o, exact_what);
        }
        return cmd_demo(o);
    } catch (const ParseError& e) {
        return fail(kParse, "parse error", e.what());
    } catch (const WidthExceeded& e) {
        return fail(kWidth, "width exceeded", e.what());
    } catch (const SizeError& e) {
        return fail(kWidth, "table too large", e.what());
    } catch (const StateSpaceTooLarge& e) {
        return fail(kTooLarge, "state space too large", e.what());
    } catch (const ModelError& e) {
        return fail(kDiagnostics, "model error", e.what());
    } catch (const std::exception& e) {
        return fail(kSolver, "solver error", e.what());
    }
}
