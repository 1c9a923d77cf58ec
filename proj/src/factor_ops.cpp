#include "fmdp/factor_ops.hpp"

#include <algorithm>
#include <limits>
#include <string>
#include <vector>

#include "fmdp/errors.hpp"

namespace fmdp {

namespace {

// Cardinalities of `scope`, read from whichever of the factors mentions each variable.
std::vector<int> cards_from(const Scope& scope, std::initializer_list<const Factor*> sources) {
    std::vector<int> cards(scope.size(), 0);
    for (std::size_t i = 0; i < scope.size(); ++i)
        for (const Factor* f : sources)
            if (int p = f->scope().position(scope[i]); p >= 0) {
                cards[i] = f->cards()[static_cast<std::size_t>(p)];
                break;
            }
    return cards;
}

std::size_t checked_size(std::span<const int> cards, std::size_t cap, const char* what) {
    double n = 1.0;
    for (int c : cards) n *= c;
    if (n > static_cast<double>(cap))
        throw SizeError(what, n >= 1.8e19 ? std::numeric_limits<std::size_t>::max()
                                          : static_cast<std::size_t>(n),
                        cap);
    return table_size(cards);
}

template <class Op>
Factor combine(const Factor& f, const Factor& g, std::size_t cap, const char* what, Op op) {
    const Scope scope = f.scope() | g.scope();
    std::vector<int> cards = cards_from(scope, {&f, &g});
    const std::size_t n = checked_size(cards, cap, what);
    std::vector<double> table(n);
    JointWalker walk(cards);
    const auto hf = walk.track(scope, f.scope(), f.cards());
    const auto hg = walk.track(scope, g.scope(), g.cards());
    std::size_t i = 0;
    do {
        table[i++] = op(f[walk.offset(hf)], g[walk.offset(hg)]);
    } while (walk.next());
    return Factor(scope, std::move(cards), std::move(table));
}

template <class Reduce>
Factor reduce_to(const Factor& f, const Scope& keep, double init, Reduce reduce) {
    const Scope kept = f.scope() & keep;
    std::vector<int> cards = cards_from(kept, {&f});
    std::vector<double> table(table_size(cards), init);
    JointWalker walk(f.cards());
    const auto h = walk.track(f.scope(), kept, cards);
    std::size_t i = 0;
    do {
        double& slot = table[walk.offset(h)];
        slot = reduce(slot, f[i++]);
    } while (walk.next());
    return Factor(kept, std::move(cards), std::move(table));
}

}  // namespace

Factor multiply(const Factor& f, const Factor& g, std::size_t cap) {
    return combine(f, g, cap, "multiply", [](double a, double b) { return a * b; });
}

Factor add(const Factor& f, const Factor& g, std::size_t cap) {
    return combine(f, g, cap, "add", [](double a, double b) { return a + b; });
}

Factor marginalize(const Factor& f, const Scope& keep) {
    return reduce_to(f, keep, 0.0, [](double acc, double v) { return acc + v; });
}

Factor max_marginalize(const Factor& f, const Scope& keep) {
    return reduce_to(f, keep, -std::numeric_limits<double>::infinity(),
                     [](double acc, double v) { return std::max(acc, v); });
}

double dot_product(const Factor& f, const Factor& g, const Domain& domain, std::size_t* inner_terms,
                   std::size_t cap) {
    const Scope scope = f.scope() | g.scope();
    const std::vector<int> cards = cards_from(scope, {&f, &g});
    const std::size_t n = checked_size(cards, cap, "dot_product");
    JointWalker walk(cards);
    const auto hf = walk.track(scope, f.scope(), f.cards());
    const auto hg = walk.track(scope, g.scope(), g.cards());
    double sum = 0.0;
    do {
        sum += f[walk.offset(hf)] * g[walk.offset(hg)];
    } while (walk.next());
    if (inner_terms) *inner_terms = n;
    return domain.state_count() / static_cast<double>(n) * sum;
}

Factor weight_marginal(const FactoredWeights& rho, const Scope& scope, std::span<const int> cards, std::size_t cap) {
    checked_size(cards, cap, "weight_marginal");
    // rho restricted to W is the product of each cluster marginal summed onto E_i n W.
    std::vector<Factor> pieces;
    for (const Factor& m : rho.marginals)
        if (m.scope().intersects(scope)) pieces.push_back(marginalize(m, scope));

    std::vector<double> table(table_size(cards), 1.0);
    JointWalker walk(std::vector<int>(cards.begin(), cards.end()));
    std::vector<std::size_t> hp;
    for (const Factor& p : pieces) hp.push_back(walk.track(scope, p.scope(), p.cards()));
    std::size_t z = 0;
    do {
        for (std::size_t k = 0; k < pieces.size(); ++k) table[z] *= pieces[k][walk.offset(hp[k])];
        ++z;
    } while (walk.next());
    return Factor(scope, std::vector<int>(cards.begin(), cards.end()), std::move(table));
}

double weighted_dot_product(const Factor& f, const Factor& g, const FactoredWeights& rho, std::size_t cap) {
    const Factor fg = multiply(f, g, cap);
    const Factor n = weight_marginal(rho, fg.scope(), fg.cards(), cap);
    double sum = 0.0;
    for (std::size_t z = 0; z < fg.size(); ++z) sum += n[z] * fg[z];
    return sum;
}

Scope back_projected_scope(const Scope& scope, const FactoredMDP& model, ActionIndex action) {
    Scope out;
    for (VarId v : scope) out |= action_cpd(model, action, v).parents;
    return out;
}

Factor back_project(const Factor& f, const FactoredMDP& model, ActionIndex action, std::size_t cap) {
    const Scope& next_scope = f.scope();
    std::vector<const Cpd*> cpds;
    for (VarId v : next_scope) cpds.push_back(&action_cpd(model, action, v));
    const Scope scope = back_projected_scope(next_scope, model, action);
    std::vector<int> cards = model.variables.cards(scope);
    const std::size_t n = checked_size(cards, cap, "back_project");

    // Every assignment y' of the next-state scope, in f's table order.
    std::vector<std::vector<int>> next_values(f.size());
    for (std::size_t y = 0; y < f.size(); ++y) next_values[y] = f.values_at(y);

    std::vector<double> table(n, 0.0);
    JointWalker walk(cards);
    std::vector<std::size_t> handles;
    for (const Cpd* cpd : cpds) handles.push_back(walk.track(scope, cpd->parents, cpd->parent_cards));
    std::vector<std::size_t> rows(cpds.size());
    std::size_t z = 0;
    do {
        for (std::size_t i = 0; i < cpds.size(); ++i) rows[i] = walk.offset(handles[i]);
        double sum = 0.0;
        for (std::size_t y = 0; y < f.size(); ++y) {
            if (f[y] == 0.0) continue;
            double p = 1.0;
            for (std::size_t i = 0; i < cpds.size() && p != 0.0; ++i)
                p *= cpds[i]->prob(rows[i], next_values[y][i]);
            sum += p * f[y];
        }
        table[z++] = sum;
    } while (walk.next());
    return Factor(scope, std::move(cards), std::move(table));
}

double evaluate(std::span<const Factor> functions, std::span<const double> weights, std::span<const int> state) {
    if (functions.size() != weights.size())
        throw ModelError("evaluate: " + std::to_string(weights.size()) + " weights for " +
                         std::to_string(functions.size()) + " functions");
    double v = 0.0;
    for (std::size_t j = 0; j < functions.size(); ++j) v += weights[j] * functions[j].at_state(state);
    return v;
}

double evaluate(std::span<const Factor> terms, std::span<const int> state) {
    double v = 0.0;
    for (const Factor& t : terms) v += t.at_state(state);
    return v;
}

}  // namespace fmdp
