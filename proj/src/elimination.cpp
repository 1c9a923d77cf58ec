#include "fmdp/elimination.hpp"

#include <algorithm>
#include <limits>
#include <set>

#include "fmdp/errors.hpp"

namespace fmdp {

EliminationOrder min_fill_order(std::span<const Scope> scopes, const Scope& eliminate, const Domain& domain) {
    const std::size_t n = domain.size();
    std::vector<std::set<VarId>> adj(n);
    for (const Scope& s : scopes)
        for (VarId a : s)
            for (VarId b : s)
                if (a != b) adj[static_cast<std::size_t>(a)].insert(b);

    EliminationOrder result;
    std::set<VarId> remaining(eliminate.begin(), eliminate.end());
    while (!remaining.empty()) {
        VarId best = -1;
        std::size_t best_fill = std::numeric_limits<std::size_t>::max();
        for (VarId v : remaining) {
            const auto& nb = adj[static_cast<std::size_t>(v)];
            std::size_t fill = 0;
            for (auto a = nb.begin(); a != nb.end(); ++a)
                for (auto b = std::next(a); b != nb.end(); ++b)
                    if (!adj[static_cast<std::size_t>(*a)].contains(*b)) ++fill;
            if (fill < best_fill) {
                best_fill = fill;
                best = v;
            }
        }
        const auto nb = adj[static_cast<std::size_t>(best)];
        result.induced_width = std::max(result.induced_width, static_cast<int>(nb.size()));
        std::size_t entries = static_cast<std::size_t>(domain.cardinality(best));
        for (VarId u : nb) entries *= static_cast<std::size_t>(domain.cardinality(u));
        result.max_clique_entries = std::max(result.max_clique_entries, entries);
        for (VarId a : nb) {
            for (VarId b : nb)
                if (a != b) adj[static_cast<std::size_t>(a)].insert(b);
            adj[static_cast<std::size_t>(a)].erase(best);
        }
        adj[static_cast<std::size_t>(best)].clear();
        result.order.push_back(best);
        remaining.erase(best);
    }
    return result;
}

namespace {

// Scope and table size of the product of every factor mentioning `v`.
std::pair<Scope, std::size_t> clique_of(const std::vector<Factor>& factors, VarId v, const Domain& domain) {
    Scope s;
    for (const Factor& f : factors)
        if (f.scope().contains(v)) s |= f.scope();
    std::size_t entries = 1;
    for (VarId u : s) entries *= static_cast<std::size_t>(domain.cardinality(u));
    return {s, entries};
}

void check_clique(const Scope& s, std::size_t entries, std::size_t cap) {
    if (entries > cap) throw WidthExceeded(s.size(), entries, cap);
}

}  // namespace

SumElimination sum_eliminate(std::vector<Factor> factors, const Scope& keep, std::span<const VarId> order,
                             const Domain& domain, std::size_t cap) {
    SumElimination out;
    for (VarId v : order) {
        if (keep.contains(v)) throw ModelError("sum_eliminate: order eliminates kept variable " + std::to_string(v));
        const auto [clique, entries] = clique_of(factors, v, domain);
        if (clique.empty()) continue;
        check_clique(clique, entries, cap);
        out.induced_width = std::max(out.induced_width, static_cast<int>(clique.size()) - 1);
        out.max_table_entries = std::max(out.max_table_entries, entries);

        Factor product = Factor::constant(1.0);
        std::vector<Factor> rest;
        for (Factor& f : factors) {
            if (f.scope().contains(v))
                product = multiply(product, f, cap);
            else
                rest.push_back(std::move(f));
        }
        rest.push_back(marginalize(product, clique - Scope{v}));
        factors = std::move(rest);
    }

    Factor result = Factor::filled(keep, domain.cards(keep), 1.0);
    for (const Factor& f : factors) {
        if (!f.scope().subset_of(keep))
            throw ModelError("sum_eliminate: order leaves a variable outside the kept scope");
        result = multiply(result, f, cap);
    }
    out.max_table_entries = std::max(out.max_table_entries, result.size());
    out.induced_width = std::max(out.induced_width, static_cast<int>(keep.size()) - 1);
    out.marginal = std::move(result);
    return out;
}

MaxElimination max_eliminate(std::vector<Factor> terms, std::span<const VarId> order, const Domain& domain,
                             std::size_t cap) {
    MaxElimination out;
    out.state.assign(domain.size(), 0);
    // Per eliminated variable, the summed factor it was maximized out of.
    std::vector<std::pair<VarId, Factor>> trail;
    for (VarId v : order) {
        const auto [clique, entries] = clique_of(terms, v, domain);
        if (clique.empty()) continue;
        check_clique(clique, entries, cap);
        out.induced_width = std::max(out.induced_width, static_cast<int>(clique.size()) - 1);

        Factor sum = Factor::constant(0.0);
        std::vector<Factor> rest;
        for (Factor& f : terms) {
            if (f.scope().contains(v))
                sum = add(sum, f, cap);
            else
                rest.push_back(std::move(f));
        }
        rest.push_back(max_marginalize(sum, clique - Scope{v}));
        trail.emplace_back(v, std::move(sum));
        terms = std::move(rest);
    }
    for (const Factor& f : terms) {
        if (!f.scope().empty()) throw ModelError("max_eliminate: order does not cover every term variable");
        out.value += f[0];
    }

    for (auto it = trail.rbegin(); it != trail.rend(); ++it) {
        const auto& [v, f] = *it;
        const int pos = f.scope().position(v);
        std::vector<int> values(f.scope().size());
        for (std::size_t i = 0; i < values.size(); ++i) values[i] = out.state[static_cast<std::size_t>(f.scope()[i])];
        int best = 0;
        double best_value = -std::numeric_limits<double>::infinity();
        for (int x = 0; x < domain.cardinality(v); ++x) {
            values[static_cast<std::size_t>(pos)] = x;
            const double val = f[f.index_of(values)];
            if (val > best_value) {
                best_value = val;
                best = x;
            }
        }
        out.state[static_cast<std::size_t>(v)] = best;
    }
    return out;
}

}  // namespace fmdp
