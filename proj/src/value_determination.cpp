#include "fmdp/value_determination.hpp"

#include <cmath>
#include <vector>

#include "fmdp/errors.hpp"

namespace fmdp {

namespace {

// Row-pivoted LU factorization of a small dense matrix.
class PivotedLu {
public:
    explicit PivotedLu(const Eigen::MatrixXd& a) : lu_(a), perm_(static_cast<std::size_t>(a.rows())) {
        const Eigen::Index n = a.rows();
        const double scale = a.cwiseAbs().maxCoeff();
        for (Eigen::Index i = 0; i < n; ++i) perm_[static_cast<std::size_t>(i)] = i;
        if (scale == 0.0 || !std::isfinite(scale)) {
            singular_ = n > 0;
            return;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
            Eigen::Index p = k;
            for (Eigen::Index i = k + 1; i < n; ++i)
                if (std::abs(lu_(i, k)) > std::abs(lu_(p, k))) p = i;
            if (std::abs(lu_(p, k)) < kSingularPivotRatio * scale) {
                singular_ = true;
                return;
            }
            if (p != k) {
                lu_.row(p).swap(lu_.row(k));
                std::swap(perm_[static_cast<std::size_t>(p)], perm_[static_cast<std::size_t>(k)]);
            }
            for (Eigen::Index i = k + 1; i < n; ++i) {
                lu_(i, k) /= lu_(k, k);
                for (Eigen::Index j = k + 1; j < n; ++j) lu_(i, j) -= lu_(i, k) * lu_(k, j);
            }
        }
    }

    bool singular() const { return singular_; }

    Eigen::VectorXd solve(const Eigen::VectorXd& b) const {
        const Eigen::Index n = lu_.rows();
        Eigen::VectorXd x(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            double s = b(perm_[static_cast<std::size_t>(i)]);
            for (Eigen::Index j = 0; j < i; ++j) s -= lu_(i, j) * x(j);
            x(i) = s;
        }
        for (Eigen::Index i = n; i-- > 0;) {
            double s = x(i);
            for (Eigen::Index j = i + 1; j < n; ++j) s -= lu_(i, j) * x(j);
            x(i) = s / lu_(i, i);
        }
        return x;
    }

    // ||A||_1 * ||A^-1||_1, with the inverse built column by column.
    double condition(const Eigen::MatrixXd& a) const {
        const Eigen::Index n = a.rows();
        double inv_norm = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
            e(j) = 1.0;
            inv_norm = std::max(inv_norm, solve(e).cwiseAbs().sum());
        }
        return a.cwiseAbs().colwise().sum().maxCoeff() * inv_norm;
    }

private:
    Eigen::MatrixXd lu_;
    std::vector<Eigen::Index> perm_;
    bool singular_ = false;
};

}  // namespace

bool solve_dense(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, Eigen::VectorXd& x, double* condition) {
    PivotedLu lu(a);
    if (lu.singular()) return false;
    x = lu.solve(b);
    if (condition) *condition = lu.condition(a);
    return true;
}

Eigen::MatrixXd gram_matrix(const Basis& basis, const FactoredWeights& rho, std::size_t cap) {
    const auto k = static_cast<Eigen::Index>(basis.size());
    Eigen::MatrixXd m(k, k);
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = i; j < k; ++j)
            m(i, j) = m(j, i) = weighted_dot_product(basis.functions[static_cast<std::size_t>(i)],
                                                     basis.functions[static_cast<std::size_t>(j)], rho, cap);
    return m;
}

namespace {

Eigen::VectorXd weighted_rhs(const Basis& basis, const FactoredWeights& rho, std::span<const Factor> terms,
                             std::size_t cap) {
    const auto k = static_cast<Eigen::Index>(basis.size());
    Eigen::VectorXd b = Eigen::VectorXd::Zero(k);
    for (Eigen::Index i = 0; i < k; ++i)
        for (const Factor& t : terms)
            b(i) += weighted_dot_product(basis.functions[static_cast<std::size_t>(i)], t, rho, cap);
    return b;
}

}  // namespace

Eigen::VectorXd reward_vector(const FactoredMDP& model, const Basis& basis, const FactoredWeights& rho,
                              std::size_t cap) {
    return weighted_rhs(basis, rho, model.reward.terms, cap);
}

GramSystem build_gram_fixed_action(const FactoredMDP& model, const Basis& basis, const FactoredWeights& rho,
                                   ActionIndex action, std::size_t cap) {
    GramSystem sys;
    sys.gamma = model.gamma;
    sys.M = gram_matrix(basis, rho, cap);
    sys.r = reward_vector(model, basis, rho, cap);
    const auto k = static_cast<Eigen::Index>(basis.size());
    sys.C.resize(k, k);
    for (Eigen::Index j = 0; j < k; ++j) {
        const Factor projected = back_project(basis.functions[static_cast<std::size_t>(j)], model, action, cap);
        for (Eigen::Index i = 0; i < k; ++i)
            sys.C(i, j) = weighted_dot_product(basis.functions[static_cast<std::size_t>(i)], projected, rho, cap);
    }
    return sys;
}

Solution solve_fixed_point(const GramSystem& system) {
    if (PivotedLu(system.M).singular())
        throw SingularSystem("basis Gram matrix is singular: basis functions are linearly dependent under the weights");

    auto attempt = [&](double gamma, Solution& out) {
        const Eigen::MatrixXd a = system.M - gamma * system.C;
        PivotedLu lu(a);
        if (lu.singular()) return false;
        out.w = lu.solve(system.r);
        out.gamma_used = gamma;
        out.residual = (a * out.w - system.r).cwiseAbs().maxCoeff();
        out.condition = lu.condition(a);
        out.ill_conditioned = out.condition > kIllConditioned;
        return true;
    };

    Solution sol;
    if (attempt(system.gamma, sol)) return sol;
    for (int t = 0; t < kPerturbationAttempts; ++t) {
        const double step = 1e-6 * std::ldexp(1.0, t / 2);
        const double gamma = system.gamma * (t % 2 == 0 ? 1.0 + step : 1.0 - step);
        if (!(gamma > 0.0 && gamma < 1.0)) continue;
        if (attempt(gamma, sol)) {
            sol.perturbed = true;
            return sol;
        }
    }
    throw SingularSystem("value determination system singular at gamma = " + std::to_string(system.gamma) +
                         " and every perturbation of it");
}

Eigen::VectorXd project(const Basis& basis, const FactoredWeights& rho, std::span<const Factor> v_terms,
                        std::size_t cap) {
    const Eigen::MatrixXd m = gram_matrix(basis, rho, cap);
    PivotedLu lu(m);
    if (lu.singular())
        throw SingularSystem("basis Gram matrix is singular: basis functions are linearly dependent under the weights");
    return lu.solve(weighted_rhs(basis, rho, v_terms, cap));
}

}  // namespace fmdp
