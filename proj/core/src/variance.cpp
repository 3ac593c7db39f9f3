#include "vqvi/variance.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "vqvi/exact.hpp"

namespace vqvi {

namespace {

// I - c * P_pi as a dense matrix.
Eigen::MatrixXd discounted_system(const TransitionModel& model, const Policy& pi, double c) {
    const auto n = static_cast<Eigen::Index>(model.n_states());
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
    for (Eigen::Index s = 0; s < n; ++s) {
        const auto row = model.row(static_cast<std::size_t>(s), pi[static_cast<std::size_t>(s)]);
        for (Eigen::Index t = 0; t < n; ++t) m(s, t) -= c * row[static_cast<std::size_t>(t)];
    }
    return m;
}

Eigen::VectorXd policy_sigma(const VarianceTable& sigma, const Policy& pi) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(pi.size()));
    for (std::size_t s = 0; s < pi.size(); ++s) out(static_cast<Eigen::Index>(s)) = sigma(s, pi[s]);
    return out;
}

}  // namespace

VarianceTable one_step_variance(const TransitionModel& model, const ValueVector& v) {
    if (v.size() != model.n_states()) throw std::invalid_argument("value vector size mismatch");
    VarianceTable out(model.n_states(), model.n_actions());
    for (std::size_t s = 0; s < model.n_states(); ++s) {
        for (std::size_t a = 0; a < model.n_actions(); ++a) {
            const auto p = model.row(s, a);
            double m1 = 0.0;
            double m2 = 0.0;
            for (std::size_t t = 0; t < p.size(); ++t) {
                m1 += p[t] * v[t];
                m2 += p[t] * v[t] * v[t];
            }
            out(s, a) = std::max(0.0, m2 - m1 * m1);
        }
    }
    return out;
}

TotalVarianceTable total_variance(const Dmdp& mdp, const Policy& pi) {
    check_policy(mdp, pi);
    const double g2 = mdp.gamma() * mdp.gamma();
    const VarianceTable sigma = one_step_variance(mdp, policy_evaluation(mdp, pi));
    // State-level values x(s) = Sigma(s, pi(s)) first, then one backup per (s,a).
    const Eigen::VectorXd x =
        discounted_system(mdp, pi, g2).partialPivLu().solve(g2 * policy_sigma(sigma, pi));
    TotalVarianceTable out(mdp.n_states(), mdp.n_actions());
    const std::span<const double> xs(x.data(), static_cast<std::size_t>(x.size()));
    for (std::size_t s = 0; s < mdp.n_states(); ++s)
        for (std::size_t a = 0; a < mdp.n_actions(); ++a)
            out(s, a) = g2 * sigma(s, a) + g2 * mdp.expect(s, a, xs);
    return out;
}

double total_variance_residual(const Dmdp& mdp, const Policy& pi, const TotalVarianceTable& sigma) {
    check_policy(mdp, pi);
    const double g2 = mdp.gamma() * mdp.gamma();
    const VarianceTable one_step = one_step_variance(mdp, policy_evaluation(mdp, pi));
    ValueVector x(mdp.n_states());
    for (std::size_t s = 0; s < mdp.n_states(); ++s) x[s] = sigma(s, pi[s]);
    double worst = 0.0;
    for (std::size_t s = 0; s < mdp.n_states(); ++s)
        for (std::size_t a = 0; a < mdp.n_actions(); ++a)
            worst = std::max(worst, std::abs(sigma(s, a) - g2 * one_step(s, a) -
                                             g2 * mdp.expect(s, a, x)));
    return worst;
}

BoundCheck check_variance_bound(const Dmdp& mdp, const Policy& pi) {
    check_policy(mdp, pi);
    const double gamma = mdp.gamma();
    const VarianceTable sigma = one_step_variance(mdp, policy_evaluation(mdp, pi));
    const Eigen::VectorXd root = policy_sigma(sigma, pi).cwiseSqrt();
    const Eigen::VectorXd y = discounted_system(mdp, pi, gamma).partialPivLu().solve(root);
    BoundCheck out;
    const double norm = y.cwiseAbs().maxCoeff();
    out.lhs = norm * norm;
    out.rhs = (1.0 + gamma) / (gamma * gamma * std::pow(1.0 - gamma, 3));
    out.holds = out.lhs <= out.rhs + kBoundTolerance;
    return out;
}

BoundCheck check_sqrt_inequality(std::span<const double> p, std::span<const double> v, double gamma) {
    const std::size_t n = v.size();
    if (n == 0 || p.size() != n * n) throw std::invalid_argument("matrix must be n x n for |v| = n");
    if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in (0,1)");
    for (double x : v)
        if (!(x >= 0.0) || !std::isfinite(x)) throw std::invalid_argument("v must be finite and nonnegative");
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double x = p[i * n + j];
            if (!(x >= 0.0) || !std::isfinite(x)) throw std::invalid_argument("matrix entries must be nonnegative");
            row += x;
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) -= gamma * x;
        }
        if (row > 1.0 + kStochasticTolerance) throw std::invalid_argument("matrix row has l1 norm above 1");
    }
    const Eigen::Map<const Eigen::VectorXd> vec(v.data(), static_cast<Eigen::Index>(n));
    const auto lu = m.partialPivLu();
    BoundCheck out;
    out.lhs = lu.solve(Eigen::VectorXd(vec.cwiseSqrt())).cwiseAbs().maxCoeff();
    out.rhs = std::sqrt(lu.solve(Eigen::VectorXd(vec)).cwiseAbs().maxCoeff() / (1.0 - gamma));
    out.holds = out.lhs <= out.rhs + kBoundTolerance;
    return out;
}

}  // namespace vqvi
