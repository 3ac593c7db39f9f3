#include "vqvi/exact.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace vqvi {

void check_policy(const TransitionModel& model, const Policy& pi) {
    if (pi.size() != model.n_states())
        throw std::invalid_argument("policy has " + std::to_string(pi.size()) +
                                    " entries, expected " + std::to_string(model.n_states()));
    for (std::size_t s = 0; s < pi.size(); ++s)
        if (pi[s] >= model.n_actions())
            throw std::invalid_argument("policy action " + std::to_string(pi[s]) + " at state " +
                                        std::to_string(s) + " out of range");
}

namespace {

void check_values(const TransitionModel& model, const ValueVector& v) {
    if (v.size() != model.n_states())
        throw std::invalid_argument("value vector has " + std::to_string(v.size()) +
                                    " entries, expected " + std::to_string(model.n_states()));
}

}  // namespace

QTable q_values(const Dmdp& mdp, const ValueVector& v) {
    check_values(mdp, v);
    QTable q(mdp.n_states(), mdp.n_actions());
    for (std::size_t s = 0; s < mdp.n_states(); ++s)
        for (std::size_t a = 0; a < mdp.n_actions(); ++a)
            q(s, a) = mdp.reward(s, a) + mdp.gamma() * mdp.expect(s, a, v);
    return q;
}

Policy argmax_policy(const QTable& q) {
    Policy pi(q.n_states(), 0);
    for (std::size_t s = 0; s < q.n_states(); ++s) {
        const auto row = q.row(s);
        std::size_t best = 0;
        for (std::size_t a = 1; a < row.size(); ++a)
            if (row[a] > row[best]) best = a;
        pi[s] = best;
    }
    return pi;
}

ValueVector max_values(const QTable& q) {
    ValueVector v(q.n_states());
    for (std::size_t s = 0; s < q.n_states(); ++s) {
        const auto row = q.row(s);
        v[s] = *std::max_element(row.begin(), row.end());
    }
    return v;
}

ValueVector bellman_apply(const Dmdp& mdp, const ValueVector& v) {
    return max_values(q_values(mdp, v));
}

ValueVector bellman_apply_policy(const Dmdp& mdp, const Policy& pi, const ValueVector& v) {
    check_policy(mdp, pi);
    check_values(mdp, v);
    ValueVector out(mdp.n_states());
    for (std::size_t s = 0; s < mdp.n_states(); ++s)
        out[s] = mdp.reward(s, pi[s]) + mdp.gamma() * mdp.expect(s, pi[s], v);
    return out;
}

Policy greedy_policy(const Dmdp& mdp, const ValueVector& v) { return argmax_policy(q_values(mdp, v)); }

ValueIterationResult exact_value_iteration(const Dmdp& mdp, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
    const double gamma = mdp.gamma();
    const double step_tol = tol * (1.0 - gamma) / (2.0 * gamma);
    ValueIterationResult out;
    out.v.assign(mdp.n_states(), 0.0);
    for (;;) {
        ValueVector next = bellman_apply(mdp, out.v);
        ++out.iterations;
        const double step = max_abs_diff(next, out.v);
        out.v = std::move(next);
        if (step <= step_tol) break;
    }
    return out;
}

ValueVector policy_evaluation(const Dmdp& mdp, const Policy& pi) {
    check_policy(mdp, pi);
    const auto n = static_cast<Eigen::Index>(mdp.n_states());
    Eigen::MatrixXd system = Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd rhs(n);
    for (Eigen::Index s = 0; s < n; ++s) {
        const auto a = pi[static_cast<std::size_t>(s)];
        const auto p = mdp.row(static_cast<std::size_t>(s), a);
        for (Eigen::Index t = 0; t < n; ++t) system(s, t) -= mdp.gamma() * p[static_cast<std::size_t>(t)];
        rhs(s) = mdp.reward(static_cast<std::size_t>(s), a);
    }
    const Eigen::VectorXd v = system.partialPivLu().solve(rhs);
    return ValueVector(v.data(), v.data() + n);
}

PolicyIterationResult policy_iteration(const Dmdp& mdp) {
    PolicyIterationResult out;
    out.pi.assign(mdp.n_states(), 0);
    // Switch only on a clear improvement so rounding noise cannot cycle.
    const double margin = 1e-12 / (1.0 - mdp.gamma());
    for (;;) {
        out.v = policy_evaluation(mdp, out.pi);
        ++out.iterations;
        const QTable q = q_values(mdp, out.v);
        bool changed = false;
        for (std::size_t s = 0; s < mdp.n_states(); ++s) {
            std::size_t best = out.pi[s];
            for (std::size_t a = 0; a < mdp.n_actions(); ++a)
                if (q(s, a) > q(s, best) + margin) best = a;
            if (best != out.pi[s]) {
                out.pi[s] = best;
                changed = true;
            }
        }
        if (!changed) break;
    }
    // Canonical tie-break: lowest index among actions equal to the optimum.
    const QTable q = q_values(mdp, out.v);
    for (std::size_t s = 0; s < mdp.n_states(); ++s) {
        const double top = q(s, out.pi[s]);
        for (std::size_t a = 0; a < out.pi[s]; ++a) {
            if (q(s, a) >= top - margin) {
                out.pi[s] = a;
                break;
            }
        }
    }
    return out;
}

BackwardInductionResult fh_backward_induction(const FiniteHorizonMdp& mdp) {
    const std::size_t n = mdp.n_states();
    const std::size_t horizon = mdp.horizon();
    if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
    BackwardInductionResult out;
    out.values.assign(horizon, ValueVector(n, 0.0));
    out.pi = NonStationaryPolicy(n, horizon);
    const ValueVector terminal(n, 0.0);
    for (std::size_t h = horizon; h-- > 0;) {
        const ValueVector& next = h + 1 < horizon ? out.values[h + 1] : terminal;
        for (std::size_t s = 0; s < n; ++s) {
            std::size_t best = 0;
            double best_q = -std::numeric_limits<double>::infinity();
            for (std::size_t a = 0; a < mdp.n_actions(); ++a) {
                const double q = mdp.reward(s, a) + mdp.expect(s, a, next);
                if (q > best_q) {
                    best_q = q;
                    best = a;
                }
            }
            out.values[h][s] = best_q;
            out.pi(s, h) = best;
        }
    }
    return out;
}

}  // namespace vqvi
