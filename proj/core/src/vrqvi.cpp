#include "vqvi/vrqvi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "pairwise.hpp"
#include "vqvi/exact.hpp"

namespace vqvi {

namespace {

void check_constants(const VqviConstants& c) {
    if (!(c.c1 > 0.0 && c.c2 > 0.0 && c.c3 > 0.0 && c.kappa > 0.0))
        throw std::invalid_argument("constants c1, c2, c3 and kappa must be positive");
}

void check_delta(double delta) {
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0,1)");
}

}  // namespace

Schedule derive_schedule(double gamma, double u, double delta, std::size_t n_states,
                         std::size_t n_actions, const VqviConstants& consts) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in (0,1)");
    check_delta(delta);
    check_constants(consts);
    if (n_states == 0 || n_actions == 0) throw std::invalid_argument("empty state or action set");
    Schedule out;
    out.beta = 1.0 / (1.0 - gamma);
    if (!(u > 0.0) || u > out.beta) throw std::invalid_argument("u must lie in (0, 1/(1-gamma)]");

    const double sa = static_cast<double>(n_states) * static_cast<double>(n_actions);
    const double log1 = std::log(8.0 * sa / delta);
    const double box = std::ceil(consts.c1 * out.beta * std::log(out.beta / u));
    const double proof = std::ceil(out.beta * std::log(4.0 * out.beta / u)) + 1.0;
    out.R = detail::ceil_count(std::max(box, proof));
    out.m1 = detail::ceil_count(consts.c2 * std::pow(out.beta, 3) / (u * u) * log1 * consts.kappa);
    out.m2 = detail::ceil_count(consts.c3 * out.beta * out.beta *
                                std::log(2.0 * static_cast<double>(out.R) * sa / delta) * consts.kappa);
    out.alpha1 = log1 / static_cast<double>(out.m1);
    return out;
}

std::uint64_t half_err_samples(const Schedule& schedule, std::size_t n_states, std::size_t n_actions) {
    const std::uint64_t sa = static_cast<std::uint64_t>(n_states) * n_actions;
    return sa * schedule.m1 + schedule.R * sa * schedule.m2;
}

HalfErrResult half_err(GenerativeOracle& oracle, const ValueVector& v0, const Policy& pi0, double u,
                       double delta, const VqviConstants& consts, const HalfErrOptions& options) {
    const std::size_t n = oracle.n_states();
    const std::size_t na = oracle.n_actions();
    if (v0.size() != n) throw std::invalid_argument("v0 has the wrong number of states");
    if (pi0.size() != n) throw std::invalid_argument("pi0 has the wrong number of states");
    for (std::size_t a : pi0)
        if (a >= na) throw std::invalid_argument("pi0 action out of range");
    for (double x : v0)
        if (!std::isfinite(x)) throw std::invalid_argument("v0 must be finite");

    const double gamma = oracle.discount();
    const Schedule sched = derive_schedule(gamma, u, delta, n, na, consts);
    const std::uint64_t before = oracle.total();

    HalfErrResult out;
    HalfErrDiagnostics& diag = out.diagnostics;
    diag.schedule = sched;
    diag.u = u;
    diag.delta = delta;
    diag.w_tilde = QTable(n, na);
    diag.sigma_hat = QTable(n, na);
    diag.w = QTable(n, na);

    const double v0_norm = max_norm(v0);
    QTable q(n, na);
    detail::for_each_pair(n, na, options.threads, [&](std::size_t s, std::size_t a) {
        const auto hist = detail::draw_histogram(oracle, s, a, sched.m1);
        const double mean = detail::histogram_mean(hist, sched.m1, [&](std::size_t t) { return v0[t]; });
        const double second =
            detail::histogram_mean(hist, sched.m1, [&](std::size_t t) { return v0[t] * v0[t]; });
        const double var = std::max(0.0, second - mean * mean);
        diag.w_tilde(s, a) = mean;
        diag.sigma_hat(s, a) = var;
        diag.w(s, a) = detail::shifted_estimate(mean, var, sched.alpha1, v0_norm);
        q(s, a) = oracle.reward(s, a) + gamma * diag.w(s, a);
    });

    ValueVector v = v0;
    Policy pi = pi0;
    if (options.record_iterates) {
        diag.iterates.push_back(v);
        diag.policies.push_back(pi);
    }
    diag.step_norms.reserve(sched.R);
    const double g_shift = (1.0 - gamma) * u / 8.0;
    ValueVector diff(n);

    for (std::uint64_t i = 1; i <= sched.R; ++i) {
        const ValueVector shadow = max_values(q);
        const Policy greedy = argmax_policy(q);
        double step = 0.0;
        for (std::size_t s = 0; s < n; ++s) {
            if (shadow[s] > v[s]) {
                step = std::max(step, shadow[s] - v[s]);
                v[s] = shadow[s];
                pi[s] = greedy[s];
            }
        }
        diag.step_norms.push_back(step);
        for (std::size_t s = 0; s < n; ++s) diff[s] = v[s] - v0[s];

        QTable g(n, na);
        detail::for_each_pair(n, na, options.threads, [&](std::size_t s, std::size_t a) {
            const auto hist = detail::draw_histogram(oracle, s, a, sched.m2);
            g(s, a) = detail::histogram_mean(hist, sched.m2, [&](std::size_t t) { return diff[t]; }) - g_shift;
            q(s, a) = oracle.reward(s, a) + gamma * (diag.w(s, a) + g(s, a));
        });

        if (options.record_iterates) {
            diag.iterates.push_back(v);
            diag.policies.push_back(pi);
            diag.shadow_values.push_back(shadow);
            diag.g.push_back(std::move(g));
        }
    }

    diag.samples = oracle.total() - before;
    out.v = std::move(v);
    out.pi = std::move(pi);
    return out;
}

std::size_t meta_iterations(double beta, double epsilon) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
    const double r = std::ceil(std::log2(beta / epsilon));
    return r < 1.0 ? 1 : static_cast<std::size_t>(r);
}

SolveResult solve(GenerativeOracle& oracle, double epsilon, double delta, const VqviConstants& consts,
                  const HalfErrOptions& options) {
    check_delta(delta);
    check_constants(consts);
    const double gamma = oracle.discount();
    if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in (0,1)");
    const double beta = 1.0 / (1.0 - gamma);

    SolveResult out;
    SolveReport& report = out.report;
    report.meta_iterations = meta_iterations(beta, epsilon);
    report.delta_per_call = delta / static_cast<double>(report.meta_iterations);
    const std::uint64_t before = oracle.total();

    out.v.assign(oracle.n_states(), 0.0);
    out.pi.assign(oracle.n_states(), 0);
    for (std::size_t i = 0; i < report.meta_iterations; ++i) {
        const double u = std::ldexp(beta, -static_cast<int>(i));
        HalfErrResult step = half_err(oracle, out.v, out.pi, u, report.delta_per_call, consts, options);
        out.v = std::move(step.v);
        out.pi = std::move(step.pi);
        report.calls.push_back(std::move(step.diagnostics));
    }
    report.total_samples = oracle.total() - before;
    return out;
}

MonotoneCheck check_monotone_condition(const Dmdp& mdp, const ValueVector& v, const Policy& pi) {
    const ValueVector tv = bellman_apply_policy(mdp, pi, v);
    MonotoneCheck out;
    out.worst_slack = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < v.size(); ++s) out.worst_slack = std::min(out.worst_slack, tv[s] - v[s]);
    out.holds = out.worst_slack >= -1e-9;
    return out;
}

}  // namespace vqvi
