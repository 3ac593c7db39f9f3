#include "vqvi/finite_horizon.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pairwise.hpp"
#include "vqvi/exact.hpp"
#include "vqvi/vrqvi.hpp"

namespace vqvi {

namespace {

void check_stage_policy(const TransitionModel& model, const NonStationaryPolicy& pi, std::size_t horizon) {
    if (pi.n_states() != model.n_states() || pi.horizon() != horizon)
        throw std::invalid_argument("non-stationary policy has the wrong shape");
    for (std::size_t h = 0; h < horizon; ++h)
        for (std::size_t s = 0; s < model.n_states(); ++s)
            if (pi(s, h) >= model.n_actions()) throw std::invalid_argument("policy action out of range");
}

}  // namespace

FhSchedule fh_derive_schedule(std::size_t horizon, double u, double delta, std::size_t n_states,
                              std::size_t n_actions, const FhConstants& consts) {
    if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
    const double H = static_cast<double>(horizon);
    if (!(u > 0.0) || u > H) throw std::invalid_argument("u must lie in (0, H]");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0,1)");
    if (!(consts.c1 > 0.0 && consts.c2 > 0.0 && consts.kappa > 0.0))
        throw std::invalid_argument("constants c1, c2 and kappa must be positive");
    if (n_states == 0 || n_actions == 0) throw std::invalid_argument("empty state or action set");

    const double sa = static_cast<double>(n_states) * static_cast<double>(n_actions);
    const double log1 = std::log(8.0 * sa / delta);
    FhSchedule out;
    out.horizon = horizon;
    out.m1 = detail::ceil_count(consts.c1 * H * H * H / (u * u) * log1 * consts.kappa);
    out.m2 = detail::ceil_count(consts.c2 * H * H * std::log(2.0 * H * sa / delta) * consts.kappa);
    out.alpha1 = log1 / static_cast<double>(out.m1);
    return out;
}

std::uint64_t fh_half_err_samples(const FhSchedule& schedule, std::size_t n_states, std::size_t n_actions) {
    const std::uint64_t sa = static_cast<std::uint64_t>(n_states) * n_actions;
    return sa * schedule.m1 + schedule.horizon * sa * schedule.m2;
}

FhHalfErrResult fh_half_err(GenerativeOracle& oracle, const StageValues& v0, const NonStationaryPolicy& pi0,
                            double u, double delta, const FhConstants& consts, const FhOptions& options) {
    const std::size_t n = oracle.n_states();
    const std::size_t na = oracle.n_actions();
    const std::size_t horizon = v0.size();
    if (horizon < 1) throw std::invalid_argument("v0 must have at least one stage");
    for (const auto& stage : v0) {
        if (stage.size() != n) throw std::invalid_argument("v0 stage has the wrong number of states");
        for (double x : stage)
            if (!std::isfinite(x)) throw std::invalid_argument("v0 must be finite");
    }
    if (pi0.n_states() != n || pi0.horizon() != horizon)
        throw std::invalid_argument("pi0 has the wrong shape");
    for (std::size_t h = 0; h < horizon; ++h)
        for (std::size_t s = 0; s < n; ++s)
            if (pi0(s, h) >= na) throw std::invalid_argument("pi0 action out of range");

    const FhSchedule sched = fh_derive_schedule(horizon, u, delta, n, na, consts);
    const std::uint64_t before = oracle.total();
    const ValueVector terminal(n, 0.0);
    auto next_v0 = [&](std::size_t h) -> const ValueVector& { return h + 1 < horizon ? v0[h + 1] : terminal; };

    FhHalfErrResult out;
    FhHalfErrDiagnostics& diag = out.diagnostics;
    diag.schedule = sched;
    diag.u = u;
    diag.delta = delta;
    diag.w_tilde.assign(horizon, QTable(n, na));
    diag.sigma_hat.assign(horizon, QTable(n, na));
    diag.w.assign(horizon, QTable(n, na));

    std::vector<double> norms(horizon);
    for (std::size_t h = 0; h < horizon; ++h) norms[h] = max_norm(next_v0(h));

    // One batch per (s,a) serves every stage's estimate.
    detail::for_each_pair(n, na, options.threads, [&](std::size_t s, std::size_t a) {
        const auto hist = detail::draw_histogram(oracle, s, a, sched.m1);
        for (std::size_t h = 0; h < horizon; ++h) {
            const ValueVector& target = next_v0(h);
            const double mean = detail::histogram_mean(hist, sched.m1, [&](std::size_t t) { return target[t]; });
            const double second =
                detail::histogram_mean(hist, sched.m1, [&](std::size_t t) { return target[t] * target[t]; });
            const double var = std::max(0.0, second - mean * mean);
            diag.w_tilde[h](s, a) = mean;
            diag.sigma_hat[h](s, a) = var;
            diag.w[h](s, a) = detail::shifted_estimate(mean, var, sched.alpha1, norms[h]);
        }
    });

    out.v.assign(horizon, ValueVector(n, 0.0));
    out.pi = NonStationaryPolicy(n, horizon);
    const double g_shift = u / (8.0 * static_cast<double>(horizon));
    ValueVector diff(n);
    QTable q(n, na);
    QTable g(n, na);

    for (std::size_t h = horizon; h-- > 0;) {
        const ValueVector& v_next = h + 1 < horizon ? out.v[h + 1] : terminal;
        const ValueVector& v0_next = next_v0(h);
        for (std::size_t s = 0; s < n; ++s) diff[s] = v_next[s] - v0_next[s];

        detail::for_each_pair(n, na, options.threads, [&](std::size_t s, std::size_t a) {
            const auto hist = detail::draw_histogram(oracle, s, a, sched.m2);
            g(s, a) = detail::histogram_mean(hist, sched.m2, [&](std::size_t t) { return diff[t]; }) - g_shift;
            q(s, a) = oracle.reward(s, a) + diag.w[h](s, a) + g(s, a);
        });

        const ValueVector shadow = max_values(q);
        const Policy greedy = argmax_policy(q);
        for (std::size_t s = 0; s < n; ++s) {
            if (shadow[s] > v0[h][s]) {
                out.v[h][s] = shadow[s];
                out.pi(s, h) = greedy[s];
            } else {
                out.v[h][s] = v0[h][s];
                out.pi(s, h) = pi0(s, h);
            }
        }
        if (options.record_iterates) {
            diag.g.push_back(g);
            diag.shadow_values.push_back(shadow);
        }
    }
    if (options.record_iterates) {
        std::reverse(diag.g.begin(), diag.g.end());
        std::reverse(diag.shadow_values.begin(), diag.shadow_values.end());
    }

    diag.samples = oracle.total() - before;
    return out;
}

FhSolveResult fh_solve(GenerativeOracle& oracle, std::size_t horizon, double epsilon, double delta,
                       const FhConstants& consts, const FhOptions& options) {
    if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0,1)");
    const double H = static_cast<double>(horizon);

    FhSolveResult out;
    FhSolveReport& report = out.report;
    report.meta_iterations = meta_iterations(H, epsilon);
    report.delta_per_call = delta / static_cast<double>(report.meta_iterations);
    const std::uint64_t before = oracle.total();

    out.v.assign(horizon, ValueVector(oracle.n_states(), 0.0));
    out.pi = NonStationaryPolicy(oracle.n_states(), horizon);
    for (std::size_t i = 0; i < report.meta_iterations; ++i) {
        const double u = std::ldexp(H, -static_cast<int>(i));
        FhHalfErrResult step = fh_half_err(oracle, out.v, out.pi, u, report.delta_per_call, consts, options);
        out.v = std::move(step.v);
        out.pi = std::move(step.pi);
        report.calls.push_back(std::move(step.diagnostics));
    }
    report.total_samples = oracle.total() - before;
    return out;
}

StageValues fh_policy_evaluation(const FiniteHorizonMdp& mdp, const NonStationaryPolicy& pi) {
    const std::size_t horizon = mdp.horizon();
    if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
    check_stage_policy(mdp, pi, horizon);
    const std::size_t n = mdp.n_states();
    StageValues out(horizon, ValueVector(n, 0.0));
    const ValueVector terminal(n, 0.0);
    for (std::size_t h = horizon; h-- > 0;) {
        const ValueVector& next = h + 1 < horizon ? out[h + 1] : terminal;
        for (std::size_t s = 0; s < n; ++s)
            out[h][s] = mdp.reward(s, pi(s, h)) + mdp.expect(s, pi(s, h), next);
    }
    return out;
}

BoundCheck fh_variance_bound(const FiniteHorizonMdp& mdp, const NonStationaryPolicy& pi) {
    const StageValues values = fh_policy_evaluation(mdp, pi);
    const std::size_t horizon = mdp.horizon();
    const std::size_t n = mdp.n_states();
    const ValueVector terminal(n, 0.0);
    ValueVector acc(n, 0.0);  // the sum for stage h+1
    BoundCheck out;
    for (std::size_t h = horizon; h-- > 0;) {
        const ValueVector& next = h + 1 < horizon ? values[h + 1] : terminal;
        const VarianceTable sigma = one_step_variance(mdp, next);
        ValueVector cur(n);
        for (std::size_t s = 0; s < n; ++s) {
            const std::size_t a = pi(s, h);
            cur[s] = std::sqrt(sigma(s, a)) + mdp.expect(s, a, acc);
            out.lhs = std::max(out.lhs, cur[s]);
        }
        acc = std::move(cur);
    }
    out.rhs = std::pow(static_cast<double>(horizon), 1.5);
    out.holds = out.lhs <= out.rhs + kBoundTolerance;
    return out;
}

}  // namespace vqvi
