#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "vqvi/mdp.hpp"
#include "vqvi/sampling.hpp"

namespace vqvi {

/**
 * Constants of the halving routine. kappa scales m1 and m2 before rounding;
 * the high-probability guarantees only hold at kappa = 1 with the defaults.
 */
struct VqviConstants {
    double c1 = 4.0;
    double c2 = 8192.0;
    double c3 = 128.0;
    double kappa = 1.0;
};

struct Schedule {
    double beta = 0.0;
    std::uint64_t R = 0;
    std::uint64_t m1 = 0;
    std::uint64_t m2 = 0;
    double alpha1 = 0.0;
};

/**
 * beta = 1/(1-gamma), R = max(ceil(c1 beta ln(beta/u)), ceil(beta ln(4 beta/u)) + 1),
 * m1 = ceil(kappa c2 beta^3 u^-2 ln(8SA/delta)), m2 = ceil(kappa c3 beta^2 ln(2R SA/delta)),
 * alpha1 = ln(8SA/delta) / m1.
 *
 * The second term of R keeps at least the iteration count the halving
 * argument needs; the first alone vanishes at u = beta.
 */
Schedule derive_schedule(double gamma, double u, double delta, std::size_t n_states,
                         std::size_t n_actions, const VqviConstants& consts = {});

/// S A m1 + R S A m2
std::uint64_t half_err_samples(const Schedule& schedule, std::size_t n_states, std::size_t n_actions);

struct HalfErrOptions {
    /// Keep v^(i), pi^(i), the shadow values and g^(i) for every iteration.
    bool record_iterates = false;
    /// Workers for the per-(s,a) estimation passes. Results do not depend on it.
    unsigned threads = 1;
};

struct HalfErrDiagnostics {
    Schedule schedule;
    double u = 0.0;
    double delta = 0.0;
    QTable w_tilde;
    QTable sigma_hat;
    QTable w;
    /// ||v^(i) - v^(i-1)|| for i = 1..R.
    std::vector<double> step_norms;
    /// v^(0..R) and pi^(0..R); filled only with record_iterates.
    std::vector<ValueVector> iterates;
    std::vector<Policy> policies;
    /// max_a Q^(i-1) before the monotone fallback, i = 1..R (record_iterates).
    std::vector<ValueVector> shadow_values;
    /// g^(i), i = 1..R (record_iterates).
    std::vector<QTable> g;
    std::uint64_t samples = 0;
};

struct HalfErrResult {
    ValueVector v;
    Policy pi;
    HalfErrDiagnostics diagnostics;
};

/**
 * One halving step from (v0, pi0). Expects v0 <= T_pi0(v0) and v* - v0 <= u;
 * returns (v, pi) with v <= T_pi(v) and v* - v <= u/2 with probability
 * 1 - delta at default constants. The oracle must carry a discount.
 */
HalfErrResult half_err(GenerativeOracle& oracle, const ValueVector& v0, const Policy& pi0, double u,
                       double delta, const VqviConstants& consts = {}, const HalfErrOptions& options = {});

struct SolveReport {
    std::size_t meta_iterations = 0;
    double delta_per_call = 0.0;
    std::vector<HalfErrDiagnostics> calls;
    std::uint64_t total_samples = 0;
};

struct SolveResult {
    ValueVector v;
    Policy pi;
    SolveReport report;
};

/// ceil(log2(beta / epsilon)), at least 1.
std::size_t meta_iterations(double beta, double epsilon);

/**
 * Repeated halving from v = 0, pi = 0 with u = beta, beta/2, ...;
 * each call gets delta / R_meta and fresh samples.
 */
SolveResult solve(GenerativeOracle& oracle, double epsilon, double delta,
                  const VqviConstants& consts = {}, const HalfErrOptions& options = {});

struct MonotoneCheck {
    bool holds = false;
    double worst_slack = 0.0;
};

/// min_s [T_pi(v)(s) - v(s)] against -1e-9.
MonotoneCheck check_monotone_condition(const Dmdp& mdp, const ValueVector& v, const Policy& pi);

}  // namespace vqvi
