#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "vqvi/mdp.hpp"
#include "vqvi/sampling.hpp"
#include "vqvi/variance.hpp"

namespace vqvi {

/// Stages are 0-based: values[h] for h = 0..H-1, with an implicit terminal v_H = 0.
using StageValues = std::vector<ValueVector>;

struct FhConstants {
    double c1 = 8192.0;  // m1 constant
    double c2 = 128.0;   // m2 constant
    double kappa = 1.0;
};

struct FhSchedule {
    std::size_t horizon = 0;
    std::uint64_t m1 = 0;
    std::uint64_t m2 = 0;
    double alpha1 = 0.0;
};

/// m1 = ceil(kappa c1 H^3 u^-2 ln(8SA/delta)), m2 = ceil(kappa c2 H^2 ln(2H SA/delta)), alpha1 = ln(8SA/delta)/m1.
FhSchedule fh_derive_schedule(std::size_t horizon, double u, double delta, std::size_t n_states,
                              std::size_t n_actions, const FhConstants& consts = {});

/// S A m1 + H S A m2: one initialization batch shared by all stages, one fresh batch per stage.
std::uint64_t fh_half_err_samples(const FhSchedule& schedule, std::size_t n_states, std::size_t n_actions);

struct FhOptions {
    bool record_iterates = false;
    unsigned threads = 1;
};

struct FhHalfErrDiagnostics {
    FhSchedule schedule;
    double u = 0.0;
    double delta = 0.0;
    /// Per stage h: estimates of P v0_{h+1} and its variance, and the shifted estimate.
    std::vector<QTable> w_tilde;
    std::vector<QTable> sigma_hat;
    std::vector<QTable> w;
    /// Per stage (record_iterates): g_h and max_a Q_h before the fallback.
    std::vector<QTable> g;
    std::vector<ValueVector> shadow_values;
    std::uint64_t samples = 0;
};

struct FhHalfErrResult {
    StageValues v;
    NonStationaryPolicy pi;
    FhHalfErrDiagnostics diagnostics;
};

/**
 * One halving step for an H-horizon problem. Expects v0_h <= T_{pi0(.,h)} v0_{h+1}
 * and v*_h - v0_h <= u for every stage.
 */
FhHalfErrResult fh_half_err(GenerativeOracle& oracle, const StageValues& v0, const NonStationaryPolicy& pi0,
                            double u, double delta, const FhConstants& consts = {},
                            const FhOptions& options = {});

struct FhSolveReport {
    std::size_t meta_iterations = 0;
    double delta_per_call = 0.0;
    std::vector<FhHalfErrDiagnostics> calls;
    std::uint64_t total_samples = 0;
};

struct FhSolveResult {
    StageValues v;
    NonStationaryPolicy pi;
    FhSolveReport report;
};

/// Halving from v = 0 with u = H, H/2, ...; ceil(log2(H/epsilon)) calls, at least one.
FhSolveResult fh_solve(GenerativeOracle& oracle, std::size_t horizon, double epsilon, double delta,
                       const FhConstants& consts = {}, const FhOptions& options = {});

/// v^pi_h = r_{pi(.,h)} + P_{pi(.,h)} v^pi_{h+1}, v^pi_H = 0.
StageValues fh_policy_evaluation(const FiniteHorizonMdp& mdp, const NonStationaryPolicy& pi);

/**
 * max_h || sum_{h' >= h} (prod P^pi) sqrt(sigma_{v^pi_{h'+1}}) || against H^{3/2},
 * where sigma is the one-step variance under the stage-h' action.
 */
BoundCheck fh_variance_bound(const FiniteHorizonMdp& mdp, const NonStationaryPolicy& pi);

}  // namespace vqvi
