#pragma once

#include <cstddef>
#include <vector>

#include "vqvi/mdp.hpp"

namespace vqvi {

/// Q(s,a) = r(s,a) + gamma * P_{s,a}^T v
QTable q_values(const Dmdp& mdp, const ValueVector& v);

/// T(v)_s = max_a [r(s,a) + gamma * P_{s,a}^T v]
ValueVector bellman_apply(const Dmdp& mdp, const ValueVector& v);

/// T_pi(v)_s = r(s,pi(s)) + gamma * P_{s,pi(s)}^T v
ValueVector bellman_apply_policy(const Dmdp& mdp, const Policy& pi, const ValueVector& v);

/// argmax_a Q(s,a) per state, lowest action index on ties.
Policy argmax_policy(const QTable& q);

/// Row maxima of a Q-table.
ValueVector max_values(const QTable& q);

Policy greedy_policy(const Dmdp& mdp, const ValueVector& v);

struct ValueIterationResult {
    ValueVector v;
    std::size_t iterations = 0;
};

/**
 * Value iteration from v = 0. Stops once ||v_{k+1} - v_k|| <= tol (1-gamma) / (2 gamma),
 * which certifies ||v_{k+1} - v*|| <= tol / 2.
 */
ValueIterationResult exact_value_iteration(const Dmdp& mdp, double tol);

/// Solves (I - gamma P_pi) v = r_pi with a partial-pivoting LU.
ValueVector policy_evaluation(const Dmdp& mdp, const Policy& pi);

struct PolicyIterationResult {
    Policy pi;
    ValueVector v;
    std::size_t iterations = 0;
};

/// Howard policy iteration from the all-zeros policy.
PolicyIterationResult policy_iteration(const Dmdp& mdp);

struct BackwardInductionResult {
    /// values[h] for stages h = 0..H-1; the terminal stage H is identically 0.
    std::vector<ValueVector> values;
    NonStationaryPolicy pi;
};

/// v_h = max_a [r + P v_{h+1}] for h = H-1 down to 0, with v_H = 0.
BackwardInductionResult fh_backward_induction(const FiniteHorizonMdp& mdp);

/// Throws std::invalid_argument unless pi has one valid action per state.
void check_policy(const TransitionModel& model, const Policy& pi);

}  // namespace vqvi
