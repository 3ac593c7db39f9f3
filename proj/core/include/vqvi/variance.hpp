#pragma once

#include <span>

#include "vqvi/mdp.hpp"

namespace vqvi {

/// sigma_v(s,a) = P_{s,a}^T v^2 - (P_{s,a}^T v)^2, clamped at 0.
VarianceTable one_step_variance(const TransitionModel& model, const ValueVector& v);

/**
 * Variance of the discounted return from (s,a) when pi is played afterwards.
 * Solves Sigma = gamma^2 sigma_{v^pi} + gamma^2 P^pi Sigma directly.
 */
TotalVarianceTable total_variance(const Dmdp& mdp, const Policy& pi);

struct BoundCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
};

/// ||(I - gamma P^pi)^{-1} sqrt(sigma_{v^pi})||^2 against (1+gamma) / (gamma^2 (1-gamma)^3).
BoundCheck check_variance_bound(const Dmdp& mdp, const Policy& pi);

/**
 * ||(I - gamma P)^{-1} sqrt(v)|| against sqrt(||(I - gamma P)^{-1} v|| / (1-gamma))
 * for a nonnegative n x n matrix P (row-major) with row sums at most 1 and v >= 0.
 * Throws std::invalid_argument if the preconditions fail.
 */
BoundCheck check_sqrt_inequality(std::span<const double> p, std::span<const double> v, double gamma);

/// Residual ||Sigma - gamma^2 sigma_{v^pi} - gamma^2 P^pi Sigma||.
double total_variance_residual(const Dmdp& mdp, const Policy& pi, const TotalVarianceTable& sigma);

/// Absolute tolerance applied by the bound checks.
inline constexpr double kBoundTolerance = 1e-9;

}  // namespace vqvi
