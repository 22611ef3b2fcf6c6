#pragma once

#include <span>
#include <vector>

#include "shrinkage/weights.hpp"

namespace shrinkage {

/// Result of solving alpha_hat = inf{ alpha > 0 : sum_i w(alpha*|X_i - kappa|) <= n - eta }.
///
/// Limit conventions:
///   * eta == 0: alpha_hat = 0 and every weight is 1 (empirical-mean endpoint).
///   * no finite alpha reaches the target (all mass at distance 0, or eta = n
///     with a strictly positive w): alpha_hat = +inf, w_i = 1 where
///     |X_i - kappa| == 0 and 0 elsewhere.
/// Otherwise alpha_hat is finite and positive and w_i = w(alpha_hat*|X_i - kappa|).
struct ScalingSolution {
    double alpha_hat = 0.0;
    std::vector<double> weights;
    double weight_sum = 0.0;
    SolverKind solver_used = SolverKind::Bisection;
    int iterations = 0;  // bracket expansions + bisection steps; 0 for closed forms
};

/// Solves for alpha_hat, dispatching to the closed form designated by the
/// weight function (order-statistic cut for the indicator, piecewise-linear
/// threshold solve for the Winsorized weight) and to monotone bisection
/// otherwise. Requires 0 <= eta <= n, a nonempty sample with finite entries,
/// and finite kappa.
ScalingSolution alpha_hat(const WeightFn& w, std::span<const double> sample, double kappa,
                          double eta);

/// Generic solver: geometric bracket expansion starting at 1/max_i |X_i - kappa|
/// followed by bisection on the non-increasing right-continuous score
/// S(alpha) = sum_i w(alpha*|X_i - kappa|). Returns an alpha within relative
/// tolerance tol of the true infimum. Bracket expansion failure after 1024
/// doublings signals the +inf convention.
ScalingSolution alpha_hat_bisection(const WeightFn& w, std::span<const double> sample,
                                    double kappa, double eta, double tol = 1e-12);

/// Indicator closed form: with sorted distances d(1) <= ... <= d(n) and
/// k = floor(n - eta), alpha_hat = 1/d(k+1) and exactly the k points closest
/// to kappa keep weight 1 (ties broken by original index). Requires eta > 0.
ScalingSolution alpha_hat_indicator(std::span<const double> sample, double kappa, double eta);

/// Winsorize closed form: scans the piecewise-linear segments of
/// g(M) = #{i : d_i <= M} + M * sum_{d_i > M} 1/d_i for the unique M with
/// g(M) = n - eta, then alpha_hat = 1/M and w_i = 1 ∧ M/d_i. Requires
/// 0 < eta < n.
ScalingSolution alpha_hat_winsorize(std::span<const double> sample, double kappa, double eta);

}  // namespace shrinkage
