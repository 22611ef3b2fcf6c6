#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include "shrinkage/scaling.hpp"
#include "shrinkage/weights.hpp"

namespace shrinkage {

/// Thrown when an estimate is undefined on the given input (e.g. the
/// normalized weighted mean with all weights zero).
struct degenerate_estimate : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Estimate {
    double value = 0.0;
    std::optional<ScalingSolution> scaling;  // present for shrinkage kinds
    double eta = 0.0;                        // resolved shrinkage level (shrinkage kinds)
    double kappa = 0.0;                      // base estimate used (shrinkage kinds)
    bool base_aliased = false;               // base sample aliased the main sample
};

// --- base estimators ---------------------------------------------------------

Estimate empirical_mean(std::span<const double> sample);

/// Single order statistic X_(ceil(gamma*n)), 1-indexed, no interpolation.
Estimate empirical_quantile(std::span<const double> sample, double gamma);

Estimate median(std::span<const double> sample);

/// Mean of the order statistics X_(k+1), ..., X_(n-k). Requires 2k < n.
Estimate trimmed_mean(std::span<const double> sample, int k);

/// Mean after clamping the k smallest values to X_(k+1) and the k largest
/// to X_(n-k). Requires 2k < n.
Estimate winsorized_mean(std::span<const double> sample, int k);

/// Median of the means of K contiguous buckets taken in input order, larger
/// buckets first; the median follows the empirical_quantile convention.
Estimate median_of_means(std::span<const double> sample, int K);

// --- shrinkage estimators ----------------------------------------------------

/// kappa + (1/n) * sum_i (X_i - kappa) * w(alpha_hat * |X_i - kappa|).
/// eta == 0 returns the empirical mean exactly; alpha_hat == +inf collapses
/// to kappa.
Estimate shrink_mean(const WeightFn& w, std::span<const double> sample, double kappa,
                     double eta);

/// Normalized variant sum_i X_i w_i / sum_i w_i with the same weights.
/// Throws degenerate_estimate when the weight sum is zero.
Estimate shrink_mean_weighted(const WeightFn& w, std::span<const double> sample, double kappa,
                              double eta);

// --- named estimator configurations ------------------------------------------

enum class BaseKind { EmpiricalMean, EmpiricalQuantile, Median, TrimmedMean, WinsorizedMean, MedianOfMeans };

struct BaseSpec {
    BaseKind kind = BaseKind::EmpiricalMean;
    double gamma = 0.5;  // EmpiricalQuantile
    int k = 0;           // TrimmedMean / WinsorizedMean
    int K = 1;           // MedianOfMeans
};

Estimate evaluate_base(const BaseSpec& base, std::span<const double> sample);

enum class EtaRuleKind { Fixed, LogInvDelta, Theory };

struct EtaRule {
    EtaRuleKind kind = EtaRuleKind::LogInvDelta;
    double value = 0.0;  // Fixed: eta itself; Theory: the slack xi

    /// Fixed -> value; LogInvDelta -> ln(1/delta);
    /// Theory -> ln(4/delta) + (1+xi)*epsilon*n.
    [[nodiscard]] double resolve(double delta, double epsilon, size_t n) const;
};

struct EstimatorSpec {
    enum class Family { Base, Shrink, ShrinkW };
    Family family = Family::Base;
    BaseSpec base;                 // for Family::Base this is the estimator itself
    std::optional<WeightFn> w;     // shrinkage families
    EtaRule eta_rule;              // shrinkage families
    std::string id;                // canonical CLI string, used as column label
};

/// Resolves eta from the spec's rule (using delta, epsilon and the main
/// sample size), computes the base estimate on base_sample for the shrinkage
/// families, and evaluates. Base-family specs ignore base_sample. An aliased
/// base sample (same data) is permitted and flagged in the result.
Estimate evaluate(const EstimatorSpec& spec, std::span<const double> main_sample,
                  std::span<const double> base_sample, double delta, double epsilon);

/// Parses the CLI grammar: mean | median | quantile:g=0.25 | tm:k=3 | wm:k=3 |
/// mom:K=3 | shrink:base=median,w=rational,p=2,eta=log | shrinkw:... where
/// eta is log, fixed:<value> or theory:<xi>.
EstimatorSpec parse_estimator(std::string_view text);

}  // namespace shrinkage
