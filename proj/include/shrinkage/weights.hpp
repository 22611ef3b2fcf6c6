#pragma once

#include <limits>
#include <string>
#include <string_view>
#include <vector>

namespace shrinkage {

enum class WeightId {
    Indicator,      // w(t) = 1{t<1}
    Winsorize,      // w(t) = 1 ∧ 1/t
    LeeValiant,     // w(t) = (1 - t^p)+
    ExpPower,       // w(t) = exp(-t^p)
    RationalPower,  // w(t) = 1/(1 + t^p)
    LogSquared,     // w(t) = 1/ln(e + t^2)
    CircleArc,      // w(t) = 1 - sqrt(1 - (1-t)+^2)
    LogLinear,      // w(t) = 1/ln(e + t)
    InverseSqrt,    // w(t) = 1/(1 + sqrt(t))
};

enum class SolverKind {
    ClosedFormOrderStat,
    ClosedFormPiecewiseLinear,
    Bisection,
};

/// A shrinkage weight function w: [0,inf) -> [0,1] together with its
/// analytic metadata. Entries are immutable after construction and cheap
/// to copy; all member functions are pure.
///
/// Every entry satisfies w(0) = 1, is non-increasing and right-continuous.
/// `c_w` is sup_{t>=0} t*w(t) (+inf for the slowly decaying entries) and
/// `a3_upto` is the largest q such that w(t) >= (1 - t^q)+ for all t >= 0
/// (0 when no positive q works).
struct WeightFn {
    WeightId id;
    double p = 2.0;        // exponent, used by the parameterized entries
    double c_w = 0.0;      // sup t*w(t)
    double cw_maximizer = 0.0;  // argmax of t*w(t) (approached from the left for Indicator)
    bool satisfies_a2 = false;  // c_w finite
    double a3_upto = 0.0;       // largest q with w >= (1-t^q)+
    double support_end = std::numeric_limits<double>::infinity();  // w == 0 on [support_end, inf)
    SolverKind solver = SolverKind::Bisection;

    /// Evaluate w(t). Throws std::invalid_argument for negative or
    /// non-finite t. eval(0) == 1 exactly for every entry.
    [[nodiscard]] double eval(double t) const;
    double operator()(double t) const { return eval(t); }

    /// m(alpha) = c_w / alpha, the largest contribution a single point can
    /// make to the weighted deviation sum. Throws for alpha <= 0.
    [[nodiscard]] double m_alpha(double alpha) const;

    /// Canonical CLI name (indicator, winsorize, lee-valiant, rational,
    /// exp, log2, circle, log1, invsqrt).
    [[nodiscard]] std::string name() const;

    static WeightFn make(WeightId id, double p = 2.0);
    static WeightFn parse(std::string_view name, double p = 2.0);

    /// All nine catalog entries, parameterized entries at exponent p.
    static std::vector<WeightFn> catalog(double p = 2.0);
};

}  // namespace shrinkage
