#include "shrinkage/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace shrinkage {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void validate_inputs(std::span<const double> sample, double kappa, double eta) {
    const double n = static_cast<double>(sample.size());
    if (sample.empty()) throw std::invalid_argument("alpha_hat: empty sample");
    if (!(eta >= 0.0) || eta > n)
        throw std::invalid_argument("alpha_hat: eta must lie in [0, n]");
    if (!std::isfinite(kappa)) throw std::invalid_argument("alpha_hat: kappa must be finite");
    for (double x : sample)
        if (!std::isfinite(x))
            throw std::invalid_argument("alpha_hat: sample entries must be finite");
}

std::vector<double> distances(std::span<const double> sample, double kappa) {
    std::vector<double> d(sample.size());
    for (size_t i = 0; i < sample.size(); ++i) d[i] = std::abs(sample[i] - kappa);
    return d;
}

// S(alpha) = sum_i w(alpha * d_i) with the id switch hoisted out of the loop.
double score(const WeightFn& w, const std::vector<double>& d, double alpha) {
    double s = 0.0;
    switch (w.id) {
        case WeightId::Indicator:
            for (double di : d) s += (alpha * di < 1.0) ? 1.0 : 0.0;
            return s;
        case WeightId::Winsorize:
            for (double di : d) {
                const double t = alpha * di;
                s += t <= 1.0 ? 1.0 : 1.0 / t;
            }
            return s;
        case WeightId::LeeValiant:
            if (w.p == 2.0) {
                for (double di : d) {
                    const double t = alpha * di;
                    if (t * t < 1.0) s += 1.0 - t * t;
                }
                return s;
            }
            break;
        case WeightId::RationalPower:
            if (w.p == 2.0) {
                const double a2 = alpha * alpha;
                for (double di : d) s += 1.0 / (1.0 + a2 * di * di);
                return s;
            }
            break;
        case WeightId::ExpPower:
            if (w.p == 2.0) {
                const double a2 = alpha * alpha;
                for (double di : d) s += std::exp(-a2 * di * di);
                return s;
            }
            break;
        case WeightId::LogSquared: {
            const double a2 = alpha * alpha;
            for (double di : d) s += 1.0 / std::log(std::numbers::e + a2 * di * di);
            return s;
        }
        case WeightId::CircleArc:
            for (double di : d) {
                const double t = alpha * di;
                if (t < 1.0) {
                    const double u = 1.0 - t;
                    s += 1.0 - std::sqrt(1.0 - u * u);
                }
            }
            return s;
        case WeightId::LogLinear:
            for (double di : d) s += 1.0 / std::log(std::numbers::e + alpha * di);
            return s;
        case WeightId::InverseSqrt:
            for (double di : d) s += 1.0 / (1.0 + std::sqrt(alpha * di));
            return s;
    }
    for (double di : d) {
        if (di == 0.0) {
            s += 1.0;
            continue;
        }
        const double t = alpha * di;
        s += std::isfinite(t) ? w.eval(t) : 0.0;  // every catalog w vanishes at infinity
    }
    return s;
}

ScalingSolution finish(const WeightFn& w, const std::vector<double>& d, double alpha,
                       SolverKind solver, int iterations) {
    ScalingSolution sol;
    sol.alpha_hat = alpha;
    sol.solver_used = solver;
    sol.iterations = iterations;
    sol.weights.resize(d.size());
    for (size_t i = 0; i < d.size(); ++i) {
        const double t = alpha * d[i];
        sol.weights[i] = d[i] == 0.0 ? 1.0 : (std::isfinite(t) ? w.eval(t) : 0.0);
    }
    sol.weight_sum = std::accumulate(sol.weights.begin(), sol.weights.end(), 0.0);
    return sol;
}

ScalingSolution all_ones(size_t n, SolverKind solver) {
    ScalingSolution sol;
    sol.alpha_hat = 0.0;
    sol.solver_used = solver;
    sol.weights.assign(n, 1.0);
    sol.weight_sum = static_cast<double>(n);
    return sol;
}

ScalingSolution infinite_alpha(const std::vector<double>& d, SolverKind solver) {
    ScalingSolution sol;
    sol.alpha_hat = kInf;
    sol.solver_used = solver;
    sol.weights.resize(d.size());
    for (size_t i = 0; i < d.size(); ++i) sol.weights[i] = d[i] == 0.0 ? 1.0 : 0.0;
    sol.weight_sum = std::accumulate(sol.weights.begin(), sol.weights.end(), 0.0);
    return sol;
}

size_t count_zero(const std::vector<double>& d) {
    return static_cast<size_t>(std::count(d.begin(), d.end(), 0.0));
}

// True when no finite alpha can push the score down to n - eta: the score is
// bounded below by the number of zero distances, and for strictly positive w
// that bound is never attained.
bool needs_infinite_alpha(const WeightFn& w, const std::vector<double>& d, double eta) {
    const double n = static_cast<double>(d.size());
    const double z = static_cast<double>(count_zero(d));
    if (eta > n - z) return true;
    const bool compact = std::isfinite(w.support_end);
    return !compact && eta >= n - z;
}

}  // namespace

ScalingSolution alpha_hat_indicator(std::span<const double> sample, double kappa, double eta) {
    validate_inputs(sample, kappa, eta);
    const size_t n = sample.size();
    if (!(eta > 0.0)) throw std::invalid_argument("alpha_hat_indicator: eta must be positive");
    auto d = distances(sample, kappa);
    if (needs_infinite_alpha(WeightFn::make(WeightId::Indicator), d, eta))
        return infinite_alpha(d, SolverKind::ClosedFormOrderStat);

    auto k_raw = static_cast<long>(std::floor(static_cast<double>(n) - eta));
    const size_t k = static_cast<size_t>(std::clamp<long>(k_raw, 0, static_cast<long>(n) - 1));

    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return d[a] < d[b]; });

    ScalingSolution sol;
    sol.alpha_hat = 1.0 / d[order[k]];
    sol.solver_used = SolverKind::ClosedFormOrderStat;
    sol.weights.assign(n, 0.0);
    for (size_t j = 0; j < k; ++j) sol.weights[order[j]] = 1.0;
    sol.weight_sum = static_cast<double>(k);
    return sol;
}

ScalingSolution alpha_hat_winsorize(std::span<const double> sample, double kappa, double eta) {
    validate_inputs(sample, kappa, eta);
    const size_t n = sample.size();
    if (!(eta > 0.0) || !(eta < static_cast<double>(n)))
        throw std::invalid_argument("alpha_hat_winsorize: eta must lie in (0, n)");
    auto d = distances(sample, kappa);
    if (needs_infinite_alpha(WeightFn::make(WeightId::Winsorize), d, eta))
        return infinite_alpha(d, SolverKind::ClosedFormPiecewiseLinear);

    std::vector<double> ds(d.begin(), d.end());
    std::sort(ds.begin(), ds.end());
    const size_t z = count_zero(ds);

    // Suffix sums of reciprocals: recip_tail[j] = sum_{i >= j} 1/ds[i].
    std::vector<double> recip_tail(n + 1, 0.0);
    for (size_t i = n; i-- > z;) recip_tail[i] = recip_tail[i + 1] + 1.0 / ds[i];

    const double target = static_cast<double>(n) - eta;
    double M = -1.0;
    for (size_t j = z; j < n; ++j) {
        const double r = recip_tail[j];
        const double cand = (target - static_cast<double>(j)) / r;
        const double seg_lo = j == 0 ? 0.0 : ds[j - 1];
        const double seg_hi = ds[j];
        if (cand >= seg_lo && cand <= seg_hi) {
            M = cand;
            break;
        }
    }
    if (M < 0.0) {
        // Floating-point corner: a candidate landed epsilon outside both
        // neighboring segments at a knot. Clamp into the first segment whose
        // right endpoint already reaches the target.
        for (size_t j = z; j < n; ++j) {
            const double g_hi = static_cast<double>(j) + ds[j] * recip_tail[j];
            if (g_hi >= target) {
                const double cand = (target - static_cast<double>(j)) / recip_tail[j];
                M = std::clamp(cand, j == 0 ? 0.0 : ds[j - 1], ds[j]);
                break;
            }
        }
    }

    ScalingSolution sol;
    sol.alpha_hat = 1.0 / M;
    sol.solver_used = SolverKind::ClosedFormPiecewiseLinear;
    sol.weights.resize(n);
    for (size_t i = 0; i < n; ++i) sol.weights[i] = d[i] <= M ? 1.0 : M / d[i];
    sol.weight_sum = std::accumulate(sol.weights.begin(), sol.weights.end(), 0.0);
    return sol;
}

ScalingSolution alpha_hat_bisection(const WeightFn& w, std::span<const double> sample,
                                    double kappa, double eta, double tol) {
    validate_inputs(sample, kappa, eta);
    const size_t n = sample.size();
    if (eta == 0.0) return all_ones(n, SolverKind::Bisection);
    auto d = distances(sample, kappa);
    if (needs_infinite_alpha(w, d, eta)) return infinite_alpha(d, SolverKind::Bisection);

    const double target = static_cast<double>(n) - eta;
    const double d_max = *std::max_element(d.begin(), d.end());
    double alpha0 = d_max > 0.0 ? 1.0 / d_max : 1.0;

    int iters = 0;
    double lo, hi;
    if (score(w, d, alpha0) > target) {
        lo = alpha0;
        hi = 2.0 * alpha0;
        int doublings = 0;
        while (score(w, d, hi) > target) {
            lo = hi;
            hi *= 2.0;
            if (++doublings > 1024 || !std::isfinite(hi))
                return infinite_alpha(d, SolverKind::Bisection);
        }
        iters += doublings;
    } else {
        hi = alpha0;
        lo = alpha0 / 2.0;
        int halvings = 0;
        while (score(w, d, lo) <= target) {
            hi = lo;
            lo /= 2.0;
            if (++halvings > 1024) break;  // score -> n as alpha -> 0; unreachable for eta > 0
        }
        iters += halvings;
    }

    // Invariant: S(lo) > target >= S(hi); the infimum lies in (lo, hi].
    for (int i = 0; i < 200 && hi - lo > tol * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (score(w, d, mid) <= target)
            hi = mid;
        else
            lo = mid;
        ++iters;
    }
    return finish(w, d, hi, SolverKind::Bisection, iters);
}

ScalingSolution alpha_hat(const WeightFn& w, std::span<const double> sample, double kappa,
                          double eta) {
    validate_inputs(sample, kappa, eta);
    if (eta == 0.0) return all_ones(sample.size(), w.solver);
    switch (w.solver) {
        case SolverKind::ClosedFormOrderStat:
            return alpha_hat_indicator(sample, kappa, eta);
        case SolverKind::ClosedFormPiecewiseLinear:
            if (eta < static_cast<double>(sample.size()))
                return alpha_hat_winsorize(sample, kappa, eta);
            return alpha_hat_bisection(w, sample, kappa, eta);
        case SolverKind::Bisection:
            return alpha_hat_bisection(w, sample, kappa, eta);
    }
    throw std::logic_error("alpha_hat: unknown solver kind");
}

}  // namespace shrinkage
