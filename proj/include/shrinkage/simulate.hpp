#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace shrinkage {

/// Counter-based splittable generator (splitmix64 core). A Stream is a value:
/// copying it forks the sequence, and per-trial streams are derived from the
/// seed plan by a fixed hash chain, so results never depend on thread count
/// or scheduling.
struct Stream {
    std::uint64_t state = 0;
    bool has_spare = false;
    double spare = 0.0;

    std::uint64_t next_u64();
    std::uint64_t next_below(std::uint64_t bound);  // unbiased in [0, bound)
    double next_unit();                             // in [0, 1)
    double next_unit_open();                        // in (0, 1]
    double next_normal();                           // standard normal (Box-Muller)
    double next_gamma(double shape);                // Gamma(shape, 1), Marsaglia-Tsang
    double next_chi_squared(double nu);             // 2 * Gamma(nu/2, 1)
};

/// Seed derivation: state = mix(mix(mix(master_seed) ^ experiment_id) ^ trial_index),
/// where mix is the splitmix64 finalizer. Identical plans reproduce identical
/// samples bitwise.
struct SeedPlan {
    std::uint64_t master_seed = 1;
    std::uint64_t experiment_id = 0;

    [[nodiscard]] Stream stream_for_trial(std::uint64_t trial_index) const;
};

enum class DistFamily { Normal, SkewNormal, StudentT, SkewT };

/// One of the four benchmark distributions with its analytic population mean.
/// StudentT/SkewT require nu > 1 so the mean exists.
struct DistributionSpec {
    DistFamily family = DistFamily::Normal;
    double shape_a = 0.0;  // skewness shape (SkewNormal, SkewT)
    double nu = 2.01;      // degrees of freedom (StudentT, SkewT)

    [[nodiscard]] double true_mean() const;
    /// Population standard deviation when finite (nu > 2 for the t families).
    [[nodiscard]] std::optional<double> nu2() const;
    [[nodiscard]] std::string name() const;

    double draw(Stream& stream) const;
    void sample(size_t n, Stream& stream, std::vector<double>& out) const;

    static DistributionSpec normal();
    static DistributionSpec skew_normal(double a);
    static DistributionSpec student_t(double nu);
    static DistributionSpec skew_t(double nu, double a);
    /// Parses normal | skewnormal:a=5 | t:nu=2.01 | skewt:nu=2.01,a=5.
    static DistributionSpec parse(std::string_view text);
};

/// Replaces exactly floor(epsilon*n) positions, chosen uniformly without
/// replacement, by `value`. epsilon must lie in [0, 1); epsilon == 0 returns
/// the input unchanged without consuming the stream.
std::vector<double> contaminate(std::span<const double> sample, double epsilon, double value,
                                Stream& stream);

}  // namespace shrinkage
