#include "shrinkage/simulate.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace shrinkage {

namespace {

// splitmix64 output finalizer; also the seed-chain hash.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double delta_of(double a) { return a / std::sqrt(1.0 + a * a); }

}  // namespace

std::uint64_t Stream::next_u64() {
    state += 0x9e3779b97f4a7c15ULL;
    return mix64(state);
}

std::uint64_t Stream::next_below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("Stream::next_below: bound must be positive");
    std::uint64_t mask = bound - 1;
    mask |= mask >> 1; mask |= mask >> 2; mask |= mask >> 4;
    mask |= mask >> 8; mask |= mask >> 16; mask |= mask >> 32;
    std::uint64_t x;
    do {
        x = next_u64() & mask;
    } while (x >= bound);
    return x;
}

double Stream::next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Stream::next_unit_open() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
}

double Stream::next_normal() {
    if (has_spare) {
        has_spare = false;
        return spare;
    }
    const double r = std::sqrt(-2.0 * std::log(next_unit_open()));
    const double theta = 2.0 * std::numbers::pi * next_unit();
    spare = r * std::sin(theta);
    has_spare = true;
    return r * std::cos(theta);
}

double Stream::next_gamma(double shape) {
    if (!(shape > 0.0)) throw std::invalid_argument("Stream::next_gamma: shape must be positive");
    if (shape < 1.0) {
        const double boost = std::pow(next_unit_open(), 1.0 / shape);
        return next_gamma(shape + 1.0) * boost;
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = next_normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = next_unit_open();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

double Stream::next_chi_squared(double nu) { return 2.0 * next_gamma(0.5 * nu); }

Stream SeedPlan::stream_for_trial(std::uint64_t trial_index) const {
    Stream s;
    s.state = mix64(mix64(mix64(master_seed) ^ experiment_id) ^ trial_index);
    return s;
}

DistributionSpec DistributionSpec::normal() { return {DistFamily::Normal, 0.0, 0.0}; }

DistributionSpec DistributionSpec::skew_normal(double a) {
    return {DistFamily::SkewNormal, a, 0.0};
}

DistributionSpec DistributionSpec::student_t(double nu) {
    if (!(nu > 1.0)) throw std::invalid_argument("student_t: nu must exceed 1");
    return {DistFamily::StudentT, 0.0, nu};
}

DistributionSpec DistributionSpec::skew_t(double nu, double a) {
    if (!(nu > 1.0)) throw std::invalid_argument("skew_t: nu must exceed 1");
    return {DistFamily::SkewT, a, nu};
}

double DistributionSpec::true_mean() const {
    switch (family) {
        case DistFamily::Normal:
            return 0.0;
        case DistFamily::SkewNormal:
            return std::sqrt(2.0 / std::numbers::pi) * delta_of(shape_a);
        case DistFamily::StudentT:
            if (!(nu > 1.0)) throw std::invalid_argument("true_mean: nu must exceed 1");
            return 0.0;
        case DistFamily::SkewT: {
            if (!(nu > 1.0)) throw std::invalid_argument("true_mean: nu must exceed 1");
            const double b = std::sqrt(nu / std::numbers::pi) *
                             std::exp(std::lgamma(0.5 * (nu - 1.0)) - std::lgamma(0.5 * nu));
            return delta_of(shape_a) * b;
        }
    }
    throw std::logic_error("true_mean: unknown family");
}

std::optional<double> DistributionSpec::nu2() const {
    switch (family) {
        case DistFamily::Normal:
            return 1.0;
        case DistFamily::SkewNormal: {
            const double d = delta_of(shape_a);
            return std::sqrt(1.0 - 2.0 * d * d / std::numbers::pi);
        }
        case DistFamily::StudentT:
            if (nu > 2.0) return std::sqrt(nu / (nu - 2.0));
            return std::nullopt;
        case DistFamily::SkewT: {
            if (!(nu > 2.0)) return std::nullopt;
            const double m = true_mean();
            return std::sqrt(nu / (nu - 2.0) - m * m);
        }
    }
    return std::nullopt;
}

std::string DistributionSpec::name() const {
    auto num = [](double v) {
        std::string s = std::to_string(v);
        s.erase(s.find_last_not_of('0') + 1);
        if (!s.empty() && s.back() == '.') s.pop_back();
        return s;
    };
    switch (family) {
        case DistFamily::Normal: return "normal";
        case DistFamily::SkewNormal: return "skewnormal:a=" + num(shape_a);
        case DistFamily::StudentT: return "t:nu=" + num(nu);
        case DistFamily::SkewT: return "skewt:nu=" + num(nu) + ",a=" + num(shape_a);
    }
    return "?";
}

double DistributionSpec::draw(Stream& stream) const {
    switch (family) {
        case DistFamily::Normal:
            return stream.next_normal();
        case DistFamily::SkewNormal: {
            const double d = delta_of(shape_a);
            const double z1 = stream.next_normal();
            const double z2 = stream.next_normal();
            return d * std::abs(z1) + std::sqrt(1.0 - d * d) * z2;
        }
        case DistFamily::StudentT: {
            const double z = stream.next_normal();
            return z * std::sqrt(nu / stream.next_chi_squared(nu));
        }
        case DistFamily::SkewT: {
            const double d = delta_of(shape_a);
            const double z1 = stream.next_normal();
            const double z2 = stream.next_normal();
            const double sn = d * std::abs(z1) + std::sqrt(1.0 - d * d) * z2;
            return sn * std::sqrt(nu / stream.next_chi_squared(nu));
        }
    }
    throw std::logic_error("draw: unknown family");
}

void DistributionSpec::sample(size_t n, Stream& stream, std::vector<double>& out) const {
    if (n < 1) throw std::invalid_argument("sample: n must be positive");
    out.resize(n);
    for (size_t i = 0; i < n; ++i) out[i] = draw(stream);
}

DistributionSpec DistributionSpec::parse(std::string_view text) {
    auto get = [&](std::string_view key, double dflt) {
        const std::string pat = std::string(key) + "=";
        const size_t pos = text.find(pat);
        if (pos == std::string_view::npos) return dflt;
        return std::stod(std::string(text.substr(pos + pat.size())));
    };
    if (text == "normal") return normal();
    if (text.rfind("skewnormal", 0) == 0) return skew_normal(get("a", 5.0));
    if (text.rfind("skewt", 0) == 0) return skew_t(get("nu", 2.01), get("a", 5.0));
    if (text == "t" || text.rfind("t:", 0) == 0) return student_t(get("nu", 2.01));
    throw std::invalid_argument("unknown distribution: " + std::string(text));
}

std::vector<double> contaminate(std::span<const double> sample, double epsilon, double value,
                                Stream& stream) {
    if (!(epsilon >= 0.0) || !(epsilon < 1.0))
        throw std::invalid_argument("contaminate: epsilon must lie in [0, 1)");
    if (!std::isfinite(value))
        throw std::invalid_argument("contaminate: replacement value must be finite");
    std::vector<double> out(sample.begin(), sample.end());
    const size_t n = sample.size();
    const auto count =
        static_cast<size_t>(std::floor(epsilon * static_cast<double>(n) + 1e-12));
    if (count == 0) return out;

    // Partial Fisher-Yates over an index array; the first `count` slots are
    // the replaced positions.
    std::vector<size_t> idx(n);
    std::iota(idx.begin(), idx.end(), size_t{0});
    for (size_t i = 0; i < count; ++i) {
        const size_t j = i + static_cast<size_t>(stream.next_below(n - i));
        std::swap(idx[i], idx[j]);
        out[idx[i]] = value;
    }
    return out;
}

}  // namespace shrinkage
