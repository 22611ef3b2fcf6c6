#include "shrinkage/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <vector>

namespace shrinkage {

namespace {

void require_nonempty(std::span<const double> sample, const char* who) {
    if (sample.empty()) throw std::invalid_argument(std::string(who) + ": empty sample");
}

double order_stat(std::vector<double>& scratch, size_t rank_1based) {
    auto nth = scratch.begin() + static_cast<std::ptrdiff_t>(rank_1based - 1);
    std::nth_element(scratch.begin(), nth, scratch.end());
    return *nth;
}

Estimate value_only(double v) {
    Estimate est;
    est.value = v;
    return est;
}

}  // namespace

Estimate empirical_mean(std::span<const double> sample) {
    require_nonempty(sample, "empirical_mean");
    const double s = std::accumulate(sample.begin(), sample.end(), 0.0);
    return value_only(s / static_cast<double>(sample.size()));
}

Estimate empirical_quantile(std::span<const double> sample, double gamma) {
    require_nonempty(sample, "empirical_quantile");
    if (!(gamma > 0.0) || !(gamma < 1.0))
        throw std::invalid_argument("empirical_quantile: gamma must lie in (0,1)");
    const auto n = static_cast<double>(sample.size());
    const auto rank = static_cast<size_t>(std::ceil(gamma * n));
    std::vector<double> scratch(sample.begin(), sample.end());
    return value_only(order_stat(scratch, std::max<size_t>(rank, 1)));
}

Estimate median(std::span<const double> sample) { return empirical_quantile(sample, 0.5); }

Estimate trimmed_mean(std::span<const double> sample, int k) {
    require_nonempty(sample, "trimmed_mean");
    const auto n = static_cast<int>(sample.size());
    if (k < 0 || 2 * k >= n)
        throw std::invalid_argument("trimmed_mean: requires 0 <= 2k < n");
    std::vector<double> scratch(sample.begin(), sample.end());
    std::sort(scratch.begin(), scratch.end());
    double s = 0.0;
    for (int i = k; i < n - k; ++i) s += scratch[static_cast<size_t>(i)];
    return value_only(s / static_cast<double>(n - 2 * k));
}

Estimate winsorized_mean(std::span<const double> sample, int k) {
    require_nonempty(sample, "winsorized_mean");
    const auto n = static_cast<int>(sample.size());
    if (k < 0 || 2 * k >= n)
        throw std::invalid_argument("winsorized_mean: requires 0 <= 2k < n");
    std::vector<double> scratch(sample.begin(), sample.end());
    std::sort(scratch.begin(), scratch.end());
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        const int j = std::clamp(i, k, n - 1 - k);
        s += scratch[static_cast<size_t>(j)];
    }
    return value_only(s / static_cast<double>(n));
}

Estimate median_of_means(std::span<const double> sample, int K) {
    require_nonempty(sample, "median_of_means");
    const auto n = static_cast<int>(sample.size());
    if (K < 1 || K > n)
        throw std::invalid_argument("median_of_means: requires 1 <= K <= n");
    const int q = n / K;
    const int r = n % K;  // the first r buckets get one extra point
    std::vector<double> bucket_means(static_cast<size_t>(K));
    int pos = 0;
    for (int b = 0; b < K; ++b) {
        const int len = q + (b < r ? 1 : 0);
        double s = 0.0;
        for (int i = 0; i < len; ++i) s += sample[static_cast<size_t>(pos + i)];
        bucket_means[static_cast<size_t>(b)] = s / static_cast<double>(len);
        pos += len;
    }
    return median(bucket_means);
}

Estimate shrink_mean(const WeightFn& w, std::span<const double> sample, double kappa,
                     double eta) {
    if (eta == 0.0) {
        Estimate est = empirical_mean(sample);
        est.scaling = alpha_hat(w, sample, kappa, eta);
        est.eta = 0.0;
        est.kappa = kappa;
        return est;
    }
    ScalingSolution sol = alpha_hat(w, sample, kappa, eta);
    double s = 0.0;
    for (size_t i = 0; i < sample.size(); ++i) s += (sample[i] - kappa) * sol.weights[i];
    Estimate est;
    est.value = kappa + s / static_cast<double>(sample.size());
    est.eta = eta;
    est.kappa = kappa;
    est.scaling = std::move(sol);
    return est;
}

Estimate shrink_mean_weighted(const WeightFn& w, std::span<const double> sample, double kappa,
                              double eta) {
    ScalingSolution sol = alpha_hat(w, sample, kappa, eta);
    if (!(sol.weight_sum > 0.0))
        throw degenerate_estimate("shrink_mean_weighted: all weights are zero");
    double s = 0.0;
    for (size_t i = 0; i < sample.size(); ++i) s += sample[i] * sol.weights[i];
    Estimate est;
    est.value = s / sol.weight_sum;
    est.eta = eta;
    est.kappa = kappa;
    est.scaling = std::move(sol);
    return est;
}

Estimate evaluate_base(const BaseSpec& base, std::span<const double> sample) {
    switch (base.kind) {
        case BaseKind::EmpiricalMean: return empirical_mean(sample);
        case BaseKind::EmpiricalQuantile: return empirical_quantile(sample, base.gamma);
        case BaseKind::Median: return median(sample);
        case BaseKind::TrimmedMean: return trimmed_mean(sample, base.k);
        case BaseKind::WinsorizedMean: return winsorized_mean(sample, base.k);
        case BaseKind::MedianOfMeans: return median_of_means(sample, base.K);
    }
    throw std::logic_error("evaluate_base: unknown kind");
}

double EtaRule::resolve(double delta, double epsilon, size_t n) const {
    switch (kind) {
        case EtaRuleKind::Fixed:
            return value;
        case EtaRuleKind::LogInvDelta:
            if (!(delta > 0.0) || !(delta < 1.0))
                throw std::invalid_argument("eta rule: delta must lie in (0,1)");
            return std::log(1.0 / delta);
        case EtaRuleKind::Theory:
            if (!(delta > 0.0) || !(delta < 1.0))
                throw std::invalid_argument("eta rule: delta must lie in (0,1)");
            return std::log(4.0 / delta) + (1.0 + value) * epsilon * static_cast<double>(n);
    }
    throw std::logic_error("eta rule: unknown kind");
}

Estimate evaluate(const EstimatorSpec& spec, std::span<const double> main_sample,
                  std::span<const double> base_sample, double delta, double epsilon) {
    if (spec.family == EstimatorSpec::Family::Base)
        return evaluate_base(spec.base, main_sample);

    const double eta = spec.eta_rule.resolve(delta, epsilon, main_sample.size());
    const double kappa = evaluate_base(spec.base, base_sample).value;
    Estimate est = spec.family == EstimatorSpec::Family::Shrink
                       ? shrink_mean(*spec.w, main_sample, kappa, eta)
                       : shrink_mean_weighted(*spec.w, main_sample, kappa, eta);
    est.base_aliased = main_sample.data() == base_sample.data() &&
                       main_sample.size() == base_sample.size();
    return est;
}

namespace {

std::map<std::string, std::string> parse_kv(std::string_view text) {
    std::map<std::string, std::string> kv;
    size_t pos = 0;
    while (pos < text.size()) {
        size_t end = text.find(',', pos);
        if (end == std::string_view::npos) end = text.size();
        const std::string_view item = text.substr(pos, end - pos);
        const size_t eq = item.find('=');
        if (eq == std::string_view::npos)
            throw std::invalid_argument("estimator spec: expected key=value, got '" +
                                        std::string(item) + "'");
        kv[std::string(item.substr(0, eq))] = std::string(item.substr(eq + 1));
        pos = end + 1;
    }
    return kv;
}

double to_real(const std::string& s, const char* key) {
    try {
        size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument(std::string("estimator spec: bad value for ") + key +
                                    ": '" + s + "'");
    }
}

int to_int(const std::string& s, const char* key) {
    const double v = to_real(s, key);
    if (v != std::floor(v)) throw std::invalid_argument(std::string("estimator spec: ") + key +
                                                        " must be an integer");
    return static_cast<int>(v);
}

BaseSpec parse_base(const std::string& name, const std::map<std::string, std::string>& kv) {
    BaseSpec base;
    auto get_int = [&](const char* key, int dflt) {
        auto it = kv.find(key);
        return it == kv.end() ? dflt : to_int(it->second, key);
    };
    if (name == "mean") {
        base.kind = BaseKind::EmpiricalMean;
    } else if (name == "median") {
        base.kind = BaseKind::Median;
    } else if (name == "quantile") {
        base.kind = BaseKind::EmpiricalQuantile;
        auto it = kv.find("g");
        if (it == kv.end()) it = kv.find("gamma");
        base.gamma = it == kv.end() ? 0.5 : to_real(it->second, "g");
    } else if (name == "tm") {
        base.kind = BaseKind::TrimmedMean;
        base.k = get_int("k", 3);
    } else if (name == "wm") {
        base.kind = BaseKind::WinsorizedMean;
        base.k = get_int("k", 3);
    } else if (name == "mom") {
        base.kind = BaseKind::MedianOfMeans;
        base.K = get_int("K", 3);
    } else {
        throw std::invalid_argument("estimator spec: unknown base estimator '" + name + "'");
    }
    return base;
}

EtaRule parse_eta(const std::string& text) {
    EtaRule rule;
    if (text == "log") {
        rule.kind = EtaRuleKind::LogInvDelta;
    } else if (text.rfind("fixed:", 0) == 0) {
        rule.kind = EtaRuleKind::Fixed;
        rule.value = to_real(text.substr(6), "eta");
    } else if (text == "theory") {
        rule.kind = EtaRuleKind::Theory;
        rule.value = 0.5;
    } else if (text.rfind("theory:", 0) == 0) {
        rule.kind = EtaRuleKind::Theory;
        rule.value = to_real(text.substr(7), "xi");
    } else {
        throw std::invalid_argument("estimator spec: unknown eta rule '" + text + "'");
    }
    return rule;
}

}  // namespace

EstimatorSpec parse_estimator(std::string_view text) {
    EstimatorSpec spec;
    spec.id = std::string(text);
    const size_t colon = text.find(':');
    const std::string head(text.substr(0, colon));
    const auto kv = colon == std::string_view::npos
                        ? std::map<std::string, std::string>{}
                        : parse_kv(text.substr(colon + 1));

    if (head == "shrink" || head == "shrinkw") {
        spec.family = head == "shrink" ? EstimatorSpec::Family::Shrink
                                       : EstimatorSpec::Family::ShrinkW;
        auto base_it = kv.find("base");
        spec.base = parse_base(base_it == kv.end() ? "median" : base_it->second, kv);
        const double p = kv.count("p") ? to_real(kv.at("p"), "p") : 2.0;
        auto w_it = kv.find("w");
        if (w_it == kv.end())
            throw std::invalid_argument("estimator spec: shrink requires w=<weight>");
        spec.w = WeightFn::parse(w_it->second, p);
        spec.eta_rule = kv.count("eta") ? parse_eta(kv.at("eta")) : EtaRule{};
    } else {
        spec.family = EstimatorSpec::Family::Base;
        spec.base = parse_base(head, kv);
    }
    return spec;
}

}  // namespace shrinkage
