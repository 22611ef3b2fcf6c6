#include "shrinkage/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace shrinkage {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void validate(const ExperimentConfig& cfg) {
    if (cfg.trials < 1) throw std::invalid_argument("experiment: trials must be >= 1");
    if (!(cfg.delta > 0.0) || !(cfg.delta < 1.0))
        throw std::invalid_argument("experiment: delta must lie in (0,1)");
    if (cfg.N < 2) throw std::invalid_argument("experiment: N must be >= 2");
    if (cfg.distributions.empty() || cfg.estimators.empty())
        throw std::invalid_argument("experiment: needs at least one distribution and estimator");
    if (cfg.split.kind != SplitMode::Kind::FullSampleNA) {
        const int m = cfg.split.resolve_m(cfg.N);
        if (m < 1 || m > cfg.N - 1)
            throw std::invalid_argument("experiment: split must leave 1 <= m <= N-1");
    }
}

}  // namespace

int SplitMode::resolve_m(int N) const {
    switch (kind) {
        case Kind::FullSampleNA:
            return N;
        case Kind::Fraction:
            return std::clamp(static_cast<int>(std::lround(fraction * N)), 1, N - 1);
        case Kind::AbsoluteM:
            return m;
    }
    return m;
}

std::string SplitMode::name() const {
    char buf[32];
    switch (kind) {
        case Kind::FullSampleNA:
            return "na";
        case Kind::Fraction:
            std::snprintf(buf, sizeof(buf), "%g", fraction);
            return buf;
        case Kind::AbsoluteM:
            std::snprintf(buf, sizeof(buf), "m=%d", m);
            return buf;
    }
    return "?";
}

SplitMode SplitMode::na() { return {Kind::FullSampleNA, 0.0, 0}; }
SplitMode SplitMode::fraction_of(double f) { return {Kind::Fraction, f, 0}; }
SplitMode SplitMode::absolute(int m) { return {Kind::AbsoluteM, 0.0, m}; }

TrialRecord run_trial(const ExperimentConfig& cfg, int trial_index, long* weight_bound_violations) {
    const size_t n_dists = cfg.distributions.size();
    const size_t n_ests = cfg.estimators.size();
    TrialRecord rec;
    rec.trial_index = trial_index;
    rec.abs_errors.assign(n_dists * n_ests, kNaN);

    Stream stream = cfg.seed_plan.stream_for_trial(static_cast<std::uint64_t>(trial_index));
    std::vector<double> sample, full_c, base_c, main_c;

    for (size_t d = 0; d < n_dists; ++d) {
        const auto& dist = cfg.distributions[d];
        dist.sample(static_cast<size_t>(cfg.N), stream, sample);

        full_c = contaminate(sample, cfg.epsilon, cfg.contamination_value, stream);
        std::span<const double> base_view, main_view;
        if (cfg.split.kind == SplitMode::Kind::FullSampleNA) {
            base_view = full_c;
            main_view = full_c;
        } else {
            const size_t m = static_cast<size_t>(cfg.split.resolve_m(cfg.N));
            base_c = contaminate(std::span(sample).first(m), cfg.epsilon,
                                 cfg.contamination_value, stream);
            main_c = contaminate(std::span(sample).subspan(m), cfg.epsilon,
                                 cfg.contamination_value, stream);
            base_view = base_c;
            main_view = main_c;
        }

        const double mu = dist.true_mean();
        for (size_t e = 0; e < n_ests; ++e) {
            const auto& spec = cfg.estimators[e];
            try {
                const Estimate est =
                    spec.family == EstimatorSpec::Family::Base
                        ? evaluate_base(spec.base, full_c)
                        : evaluate(spec, main_view, base_view, cfg.delta, cfg.epsilon);
                rec.abs_errors[d * n_ests + e] = std::abs(est.value - mu);

                if (weight_bound_violations != nullptr && cfg.epsilon == 0.0 && est.scaling &&
                    std::isfinite(est.scaling->alpha_hat) && est.scaling->alpha_hat > 0.0) {
                    const double n = static_cast<double>(main_view.size());
                    const double s = est.scaling->weight_sum;
                    if (!(s >= n - est.eta - 1.0 - 1e-6 && s <= n - est.eta + 1e-6))
                        ++*weight_bound_violations;
                }
            } catch (const degenerate_estimate&) {
                // recorded as missing
            } catch (const std::invalid_argument&) {
                // recorded as missing
            }
        }
    }
    return rec;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    validate(cfg);
    ExperimentResult result;
    result.records.resize(static_cast<size_t>(cfg.trials));
    for (const auto& dist : cfg.distributions)
        for (const auto& est : cfg.estimators)
            result.column_labels.push_back(dist.name() + "|" + est.id);

    unsigned n_threads = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads)
                                         : std::max(1u, std::thread::hardware_concurrency());
    n_threads = std::min<unsigned>(n_threads, static_cast<unsigned>(cfg.trials));

    std::atomic<int> next{0};
    std::atomic<long> violations{0};
    auto worker = [&] {
        long local_viol = 0;
        for (;;) {
            const int t = next.fetch_add(1);
            if (t >= cfg.trials) break;
            result.records[static_cast<size_t>(t)] = run_trial(cfg, t, &local_viol);
        }
        violations.fetch_add(local_viol);
    };
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    result.weight_bound_violations = violations.load();
    return result;
}

std::vector<double> quantile_of_errors(const std::vector<TrialRecord>& records, double level,
                                       size_t column_count, std::vector<long>* missing_out) {
    if (!(level > 0.0) || !(level < 1.0))
        throw std::invalid_argument("quantile_of_errors: level must lie in (0,1)");
    if (records.empty()) throw std::invalid_argument("quantile_of_errors: no records");
    std::vector<double> out(column_count, kNaN);
    if (missing_out) missing_out->assign(column_count, 0);
    std::vector<double> col;
    col.reserve(records.size());
    for (size_t j = 0; j < column_count; ++j) {
        col.clear();
        long missing = 0;
        for (const auto& rec : records) {
            const double v = rec.abs_errors.at(j);
            if (std::isnan(v))
                ++missing;
            else
                col.push_back(v);
        }
        if (missing_out) (*missing_out)[j] = missing;
        if (col.empty()) continue;
        const auto rank = std::max<size_t>(
            1, static_cast<size_t>(std::ceil(level * static_cast<double>(col.size()))));
        auto nth = col.begin() + static_cast<std::ptrdiff_t>(rank - 1);
        std::nth_element(col.begin(), nth, col.end());
        out[j] = *nth;
    }
    return out;
}

SummaryTable summarize(const ExperimentConfig& cfg, const ExperimentResult& result,
                       const std::vector<int>& ref_of) {
    const size_t n_dists = cfg.distributions.size();
    const size_t n_ests = cfg.estimators.size();
    std::vector<long> missing;
    const auto q_cols =
        quantile_of_errors(result.records, 1.0 - cfg.delta, n_dists * n_ests, &missing);

    SummaryTable table;
    for (const auto& est : cfg.estimators) table.estimator_labels.push_back(est.id);
    for (const auto& dist : cfg.distributions)
        table.distribution_labels.push_back(dist.name());

    const bool any_ref = std::any_of(ref_of.begin(), ref_of.end(), [](int r) { return r >= 0; });
    table.q.assign(n_ests, std::vector<double>(n_dists, kNaN));
    table.log10_q.assign(n_ests, std::vector<double>(n_dists, kNaN));
    table.missing.assign(n_ests, std::vector<long>(n_dists, 0));
    if (any_ref) table.rel.assign(n_ests, std::vector<double>(n_dists, kNaN));

    for (size_t e = 0; e < n_ests; ++e)
        for (size_t d = 0; d < n_dists; ++d) {
            const double q = q_cols[d * n_ests + e];
            table.q[e][d] = q;
            table.log10_q[e][d] = q > 0.0 ? std::log10(q) : kNaN;
            table.missing[e][d] = missing[d * n_ests + e];
            table.total_missing += missing[d * n_ests + e];
            if (any_ref && ref_of[e] >= 0) {
                const double q_ref = q_cols[d * n_ests + static_cast<size_t>(ref_of[e])];
                table.rel[e][d] = q_ref != 0.0 ? 100.0 * (q - q_ref) / q_ref : kNaN;
            }
        }
    return table;
}

namespace {

Grid to_grid(const SummaryTable& t, const std::vector<std::vector<double>>& cells,
             const std::string& corner) {
    return Grid{corner, t.estimator_labels, t.distribution_labels, cells};
}

}  // namespace

Grid SummaryTable::q_grid() const { return to_grid(*this, q, "q"); }
Grid SummaryTable::rel_grid() const { return to_grid(*this, rel, "rel%"); }
Grid SummaryTable::log10_grid() const { return to_grid(*this, log10_q, "log10"); }

SummaryTable table_relative(const ExperimentConfig& config, const EstimatorSpec& reference) {
    ExperimentConfig cfg = config;
    int ref_index = -1;
    for (size_t e = 0; e < cfg.estimators.size(); ++e)
        if (cfg.estimators[e].id == reference.id) ref_index = static_cast<int>(e);
    if (ref_index < 0) {
        cfg.estimators.push_back(reference);
        ref_index = static_cast<int>(cfg.estimators.size()) - 1;
    }
    const auto result = run_experiment(cfg);
    return summarize(cfg, result, std::vector<int>(cfg.estimators.size(), ref_index));
}

std::vector<std::pair<SplitMode, SummaryTable>> sweep_splits(
    const ExperimentConfig& config, const std::vector<SplitMode>& splits) {
    std::vector<std::pair<SplitMode, SummaryTable>> out;
    for (const auto& split : splits) {
        ExperimentConfig cfg = config;
        cfg.split = split;
        const auto result = run_experiment(cfg);
        out.emplace_back(split, summarize(cfg, result, std::vector<int>(cfg.estimators.size(), -1)));
    }
    return out;
}

int best_m_from_curve(const std::vector<double>& q_per_m, const std::vector<int>& m_grid) {
    if (q_per_m.size() != m_grid.size() || m_grid.empty())
        throw std::invalid_argument("best_m_from_curve: grid/curve size mismatch");
    size_t best = 0;
    for (size_t i = 1; i < q_per_m.size(); ++i)
        if (q_per_m[i] < q_per_m[best]) best = i;  // strict: ties keep the smallest m
    return m_grid[best];
}

std::vector<std::vector<BestSplitStats>> best_split(const ExperimentConfig& config,
                                                    const std::vector<int>& m_grid,
                                                    int replications) {
    if (m_grid.empty()) throw std::invalid_argument("best_split: empty m grid");
    for (int m : m_grid)
        if (m < 1 || m > config.N - 1)
            throw std::invalid_argument("best_split: m grid must lie in [1, N-1]");
    const size_t n_dists = config.distributions.size();
    const size_t n_ests = config.estimators.size();
    std::vector<std::vector<BestSplitStats>> stats(
        n_dists, std::vector<BestSplitStats>(n_ests));

    for (int rep = 0; rep < replications; ++rep) {
        // curves[d][e][i]: error quantile with m = m_grid[i]
        std::vector<std::vector<std::vector<double>>> curves(
            n_dists, std::vector<std::vector<double>>(n_ests));
        for (int m : m_grid) {
            ExperimentConfig cfg = config;
            cfg.split = SplitMode::absolute(m);
            cfg.seed_plan.experiment_id += static_cast<std::uint64_t>(rep);
            const auto result = run_experiment(cfg);
            const auto table = summarize(cfg, result, std::vector<int>(n_ests, -1));
            for (size_t d = 0; d < n_dists; ++d)
                for (size_t e = 0; e < n_ests; ++e) curves[d][e].push_back(table.q[e][d]);
        }
        for (size_t d = 0; d < n_dists; ++d)
            for (size_t e = 0; e < n_ests; ++e)
                stats[d][e].picks.push_back(best_m_from_curve(curves[d][e], m_grid));
    }

    for (auto& row : stats)
        for (auto& s : row) {
            std::vector<double> picks(s.picks.begin(), s.picks.end());
            std::sort(picks.begin(), picks.end());
            const double total = std::accumulate(picks.begin(), picks.end(), 0.0);
            s.mean = total / static_cast<double>(picks.size());
            auto quant = [&](double level) {
                const auto rank = std::max<size_t>(
                    1, static_cast<size_t>(
                           std::ceil(level * static_cast<double>(picks.size()))));
                return picks[rank - 1];
            };
            s.lo = quant(0.025);
            s.hi = quant(0.975);
        }
    return stats;
}

std::vector<std::pair<double, SummaryTable>> sweep_contamination(
    const ExperimentConfig& config, const std::vector<double>& epsilon_list) {
    std::vector<std::pair<double, SummaryTable>> out;
    for (double eps : epsilon_list) {
        ExperimentConfig cfg = config;
        cfg.epsilon = eps;
        const auto result = run_experiment(cfg);
        out.emplace_back(eps, summarize(cfg, result, std::vector<int>(cfg.estimators.size(), -1)));
    }
    return out;
}

void write_records_csv(const std::filesystem::path& path, const ExperimentResult& result) {
    CsvTable table;
    table.header.push_back("trial_index");
    for (const auto& label : result.column_labels) table.header.push_back(label);
    table.rows.reserve(result.records.size());
    for (const auto& rec : result.records) {
        std::vector<double> row;
        row.reserve(rec.abs_errors.size() + 1);
        row.push_back(static_cast<double>(rec.trial_index));
        row.insert(row.end(), rec.abs_errors.begin(), rec.abs_errors.end());
        table.rows.push_back(std::move(row));
    }
    write_csv(path, table);
}

}  // namespace shrinkage
