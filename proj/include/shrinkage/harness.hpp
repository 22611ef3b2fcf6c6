#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "shrinkage/estimators.hpp"
#include "shrinkage/io.hpp"
#include "shrinkage/simulate.hpp"

namespace shrinkage {

/// How the N sample points are divided between the base estimate and the
/// shrinkage estimate. FullSampleNA aliases both onto the full sample.
struct SplitMode {
    enum class Kind { FullSampleNA, Fraction, AbsoluteM };
    Kind kind = Kind::AbsoluteM;
    double fraction = 0.05;
    int m = 25;

    [[nodiscard]] int resolve_m(int N) const;
    [[nodiscard]] std::string name() const;

    static SplitMode na();
    static SplitMode fraction_of(double f);
    static SplitMode absolute(int m);
};

struct ExperimentConfig {
    std::vector<DistributionSpec> distributions;
    std::vector<EstimatorSpec> estimators;
    int N = 500;
    SplitMode split = SplitMode::absolute(25);
    double delta = 0.05;
    double epsilon = 0.0;
    double contamination_value = 1e6;
    int trials = 10000;
    SeedPlan seed_plan;
    int threads = 0;  // 0: hardware concurrency
};

/// Absolute errors |estimate - true mean| for one trial; entries are laid out
/// distribution-major (all estimators for distribution 0, then 1, ...).
/// A failed estimator evaluation is recorded as NaN, never an abort.
struct TrialRecord {
    int trial_index = 0;
    std::vector<double> abs_errors;
};

struct ExperimentResult {
    std::vector<TrialRecord> records;
    std::vector<std::string> column_labels;  // "<distribution>|<estimator>"
    long weight_bound_violations = 0;  // weight-sum bound failures observed at epsilon == 0
};

/// One Monte Carlo trial: draws N points per distribution, splits/aliases
/// per the split mode, contaminates each part (floor(eps*m) and floor(eps*n)
/// replacements; base-family estimators are evaluated on the full
/// contaminated sample of size N), and evaluates every estimator.
/// Deterministic given (seed_plan, trial_index).
TrialRecord run_trial(const ExperimentConfig& config, int trial_index,
                      long* weight_bound_violations = nullptr);

/// Runs all trials over a bounded worker pool; each trial owns its derived
/// stream and writes into a preallocated slot, so the result is independent
/// of the worker count.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Per-column order statistic at rank ceil(level * T) over the T finite
/// errors; NaN entries are excluded and counted into *missing_out.
std::vector<double> quantile_of_errors(const std::vector<TrialRecord>& records, double level,
                                       size_t column_count,
                                       std::vector<long>* missing_out = nullptr);

struct SummaryTable {
    std::vector<std::string> estimator_labels;     // rows
    std::vector<std::string> distribution_labels;  // columns
    std::vector<std::vector<double>> q;            // (1-delta)-quantile of errors
    std::vector<std::vector<double>> rel;          // 100*(q - q_ref)/q_ref, empty if no refs
    std::vector<std::vector<double>> log10_q;      // log10(q), NaN for q <= 0
    std::vector<std::vector<long>> missing;        // failed evaluations per cell
    long total_missing = 0;

    [[nodiscard]] Grid q_grid() const;
    [[nodiscard]] Grid rel_grid() const;
    [[nodiscard]] Grid log10_grid() const;
};

/// Builds the summary from a finished experiment. ref_of maps each estimator
/// index to the index of its reference estimator (-1 for none); when every
/// entry is -1 the rel matrix is left empty.
SummaryTable summarize(const ExperimentConfig& config, const ExperimentResult& result,
                       const std::vector<int>& ref_of);

/// Runs the experiment and reports relative differences of every estimator
/// against a single reference (appended to the estimator list if absent);
/// the reference, like every base-family spec, is evaluated on the full
/// sample of size N.
SummaryTable table_relative(const ExperimentConfig& config, const EstimatorSpec& reference);

/// One summary per split mode, all sharing the seed plan so the underlying
/// samples are paired across splits.
std::vector<std::pair<SplitMode, SummaryTable>> sweep_splits(
    const ExperimentConfig& config, const std::vector<SplitMode>& splits);

/// argmin of the error curve over m_grid, ties resolved to the smallest m.
int best_m_from_curve(const std::vector<double>& q_per_m, const std::vector<int>& m_grid);

struct BestSplitStats {
    double mean = 0.0;
    double lo = 0.0;   // 2.5% quantile over replications
    double hi = 0.0;   // 97.5% quantile over replications
    std::vector<int> picks;
};

/// For each (distribution, estimator): the best-performing base-sample size
/// m* over m_grid, replicated `replications` times (replication r uses
/// experiment_id + r). Returned as [distribution][estimator].
std::vector<std::vector<BestSplitStats>> best_split(const ExperimentConfig& config,
                                                    const std::vector<int>& m_grid,
                                                    int replications);

/// One summary per contamination level, with log10 errors filled in.
std::vector<std::pair<double, SummaryTable>> sweep_contamination(
    const ExperimentConfig& config, const std::vector<double>& epsilon_list);

/// Raw per-trial errors to CSV: header "trial_index" then one column per
/// (distribution, estimator) pair.
void write_records_csv(const std::filesystem::path& path, const ExperimentResult& result);

}  // namespace shrinkage
