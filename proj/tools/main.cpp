#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "shrinkage/harness.hpp"

using namespace shrinkage;
namespace fs = std::filesystem;

namespace {

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> items;
    size_t pos = 0;
    while (pos <= text.size()) {
        size_t end = text.find(',', pos);
        if (end == std::string::npos) end = text.size();
        if (end > pos) items.push_back(text.substr(pos, end - pos));
        pos = end + 1;
    }
    return items;
}

std::vector<double> parse_real_list(const std::string& text) {
    std::vector<double> values;
    for (const auto& item : split_list(text)) values.push_back(std::stod(item));
    return values;
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> values;
    for (const auto& item : split_list(text)) values.push_back(std::stoi(item));
    return values;
}

std::vector<DistributionSpec> parse_dists(const std::string& text) {
    // distribution names may themselves contain commas (skewt:nu=2.01,a=5),
    // so fragments that do not start a family name re-attach to the previous
    // entry
    std::vector<std::string> names;
    for (const auto& item : split_list(text)) {
        const bool starts_family = item == "normal" || item == "t" ||
                                   item.rfind("t:", 0) == 0 ||
                                   item.rfind("skewnormal", 0) == 0 ||
                                   item.rfind("skewt", 0) == 0;
        if (starts_family || names.empty())
            names.push_back(item);
        else
            names.back() += "," + item;
    }
    std::vector<DistributionSpec> dists;
    for (const auto& name : names) dists.push_back(DistributionSpec::parse(name));
    return dists;
}

struct BenchFlags {
    int trials = 10000;
    std::uint64_t seed = 1;
    double delta = 0.05;
    int N = 500;
    int m = 25;
    std::string eps = "0";
    std::string dists = "normal,skewnormal:a=5,t:nu=2.01,skewt:nu=2.01,a=5";
    std::string out;
    int threads = 0;
    std::string eta_rule;  // empty: per-experiment default
    double value = 1e6;
    double p = 2.0;
    std::string splits = "na,0.05,0.5,0.95";
    std::string m_grid = "2,5,10,15,20,25,30,40,50";
    std::string n_grid = "100,250,500,750,1000";
    int reps = 50;
    std::string config_path;
};

std::string shrink_id(const std::string& base, const std::string& w, double p,
                      const std::string& eta_rule) {
    std::string id = "shrink:base=" + base + ",w=" + w;
    if (w == "lee-valiant" || w == "exp" || w == "rational") {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%g", p);
        id += std::string(",p=") + buf;
    }
    return id + ",eta=" + eta_rule;
}

// The benchmark estimator block: one reference row per base estimator plus
// one shrinkage row per (base, weight).
struct BenchSet {
    std::vector<EstimatorSpec> estimators;
    std::vector<int> ref_of;
    std::vector<std::string> base_ids;
    std::vector<std::string> w_names;
    // position of the shrink estimator for (base index, w index)
    std::vector<std::vector<size_t>> shrink_index;
};

BenchSet make_bench_set(const std::vector<std::string>& bases,
                        const std::vector<std::string>& ws, double p,
                        const std::string& eta_rule) {
    BenchSet set;
    set.base_ids = bases;
    set.w_names = ws;
    set.shrink_index.assign(bases.size(), std::vector<size_t>(ws.size(), 0));
    for (size_t b = 0; b < bases.size(); ++b) {
        const auto ref_index = static_cast<int>(set.estimators.size());
        set.estimators.push_back(parse_estimator(bases[b]));
        set.ref_of.push_back(ref_index);
        for (size_t wi = 0; wi < ws.size(); ++wi) {
            set.shrink_index[b][wi] = set.estimators.size();
            set.estimators.push_back(parse_estimator(shrink_id(bases[b], ws[wi], p, eta_rule)));
            set.ref_of.push_back(ref_index);
        }
    }
    return set;
}

ExperimentConfig base_config(const BenchFlags& flags, std::uint64_t experiment_id) {
    ExperimentConfig cfg;
    cfg.distributions = parse_dists(flags.dists);
    cfg.N = flags.N;
    cfg.split = SplitMode::absolute(flags.m);
    cfg.delta = flags.delta;
    cfg.contamination_value = flags.value;
    cfg.trials = flags.trials;
    cfg.seed_plan = {.master_seed = flags.seed, .experiment_id = experiment_id};
    cfg.threads = flags.threads;
    return cfg;
}

// Reshapes a summary into the benchmark layout: one row per weight function,
// one column block per (base, distribution).
Grid weights_by_base_grid(const SummaryTable& table, const BenchSet& set,
                          const std::vector<std::vector<double>>& cells,
                          const std::string& corner) {
    Grid grid;
    grid.corner_label = corner;
    grid.row_labels = set.w_names;
    for (const auto& base : set.base_ids)
        for (const auto& dist : table.distribution_labels)
            grid.col_labels.push_back(base + "|" + dist);
    grid.cells.assign(set.w_names.size(),
                      std::vector<double>(grid.col_labels.size(), std::nan("")));
    for (size_t wi = 0; wi < set.w_names.size(); ++wi) {
        size_t col = 0;
        for (size_t b = 0; b < set.base_ids.size(); ++b) {
            const size_t est = set.shrink_index[b][wi];
            for (size_t d = 0; d < table.distribution_labels.size(); ++d)
                grid.cells[wi][col + d] = cells[est][d];
            col += table.distribution_labels.size();
        }
    }
    return grid;
}

void persist_summary(const fs::path& out_dir, const ExperimentResult& result,
                     const SummaryTable& table) {
    write_records_csv(out_dir / "raw.csv", result);
    const auto grid = table.rel.empty() ? table.q_grid() : table.rel_grid();
    write_grid_csv(out_dir / "summary.csv", grid);
    write_grid_markdown(out_dir / "summary.md", grid);
    write_grid_csv(out_dir / "summary_q.csv", table.q_grid());
}

int bench_table_like(const BenchFlags& flags, const std::vector<std::string>& ws,
                     const std::string& experiment, std::uint64_t experiment_id) {
    const std::string eta_rule = flags.eta_rule.empty() ? "log" : flags.eta_rule;
    const auto set = make_bench_set({"mean", "median", "tm", "mom"}, ws, flags.p, eta_rule);
    auto cfg = base_config(flags, experiment_id);
    cfg.estimators = set.estimators;
    const auto eps_list = parse_real_list(flags.eps);
    cfg.epsilon = eps_list.empty() ? 0.0 : eps_list.front();

    const auto result = run_experiment(cfg);
    const auto table = summarize(cfg, result, set.ref_of);
    if (result.weight_bound_violations > 0)
        std::cerr << "warning: " << result.weight_bound_violations
                  << " weight-sum bound violations recorded\n";
    if (table.total_missing > 0)
        std::cerr << "warning: " << table.total_missing
                  << " estimator evaluations failed and were excluded\n";

    const fs::path out_dir =
        flags.out.empty() ? fs::path("out") / experiment : fs::path(flags.out);
    persist_summary(out_dir, result, table);
    const auto grid = weights_by_base_grid(table, set, table.rel, "rel% vs base");
    write_grid_csv(out_dir / "summary_by_base.csv", grid);
    std::cout << "relative difference (%) of the (1-delta)-quantile error vs the base\n"
              << "estimator on the full sample (columns: base|distribution)\n\n"
              << grid_to_markdown(grid) << "\nresults written to " << out_dir.string() << "\n";
    return 0;
}

int bench_splits(const BenchFlags& flags) {
    const std::string eta_rule = flags.eta_rule.empty() ? "log" : flags.eta_rule;
    const auto set = make_bench_set({"mean", "median", "tm", "mom"},
                                    {"exp", "rational", "winsorize", "indicator", "lee-valiant"},
                                    flags.p, eta_rule);
    auto cfg = base_config(flags, 2);
    cfg.estimators = set.estimators;

    std::vector<SplitMode> split_modes;
    for (const auto& item : split_list(flags.splits)) {
        if (item == "na")
            split_modes.push_back(SplitMode::na());
        else
            split_modes.push_back(SplitMode::fraction_of(std::stod(item)));
    }

    const auto sweeps = sweep_splits(cfg, split_modes);
    const fs::path out_dir = flags.out.empty() ? fs::path("out/splits") : fs::path(flags.out);

    // rows: shrinkage estimators; columns: distribution x split; cells: rel%
    // against the base on the full sample
    Grid grid;
    grid.corner_label = "estimator";
    for (const auto& est : set.estimators)
        if (est.family != EstimatorSpec::Family::Base) grid.row_labels.push_back(est.id);
    for (const auto& dist : cfg.distributions)
        for (const auto& [split, table] : sweeps)
            grid.col_labels.push_back(dist.name() + "|" + split.name());
    grid.cells.assign(grid.row_labels.size(),
                      std::vector<double>(grid.col_labels.size(), std::nan("")));

    size_t col = 0;
    for (size_t d = 0; d < cfg.distributions.size(); ++d) {
        for (const auto& [split, table] : sweeps) {
            size_t row = 0;
            for (size_t e = 0; e < set.estimators.size(); ++e) {
                if (set.estimators[e].family == EstimatorSpec::Family::Base) continue;
                const double q = table.q[e][d];
                const double q_ref = table.q[static_cast<size_t>(set.ref_of[e])][d];
                grid.cells[row][col] =
                    q_ref != 0.0 ? 100.0 * (q - q_ref) / q_ref : std::nan("");
                ++row;
            }
            ++col;
        }
    }
    write_grid_csv(out_dir / "summary.csv", grid);
    write_grid_markdown(out_dir / "summary.md", grid);
    for (const auto& [split, table] : sweeps)
        write_grid_csv(out_dir / ("q_split_" + split.name() + ".csv"), table.q_grid());
    std::cout << "relative difference (%) vs the base on the full sample, per split\n\n"
              << grid_to_markdown(grid) << "\nresults written to " << out_dir.string() << "\n";
    return 0;
}

int bench_best_split(const BenchFlags& flags) {
    const std::string eta_rule = flags.eta_rule.empty() ? "log" : flags.eta_rule;
    const std::vector<std::string> ws{"exp", "rational", "winsorize", "indicator",
                                      "lee-valiant"};
    const auto n_grid = parse_int_list(flags.n_grid);
    const auto m_grid_all = parse_int_list(flags.m_grid);
    const fs::path out_dir =
        flags.out.empty() ? fs::path("out/best-split") : fs::path(flags.out);

    std::vector<EstimatorSpec> ests;
    for (const auto& base : {"mean", "median"})
        for (const auto& w : ws) ests.push_back(parse_estimator(shrink_id(base, w, flags.p, eta_rule)));

    auto cfg0 = base_config(flags, 3);
    cfg0.estimators = ests;
    const auto dists = cfg0.distributions;

    std::vector<std::vector<std::vector<double>>> mean_series(
        dists.size(), std::vector<std::vector<double>>(ests.size()));
    auto lo_series = mean_series, hi_series = mean_series;

    for (size_t ni = 0; ni < n_grid.size(); ++ni) {
        auto cfg = cfg0;
        cfg.N = n_grid[ni];
        cfg.seed_plan.experiment_id = 3 + 1000 * ni;
        std::vector<int> m_grid;
        for (int m : m_grid_all)
            if (m >= 1 && m <= cfg.N - 1) m_grid.push_back(m);
        const auto stats = best_split(cfg, m_grid, flags.reps);
        for (size_t d = 0; d < dists.size(); ++d)
            for (size_t e = 0; e < ests.size(); ++e) {
                mean_series[d][e].push_back(stats[d][e].mean);
                lo_series[d][e].push_back(stats[d][e].lo);
                hi_series[d][e].push_back(stats[d][e].hi);
            }
        std::cout << "N=" << cfg.N << " done\n";
    }

    const std::vector<double> xs(n_grid.begin(), n_grid.end());
    for (size_t d = 0; d < dists.size(); ++d) {
        std::vector<Series> series, mean_only;
        for (size_t e = 0; e < ests.size(); ++e) {
            series.push_back({ests[e].id + "|mstar", mean_series[d][e]});
            series.push_back({ests[e].id + "|lo", lo_series[d][e]});
            series.push_back({ests[e].id + "|hi", hi_series[d][e]});
            mean_only.push_back({ests[e].id, mean_series[d][e]});
        }
        const auto panel = "fig_best_split_" + dists[d].name().substr(0, dists[d].name().find(':'));
        write_series_csv(out_dir / (panel + ".csv"), "N", xs, series);
        write_svg_lines(out_dir / (panel + ".svg"), "best m vs N: " + dists[d].name(), xs,
                        mean_only);
    }
    std::cout << "results written to " << out_dir.string() << "\n";
    return 0;
}

int bench_contamination(const BenchFlags& flags) {
    const std::string eta_rule = flags.eta_rule.empty() ? "theory:0.5" : flags.eta_rule;
    const auto set =
        make_bench_set({"mean", "median", "tm", "mom"},
                       {"indicator", "winsorize", "lee-valiant", "exp", "rational"}, flags.p,
                       eta_rule);
    auto cfg = base_config(flags, 4);
    cfg.estimators = set.estimators;
    auto eps_list = parse_real_list(flags.eps);
    if (eps_list.empty() || (eps_list.size() == 1 && eps_list[0] == 0.0))
        eps_list = {0.0, 0.05, 0.1, 0.2};

    const auto sweeps = sweep_contamination(cfg, eps_list);
    const fs::path out_dir =
        flags.out.empty() ? fs::path("out/contamination") : fs::path(flags.out);

    Grid grid;
    grid.corner_label = "estimator";
    for (const auto& est : set.estimators) grid.row_labels.push_back(est.id);
    for (const auto& dist : cfg.distributions)
        for (const auto& [eps, table] : sweeps) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%g", eps);
            grid.col_labels.push_back(dist.name() + "|eps=" + buf);
        }
    grid.cells.assign(grid.row_labels.size(),
                      std::vector<double>(grid.col_labels.size(), std::nan("")));
    size_t col = 0;
    for (size_t d = 0; d < cfg.distributions.size(); ++d)
        for (const auto& [eps, table] : sweeps) {
            for (size_t e = 0; e < set.estimators.size(); ++e)
                grid.cells[e][col] = table.log10_q[e][d];
            ++col;
        }
    write_grid_csv(out_dir / "summary.csv", grid);
    write_grid_markdown(out_dir / "summary.md", grid);
    std::cout << "log10 of the (1-delta)-quantile error per contamination level\n\n"
              << grid_to_markdown(grid) << "\nresults written to " << out_dir.string() << "\n";
    return 0;
}

int bench_from_json(const BenchFlags& flags) {
    std::ifstream in(flags.config_path);
    if (!in) throw std::runtime_error("cannot open config: " + flags.config_path);
    nlohmann::json j;
    in >> j;

    ExperimentConfig cfg;
    for (const auto& d : j.at("distributions"))
        cfg.distributions.push_back(DistributionSpec::parse(d.get<std::string>()));
    for (const auto& e : j.at("estimators"))
        cfg.estimators.push_back(parse_estimator(e.get<std::string>()));
    cfg.N = j.value("N", 500);
    cfg.delta = j.value("delta", 0.05);
    cfg.epsilon = j.value("epsilon", 0.0);
    cfg.contamination_value = j.value("contamination_value", 1e6);
    cfg.trials = j.value("trials", 10000);
    cfg.seed_plan.master_seed = j.value("seed", std::uint64_t{1});
    cfg.seed_plan.experiment_id = j.value("experiment_id", std::uint64_t{0});
    cfg.threads = j.value("threads", 0);
    if (j.contains("split")) {
        const auto& s = j.at("split");
        if (s.is_string() && s.get<std::string>() == "na")
            cfg.split = SplitMode::na();
        else if (s.is_number())
            cfg.split = SplitMode::fraction_of(s.get<double>());
        else
            cfg.split = SplitMode::absolute(s.at("m").get<int>());
    }

    const auto result = run_experiment(cfg);
    std::vector<int> ref_of(cfg.estimators.size(), -1);
    if (j.contains("reference")) {
        const auto ref_id = j.at("reference").get<std::string>();
        for (size_t e = 0; e < cfg.estimators.size(); ++e)
            if (cfg.estimators[e].id == ref_id)
                std::fill(ref_of.begin(), ref_of.end(), static_cast<int>(e));
    }
    const auto table = summarize(cfg, result, ref_of);
    const fs::path out_dir = flags.out.empty() ? fs::path("out/custom") : fs::path(flags.out);
    persist_summary(out_dir, result, table);
    std::cout << grid_to_markdown(table.rel.empty() ? table.q_grid() : table.rel_grid())
              << "\nresults written to " << out_dir.string() << "\n";
    return 0;
}

int run_estimate(const std::string& data_path, const std::string& estimator_string,
                 const std::string& base_path, double delta, double eps) {
    const auto data = read_column_csv(data_path);
    const auto spec = parse_estimator(estimator_string);
    std::vector<double> base_data;
    if (!base_path.empty()) base_data = read_column_csv(base_path);
    const std::span<const double> base_view =
        base_data.empty() ? std::span<const double>(data) : std::span<const double>(base_data);

    const auto est = evaluate(spec, data, base_view, delta, eps);
    std::cout << "estimate " << format_real(est.value) << "\n";
    if (est.scaling) {
        std::cout << "alpha_hat " << format_real(est.scaling->alpha_hat) << "\n"
                  << "weight_sum " << format_real(est.scaling->weight_sum) << "\n"
                  << "eta " << format_real(est.eta) << "\n"
                  << "kappa " << format_real(est.kappa) << "\n";
        if (est.base_aliased) std::cout << "note base sample aliases the main sample\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"robust mean estimation via adaptively reweighted deviations"};
    app.require_subcommand(1);

    std::string data_path, estimator_string, base_path;
    double delta = 0.05, eps = 0.0;
    auto* estimate_cmd =
        app.add_subcommand("estimate", "one-shot estimate from a one-column csv");
    estimate_cmd->add_option("data", data_path, "input csv (one column)")->required();
    estimate_cmd
        ->add_option("estimator", estimator_string,
                     "estimator, e.g. mean | shrink:base=median,w=rational,eta=log")
        ->required();
    estimate_cmd->add_option("--base", base_path, "separate csv for the base estimate");
    estimate_cmd->add_option("--delta", delta, "confidence parameter")->capture_default_str();
    estimate_cmd->add_option("--eps", eps, "assumed contamination level (for eta=theory)")
        ->capture_default_str();

    BenchFlags flags;
    std::string experiment;
    auto* bench_cmd = app.add_subcommand("bench", "run a named benchmark experiment");
    bench_cmd
        ->add_option("experiment", experiment,
                     "one of: table1, splits, best-split, contamination, violations")
        ->required();
    bench_cmd->add_option("--trials", flags.trials, "Monte Carlo trials")->capture_default_str();
    bench_cmd->add_option("--seed", flags.seed, "master seed")->capture_default_str();
    bench_cmd->add_option("--delta", flags.delta, "confidence parameter")->capture_default_str();
    bench_cmd->add_option("--N", flags.N, "total sample size")->capture_default_str();
    bench_cmd->add_option("--m", flags.m, "base sub-sample size")->capture_default_str();
    bench_cmd->add_option("--eps", flags.eps, "contamination level(s), comma separated")
        ->capture_default_str();
    bench_cmd->add_option("--dists", flags.dists, "distributions, comma separated")
        ->capture_default_str();
    bench_cmd->add_option("--out", flags.out, "output directory (default out/<experiment>)");
    bench_cmd->add_option("--threads", flags.threads, "worker threads (0 = auto)")
        ->capture_default_str();
    bench_cmd->add_option(
        "--eta-rule", flags.eta_rule,
        "log | fixed:<v> | theory:<xi> (default: log; contamination: theory:0.5)");
    bench_cmd->add_option("--value", flags.value, "contamination replacement value")
        ->capture_default_str();
    bench_cmd->add_option("--p", flags.p, "weight-function exponent")->capture_default_str();
    bench_cmd->add_option("--splits", flags.splits, "split ratios for the splits experiment")
        ->capture_default_str();
    bench_cmd->add_option("--m-grid", flags.m_grid, "m grid for best-split")
        ->capture_default_str();
    bench_cmd->add_option("--N-grid", flags.n_grid, "N grid for best-split")
        ->capture_default_str();
    bench_cmd->add_option("--reps", flags.reps, "replications for best-split bands")
        ->capture_default_str();
    bench_cmd->add_option("--config", flags.config_path, "json experiment config (escape hatch)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (estimate_cmd->parsed())
            return run_estimate(data_path, estimator_string, base_path, delta, eps);

        if (!flags.config_path.empty()) return bench_from_json(flags);
        if (experiment == "table1")
            return bench_table_like(
                flags, {"exp", "rational", "winsorize", "indicator", "lee-valiant"}, "table1",
                1);
        if (experiment == "violations")
            return bench_table_like(
                flags, {"winsorize", "rational", "log1", "log2", "circle", "invsqrt"},
                "violations", 5);
        if (experiment == "splits") return bench_splits(flags);
        if (experiment == "best-split") return bench_best_split(flags);
        if (experiment == "contamination") return bench_contamination(flags);
        std::cerr << "unknown experiment: " << experiment << "\n";
        return 2;
    } catch (const degenerate_estimate& e) {
        std::cerr << "degenerate result: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
