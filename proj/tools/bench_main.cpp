#include "tscausal/bench.hpp"
#include "tscausal/graph_io.hpp"
#include "tscausal/simulator.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>

using namespace tscausal;

namespace {

TimestampUnit unit_from(const std::string& s) {
    if (s == "ms") return TimestampUnit::Milliseconds;
    if (s == "s") return TimestampUnit::Seconds;
    throw Error("timestamp unit must be ms or s");
}

SemSpec spec_from(const std::string& arg) {
    if (arg == "diamond") return diamond_fixture();
    if (arg == "diamond-lagged") return diamond_lagged_fixture();
    return load_sem_spec(arg);
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << text;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Causal discovery benchmark for monitoring time series"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "Run an experiment config and write the report");
    std::string config_path;
    std::optional<int> run_threads;
    std::optional<std::string> run_out;
    bool quiet = false;
    run->add_option("--config", config_path, "Experiment config file")->required()->check(CLI::ExistingFile);
    run->add_option("--parallelism", run_threads, "Worker threads (BENCH_THREADS still wins)");
    run->add_option("--output-dir", run_out, "Output directory");
    run->add_flag("--quiet", quiet, "No progress lines");

    // simulate
    auto* sim = app.add_subcommand("simulate", "Generate a panel from a SEM spec");
    std::string spec_path, sim_out;
    std::optional<std::uint64_t> sim_seed;
    std::optional<int> sim_rows;
    std::string truth_out;
    sim->add_option("--spec", spec_path, "SEM spec JSON, or diamond / diamond-lagged")->required();
    sim->add_option("--out", sim_out, "Output CSV")->required();
    sim->add_option("--seed", sim_seed, "Override the spec seed");
    sim->add_option("--rows", sim_rows, "Override T");
    sim->add_option("--truth-out", truth_out, "Also write the summary truth graph");

    // discover
    auto* disc = app.add_subcommand("discover", "Run one method on a CSV");
    std::string csv_path, disc_truth, method_key_arg, disc_out;
    std::optional<int> gamma;
    double alpha = 0.05;
    int strategy = 1;
    std::optional<Millis> period_override;
    std::string unit = "ms";
    disc->add_option("--csv", csv_path, "Input CSV")->required()->check(CLI::ExistingFile);
    disc->add_option("--truth", disc_truth, "Ground-truth graph to score against")->check(CLI::ExistingFile);
    disc->add_option("--method", method_key_arg, "gcmvl|pcmciplus|pcgce|varlingam|nbcb-w|nbcb-e|cbnb-w|cbnb-e")
        ->required();
    disc->add_option("--gamma-max", gamma, "Maximal lag (default: rule on the aligned period)");
    disc->add_option("--alpha", alpha, "Significance level");
    disc->add_option("--strategy", strategy, "Alignment strategy 1 or 2")->check(CLI::IsMember({1, 2}));
    disc->add_option("--period-override", period_override, "Target period in ms");
    disc->add_option("--timestamp-unit", unit, "ms or s")->check(CLI::IsMember({"ms", "s"}));
    disc->add_option("--out", disc_out, "Write the native graph here (.json for JSON, .dot for DOT)");

    // eval
    auto* eval = app.add_subcommand("eval", "Score an inferred graph against a truth graph");
    std::string eval_truth, eval_inferred;
    bool self_loops = false;
    eval->add_option("--truth", eval_truth, "Ground-truth graph")->required()->check(CLI::ExistingFile);
    eval->add_option("--inferred", eval_inferred, "Inferred graph (any kind)")->required()->check(CLI::ExistingFile);
    eval->add_flag("--include-self-loops", self_loops, "Score self loops too");

    // diagnose
    auto* diag = app.add_subcommand("diagnose", "Sampling periods, sleeping intervals and missing values");
    std::string diag_csv, diag_unit = "ms";
    std::size_t sleep_len = 10;
    diag->add_option("--csv", diag_csv, "Input CSV")->required()->check(CLI::ExistingFile);
    diag->add_option("--sleep-min-len", sleep_len, "Shortest constant run reported as sleeping");
    diag->add_option("--timestamp-unit", diag_unit, "ms or s")->check(CLI::IsMember({"ms", "s"}));

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            auto cfg = load_experiment_config(config_path);
            if (run_threads) cfg.parallelism = *run_threads;
            if (run_out) cfg.output_dir = *run_out;
            RunOptions opt;
            if (!quiet) opt.progress = &std::cerr;
            const auto report = run_experiment(cfg, opt);
            std::cout << report_to_table(report);
            std::size_t errors = 0;
            for (const auto& r : report.rows) errors += r.ok() ? 0 : 1;
            if (errors) std::cerr << errors << " of " << report.rows.size() << " cells failed; see run_log.jsonl\n";
            std::cerr << "report: " << (cfg.output_dir / "report.csv").string() << '\n';
        } else if (*sim) {
            auto spec = spec_from(spec_path);
            if (sim_seed) spec.seed = *sim_seed;
            if (sim_rows) spec.T = *sim_rows;
            const auto panel = simulate(spec);
            std::ofstream out(sim_out, std::ios::binary);
            if (!out) throw Error("cannot write " + sim_out);
            write_panel_csv(out, panel);
            if (!truth_out.empty()) write_text(truth_out, to_text(window_to_summary(spec.graph)));
        } else if (*disc) {
            ColumnMapping mapping;
            mapping.unit = unit_from(unit);
            AlignmentSpec as;
            as.strategy = strategy == 2 ? AlignmentStrategy::IntegralMean : AlignmentStrategy::NearestValue;
            as.target_period = period_override;
            const auto panel = align(load_csv(csv_path, mapping), as);
            DiscoveryConfig dc;
            dc.gamma_max = gamma ? *gamma : gamma_max_rule(panel.period);
            dc.alpha = alpha;
            const auto res = discover(parse_method(method_key_arg), panel, dc);
            std::cout << to_text(res.native);
            if (!disc_out.empty()) {
                const bool json = disc_out.size() > 5 && disc_out.substr(disc_out.size() - 5) == ".json";
                const bool dot = disc_out.size() > 4 && disc_out.substr(disc_out.size() - 4) == ".dot";
                write_text(disc_out, json  ? to_json(res.native).dump(2) + "\n"
                                     : dot ? to_dot(res.native)
                                           : to_text(res.native));
            }
            if (!disc_truth.empty()) {
                const auto c = edge_confusion(to_summary(load_graph(disc_truth)), res.summary);
                std::cout << "tp=" << c.tp << " fp=" << c.fp << " fn=" << c.fn << " f1=" << std::setprecision(4)
                          << f1(c) << '\n';
            }
        } else if (*eval) {
            const auto c = edge_confusion(to_summary(load_graph(eval_truth)), to_summary(load_graph(eval_inferred)),
                                          self_loops);
            std::cout << "tp=" << c.tp << " fp=" << c.fp << " fn=" << c.fn << " f1=" << std::setprecision(17)
                      << f1(c) << '\n';
        } else if (*diag) {
            ColumnMapping mapping;
            mapping.unit = unit_from(diag_unit);
            const auto set = load_csv(diag_csv, mapping);
            std::cout << "series,period_ms,points,missing,max_consecutive_missing,sleeping_intervals\n";
            const auto d = diagnose(set, sleep_len);
            for (std::size_t k = 0; k < d.size(); ++k) {
                std::cout << d[k].name << ',' << d[k].sampling_period_estimate << ',' << set.series()[k].points.size()
                          << ',' << d[k].missing_count << ',' << d[k].max_consecutive_missing << ',';
                for (std::size_t i = 0; i < d[k].sleeping_intervals.size(); ++i)
                    std::cout << (i ? " " : "") << d[k].sleeping_intervals[i].start_row << '-'
                              << d[k].sleeping_intervals[i].end_row;
                std::cout << '\n';
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
