// Acceptance run: one PASS/FAIL/SKIP line per criterion, exit status 1 on
// any FAIL. Criterion 9 runs only when BENCH_REAL_CONFIG names a config
// whose datasets exist.

#include "support.hpp"

#include "tscausal/bench.hpp"
#include "tscausal/discovery.hpp"
#include "tscausal/evaluation.hpp"
#include "tscausal/graph_io.hpp"
#include "tscausal/preprocess.hpp"
#include "tscausal/simulator.hpp"
#include "tscausal/stats.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

using namespace tscausal;
namespace fs = std::filesystem;

namespace {

enum class Verdict { Pass, Fail, Skip };

struct Outcome {
    Verdict verdict;
    std::string detail;
};

Outcome pass_if(bool ok, std::string detail) { return {ok ? Verdict::Pass : Verdict::Fail, std::move(detail)}; }

std::string fmt(double v, int digits = 3) {
    std::ostringstream o;
    o.setf(std::ios::fixed);
    o.precision(digits);
    o << v;
    return o.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// 1. extended_to_summary(window_to_extended(g)) == window_to_summary(g) for
// every window graph with d <= 3 and gamma_max <= 2.
Outcome projection_consistency() {
    const auto t0 = std::chrono::steady_clock::now();
    std::size_t graphs = 0, mismatches = 0, skipped_cyclic = 0;
    for (std::size_t d = 1; d <= 3; ++d) {
        std::vector<NodePair> pairs;
        for (std::size_t a = 0; a < d; ++a)
            for (std::size_t b = a + 1; b < d; ++b) pairs.push_back({a, b});
        std::size_t states = 1;
        for (std::size_t k = 0; k < pairs.size(); ++k) states *= 5;
        for (int G = 1; G <= 2; ++G) {
            const std::size_t lagged = d * d * static_cast<std::size_t>(G);
            for (std::size_t s = 0; s < states; ++s) {
                // Lag-0 state per pair: none, ->, <-, <->, --.
                WindowCausalGraph base(testgen::names(d), G);
                std::size_t code = s;
                for (const auto& [a, b] : pairs) {
                    switch (code % 5) {
                    case 1: base.add_edge(a, 0, b); break;
                    case 2: base.add_edge(b, 0, a); break;
                    case 3: base.add_edge(a, 0, b, EdgeMark::Bidirected); break;
                    case 4: base.add_edge(a, 0, b, EdgeMark::Unoriented); break;
                    default: break;
                    }
                    code /= 5;
                }
                try {
                    base.validate();
                } catch (const Error&) {
                    skipped_cyclic += std::size_t{1} << lagged;
                    continue;
                }
                for (std::size_t mask = 0; mask < (std::size_t{1} << lagged); ++mask) {
                    auto g = base;
                    std::size_t bit = 0;
                    for (std::size_t p = 0; p < d; ++p)
                        for (std::size_t q = 0; q < d; ++q)
                            for (int lag = 1; lag <= G; ++lag, ++bit)
                                if (mask >> bit & 1) g.add_edge(p, lag, q);
                    ++graphs;
                    if (!(extended_to_summary(window_to_extended(g)) == window_to_summary(g))) ++mismatches;
                }
            }
        }
    }
    return pass_if(mismatches == 0, std::to_string(graphs) + " graphs, " + std::to_string(mismatches) +
                                        " mismatches, " + std::to_string(skipped_cyclic) +
                                        " cyclic configurations excluded, " + fmt(seconds_since(t0), 1) + " s");
}

// 2. Integral-mean resampling against the worked example and a direct-sum
// oracle; nearest-value resampling is the identity on grid data.
Outcome strategy_formulas() {
    AlignmentSpec spec;
    spec.strategy = AlignmentStrategy::IntegralMean;
    spec.target_period = 2000;
    spec.interpolate = false;
    TimeSeriesSet worked;
    worked.add({"x", {{0, 10.0}, {1000, 20.0}, {2000, 30.0}}});
    const double example = align_strategy2(worked, spec).values(1, 0);
    bool ok = std::abs(example - 25.0) <= 1e-9;

    testgen::Rng rng(2024);
    double worst = 0.0;
    int cases = 0;
    while (cases < 100) {
        Series s{"x", {}};
        Millis t = testgen::integer(rng, 0, 10000);
        const Millis step = 1000 * testgen::integer(rng, 1, 4);
        for (int i = 0; i < testgen::integer(rng, 10, 40); ++i) {
            s.points.push_back({t, testgen::normal(rng) * 50.0});
            t += step + testgen::integer(rng, -step / 4, step / 4);
        }
        const auto n = static_cast<std::size_t>(testgen::integer(rng, 1, 4));
        TimeSeriesSet set;
        set.add(s);
        AlignmentSpec fz;
        fz.interpolate = false;
        fz.target_period = estimate_sampling_period(s) * static_cast<Millis>(n);
        AlignedPanel p;
        try {
            p = align_strategy2(set, fz);
        } catch (const Error&) {
            continue;
        }
        ++cases;
        for (Eigen::Index r = 0; r < p.rows(); ++r) {
            std::size_t i = 0;
            while (i < s.points.size() && s.points[i].time < p.time_at(r)) ++i;
            if (i == s.points.size() || i < n) {
                ok = ok && p.missing(r, 0);
                continue;
            }
            double num = 0.0;
            for (std::size_t k = i - n + 1; k <= i; ++k)
                num += *s.points[k].value * static_cast<double>(s.points[k].time - s.points[k - 1].time);
            const double oracle = num / static_cast<double>(s.points[i].time - s.points[i - n].time);
            const double err = std::abs(p.values(r, 0) - oracle) / std::max(1.0, std::abs(oracle));
            worst = std::max(worst, err);
        }
    }
    ok = ok && worst <= 1e-9;

    bool identity = true;
    for (int trial = 0; trial < 50; ++trial) {
        TimeSeriesSet set;
        const Millis step = 1000 * testgen::integer(rng, 1, 600);
        const auto len = testgen::integer(rng, 2, 100);
        for (int c = 0; c < 3; ++c) {
            Series s{"s" + std::to_string(c), {}};
            for (long long i = 0; i < len; ++i) s.points.push_back({i * step, testgen::normal(rng) * 1e3});
            set.add(s);
        }
        const auto p = align_strategy1(set);
        for (std::size_t c = 0; c < 3; ++c)
            for (long long i = 0; i < len; ++i)
                identity = identity && p.values(i, static_cast<Eigen::Index>(c)) ==
                                           *set.series()[c].points[static_cast<std::size_t>(i)].value;
    }
    return pass_if(ok && identity, "worked example " + fmt(example, 12) + ", 100 fuzzed cases max rel. error " +
                                       std::to_string(worst) + ", strategy 1 identity " + (identity ? "holds" : "broken"));
}

// 3. The maximal-lag rule.
Outcome gamma_rule() {
    const int a = gamma_max_rule(60000), b = gamma_max_rule(300000), c = gamma_max_rule(1000, 15000);
    return pass_if(a == 15 && b == 3 && c == 15,
                   "60 s -> " + std::to_string(a) + ", 300 s -> " + std::to_string(b) + ", 1 s (15 s delay) -> " +
                       std::to_string(c));
}

// 4. Fisher-z calibration under the null.
Outcome ci_calibration() {
    const auto t0 = std::chrono::steady_clock::now();
    testgen::Rng rng(4);
    std::string detail;
    bool ok = true;
    for (int k : {0, 1, 3}) {
        std::vector<double> ps;
        for (int trial = 0; trial < 2000; ++trial) {
            const auto Z = testgen::normal_matrix(rng, 500, k);
            // x and y share Z but are conditionally independent given it.
            Eigen::VectorXd x = testgen::normal_vector(rng, 500), y = testgen::normal_vector(rng, 500);
            for (int j = 0; j < k; ++j) {
                x += 0.8 * Z.col(j);
                y -= 0.5 * Z.col(j);
            }
            ps.push_back(partial_correlation_test(x, y, Z, 0.05).p_value);
        }
        const double ks = testgen::ks_uniform(ps);
        ok = ok && ks < 0.05;
        detail += "|Z|=" + std::to_string(k) + " KS " + fmt(ks, 4) + ", ";
    }
    const double secs = seconds_since(t0);
    return pass_if(ok && secs < 30.0, detail + fmt(secs, 2) + " s");
}

double median_f1(MethodId m, const std::function<SemSpec(std::uint64_t)>& make, int gamma, int seeds = 20) {
    std::vector<double> f;
    for (std::uint64_t seed = 0; seed < static_cast<std::uint64_t>(seeds); ++seed) {
        const auto spec = make(seed);
        DiscoveryConfig cfg;
        cfg.gamma_max = gamma;
        const auto res = discover(m, simulate(spec), cfg);
        f.push_back(f1(edge_confusion(window_to_summary(spec.graph), res.summary)));
    }
    return testgen::median(f);
}

// 5. Recovery of the diamond fixture.
Outcome oracle_recovery() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto diamond = [](std::uint64_t s) { return diamond_fixture(3000, s); };
    const auto lagged = [](std::uint64_t s) { return diamond_lagged_fixture(3000, s); };
    bool ok = true;
    std::string detail;
    for (auto m : kAllMethods) {
        const bool gc = m == MethodId::GCMVL;
        const double med = median_f1(m, gc ? lagged : diamond, 2);
        const double need = m == MethodId::VarLiNGAM ? 0.9 : 0.8;
        ok = ok && med >= need;
        detail += std::string(method_label(m)) + (gc ? " (lagged)" : "") + " " + fmt(med) + ", ";
    }
    const double secs = seconds_since(t0);
    return pass_if(ok && secs < 300.0, detail + fmt(secs, 1) + " s");
}

// 6. NBCB-w against PCMCI+ on the same seeds.
Outcome hybrid_dominance() {
    const auto diamond = [](std::uint64_t s) { return diamond_fixture(3000, s + 1000); };
    const double nb = median_f1(MethodId::NBCBw, diamond, 2);
    const double pc = median_f1(MethodId::PCMCIplus, diamond, 2);
    return pass_if(nb >= pc - 0.02, "median F1 NBCB-w " + fmt(nb) + " vs PCMCI+ " + fmt(pc));
}

// 7. Self loops alone never score, and a mutual pair against a one-way
// truth edge is one TP and one FP.
Outcome scoring_rule() {
    bool ok = true;
    std::string detail;
    for (const auto* name : {"mom", "ingestion", "web", "antivirus"}) {
        std::ifstream in(std::string(FIXTURE_DIR) + "/truth/" + name + ".txt");
        std::stringstream ss;
        ss << in.rdbuf();
        const auto truth = parse_ground_truth(ss.str());
        SummaryCausalGraph loops(truth.names());
        for (std::size_t i = 0; i < truth.size(); ++i) loops.add_edge(i, i);
        const double f = f1(edge_confusion(truth, loops));
        ok = ok && f == 0.0;
        detail += std::string(name) + " " + fmt(f, 1) + ", ";
    }
    SummaryCausalGraph truth({"A", "B"}), mutual({"A", "B"});
    truth.add_edge(0, 1);
    mutual.add_edge(0, 1);
    mutual.add_edge(1, 0);
    const auto c = edge_confusion(truth, mutual);
    ok = ok && c.tp == 1 && c.fp == 1;
    return pass_if(ok, detail + "A<->B vs A->B tp=" + std::to_string(c.tp) + " fp=" + std::to_string(c.fp));
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// 8. Report CSVs are byte-identical at parallelism 1 and 8.
Outcome determinism() {
    const auto root = fs::temp_directory_path() / "tscausal_acceptance";
    fs::remove_all(root);
    fs::create_directories(root);

    // A second config on CSV input with mixed rates and missing values.
    auto spec = diamond_fixture(2000, 77);
    CorruptionSpec corruption;
    corruption.resample_period = {{"q", 300000}};
    corruption.missing_rate = 0.03;
    corruption.timestamp_jitter = 2000;
    {
        std::ofstream(root / "mixed.csv") << to_csv(corrupt(simulate(spec), corruption, 5));
        std::ofstream(root / "mixed.txt") << to_text(window_to_summary(spec.graph));
        std::ofstream(root / "mixed.ini") << "methods = all\ngamma_max = 1, 2\n"
                                             "[dataset s1]\ncsv_path = mixed.csv\ntruth_path = mixed.txt\n"
                                             "[dataset s2]\ncsv_path = mixed.csv\ntruth_path = mixed.txt\nstrategy = 2\n";
    }
    const std::pair<std::string, fs::path> configs[] = {
        {"diamond", fs::path(FIXTURE_DIR) / "configs" / "diamond.ini"}, {"mixed", root / "mixed.ini"}};
    bool ok = true;
    std::string detail;
    for (const auto& [name, path] : configs) {
        auto cfg = load_experiment_config(path);
        std::string first;
        bool same = true;
        std::size_t rows = 0;
        for (int threads : {1, 8, 1, 8}) {
            cfg.output_dir = root / (name + "_" + std::to_string(threads));
            cfg.parallelism = threads;
            rows = run_experiment(cfg).rows.size();
            const auto csv = read_file(cfg.output_dir / "report.csv");
            if (first.empty()) first = csv;
            same = same && csv == first;
        }
        ok = ok && same;
        detail += name + " (" + std::to_string(rows) + " rows) " + (same ? "identical" : "DIFFERENT") + ", ";
    }
    fs::remove_all(root);
    return pass_if(ok, detail + "parallelism 1 vs 8, two runs each");
}

// 9. The full protocol on user-supplied data.
Outcome real_data() {
    const char* path = std::getenv("BENCH_REAL_CONFIG");
    if (!path || !*path) return {Verdict::Skip, "BENCH_REAL_CONFIG not set; the datasets are not shipped"};
    ExperimentConfig cfg;
    try {
        cfg = load_experiment_config(path);
    } catch (const std::exception& e) {
        return {Verdict::Fail, e.what()};
    }
    for (const auto& ds : cfg.datasets)
        if (!ds.csv_path.empty() && !fs::exists(ds.csv_path))
            return {Verdict::Skip, "dataset file not found: " + ds.csv_path.string()};
    const auto t0 = std::chrono::steady_clock::now();
    const auto report = run_experiment(cfg);
    std::size_t errors = 0;
    for (const auto& r : report.rows) errors += !r.ok();
    const std::size_t expected = cfg.methods.size() * cfg.datasets.size() * std::max<std::size_t>(1, cfg.gamma_max.size());
    std::cout << report_to_table(report);
    return pass_if(errors == 0 && report.rows.size() == expected && fs::exists(cfg.output_dir / "report.csv"),
                   std::to_string(report.rows.size()) + " rows, " + std::to_string(errors) + " errors, report in " +
                       cfg.output_dir.string() + ", " + fmt(seconds_since(t0), 1) + " s");
}

} // namespace

int main(int argc, char** argv) {
    const std::pair<const char*, Outcome (*)()> criteria[] = {
        {"projection consistency", projection_consistency},
        {"integral resampling formula", strategy_formulas},
        {"maximal lag rule", gamma_rule},
        {"CI test calibration", ci_calibration},
        {"oracle recovery", oracle_recovery},
        {"hybrid dominance", hybrid_dominance},
        {"scoring rule", scoring_rule},
        {"determinism", determinism},
        {"real data end to end", real_data},
    };
    // Optional: run a subset, e.g. `acceptance 3 7`.
    std::vector<bool> selected(std::size(criteria), argc <= 1);
    for (int i = 1; i < argc; ++i) {
        const int k = std::atoi(argv[i]);
        if (k >= 1 && k <= static_cast<int>(std::size(criteria))) selected[static_cast<std::size_t>(k - 1)] = true;
    }
    bool failed = false;
    for (std::size_t i = 0; i < std::size(criteria); ++i) {
        if (!selected[i]) continue;
        Outcome out;
        try {
            out = criteria[i].second();
        } catch (const std::exception& e) {
            out = {Verdict::Fail, std::string("exception: ") + e.what()};
        }
        const char* tag = out.verdict == Verdict::Pass ? "PASS" : out.verdict == Verdict::Fail ? "FAIL" : "SKIP";
        failed = failed || out.verdict == Verdict::Fail;
        std::printf("%s %zu %s: %s\n", tag, i + 1, criteria[i].first, out.detail.c_str());
        std::fflush(stdout);
    }
    return failed ? 1 : 0;
}
