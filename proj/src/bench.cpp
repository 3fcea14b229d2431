#include "tscausal/bench.hpp"

#include "tscausal/graph_io.hpp"
#include "tscausal/simulator.hpp"

#include "text_util.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>
#include <tuple>

namespace tscausal {

namespace fs = std::filesystem;

void ExperimentConfig::validate() const {
    if (methods.empty()) throw Error("config: methods list is empty");
    if (datasets.empty()) throw Error("config: no [dataset ...] sections");
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error("config: alpha must lie in (0, 1)");
    if (parallelism < 1) throw Error("config: parallelism must be at least 1");
    if (max_delay_ms <= 0) throw Error("config: max_delay_ms must be positive");
    for (int g : gamma_max)
        if (g < 1) throw Error("config: gamma_max values must be at least 1");
    for (std::size_t i = 0; i < datasets.size(); ++i) {
        const auto& ds = datasets[i];
        for (std::size_t j = 0; j < i; ++j)
            if (datasets[j].name == ds.name) throw ParseError("config: duplicate dataset " + ds.name, ds.line);
        const bool csv = !ds.csv_path.empty(), sem = !ds.sem_spec.empty();
        if (csv == sem) throw ParseError("config: dataset " + ds.name + " needs csv_path or sem_spec (not both)", ds.line);
        if (csv && ds.truth_path.empty()) throw ParseError("config: dataset " + ds.name + " has no truth_path", ds.line);
    }
}

namespace {

std::vector<std::string> list_values(std::string_view v) {
    std::string s(detail::trim(v));
    if (s.size() >= 2 && s.front() == '[' && s.back() == ']') s = s.substr(1, s.size() - 2);
    std::vector<std::string> out;
    for (const auto& item : detail::split(s, ',')) {
        const auto t = detail::trim(item);
        if (!t.empty()) out.emplace_back(t);
    }
    return out;
}

bool parse_bool(const std::string& v, std::size_t line) {
    const auto l = detail::lower(v);
    if (l == "true" || l == "yes" || l == "1" || l == "on") return true;
    if (l == "false" || l == "no" || l == "0" || l == "off") return false;
    throw ParseError("config: expected a boolean, got '" + v + "'", line);
}

long long parse_integer(const std::string& v, std::size_t line) {
    const auto i = detail::parse_int(v);
    if (!i) throw ParseError("config: expected an integer, got '" + v + "'", line);
    return *i;
}

fs::path resolve(const fs::path& base, const std::string& v) {
    fs::path p(v);
    return p.is_absolute() || base.empty() ? p : (base / p).lexically_normal();
}

} // namespace

ExperimentConfig parse_experiment_config(std::string_view text, const fs::path& base_dir) {
    ExperimentConfig cfg;
    std::istringstream in{std::string(text)};
    std::string raw;
    std::size_t lineno = 0;
    bool have_methods = false;
    DatasetConfig* ds = nullptr;
    while (std::getline(in, raw)) {
        ++lineno;
        auto line = std::string(raw);
        if (auto c = line.find_first_of("#;"); c != std::string::npos) line.erase(c);
        const auto t = std::string(detail::trim(line));
        if (t.empty()) continue;
        if (t.front() == '[') {
            if (t.back() != ']') throw ParseError("config: unterminated section header", lineno);
            const auto inner = std::string(detail::trim(std::string_view(t).substr(1, t.size() - 2)));
            if (inner.rfind("dataset", 0) != 0 || inner.size() <= 7 || !std::isspace(static_cast<unsigned char>(inner[7])))
                throw ParseError("config: expected [dataset NAME]", lineno);
            const auto name = std::string(detail::trim(std::string_view(inner).substr(7)));
            if (name.empty()) throw ParseError("config: dataset name is empty", lineno);
            cfg.datasets.push_back({});
            ds = &cfg.datasets.back();
            ds->name = name;
            ds->line = lineno;
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw ParseError("config: expected key = value", lineno);
        const auto key = detail::lower(detail::trim(std::string_view(t).substr(0, eq)));
        const auto value = std::string(detail::trim(std::string_view(t).substr(eq + 1)));
        if (ds) {
            if (key == "csv_path")
                ds->csv_path = resolve(base_dir, value);
            else if (key == "truth_path")
                ds->truth_path = resolve(base_dir, value);
            else if (key == "sem_spec")
                ds->sem_spec = resolve(base_dir, value);
            else if (key == "strategy") {
                if (value == "1")
                    ds->strategy = AlignmentStrategy::NearestValue;
                else if (value == "2")
                    ds->strategy = AlignmentStrategy::IntegralMean;
                else
                    throw ParseError("config: strategy must be 1 or 2", lineno);
            } else if (key == "period_override") {
                const auto p = parse_integer(value, lineno);
                if (p <= 0) throw ParseError("config: period_override must be positive", lineno);
                ds->period_override = p;
            } else if (key == "timestamp_unit") {
                const auto u = detail::lower(value);
                if (u == "ms" || u == "milliseconds")
                    ds->timestamp_unit = TimestampUnit::Milliseconds;
                else if (u == "s" || u == "seconds")
                    ds->timestamp_unit = TimestampUnit::Seconds;
                else
                    throw ParseError("config: timestamp_unit must be ms or s", lineno);
            } else {
                throw ParseError("config: unknown dataset key '" + key + "'", lineno);
            }
            continue;
        }
        if (key == "methods") {
            have_methods = true;
            for (const auto& m : list_values(value)) {
                if (detail::lower(m) == "all") {
                    cfg.methods.assign(std::begin(kAllMethods), std::end(kAllMethods));
                    continue;
                }
                try {
                    const auto id = parse_method(detail::lower(m));
                    if (std::find(cfg.methods.begin(), cfg.methods.end(), id) == cfg.methods.end())
                        cfg.methods.push_back(id);
                } catch (const Error& e) {
                    throw ParseError(std::string("config: ") + e.what(), lineno);
                }
            }
        } else if (key == "gamma_max") {
            cfg.gamma_max.clear();
            if (detail::lower(value) != "auto")
                for (const auto& g : list_values(value)) cfg.gamma_max.push_back(static_cast<int>(parse_integer(g, lineno)));
            if (detail::lower(value) != "auto" && cfg.gamma_max.empty())
                throw ParseError("config: gamma_max is empty", lineno);
        } else if (key == "max_delay_ms") {
            cfg.max_delay_ms = parse_integer(value, lineno);
        } else if (key == "alpha") {
            const auto a = detail::parse_double(value);
            if (!a) throw ParseError("config: bad alpha '" + value + "'", lineno);
            cfg.alpha = *a;
        } else if (key == "max_cond_size") {
            cfg.max_cond_size = static_cast<int>(parse_integer(value, lineno));
        } else if (key == "output_dir") {
            cfg.output_dir = resolve(base_dir, value);
        } else if (key == "parallelism") {
            cfg.parallelism = static_cast<int>(parse_integer(value, lineno));
        } else if (key == "report_runtime") {
            cfg.report_runtime = parse_bool(value, lineno);
        } else {
            throw ParseError("config: unknown key '" + key + "'", lineno);
        }
    }
    // Sorted into method-id order so the report order does not depend on
    // how the list was written.
    std::sort(cfg.methods.begin(), cfg.methods.end());
    if (!have_methods) throw Error("config: missing methods");
    std::sort(cfg.gamma_max.begin(), cfg.gamma_max.end());
    cfg.gamma_max.erase(std::unique(cfg.gamma_max.begin(), cfg.gamma_max.end()), cfg.gamma_max.end());
    cfg.validate();
    return cfg;
}

ExperimentConfig load_experiment_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return parse_experiment_config(ss.str(), path.parent_path());
    } catch (const Error& e) {
        throw Error(path.string() + ": " + e.what());
    }
}

int effective_parallelism(const ExperimentConfig& cfg) {
    if (const char* env = std::getenv("BENCH_THREADS")) {
        const auto v = detail::parse_int(env);
        if (v && *v > 0) return static_cast<int>(*v);
    }
    return cfg.parallelism;
}

PreparedDataset prepare_dataset(const DatasetConfig& ds) {
    if (!ds.sem_spec.empty()) {
        const auto spec = load_sem_spec(ds.sem_spec.string());
        return {simulate(spec), window_to_summary(spec.graph)};
    }
    ColumnMapping mapping;
    mapping.unit = ds.timestamp_unit;
    const auto set = load_csv(ds.csv_path.string(), mapping);
    AlignmentSpec spec;
    spec.strategy = ds.strategy;
    spec.target_period = ds.period_override;
    auto panel = align(set, spec);
    const auto truth = to_summary(load_graph(ds.truth_path.string()));
    return {std::move(panel), truth};
}

namespace {

struct Cell {
    MethodId method;
    std::size_t dataset;
    int gamma;
};

struct CellResult {
    BenchRow row;
    RunLog log;
    double wall_ms = 0.0;
};

std::string safe_name(std::string s) {
    for (auto& c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.')) c = '_';
    return s;
}

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error("cannot write " + p.string());
    out << content;
}

} // namespace

BenchReport run_experiment(const ExperimentConfig& cfg, const RunOptions& options) {
    cfg.validate();
    std::mutex progress_mutex;
    auto say = [&](const std::string& msg) {
        if (!options.progress) return;
        std::lock_guard lock(progress_mutex);
        *options.progress << msg << '\n';
    };

    std::vector<std::optional<PreparedDataset>> prepared(cfg.datasets.size());
    std::vector<std::string> dataset_error(cfg.datasets.size());
    std::vector<Cell> cells;
    for (std::size_t i = 0; i < cfg.datasets.size(); ++i) {
        const auto& ds = cfg.datasets[i];
        try {
            prepared[i] = prepare_dataset(ds);
            say("dataset " + ds.name + ": " + std::to_string(prepared[i]->panel.rows()) + " rows x " +
                std::to_string(prepared[i]->panel.cols()) + " series, period " +
                std::to_string(prepared[i]->panel.period) + " ms");
        } catch (const std::exception& e) {
            dataset_error[i] = e.what();
            say("dataset " + ds.name + " failed: " + e.what());
        }
        std::vector<int> gammas = cfg.gamma_max;
        if (gammas.empty()) gammas.push_back(prepared[i] ? gamma_max_rule(prepared[i]->panel.period, cfg.max_delay_ms) : 0);
        for (auto m : cfg.methods)
            for (int g : gammas) cells.push_back({m, i, g});
    }

    std::vector<CellResult> results(cells.size());
    auto run_cell = [&](std::size_t k) {
        const auto& cell = cells[k];
        const auto& ds = cfg.datasets[cell.dataset];
        auto& out = results[k];
        out.row.method = cell.method;
        out.row.dataset = ds.name;
        out.row.gamma_max = cell.gamma;
        out.row.alpha = cfg.alpha;
        if (!prepared[cell.dataset]) {
            out.row.error = dataset_error[cell.dataset];
            return;
        }
        const auto t0 = std::chrono::steady_clock::now();
        try {
            DiscoveryConfig dc;
            dc.gamma_max = cell.gamma;
            dc.alpha = cfg.alpha;
            dc.max_cond_size = cfg.max_cond_size;
            auto res = discover(cell.method, prepared[cell.dataset]->panel, dc);
            out.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
            out.row.confusion = edge_confusion(prepared[cell.dataset]->truth, res.summary);
            out.log = std::move(res.log);
            if (options.write_outputs) {
                const auto dir = cfg.output_dir / "graphs" / safe_name(ds.name);
                fs::create_directories(dir);
                const auto stem = std::string(method_key(cell.method)) + "_g" + std::to_string(cell.gamma);
                const std::pair<std::string, std::string> files[] = {
                    {stem + ".txt", to_text(res.native)},
                    {stem + ".dot", to_dot(res.native)},
                    {stem + ".json", to_json(res.native).dump(2) + "\n"},
                    {stem + ".summary.txt", to_text(res.summary)},
                };
                for (const auto& [name, content] : files) {
                    write_file(dir / name, content);
                    out.row.graph_paths.push_back((dir / name).string());
                }
            }
        } catch (const std::exception& e) {
            out.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
            out.row.confusion.reset();
            out.row.error = e.what();
        }
        if (cfg.report_runtime) out.row.runtime_ms = std::round(out.wall_ms * 1000.0) / 1000.0;
        say(std::string(method_label(cell.method)) + " on " + ds.name + " (gamma_max " + std::to_string(cell.gamma) +
            "): " + (out.row.ok() ? "f1 " + detail::format_fixed(out.row.f1(), 3) : "error: " + out.row.error));
    };

    const auto threads = static_cast<std::size_t>(std::max(1, effective_parallelism(cfg)));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < cells.size(); k = next++) run_cell(k);
    };
    if (threads == 1 || cells.size() <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < std::min(threads, cells.size()); ++t) pool.emplace_back(worker);
    }

    std::vector<std::string> order;
    for (const auto& ds : cfg.datasets) order.push_back(ds.name);
    std::vector<BenchRow> rows;
    for (const auto& r : results) rows.push_back(r.row);
    auto report = tabulate(std::move(rows), order);

    if (options.write_outputs) {
        fs::create_directories(cfg.output_dir);
        write_file(cfg.output_dir / "report.csv", report_to_csv(report));
        write_file(cfg.output_dir / "report.txt", report_to_table(report));
        // Log lines follow the report order.
        std::vector<std::size_t> idx(results.size());
        for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = k;
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            const auto &x = cells[a], &y = cells[b];
            return std::tie(x.method, x.dataset, x.gamma) < std::tie(y.method, y.dataset, y.gamma);
        });
        std::ostringstream log;
        for (auto k : idx) {
            const auto& r = results[k];
            nlohmann::json j = {{"method", method_key(r.row.method)},
                                {"dataset", r.row.dataset},
                                {"gamma_max", r.row.gamma_max},
                                {"alpha", r.row.alpha},
                                {"ci_tests", r.log.ci_tests},
                                {"degenerate_tests", r.log.degenerate_tests},
                                {"regressions", r.log.regressions},
                                {"runtime_ms", r.wall_ms},
                                {"notes", r.log.notes},
                                {"graphs", r.row.graph_paths}};
            if (!r.row.ok()) j["error"] = r.row.error;
            log << j.dump() << '\n';
        }
        write_file(cfg.output_dir / "run_log.jsonl", log.str());
    }
    return report;
}

} // namespace tscausal
