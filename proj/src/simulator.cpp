#include "tscausal/simulator.hpp"

#include "tscausal/error.hpp"
#include "tscausal/graph_io.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace tscausal {

namespace {

// Uniform on (0, 1), never 0.
double unit_open(std::mt19937_64& rng) {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

std::vector<std::size_t> topological_order(const WindowCausalGraph& g) {
    const auto d = g.size();
    std::vector<std::size_t> indeg(d, 0);
    for (const auto& [l, m] : g.edges())
        if (l.lag == 0) ++indeg[l.target];
    std::vector<std::size_t> order;
    std::vector<char> done(d, 0);
    // Lowest ready index first, so the order is reproducible.
    for (std::size_t step = 0; step < d; ++step) {
        std::size_t next = d;
        for (std::size_t v = 0; v < d; ++v)
            if (!done[v] && indeg[v] == 0) {
                next = v;
                break;
            }
        if (next == d) throw Error("instantaneous edges form a cycle");
        done[next] = 1;
        order.push_back(next);
        for (const auto& [l, m] : g.edges())
            if (l.lag == 0 && l.source == next) --indeg[l.target];
    }
    return order;
}

} // namespace

double NoiseSpec::draw(std::mt19937_64& rng) const {
    switch (kind) {
    case NoiseKind::Uniform: return low + (high - low) * unit_open(rng);
    case NoiseKind::Gaussian: {
        const double u1 = unit_open(rng), u2 = unit_open(rng);
        return scale * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }
    case NoiseKind::Laplace: {
        const double u = unit_open(rng) - 0.5;
        return -scale * (u < 0 ? -1.0 : 1.0) * std::log(1.0 - 2.0 * std::abs(u));
    }
    }
    return 0.0;
}

double NoiseSpec::cdf(double x) const {
    switch (kind) {
    case NoiseKind::Uniform: return std::clamp((x - low) / (high - low), 0.0, 1.0);
    case NoiseKind::Gaussian: return 0.5 * std::erfc(-x / (scale * std::numbers::sqrt2));
    case NoiseKind::Laplace: return x < 0 ? 0.5 * std::exp(x / scale) : 1.0 - 0.5 * std::exp(-x / scale);
    }
    return 0.0;
}

void NoiseSpec::validate() const {
    if (kind == NoiseKind::Uniform && !(high > low)) throw Error("uniform noise needs high > low");
    if (kind != NoiseKind::Uniform && !(scale > 0.0)) throw Error("noise scale must be positive");
}

double SemSpec::spectral_radius() const {
    const auto d = static_cast<Eigen::Index>(graph.size());
    const int G = graph.gamma_max();
    std::vector<Eigen::MatrixXd> B(static_cast<std::size_t>(G + 1), Eigen::MatrixXd::Zero(d, d));
    for (const auto& [l, c] : coefficients)
        B[static_cast<std::size_t>(l.lag)](static_cast<Eigen::Index>(l.target), static_cast<Eigen::Index>(l.source)) +=
            c;
    const Eigen::MatrixXd inv = (Eigen::MatrixXd::Identity(d, d) - B[0]).inverse();
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(d * G, d * G);
    for (int lag = 1; lag <= G; ++lag) C.block(0, (lag - 1) * d, d, d) = inv * B[static_cast<std::size_t>(lag)];
    if (G > 1) C.bottomLeftCorner(d * (G - 1), d * (G - 1)).setIdentity();
    Eigen::EigenSolver<Eigen::MatrixXd> es(C, false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

void SemSpec::validate() const {
    if (graph.size() == 0) throw Error("SEM needs at least one series");
    if (T < 2) throw Error("SEM needs T >= 2");
    if (burn_in < 0) throw Error("burn_in must be non-negative");
    if (period <= 0) throw Error("period must be positive");
    noise.validate();
    for (const auto& [l, m] : graph.edges()) {
        if (m != EdgeMark::Directed) throw Error("SEM edges must be directed");
        if (!coefficients.count(l))
            throw Error("no coefficient for edge " + graph.names()[l.source] + " -> " + graph.names()[l.target] +
                        " @" + std::to_string(l.lag));
    }
    for (const auto& [l, c] : coefficients) {
        if (!graph.edges().count(l)) throw Error("coefficient given for an edge not in the graph");
        if (!std::isfinite(c)) throw Error("coefficients must be finite");
    }
    graph.validate();
    const double rho = spectral_radius();
    if (!(rho < 1.0)) throw Error("SEM is not stationary: companion spectral radius " + std::to_string(rho));
}

nlohmann::json sem_to_json(const SemSpec& spec) {
    auto j = to_json(spec.graph);
    auto& coef = j["coefficients"] = nlohmann::json::array();
    for (const auto& [l, c] : spec.coefficients)
        coef.push_back({spec.graph.names()[l.source], spec.graph.names()[l.target], l.lag, c});
    auto& nz = j["noise"];
    switch (spec.noise.kind) {
    case NoiseKind::Uniform: nz = {{"type", "uniform"}, {"low", spec.noise.low}, {"high", spec.noise.high}}; break;
    case NoiseKind::Gaussian: nz = {{"type", "gaussian"}, {"sigma", spec.noise.scale}}; break;
    case NoiseKind::Laplace: nz = {{"type", "laplace"}, {"scale", spec.noise.scale}}; break;
    }
    j["T"] = spec.T;
    j["burn_in"] = spec.burn_in;
    j["seed"] = spec.seed;
    j["period_ms"] = spec.period;
    j["start_ms"] = spec.start;
    return j;
}

SemSpec sem_from_json(const nlohmann::json& j) {
    try {
        auto g = graph_from_json(j);
        auto* w = std::get_if<WindowCausalGraph>(&g);
        if (!w) throw Error("SEM graph must be of kind window");
        SemSpec s;
        s.graph = std::move(*w);
        if (j.contains("coefficients"))
            for (const auto& row : j.at("coefficients")) {
                if (!row.is_array() || row.size() != 4) throw Error("coefficient rows are [src, dst, lag, value]");
                const auto find = [&](const std::string& name) {
                    for (std::size_t k = 0; k < s.graph.size(); ++k)
                        if (s.graph.names()[k] == name) return k;
                    throw Error("unknown node in coefficients: " + name);
                };
                s.coefficients[{find(row[0].get<std::string>()), row[2].get<int>(),
                                find(row[1].get<std::string>())}] = row[3].get<double>();
            }
        if (j.contains("default_coefficient")) {
            const double c = j.at("default_coefficient").get<double>();
            for (const auto& [l, m] : s.graph.edges()) s.coefficients.try_emplace(l, c);
        }
        if (j.contains("noise")) {
            const auto& nz = j.at("noise");
            const auto type = nz.at("type").get<std::string>();
            if (type == "uniform")
                s.noise = NoiseSpec::uniform(nz.value("low", -1.0), nz.value("high", 1.0));
            else if (type == "gaussian")
                s.noise = NoiseSpec::gaussian(nz.value("sigma", 1.0));
            else if (type == "laplace")
                s.noise = NoiseSpec::laplace(nz.value("scale", 1.0));
            else
                throw Error("unknown noise type: " + type);
        }
        s.T = j.value("T", s.T);
        s.burn_in = j.value("burn_in", s.burn_in);
        s.seed = j.value("seed", s.seed);
        s.period = j.value("period_ms", s.period);
        s.start = j.value("start_ms", s.start);
        s.validate();
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("bad SEM spec: ") + e.what());
    }
}

SemSpec load_sem_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    try {
        return sem_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(path + ": " + e.what());
    }
}

namespace {

SemSpec diamond(bool lagged_sink, int T, std::uint64_t seed) {
    SemSpec s;
    s.graph = WindowCausalGraph({"s", "p", "q", "r"}, 2);
    const int sink_lag = lagged_sink ? 1 : 0;
    const LaggedLink links[] = {{0, 1, 0}, {1, 1, 1}, {2, 1, 2}, {3, 1, 3},
                                {0, 2, 1}, {0, 1, 2}, {1, sink_lag, 3}, {2, sink_lag, 3}};
    for (const auto& l : links) {
        s.graph.add_edge(l.source, l.lag, l.target);
        s.coefficients[l] = 0.5;
    }
    s.noise = NoiseSpec::uniform(-1.0, 1.0);
    s.T = T;
    s.seed = seed;
    s.validate();
    return s;
}

} // namespace

SemSpec diamond_fixture(int T, std::uint64_t seed) { return diamond(false, T, seed); }
SemSpec diamond_lagged_fixture(int T, std::uint64_t seed) { return diamond(true, T, seed); }

AlignedPanel simulate(const SemSpec& spec) {
    spec.validate();
    const auto d = spec.graph.size();
    const int G = spec.graph.gamma_max();
    const auto order = topological_order(spec.graph);
    const auto total = static_cast<std::size_t>(spec.burn_in + spec.T);

    // Incoming terms per target, grouped to keep the inner loop flat.
    std::vector<std::vector<std::pair<LaggedLink, double>>> in(d);
    for (const auto& [l, c] : spec.coefficients) in[l.target].emplace_back(l, c);

    std::mt19937_64 rng(spec.seed);
    Eigen::MatrixXd X = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(total + static_cast<std::size_t>(G)),
                                              static_cast<Eigen::Index>(d));
    std::vector<double> e(d);
    for (std::size_t t = 0; t < total; ++t) {
        const auto row = static_cast<Eigen::Index>(t) + G;
        for (auto& v : e) v = spec.noise.draw(rng);
        for (auto q : order) {
            double v = e[q];
            for (const auto& [l, c] : in[q]) v += c * X(row - l.lag, static_cast<Eigen::Index>(l.source));
            X(row, static_cast<Eigen::Index>(q)) = v;
        }
    }
    return AlignedPanel::from_values(spec.graph.names(), spec.period, spec.start,
                                     X.bottomRows(spec.T));
}

void CorruptionSpec::validate(const AlignedPanel& panel) const {
    if (!(missing_rate >= 0.0 && missing_rate <= 1.0)) throw Error("missing_rate must lie in [0, 1]");
    if (timestamp_jitter < 0) throw Error("timestamp_jitter must be non-negative");
    Millis smallest = panel.period;
    for (const auto& [name, p] : resample_period) {
        panel.index_of(name);
        if (p <= 0 || p % panel.period != 0)
            throw Error("resample period of " + name + " must be a positive multiple of the panel period");
        smallest = std::min(smallest, p);
    }
    if (2 * timestamp_jitter >= smallest) throw Error("timestamp_jitter must be below half the smallest period");
    for (const auto& s : sleeping) {
        panel.index_of(s.series);
        if (s.start_row >= static_cast<std::size_t>(panel.rows())) throw Error("sleeping span starts past the end");
    }
}

TimeSeriesSet corrupt(const AlignedPanel& panel, const CorruptionSpec& spec, std::uint64_t seed) {
    spec.validate(panel);
    std::mt19937_64 rng(seed);
    TimeSeriesSet out;
    const auto T = static_cast<std::size_t>(panel.rows());
    for (std::size_t c = 0; c < panel.names.size(); ++c) {
        const auto& name = panel.names[c];
        std::vector<std::optional<double>> v(T);
        for (std::size_t r = 0; r < T; ++r)
            if (!panel.missing(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)))
                v[r] = panel.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
        for (const auto& s : spec.sleeping) {
            if (s.series != name) continue;
            for (std::size_t r = s.start_row; r < std::min(T, s.start_row + s.length); ++r) v[r] = v[s.start_row];
        }
        std::size_t step = 1;
        if (auto it = spec.resample_period.find(name); it != spec.resample_period.end())
            step = static_cast<std::size_t>(it->second / panel.period);
        Series s{name, {}};
        for (std::size_t r = 0; r < T; r += step) {
            Millis t = panel.time_at(static_cast<Eigen::Index>(r));
            if (spec.timestamp_jitter > 0) {
                const auto span = static_cast<std::uint64_t>(2 * spec.timestamp_jitter + 1);
                t += static_cast<Millis>(rng() % span) - spec.timestamp_jitter;
            }
            auto value = v[r];
            if (spec.missing_rate > 0.0 && unit_open(rng) < spec.missing_rate) value.reset();
            s.points.push_back({t, value});
        }
        out.add(std::move(s));
    }
    return out;
}

} // namespace tscausal
