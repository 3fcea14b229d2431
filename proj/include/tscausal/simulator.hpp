#pragma once

#include "tscausal/core_data.hpp"
#include "tscausal/graphs.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace tscausal {

enum class NoiseKind { Uniform, Gaussian, Laplace };

struct NoiseSpec {
    NoiseKind kind = NoiseKind::Uniform;
    double low = -1.0, high = 1.0; ///< Uniform bounds
    double scale = 1.0;            ///< Gaussian sigma or Laplace b

    static NoiseSpec uniform(double low, double high) { return {NoiseKind::Uniform, low, high, 1.0}; }
    static NoiseSpec gaussian(double sigma) { return {NoiseKind::Gaussian, -1.0, 1.0, sigma}; }
    static NoiseSpec laplace(double b) { return {NoiseKind::Laplace, -1.0, 1.0, b}; }

    /// Draws from bits of the generator only, so streams agree across
    /// standard libraries.
    double draw(std::mt19937_64& rng) const;
    double cdf(double x) const;
    void validate() const;
};

/// Linear SEM over a window graph:
///   X_t = sum_{lag} B_lag X_{t-lag} + e_t
/// with B_lag[target][source] taken from `coefficients`.
struct SemSpec {
    WindowCausalGraph graph;
    std::map<LaggedLink, double> coefficients;
    NoiseSpec noise;
    int T = 3000;
    int burn_in = 200;
    std::uint64_t seed = 0;
    Millis period = 60'000;
    Millis start = 0;

    /// Throws Error on non-Directed or coefficient-less edges, a lag-0
    /// cycle, or a companion matrix with spectral radius >= 1.
    void validate() const;
    /// Spectral radius of the companion matrix of (I - B0)^-1 B_lag.
    double spectral_radius() const;
};

nlohmann::json sem_to_json(const SemSpec& spec);
/// Window graph JSON plus "coefficients" ([src, dst, lag, value] rows; an
/// optional "default_coefficient" fills the rest), "noise", "T", "burn_in",
/// "seed", "period_ms". The result is validated.
SemSpec sem_from_json(const nlohmann::json& j);
SemSpec load_sem_spec(const std::string& path);

/// Diamond with self causes: s -> p at lag 2, s -> q at lag 1, p -> r and
/// q -> r at lag 0, lag-1 self loops, all coefficients 0.5, Uniform(-1, 1).
SemSpec diamond_fixture(int T = 3000, std::uint64_t seed = 0);
/// Same shape with p -> r and q -> r moved to lag 1.
SemSpec diamond_lagged_fixture(int T = 3000, std::uint64_t seed = 0);

/// Validates, then generates T rows after burn_in; pre-sample values are 0.
AlignedPanel simulate(const SemSpec& spec);

struct SleepingSpan {
    std::string series;
    std::size_t start_row = 0;
    std::size_t length = 0;
};

struct CorruptionSpec {
    /// Per-series coarser period; must be a multiple of the panel period.
    std::map<std::string, Millis> resample_period;
    Millis timestamp_jitter = 0; ///< max |shift| in ms
    double missing_rate = 0.0;
    std::vector<SleepingSpan> sleeping;

    void validate(const AlignedPanel& panel) const;
};

/// Back to raw per-series form: sleeping spans freeze the value at their
/// first row, then series are thinned to their resample period, timestamps
/// jittered, and points dropped to missing at `missing_rate`.
TimeSeriesSet corrupt(const AlignedPanel& panel, const CorruptionSpec& spec, std::uint64_t seed);

} // namespace tscausal
