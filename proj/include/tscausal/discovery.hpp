#pragma once

#include "tscausal/core_data.hpp"
#include "tscausal/error.hpp"
#include "tscausal/graph_io.hpp"
#include "tscausal/graphs.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tscausal {

struct DiscoveryConfig {
    int gamma_max = 1;
    double alpha = 0.05;
    /// Largest conditioning set searched by the constraint-based learners.
    /// Defaults to gamma_max * d.
    std::optional<int> max_cond_size;

    void validate() const;
    int cond_limit(std::size_t d) const;
};

/// In declaration order; this is also the row order of benchmark reports.
enum class MethodId { GCMVL, PCMCIplus, PCGCE, VarLiNGAM, NBCBw, NBCBe, CBNBw, CBNBe };

inline constexpr MethodId kAllMethods[] = {MethodId::GCMVL, MethodId::PCMCIplus, MethodId::PCGCE,
                                           MethodId::VarLiNGAM, MethodId::NBCBw, MethodId::NBCBe,
                                           MethodId::CBNBw, MethodId::CBNBe};

/// Config-file id: gcmvl|pcmciplus|pcgce|varlingam|nbcb-w|nbcb-e|cbnb-w|cbnb-e
std::string_view method_key(MethodId m);
/// Display name as used in result tables (e.g. "PCMCI+", "NBCB-w").
std::string_view method_label(MethodId m);
MethodId parse_method(std::string_view key);

enum class GraphKind { Summary, Window, Extended };
/// Native output type of each method.
GraphKind native_kind(MethodId m);

/// Counters and remarks from one discovery run.
struct RunLog {
    std::size_t ci_tests = 0;
    std::size_t degenerate_tests = 0;
    std::size_t regressions = 0;
    std::vector<std::string> notes;
};

enum class HybridVariant { Window, Extended };

SummaryCausalGraph gcmvl(const AlignedPanel& panel, const DiscoveryConfig& cfg, RunLog* log = nullptr);

/// Lagged-parent screening of the PCMCI+ family: for each target, the
/// surviving (source, lag) candidates after conditioning on the strongest
/// other survivors, for conditioning sizes 0..max_level.
std::vector<std::vector<LaggedLink>> pcmci_lagged_screening(const AlignedPanel& panel, const DiscoveryConfig& cfg,
                                                            int max_level, RunLog* log = nullptr);

WindowCausalGraph pcmci_plus(const AlignedPanel& panel, const DiscoveryConfig& cfg, RunLog* log = nullptr);
ExtendedSummaryCausalGraph pcgce(const AlignedPanel& panel, const DiscoveryConfig& cfg, RunLog* log = nullptr);

struct VarLingamResult {
    WindowCausalGraph graph;
    std::vector<std::size_t> causal_order;          ///< most exogenous first
    Eigen::MatrixXd instantaneous;                  ///< B0, row = effect
    std::vector<Eigen::MatrixXd> lagged;            ///< B_1..B_gamma_max
    Eigen::MatrixXd residuals;                      ///< VAR residuals, n x d
};

VarLingamResult varlingam(const AlignedPanel& panel, const DiscoveryConfig& cfg, RunLog* log = nullptr);

/// VAR fit and DirectLiNGAM order only (the noise-based stage of the hybrids).
struct CausalOrderResult {
    std::vector<std::size_t> order;
    Eigen::MatrixXd residuals;
};
CausalOrderResult var_causal_order(const AlignedPanel& panel, const DiscoveryConfig& cfg, RunLog* log = nullptr);

/// DirectLiNGAM ordering of the columns of `data`; ties go to the lower index.
std::vector<std::size_t> direct_lingam_order(const Eigen::MatrixXd& data);

AnyGraph nbcb(const AlignedPanel& panel, const DiscoveryConfig& cfg, HybridVariant variant, RunLog* log = nullptr);
AnyGraph cbnb(const AlignedPanel& panel, const DiscoveryConfig& cfg, HybridVariant variant, RunLog* log = nullptr);

/// Orients every non-Directed instantaneous edge of a constraint-based
/// result by the direction measure on VAR residuals (the second CBNB stage).
WindowCausalGraph orient_by_residuals(WindowCausalGraph g, const Eigen::MatrixXd& residuals, RunLog* log = nullptr);
ExtendedSummaryCausalGraph orient_by_residuals(ExtendedSummaryCausalGraph g, const Eigen::MatrixXd& residuals,
                                               RunLog* log = nullptr);

struct DiscoveryResult {
    MethodId method{};
    AnyGraph native;
    SummaryCausalGraph summary;
    RunLog log;
};

/// Runs one method and projects its native graph to a summary graph.
/// Errors are re-raised with the method name prefixed.
DiscoveryResult discover(MethodId method, const AlignedPanel& panel, const DiscoveryConfig& cfg);

} // namespace tscausal
