#include "tscausal/discovery.hpp"
#include "tscausal/stats.hpp"

#include "lagged_design.hpp"

#include <string>

namespace tscausal {

void DiscoveryConfig::validate() const {
    if (gamma_max < 1) throw Error("gamma_max must be at least 1");
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error("alpha must lie in (0, 1)");
    if (max_cond_size && *max_cond_size < 0) throw Error("max_cond_size must be non-negative");
}

int DiscoveryConfig::cond_limit(std::size_t d) const {
    return max_cond_size ? *max_cond_size : gamma_max * static_cast<int>(d);
}

namespace {

struct MethodInfo {
    MethodId id;
    std::string_view key;
    std::string_view label;
    GraphKind kind;
};

constexpr MethodInfo kMethods[] = {
    {MethodId::GCMVL, "gcmvl", "GCMVL", GraphKind::Summary},
    {MethodId::PCMCIplus, "pcmciplus", "PCMCI+", GraphKind::Window},
    {MethodId::PCGCE, "pcgce", "PCGCE", GraphKind::Extended},
    {MethodId::VarLiNGAM, "varlingam", "VarLiNGAM", GraphKind::Window},
    {MethodId::NBCBw, "nbcb-w", "NBCB-w", GraphKind::Window},
    {MethodId::NBCBe, "nbcb-e", "NBCB-e", GraphKind::Extended},
    {MethodId::CBNBw, "cbnb-w", "CBNB-w", GraphKind::Window},
    {MethodId::CBNBe, "cbnb-e", "CBNB-e", GraphKind::Extended},
};

const MethodInfo& info(MethodId m) {
    for (const auto& i : kMethods)
        if (i.id == m) return i;
    throw Error("unknown method id");
}

} // namespace

std::string_view method_key(MethodId m) { return info(m).key; }
std::string_view method_label(MethodId m) { return info(m).label; }
GraphKind native_kind(MethodId m) { return info(m).kind; }

MethodId parse_method(std::string_view key) {
    for (const auto& i : kMethods)
        if (i.key == key) return i.id;
    std::string known;
    for (const auto& i : kMethods) known += (known.empty() ? "" : "|") + std::string(i.key);
    throw Error("unknown method '" + std::string(key) + "' (expected " + known + ")");
}

SummaryCausalGraph gcmvl(const AlignedPanel& panel, const DiscoveryConfig& cfg, RunLog* log) {
    cfg.validate();
    const auto X = detail::build_lagged_design(panel, cfg.gamma_max);
    const Eigen::MatrixXd lagged = X.lagged_block();
    SummaryCausalGraph g(panel.names);
    for (std::size_t q = 0; q < X.d; ++q) {
        const auto fit = adaptive_lasso_bic(lagged, X.data.col(static_cast<Eigen::Index>(q)));
        if (log) ++log->regressions;
        for (auto j : fit.support()) g.add_edge(static_cast<std::size_t>(j) % X.d, q);
    }
    return g;
}

DiscoveryResult discover(MethodId method, const AlignedPanel& panel, const DiscoveryConfig& cfg) {
    DiscoveryResult out;
    out.method = method;
    try {
        RunLog* log = &out.log;
        switch (method) {
        case MethodId::GCMVL: out.native = gcmvl(panel, cfg, log); break;
        case MethodId::PCMCIplus: out.native = pcmci_plus(panel, cfg, log); break;
        case MethodId::PCGCE: out.native = pcgce(panel, cfg, log); break;
        case MethodId::VarLiNGAM: out.native = varlingam(panel, cfg, log).graph; break;
        case MethodId::NBCBw: out.native = nbcb(panel, cfg, HybridVariant::Window, log); break;
        case MethodId::NBCBe: out.native = nbcb(panel, cfg, HybridVariant::Extended, log); break;
        case MethodId::CBNBw: out.native = cbnb(panel, cfg, HybridVariant::Window, log); break;
        case MethodId::CBNBe: out.native = cbnb(panel, cfg, HybridVariant::Extended, log); break;
        }
    } catch (const std::exception& e) {
        throw Error(std::string(method_label(method)) + ": " + e.what());
    }
    out.summary = to_summary(out.native);
    return out;
}

} // namespace tscausal
