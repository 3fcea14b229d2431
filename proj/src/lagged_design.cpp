#include "lagged_design.hpp"

#include "tscausal/error.hpp"

#include <string>

namespace tscausal::detail {

LaggedDesign build_lagged_design(const AlignedPanel& panel, int gamma) {
    if (gamma < 1) throw Error("gamma_max must be at least 1");
    if (panel.cols() < 1) throw Error("panel has no series");
    if (panel.has_missing()) throw Error("panel has missing cells; interpolate before discovery");
    if (!panel.values.allFinite()) throw Error("panel has non-finite values");
    const Eigen::Index T = panel.rows();
    const auto d = static_cast<Eigen::Index>(panel.cols());
    const Eigen::Index n = T - gamma;
    const Eigen::Index needed = (gamma + 1) * d + 10;
    if (n <= needed)
        throw Error("too few rows: " + std::to_string(T) + " rows leave " + std::to_string(n < 0 ? 0 : n) +
                    " effective, need more than " + std::to_string(needed) + " (at least " +
                    std::to_string(needed + 1 + gamma) + " rows)");
    LaggedDesign out;
    out.d = static_cast<std::size_t>(d);
    out.gamma = gamma;
    out.data.resize(n, (gamma + 1) * d);
    for (int lag = 0; lag <= gamma; ++lag)
        out.data.middleCols(lag * d, d) = panel.values.middleRows(gamma - lag, n);
    return out;
}

} // namespace tscausal::detail
