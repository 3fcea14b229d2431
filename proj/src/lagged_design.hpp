#pragma once

#include "tscausal/core_data.hpp"

#include <Eigen/Dense>

namespace tscausal {
struct RunLog;
}

namespace tscausal::detail {

/// Stacked lags 0..gamma of every series over rows gamma..T-1, so every
/// regression and test in a run shares one sample window.
/// Column of (series p, lag) is lag * d + p.
struct LaggedDesign {
    Eigen::MatrixXd data;
    std::size_t d = 0;
    int gamma = 0;

    Eigen::Index rows() const noexcept { return data.rows(); }
    std::size_t column(std::size_t p, int lag) const noexcept { return static_cast<std::size_t>(lag) * d + p; }
    std::size_t series_of(std::size_t col) const noexcept { return col % d; }
    int lag_of(std::size_t col) const noexcept { return static_cast<int>(col / d); }
    /// Columns of lags 1..gamma.
    Eigen::MatrixXd lagged_block() const { return data.rightCols(data.cols() - static_cast<Eigen::Index>(d)); }
};

/// Requires a complete panel with T - gamma > (gamma + 1) d + 10.
LaggedDesign build_lagged_design(const AlignedPanel& panel, int gamma);

/// Residuals of the per-equation OLS VAR(gamma) fit, one column per series.
Eigen::MatrixXd var_residuals(const LaggedDesign& X, RunLog* log);

} // namespace tscausal::detail
