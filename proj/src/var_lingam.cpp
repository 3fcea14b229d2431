#include "tscausal/discovery.hpp"
#include "tscausal/stats.hpp"

#include "lagged_design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace tscausal {

namespace {

bool near_constant(const Eigen::VectorXd& x) {
    const double m = x.mean();
    const double sd = std::sqrt((x.array() - m).square().mean());
    return sd <= 1e-12 * std::max(1.0, std::abs(m));
}

struct VarFit {
    std::vector<Eigen::MatrixXd> M; // M[tau - 1], row = target
    Eigen::MatrixXd residuals;
};

VarFit fit_var(const detail::LaggedDesign& X, RunLog* log) {
    const auto d = static_cast<Eigen::Index>(X.d);
    const Eigen::MatrixXd lagged = X.lagged_block();
    VarFit out;
    out.M.assign(static_cast<std::size_t>(X.gamma), Eigen::MatrixXd::Zero(d, d));
    out.residuals.resize(X.rows(), d);
    for (Eigen::Index q = 0; q < d; ++q) {
        RegressionFit fit;
        try {
            fit = ols(lagged, X.data.col(q));
        } catch (const RankDeficientError& e) {
            throw Error(std::string("VAR fit is rank deficient: ") + e.what());
        }
        if (log) ++log->regressions;
        for (int tau = 1; tau <= X.gamma; ++tau)
            out.M[static_cast<std::size_t>(tau - 1)].row(q) = fit.coefficients.segment((tau - 1) * d, d).transpose();
        out.residuals.col(q) = fit.residuals;
    }
    return out;
}

} // namespace

Eigen::MatrixXd detail::var_residuals(const detail::LaggedDesign& X, RunLog* log) {
    return fit_var(X, log).residuals;
}

std::vector<std::size_t> direct_lingam_order(const Eigen::MatrixXd& data) {
    const auto m = static_cast<std::size_t>(data.cols());
    Eigen::MatrixXd X = data;
    std::vector<std::size_t> remaining(m);
    std::iota(remaining.begin(), remaining.end(), std::size_t{0});
    std::vector<std::size_t> order;
    while (!remaining.empty()) {
        const auto r = remaining.size();
        std::vector<char> constant(r);
        for (std::size_t a = 0; a < r; ++a)
            constant[a] = near_constant(X.col(static_cast<Eigen::Index>(remaining[a])));
        // R(a, b) > 0 favours remaining[a] -> remaining[b].
        Eigen::MatrixXd R = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(r));
        for (std::size_t a = 0; a < r; ++a)
            for (std::size_t b = a + 1; b < r; ++b) {
                if (constant[a] || constant[b]) continue;
                const double v = pairwise_direction_measure(X.col(static_cast<Eigen::Index>(remaining[a])),
                                                            X.col(static_cast<Eigen::Index>(remaining[b])));
                R(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = v;
                R(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = -v;
            }
        std::size_t best = 0;
        double best_score = std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < r; ++a) {
            double score = 0.0;
            for (std::size_t b = 0; b < r; ++b) {
                const double v = std::min(0.0, R(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)));
                score += v * v;
            }
            if (score < best_score) {
                best_score = score;
                best = a;
            }
        }
        const auto chosen = static_cast<Eigen::Index>(remaining[best]);
        order.push_back(remaining[best]);
        remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best));
        if (constant[best]) continue;
        const Eigen::VectorXd xc = X.col(chosen).array() - X.col(chosen).mean();
        const double var = xc.squaredNorm();
        for (auto j : remaining) {
            const auto jj = static_cast<Eigen::Index>(j);
            const Eigen::VectorXd yc = X.col(jj).array() - X.col(jj).mean();
            X.col(jj) = yc - (yc.dot(xc) / var) * xc;
        }
    }
    return order;
}

CausalOrderResult var_causal_order(const AlignedPanel& panel, const DiscoveryConfig& cfg, RunLog* log) {
    cfg.validate();
    const auto X = detail::build_lagged_design(panel, cfg.gamma_max);
    auto var = fit_var(X, log);
    CausalOrderResult out;
    out.order = direct_lingam_order(var.residuals);
    out.residuals = std::move(var.residuals);
    return out;
}

VarLingamResult varlingam(const AlignedPanel& panel, const DiscoveryConfig& cfg, RunLog* log) {
    cfg.validate();
    const auto X = detail::build_lagged_design(panel, cfg.gamma_max);
    const auto d = static_cast<Eigen::Index>(X.d);
    auto var = fit_var(X, log);

    VarLingamResult out{WindowCausalGraph(panel.names, cfg.gamma_max), {}, Eigen::MatrixXd::Zero(d, d), {}, {}};
    out.causal_order = direct_lingam_order(var.residuals);
    const auto& order = out.causal_order;

    for (std::size_t k = 1; k < order.size(); ++k) {
        const auto target = static_cast<Eigen::Index>(order[k]);
        Eigen::MatrixXd preds(var.residuals.rows(), static_cast<Eigen::Index>(k));
        for (std::size_t a = 0; a < k; ++a)
            preds.col(static_cast<Eigen::Index>(a)) = var.residuals.col(static_cast<Eigen::Index>(order[a]));
        try {
            const auto fit = ols(preds, var.residuals.col(target));
            if (log) ++log->regressions;
            for (std::size_t a = 0; a < k; ++a)
                out.instantaneous(target, static_cast<Eigen::Index>(order[a])) =
                    fit.coefficients(static_cast<Eigen::Index>(a));
        } catch (const RankDeficientError&) {
            if (log) log->notes.push_back("collinear residuals, instantaneous row left at zero: " +
                                          panel.names[order[k]]);
        }
    }
    const Eigen::MatrixXd I_B0 = Eigen::MatrixXd::Identity(d, d) - out.instantaneous;
    for (const auto& M : var.M) out.lagged.push_back(I_B0 * M);

    // Prune each row by adaptive lasso over admissible regressors.
    for (std::size_t k = 0; k < order.size(); ++k) {
        const auto q = order[k];
        std::vector<std::size_t> cols(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
        std::sort(cols.begin(), cols.end());
        for (auto c = X.d; c < static_cast<std::size_t>(X.data.cols()); ++c) cols.push_back(c);
        Eigen::MatrixXd Z(X.rows(), static_cast<Eigen::Index>(cols.size()));
        for (std::size_t a = 0; a < cols.size(); ++a)
            Z.col(static_cast<Eigen::Index>(a)) = X.data.col(static_cast<Eigen::Index>(cols[a]));
        const auto fit = adaptive_lasso_bic(Z, X.data.col(static_cast<Eigen::Index>(q)));
        if (log) ++log->regressions;
        for (auto j : fit.support()) {
            const auto c = cols[static_cast<std::size_t>(j)];
            out.graph.add_edge(X.series_of(c), X.lag_of(c), q);
        }
    }
    out.residuals = std::move(var.residuals);
    return out;
}

} // namespace tscausal
