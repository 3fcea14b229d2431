#pragma once

#include "tscausal/error.hpp"

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace tscausal {

struct CITestResult {
    double statistic = 0.0; ///< partial correlation in [-1, 1]
    double p_value = 1.0;
    int n_effective = 0;
    int cond_size = 0;
    /// A residual had zero variance, or too few degrees of freedom were left.
    /// Reported with statistic 0 and p-value 1; callers treat the pair as
    /// undecided rather than independent.
    bool degenerate = false;
    bool independent = false; ///< p_value > alpha and not degenerate
};

/// Two-sided Fisher-z p-value with n - cond_size - 3 degrees of freedom.
double fisher_z_pvalue(double r, int n, int cond_size);

/// Partial correlation of x and y given the columns of Z, computed from the
/// residuals of least-squares fits (with intercept) of x and y on Z.
CITestResult partial_correlation_test(const Eigen::VectorXd& x, const Eigen::VectorXd& y, const Eigen::MatrixXd& Z,
                                      double alpha);

struct RegressionFit {
    Eigen::VectorXd coefficients;
    double intercept = 0.0;
    Eigen::VectorXd residuals;
    double bic = 0.0;
    double lambda = 0.0; ///< penalty that produced the fit, in standardized units

    /// Indices of nonzero coefficients.
    std::vector<Eigen::Index> support() const;
};

class RankDeficientError : public Error {
public:
    RankDeficientError(const std::string& what, std::vector<Eigen::Index> dependent)
        : Error(what), dependent_columns(std::move(dependent)) {}
    std::vector<Eigen::Index> dependent_columns;
};

class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, RegressionFit last)
        : Error(what), last_iterate(std::move(last)) {}
    RegressionFit last_iterate;
};

/// n ln(RSS / n) + k ln(n).
double bic_score(double rss, Eigen::Index n, Eigen::Index k);

/// Least squares with an intercept. BIC counts the intercept in k.
/// Throws RankDeficientError naming the dependent columns.
RegressionFit ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

struct LassoOptions {
    double tolerance = 1e-7; ///< on the largest standardized coefficient change in a sweep
    int max_sweeps = 10000;
    /// Called after every sweep with the objective value; used by tests.
    std::function<void(int, double)> on_sweep;
};

/// Weighted lasso by coordinate descent on internally standardized columns:
///   (1/2n) ||y - X b||^2 + lambda * sum_j w_j |b_j|
/// Coefficients are returned on the original scale. BIC uses k = support size.
RegressionFit lasso(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda,
                    const Eigen::VectorXd& weights, const LassoOptions& options = {});

struct AdaptiveLassoOptions {
    int grid_size = 50;
    double min_ratio = 1e-4;
    /// Explicit penalties in standardized units; overrides the log grid.
    std::vector<double> lambdas;
    LassoOptions lasso;
};

/// Adaptive lasso with weights 1 / |b_ols| (standardized scale) and the
/// penalty chosen by BIC of the least-squares refit on each path support.
/// Returns the refit of the winning support.
RegressionFit adaptive_lasso_bic(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                 const AdaptiveLassoOptions& options = {});

struct PrincipalComponent {
    Eigen::VectorXd scores;
    Eigen::VectorXd loadings;
    double explained_variance = 0.0; ///< fraction of total standardized variance
};

/// First principal component of the column-standardized matrix (i.e. of the
/// correlation matrix). Zero-variance columns get a zero loading. The sign is
/// fixed so the largest-magnitude loading is positive.
PrincipalComponent first_principal_component(const Eigen::MatrixXd& M);

/// Maximum-entropy approximation of differential entropy for a standardized
/// sample (log cosh and Gaussian-weighted odd contrasts).
double entropy_approximation(const Eigen::VectorXd& standardized);

/// Likelihood-ratio direction score between two series. Positive favours
/// u -> v, negative v -> u; swapping the arguments negates it exactly.
double pairwise_direction_measure(const Eigen::VectorXd& u, const Eigen::VectorXd& v);

/// Mean-centred, unit (population) variance copy. Throws on constant input.
Eigen::VectorXd standardize(const Eigen::VectorXd& x);

} // namespace tscausal
