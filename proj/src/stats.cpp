#include "tscausal/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

namespace tscausal {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr double kConstantTolerance = 1e-12;

bool is_constant(double sd, double mean) { return sd <= kConstantTolerance * std::max(1.0, std::abs(mean)); }

double population_sd(const VectorXd& x, double mean) {
    return std::sqrt((x.array() - mean).square().mean());
}

// Column means and population standard deviations; `active` excludes
// zero-variance columns.
struct Standardized {
    MatrixXd Z;
    VectorXd mean;
    VectorXd sd;
    std::vector<Index> active;
};

Standardized standardize_columns(const MatrixXd& X) {
    Standardized s;
    s.mean = X.colwise().mean().transpose();
    s.sd.resize(X.cols());
    s.Z = MatrixXd::Zero(X.rows(), X.cols());
    for (Index j = 0; j < X.cols(); ++j) {
        s.sd(j) = population_sd(X.col(j), s.mean(j));
        if (is_constant(s.sd(j), s.mean(j))) {
            s.sd(j) = 0.0;
            continue;
        }
        s.Z.col(j) = (X.col(j).array() - s.mean(j)) / s.sd(j);
        s.active.push_back(j);
    }
    return s;
}

} // namespace

double fisher_z_pvalue(double r, int n, int cond_size) {
    const int dof = n - cond_size - 3;
    if (dof < 1) return 1.0;
    if (std::abs(r) >= 1.0) return 0.0;
    const double z = std::atanh(r) * std::sqrt(static_cast<double>(dof));
    return std::erfc(std::abs(z) / std::numbers::sqrt2);
}

CITestResult partial_correlation_test(const VectorXd& x, const VectorXd& y, const MatrixXd& Z, double alpha) {
    const Index n = x.size();
    if (y.size() != n || (Z.cols() > 0 && Z.rows() != n)) throw Error("partial correlation: length mismatch");
    CITestResult res;
    res.n_effective = static_cast<int>(n);
    res.cond_size = static_cast<int>(Z.cols());
    if (n <= Z.cols() + 3) {
        res.degenerate = true;
        return res;
    }
    MatrixXd A(n, Z.cols() + 1);
    A.col(0).setOnes();
    A.rightCols(Z.cols()) = Z;
    Eigen::ColPivHouseholderQR<MatrixXd> qr(A);
    const VectorXd rx = x - A * qr.solve(x);
    const VectorXd ry = y - A * qr.solve(y);
    const double sx = (x.array() - x.mean()).matrix().squaredNorm();
    const double sy = (y.array() - y.mean()).matrix().squaredNorm();
    const double vx = rx.squaredNorm(), vy = ry.squaredNorm();
    if (vx <= 1e-12 * sx || vy <= 1e-12 * sy || sx == 0.0 || sy == 0.0) {
        res.degenerate = true;
        return res;
    }
    const double r = std::clamp(rx.dot(ry) / std::sqrt(vx * vy), -1.0, 1.0);
    res.statistic = r;
    res.p_value = fisher_z_pvalue(r, res.n_effective, res.cond_size);
    res.independent = res.p_value > alpha;
    return res;
}

std::vector<Index> RegressionFit::support() const {
    std::vector<Index> s;
    for (Index j = 0; j < coefficients.size(); ++j)
        if (coefficients(j) != 0.0) s.push_back(j);
    return s;
}

double bic_score(double rss, Index n, Index k) {
    const double nn = static_cast<double>(n);
    const double mse = std::max(rss / nn, std::numeric_limits<double>::min());
    return nn * std::log(mse) + static_cast<double>(k) * std::log(nn);
}

RegressionFit ols(const MatrixXd& X, const VectorXd& y) {
    const Index n = X.rows(), p = X.cols();
    if (y.size() != n) throw Error("ols: length mismatch");
    if (n <= p) throw Error("ols: need more rows than columns (" + std::to_string(n) + " <= " + std::to_string(p) + ")");
    MatrixXd A(n, p + 1);
    A.col(0).setOnes();
    A.rightCols(p) = X;
    Eigen::ColPivHouseholderQR<MatrixXd> qr(A);
    qr.setThreshold(1e-10);
    if (qr.rank() < p + 1) {
        std::vector<Index> dependent;
        for (Index k = qr.rank(); k < p + 1; ++k) {
            const Index col = qr.colsPermutation().indices()(k);
            if (col > 0) dependent.push_back(col - 1);
        }
        std::sort(dependent.begin(), dependent.end());
        std::string names;
        for (auto c : dependent) names += (names.empty() ? "" : ", ") + std::to_string(c);
        throw RankDeficientError("ols: design is rank deficient; dependent column(s): " + names, dependent);
    }
    const VectorXd beta = qr.solve(y);
    RegressionFit fit;
    fit.intercept = beta(0);
    fit.coefficients = beta.tail(p);
    fit.residuals = y - A * beta;
    fit.bic = bic_score(fit.residuals.squaredNorm(), n, p + 1);
    return fit;
}

// --- lasso --------------------------------------------------------------------

namespace {

// Covariance-form coordinate descent on standardized columns:
// G = Z'Z/n, c = Z'y/n, yy = y'y/n with y centred.
struct LassoProblem {
    MatrixXd G;
    VectorXd c;
    double yy = 0.0;
    std::vector<bool> active;

    double objective(const VectorXd& b, double lambda, const VectorXd& w) const {
        return 0.5 * (yy - 2.0 * c.dot(b) + b.dot(G * b)) + lambda * (w.array() * b.array().abs()).sum();
    }
};

LassoProblem make_problem(const Standardized& s, const VectorXd& y) {
    const double n = static_cast<double>(s.Z.rows());
    LassoProblem pr;
    const VectorXd yc = y.array() - y.mean();
    pr.G = s.Z.transpose() * s.Z / n;
    pr.c = s.Z.transpose() * yc / n;
    pr.yy = yc.squaredNorm() / n;
    pr.active.assign(static_cast<std::size_t>(s.Z.cols()), false);
    for (Index j : s.active) pr.active[static_cast<std::size_t>(j)] = true;
    return pr;
}

double soft_threshold(double z, double t) {
    if (z > t) return z - t;
    if (z < -t) return z + t;
    return 0.0;
}

// Returns false when max_sweeps ran out; `b` holds the last iterate.
bool coordinate_descent(const LassoProblem& pr, double lambda, const VectorXd& w, VectorXd& b,
                        const LassoOptions& opt) {
    const Index p = pr.c.size();
    VectorXd Gb = pr.G * b;
    for (int sweep = 1; sweep <= opt.max_sweeps; ++sweep) {
        double max_change = 0.0;
        for (Index j = 0; j < p; ++j) {
            if (!pr.active[static_cast<std::size_t>(j)]) continue;
            const double gjj = pr.G(j, j);
            const double z = pr.c(j) - Gb(j) + gjj * b(j);
            const double next = soft_threshold(z, lambda * w(j)) / gjj;
            const double change = next - b(j);
            if (change != 0.0) {
                Gb += pr.G.col(j) * change;
                b(j) = next;
                max_change = std::max(max_change, std::abs(change));
            }
        }
        if (opt.on_sweep) opt.on_sweep(sweep, pr.objective(b, lambda, w));
        if (max_change < opt.tolerance) return true;
    }
    return false;
}

RegressionFit to_original_scale(const Standardized& s, const MatrixXd& X, const VectorXd& y, const VectorXd& b_std) {
    RegressionFit fit;
    fit.coefficients = VectorXd::Zero(X.cols());
    for (Index j : s.active) fit.coefficients(j) = b_std(j) / s.sd(j);
    fit.intercept = y.mean() - fit.coefficients.dot(s.mean);
    fit.residuals = y - X * fit.coefficients - VectorXd::Constant(y.size(), fit.intercept);
    const auto k = static_cast<Index>(fit.support().size());
    fit.bic = bic_score(fit.residuals.squaredNorm(), X.rows(), k);
    return fit;
}

} // namespace

RegressionFit lasso(const MatrixXd& X, const VectorXd& y, double lambda, const VectorXd& weights,
                    const LassoOptions& options) {
    if (y.size() != X.rows()) throw Error("lasso: length mismatch");
    if (weights.size() != X.cols()) throw Error("lasso: one weight per column required");
    if (lambda < 0.0) throw Error("lasso: lambda must be non-negative");
    if ((weights.array() <= 0.0).any()) throw Error("lasso: weights must be positive");
    const auto s = standardize_columns(X);
    const auto pr = make_problem(s, y);
    VectorXd b = VectorXd::Zero(X.cols());
    const bool converged = coordinate_descent(pr, lambda, weights, b, options);
    auto fit = to_original_scale(s, X, y, b);
    fit.lambda = lambda;
    if (!converged)
        throw ConvergenceError("lasso: no convergence after " + std::to_string(options.max_sweeps) + " sweeps",
                               std::move(fit));
    return fit;
}

RegressionFit adaptive_lasso_bic(const MatrixXd& X, const VectorXd& y, const AdaptiveLassoOptions& options) {
    const Index n = X.rows(), p = X.cols();
    if (y.size() != n) throw Error("adaptive lasso: length mismatch");
    const auto s = standardize_columns(X);
    const double ymean = y.mean();

    RegressionFit empty;
    empty.coefficients = VectorXd::Zero(p);
    empty.intercept = ymean;
    empty.residuals = y.array() - ymean;
    empty.bic = bic_score(empty.residuals.squaredNorm(), n, 0);
    if (s.active.empty() || is_constant(population_sd(y, ymean), ymean)) return empty;

    // Adaptive weights from the unpenalized fit on the standardized scale.
    MatrixXd Xa(n, static_cast<Index>(s.active.size()));
    for (std::size_t k = 0; k < s.active.size(); ++k) Xa.col(static_cast<Index>(k)) = X.col(s.active[k]);
    const auto full = ols(Xa, y);
    VectorXd w = VectorXd::Ones(p);
    for (std::size_t k = 0; k < s.active.size(); ++k) {
        const Index j = s.active[k];
        w(j) = 1.0 / std::max(std::abs(full.coefficients(static_cast<Index>(k)) * s.sd(j)), 1e-10);
    }

    const auto pr = make_problem(s, y);
    std::vector<double> grid = options.lambdas;
    if (grid.empty()) {
        double lambda_max = 0.0;
        for (Index j : s.active) lambda_max = std::max(lambda_max, std::abs(pr.c(j)) / w(j));
        if (lambda_max == 0.0) return empty;
        const int m = std::max(1, options.grid_size);
        for (int k = 0; k < m; ++k) {
            const double frac = m == 1 ? 0.0 : static_cast<double>(k) / (m - 1);
            grid.push_back(lambda_max * std::pow(options.min_ratio, frac));
        }
    }

    // BIC of the least-squares refit on each distinct support, solved in
    // standardized space: RSS = n (yy - c_S' b_S).
    std::map<std::vector<Index>, std::pair<double, VectorXd>> refits;
    auto refit = [&](const std::vector<Index>& support) -> const std::pair<double, VectorXd>* {
        if (auto it = refits.find(support); it != refits.end()) return &it->second;
        const auto k = static_cast<Index>(support.size());
        VectorXd b = VectorXd::Zero(p);
        double rss = pr.yy * static_cast<double>(n);
        if (k > 0) {
            if (k >= n - 1) return nullptr;
            MatrixXd Gs(k, k);
            VectorXd cs(k);
            for (Index a = 0; a < k; ++a) {
                cs(a) = pr.c(support[static_cast<std::size_t>(a)]);
                for (Index c = 0; c < k; ++c)
                    Gs(a, c) = pr.G(support[static_cast<std::size_t>(a)], support[static_cast<std::size_t>(c)]);
            }
            Eigen::LLT<MatrixXd> llt(Gs);
            if (llt.info() != Eigen::Success) return nullptr;
            const VectorXd bs = llt.solve(cs);
            if (!bs.allFinite()) return nullptr;
            for (Index a = 0; a < k; ++a) b(support[static_cast<std::size_t>(a)]) = bs(a);
            rss = std::max(0.0, static_cast<double>(n) * (pr.yy - cs.dot(bs)));
        }
        return &refits.emplace(support, std::make_pair(bic_score(rss, n, k), b)).first->second;
    };

    // The empty model is always a candidate: at lambda_max rounding can leave
    // one coefficient a hair above zero.
    VectorXd b = VectorXd::Zero(p);
    double best_bic = refit({})->first;
    VectorXd best_b = VectorXd::Zero(p);
    double best_lambda = grid.front();
    for (double lambda : grid) {
        if (!coordinate_descent(pr, lambda, w, b, options.lasso)) {
            auto last = to_original_scale(s, X, y, b);
            last.lambda = lambda;
            throw ConvergenceError("adaptive lasso: no convergence at lambda " + std::to_string(lambda),
                                   std::move(last));
        }
        std::vector<Index> support;
        for (Index j = 0; j < p; ++j)
            if (b(j) != 0.0) support.push_back(j);
        const auto* r = refit(support);
        if (!r) continue;
        if (r->first < best_bic) {
            best_bic = r->first;
            best_b = r->second;
            best_lambda = lambda;
        }
    }
    auto fit = to_original_scale(s, X, y, best_b);
    fit.lambda = best_lambda;
    return fit;
}

// --- PCA ----------------------------------------------------------------------

PrincipalComponent first_principal_component(const MatrixXd& M) {
    if (M.rows() < 2 || M.cols() < 1) throw Error("principal component: need at least 2 rows and 1 column");
    const auto s = standardize_columns(M);
    if (s.active.empty()) throw Error("principal component: every column has zero variance");
    const auto k = static_cast<Index>(s.active.size());
    MatrixXd Za(M.rows(), k);
    for (Index a = 0; a < k; ++a) Za.col(a) = s.Z.col(s.active[static_cast<std::size_t>(a)]);
    const MatrixXd R = Za.transpose() * Za / static_cast<double>(M.rows());
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(R);
    if (eig.info() != Eigen::Success) throw Error("principal component: eigen-decomposition failed");
    VectorXd v = eig.eigenvectors().col(k - 1);
    Index big = 0;
    for (Index a = 1; a < k; ++a)
        if (std::abs(v(a)) > std::abs(v(big))) big = a;
    if (v(big) < 0) v = -v;

    PrincipalComponent pc;
    pc.loadings = VectorXd::Zero(M.cols());
    for (Index a = 0; a < k; ++a) pc.loadings(s.active[static_cast<std::size_t>(a)]) = v(a);
    pc.scores = Za * v;
    pc.explained_variance = eig.eigenvalues()(k - 1) / static_cast<double>(M.cols());
    return pc;
}

// --- non-Gaussian direction -----------------------------------------------------

VectorXd standardize(const VectorXd& x) {
    if (x.size() < 2) throw Error("standardize: need at least 2 values");
    const double m = x.mean();
    const double sd = population_sd(x, m);
    if (is_constant(sd, m)) throw Error("standardize: constant input");
    return (x.array() - m) / sd;
}

double entropy_approximation(const VectorXd& u) {
    constexpr double k1 = 79.047, k2 = 7.4129, gamma = 0.37457;
    const double log2 = std::log(2.0);
    double logcosh = 0.0, odd = 0.0;
    for (Index i = 0; i < u.size(); ++i) {
        const double a = std::abs(u(i));
        logcosh += a + std::log1p(std::exp(-2.0 * a)) - log2;
        odd += u(i) * std::exp(-0.5 * u(i) * u(i));
    }
    logcosh /= static_cast<double>(u.size());
    odd /= static_cast<double>(u.size());
    return (1.0 + std::log(2.0 * std::numbers::pi)) / 2.0 - k1 * (logcosh - gamma) * (logcosh - gamma) -
           k2 * odd * odd;
}

double pairwise_direction_measure(const VectorXd& u, const VectorXd& v) {
    if (u.size() != v.size()) throw Error("direction measure: length mismatch");
    const VectorXd us = standardize(u);
    const VectorXd vs = standardize(v);
    const double rho = us.dot(vs) / static_cast<double>(us.size());
    const VectorXd r_uv = us - rho * vs; // u given v
    const VectorXd r_vu = vs - rho * us; // v given u
    const double s_uv = std::sqrt(r_uv.squaredNorm() / static_cast<double>(us.size()));
    const double s_vu = std::sqrt(r_vu.squaredNorm() / static_cast<double>(us.size()));
    if (s_uv <= kConstantTolerance || s_vu <= kConstantTolerance) return 0.0;
    const double h_forward = entropy_approximation(us) + entropy_approximation(r_vu / s_vu);
    const double h_backward = entropy_approximation(vs) + entropy_approximation(r_uv / s_uv);
    return h_backward - h_forward;
}

} // namespace tscausal
