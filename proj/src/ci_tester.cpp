#include "tscausal/ci_tester.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

namespace tscausal {

CorrelationCITester::CorrelationCITester(const Eigen::MatrixXd& data, double alpha)
    : alpha_(alpha), n_(static_cast<int>(data.rows())) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error("alpha must lie in (0, 1)");
    const Eigen::Index p = data.cols();
    Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(data.rows(), p);
    constant_.assign(static_cast<std::size_t>(p), false);
    for (Eigen::Index j = 0; j < p; ++j) {
        const double m = data.col(j).mean();
        const double sd = std::sqrt((data.col(j).array() - m).square().mean());
        if (sd <= 1e-12 * std::max(1.0, std::abs(m))) {
            constant_[static_cast<std::size_t>(j)] = true;
            continue;
        }
        Z.col(j) = (data.col(j).array() - m) / sd;
    }
    corr_ = Z.transpose() * Z / static_cast<double>(data.rows());
}

CITestResult CorrelationCITester::test(std::size_t x, std::size_t y, std::span<const std::size_t> z) const {
    Key key{std::min(x, y), std::max(x, y), std::vector<std::size_t>(z.begin(), z.end())};
    std::sort(key.z.begin(), key.z.end());
    key.z.erase(std::unique(key.z.begin(), key.z.end()), key.z.end());
    {
        std::shared_lock lock(mutex_);
        if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    }
    auto res = compute(key.x, key.y, key.z);
    ++tests_;
    if (res.degenerate) ++degenerate_;
    std::unique_lock lock(mutex_);
    cache_.emplace(std::move(key), res);
    return res;
}

CITestResult CorrelationCITester::compute(std::size_t x, std::size_t y, const std::vector<std::size_t>& z) const {
    std::vector<Eigen::Index> cond;
    for (auto v : z)
        if (v != x && v != y && !constant_[v]) cond.push_back(static_cast<Eigen::Index>(v));
    CITestResult res;
    res.n_effective = n_;
    res.cond_size = static_cast<int>(cond.size());
    if (constant_[x] || constant_[y] || n_ - res.cond_size - 3 < 1) {
        res.degenerate = true;
        return res;
    }
    const auto xi = static_cast<Eigen::Index>(x), yi = static_cast<Eigen::Index>(y);
    Eigen::Matrix2d C;
    C << corr_(xi, xi), corr_(xi, yi), corr_(yi, xi), corr_(yi, yi);
    const auto k = static_cast<Eigen::Index>(cond.size());
    if (k > 0) {
        Eigen::MatrixXd Szz(k, k);
        Eigen::MatrixXd Szxy(k, 2);
        for (Eigen::Index a = 0; a < k; ++a) {
            for (Eigen::Index b = 0; b < k; ++b) Szz(a, b) = corr_(cond[a], cond[b]);
            Szxy(a, 0) = corr_(cond[a], xi);
            Szxy(a, 1) = corr_(cond[a], yi);
        }
        Eigen::MatrixXd W;
        Eigen::LLT<Eigen::MatrixXd> llt(Szz);
        if (llt.info() == Eigen::Success)
            W = llt.solve(Szxy);
        else
            W = Szz.completeOrthogonalDecomposition().solve(Szxy);
        C -= Szxy.transpose() * W;
    }
    if (C(0, 0) <= 1e-12 || C(1, 1) <= 1e-12) {
        res.degenerate = true;
        return res;
    }
    const double r = std::clamp(C(0, 1) / std::sqrt(C(0, 0) * C(1, 1)), -1.0, 1.0);
    res.statistic = r;
    res.p_value = fisher_z_pvalue(r, n_, res.cond_size);
    res.independent = res.p_value > alpha_;
    return res;
}

} // namespace tscausal
