#pragma once

#include "tscausal/stats.hpp"

#include <Eigen/Dense>

#include <atomic>
#include <map>
#include <shared_mutex>
#include <span>
#include <vector>

namespace tscausal {

/// Partial-correlation tests over the columns of one data matrix, answered
/// from its correlation matrix and memoized by (x, y, sorted Z).
///
/// Results agree with partial_correlation_test on the same columns: both
/// compute the correlation of least-squares residuals with an intercept.
/// Lookups may run concurrently; inserts take an exclusive lock.
class CorrelationCITester {
public:
    CorrelationCITester(const Eigen::MatrixXd& data, double alpha);

    CITestResult test(std::size_t x, std::size_t y, std::span<const std::size_t> z) const;

    double alpha() const noexcept { return alpha_; }
    int samples() const noexcept { return n_; }
    std::size_t variables() const noexcept { return static_cast<std::size_t>(corr_.rows()); }
    bool constant(std::size_t v) const { return constant_[v]; }

    std::size_t tests_run() const noexcept { return tests_.load(); }
    std::size_t degenerate_tests() const noexcept { return degenerate_.load(); }

private:
    struct Key {
        std::size_t x, y;
        std::vector<std::size_t> z;
        friend auto operator<=>(const Key&, const Key&) = default;
    };

    CITestResult compute(std::size_t x, std::size_t y, const std::vector<std::size_t>& z) const;

    Eigen::MatrixXd corr_;
    std::vector<bool> constant_;
    double alpha_;
    int n_;
    mutable std::shared_mutex mutex_;
    mutable std::map<Key, CITestResult> cache_;
    mutable std::atomic<std::size_t> tests_{0};
    mutable std::atomic<std::size_t> degenerate_{0};
};

} // namespace tscausal
