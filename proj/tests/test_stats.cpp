#include "support.hpp"

#include "tscausal/ci_tester.hpp"
#include "tscausal/stats.hpp"

#include <doctest.h>

#include <vector>

using namespace tscausal;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

double corr(const VectorXd& a, const VectorXd& b) {
    const VectorXd x = a.array() - a.mean(), y = b.array() - b.mean();
    return x.dot(y) / std::sqrt(x.squaredNorm() * y.squaredNorm());
}

double soft(double z, double t) { return z > t ? z - t : (z < -t ? z + t : 0.0); }

} // namespace

TEST_CASE("partial correlation converges to the closed form") {
    // Z, then X and Y built from Z plus a shared factor so that
    // corr(X,Y) = 0.8, corr(X,Z) = corr(Y,Z) = 0.5.
    testgen::Rng rng(1);
    const Eigen::Index n = 200000;
    VectorXd x(n), y(n), z(n);
    const double a = 0.5, shared = std::sqrt(0.8 - 0.25), own = std::sqrt(1.0 - 0.25 - shared * shared);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double zi = testgen::normal(rng), f = testgen::normal(rng);
        z(i) = zi;
        x(i) = a * zi + shared * f + own * testgen::normal(rng);
        y(i) = a * zi + shared * f + own * testgen::normal(rng);
    }
    const double closed = (0.8 - 0.25) / std::sqrt((1 - 0.25) * (1 - 0.25));
    CHECK(closed == doctest::Approx(0.733333333).epsilon(1e-6));
    const auto res = partial_correlation_test(x, y, z, 0.05);
    CHECK(res.statistic == doctest::Approx(closed).epsilon(0.01));
    CHECK(res.cond_size == 1);
    CHECK(res.n_effective == n);
    CHECK_FALSE(res.independent);
}

TEST_CASE("null p-values are uniform") {
    testgen::Rng rng(2);
    std::vector<double> ps;
    for (int trial = 0; trial < 2000; ++trial) {
        const Eigen::Index n = 200;
        const auto x = testgen::normal_vector(rng, n), y = testgen::normal_vector(rng, n);
        const auto Z = testgen::normal_matrix(rng, n, trial % 3);
        ps.push_back(partial_correlation_test(x, y, Z, 0.05).p_value);
    }
    CHECK(testgen::ks_uniform(ps) < 0.05);

    const auto x = testgen::normal_vector(rng, 10000), y = testgen::normal_vector(rng, 10000);
    CHECK(std::abs(partial_correlation_test(x, y, MatrixXd(10000, 0), 0.05).statistic) < 0.05);
}

TEST_CASE("identical and degenerate inputs") {
    testgen::Rng rng(3);
    const auto x = testgen::normal_vector(rng, 500);
    const auto same = partial_correlation_test(x, x, MatrixXd(500, 0), 0.05);
    CHECK(same.statistic == doctest::Approx(1.0));
    CHECK(same.p_value < 1e-12);

    const VectorXd flat = VectorXd::Constant(500, 2.0);
    const auto deg = partial_correlation_test(x, flat, MatrixXd(500, 0), 0.05);
    CHECK(deg.degenerate);
    CHECK(deg.statistic == 0.0);
    CHECK(deg.p_value == 1.0);
    CHECK_FALSE(deg.independent);

    // x fully explained by Z leaves a zero residual.
    MatrixXd Z(500, 1);
    Z.col(0) = x;
    CHECK(partial_correlation_test(x, testgen::normal_vector(rng, 500), Z, 0.05).degenerate);
}

TEST_CASE("Fisher-z p-value decreases with |r|") {
    double last = 1.1;
    for (double r = 0.0; r < 0.99; r += 0.01) {
        const double p = fisher_z_pvalue(r, 100, 2);
        CHECK(p <= last);
        CHECK(fisher_z_pvalue(-r, 100, 2) == doctest::Approx(p));
        last = p;
    }
}

TEST_CASE("memoized tester agrees with the direct test") {
    testgen::Rng rng(4);
    for (int trial = 0; trial < 50; ++trial) {
        const Eigen::Index n = testgen::integer(rng, 30, 300), p = testgen::integer(rng, 3, 7);
        MatrixXd D = testgen::normal_matrix(rng, n, p);
        D.col(1) += 0.7 * D.col(0);
        D.col(2) += 0.5 * D.col(1) * std::exp(testgen::normal(rng));
        D.col(0) = D.col(0) * 1e3 + VectorXd::Constant(n, 5e4);
        CorrelationCITester tester(D, 0.05);
        for (int k = 0; k < 20; ++k) {
            const auto x = static_cast<std::size_t>(testgen::integer(rng, 0, p - 1));
            auto y = static_cast<std::size_t>(testgen::integer(rng, 0, p - 2));
            if (y >= x) ++y;
            std::vector<std::size_t> z;
            for (std::size_t v = 0; v < static_cast<std::size_t>(p); ++v)
                if (v != x && v != y && testgen::coin(rng, 0.4)) z.push_back(v);
            MatrixXd Zm(n, static_cast<Eigen::Index>(z.size()));
            for (std::size_t c = 0; c < z.size(); ++c) Zm.col(static_cast<Eigen::Index>(c)) = D.col(static_cast<Eigen::Index>(z[c]));
            const auto a = tester.test(x, y, z);
            const auto b = partial_correlation_test(D.col(static_cast<Eigen::Index>(x)), D.col(static_cast<Eigen::Index>(y)), Zm, 0.05);
            CHECK(a.statistic == doctest::Approx(b.statistic).epsilon(1e-8));
            CHECK(a.p_value == doctest::Approx(b.p_value).epsilon(1e-6));
            CHECK(a.independent == b.independent);
            const auto swapped = tester.test(y, x, z);
            CHECK(swapped.statistic == a.statistic);
        }
    }
}

TEST_CASE("ordinary least squares") {
    testgen::Rng rng(5);
    VectorXd x = testgen::normal_vector(rng, 50);
    MatrixXd X(50, 1);
    X.col(0) = x;
    const auto line = ols(X, 2.0 * x + VectorXd::Ones(50));
    CHECK(line.coefficients(0) == doctest::Approx(2.0));
    CHECK(line.intercept == doctest::Approx(1.0));

    const auto flat = ols(X, VectorXd::Constant(50, 4.5));
    CHECK(std::abs(flat.coefficients(0)) < 1e-12);
    CHECK(flat.intercept == doctest::Approx(4.5));

    MatrixXd bad(50, 3);
    bad.col(0) = x;
    bad.col(1) = testgen::normal_vector(rng, 50);
    bad.col(2) = 2.0 * bad.col(0) - bad.col(1);
    try {
        ols(bad, x);
        FAIL("expected RankDeficientError");
    } catch (const RankDeficientError& e) {
        CHECK_FALSE(e.dependent_columns.empty());
    }
}

TEST_CASE("least squares on orthonormal centred columns is X'y") {
    testgen::Rng rng(6);
    for (int trial = 0; trial < 30; ++trial) {
        const Eigen::Index n = testgen::integer(rng, 20, 100), p = testgen::integer(rng, 1, 6);
        MatrixXd A(n, p + 1);
        A.col(0).setOnes();
        A.rightCols(p) = testgen::normal_matrix(rng, n, p);
        const MatrixXd Q = Eigen::HouseholderQR<MatrixXd>(A).householderQ() * MatrixXd::Identity(n, p + 1);
        const MatrixXd X = Q.rightCols(p);  // orthogonal to the constant column
        const VectorXd y = testgen::normal_vector(rng, n);
        const auto fit = ols(X, y);
        const VectorXd expect = X.transpose() * y;
        for (Eigen::Index j = 0; j < p; ++j) CHECK(fit.coefficients(j) == doctest::Approx(expect(j)).epsilon(1e-8));
    }
}

TEST_CASE("OLS residuals are orthogonal to the regressors") {
    testgen::Rng rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::Index n = testgen::integer(rng, 15, 200), p = testgen::integer(rng, 1, 8);
        if (n <= p + 2) continue;
        MatrixXd X = testgen::normal_matrix(rng, n, p) * 10.0;
        const VectorXd y = X * testgen::normal_vector(rng, p) + testgen::normal_vector(rng, n);
        const auto fit = ols(X, y);
        CHECK(fit.residuals.size() == n);
        CHECK(std::abs(fit.residuals.sum()) < 1e-8 * n);
        for (Eigen::Index j = 0; j < p; ++j) CHECK(std::abs(X.col(j).dot(fit.residuals)) < 1e-8 * X.col(j).norm() * std::max(1.0, fit.residuals.norm()));
        CHECK(fit.bic == doctest::Approx(bic_score(fit.residuals.squaredNorm(), n, p + 1)));
    }
}

TEST_CASE("lasso with no penalty equals OLS") {
    testgen::Rng rng(8);
    for (int trial = 0; trial < 30; ++trial) {
        const Eigen::Index n = 200, p = testgen::integer(rng, 1, 6);
        const MatrixXd X = testgen::normal_matrix(rng, n, p) * 3.0;
        const VectorXd y = X * testgen::normal_vector(rng, p) + testgen::normal_vector(rng, n);
        const auto a = lasso(X, y, 0.0, VectorXd::Ones(p));
        const auto b = ols(X, y);
        for (Eigen::Index j = 0; j < p; ++j) CHECK(std::abs(a.coefficients(j) - b.coefficients(j)) < 1e-5);
        CHECK(std::abs(a.intercept - b.intercept) < 1e-5);
    }
}

TEST_CASE("lasso zero threshold from the optimality conditions") {
    testgen::Rng rng(9);
    for (int trial = 0; trial < 50; ++trial) {
        const Eigen::Index n = testgen::integer(rng, 30, 200), p = testgen::integer(rng, 1, 6);
        const MatrixXd X = testgen::normal_matrix(rng, n, p) * testgen::uniform(rng, 0.1, 10);
        const VectorXd y = X * testgen::normal_vector(rng, p) + testgen::normal_vector(rng, n);
        VectorXd w(p);
        for (auto& v : w) v = testgen::uniform(rng, 0.2, 3);
        double threshold = 0.0;
        const VectorXd yc = y.array() - y.mean();
        for (Eigen::Index j = 0; j < p; ++j) {
            const VectorXd xc = X.col(j).array() - X.col(j).mean();
            const double sd = std::sqrt(xc.squaredNorm() / static_cast<double>(n));
            threshold = std::max(threshold, std::abs(xc.dot(yc) / sd / static_cast<double>(n)) / w(j));
        }
        CHECK(lasso(X, y, threshold * (1 + 1e-12), w).support().empty());
        CHECK(lasso(X, y, threshold * 1.5, w).support().empty());
        CHECK_FALSE(lasso(X, y, threshold * 0.9, w).support().empty());
    }
}

TEST_CASE("single standardized column is soft thresholding of the correlation") {
    testgen::Rng rng(10);
    for (int trial = 0; trial < 50; ++trial) {
        const Eigen::Index n = 300;
        const VectorXd x = standardize(testgen::normal_vector(rng, n));
        const VectorXd y = standardize(testgen::uniform(rng, -1, 1) * x + testgen::normal_vector(rng, n));
        const double lambda = testgen::uniform(rng, 0, 0.6);
        MatrixXd X(n, 1);
        X.col(0) = x;
        const auto fit = lasso(X, y, lambda, VectorXd::Ones(1));
        CHECK(fit.coefficients(0) == doctest::Approx(soft(corr(x, y), lambda)).epsilon(1e-9));
    }
}

TEST_CASE("coordinate descent objective never increases") {
    testgen::Rng rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::Index n = testgen::integer(rng, 20, 150), p = testgen::integer(rng, 2, 10);
        MatrixXd X = testgen::normal_matrix(rng, n, p);
        for (Eigen::Index j = 1; j < p; ++j) X.col(j) += testgen::uniform(rng, -0.9, 0.9) * X.col(j - 1);
        const VectorXd y = X * testgen::normal_vector(rng, p) + testgen::normal_vector(rng, n);
        VectorXd w = VectorXd::Ones(p);
        for (auto& v : w) v = testgen::uniform(rng, 0.1, 2);
        std::vector<double> obj;
        LassoOptions opt;
        opt.on_sweep = [&](int, double f) { obj.push_back(f); };
        lasso(X, y, testgen::uniform(rng, 0.0, 0.5), w, opt);
        REQUIRE_FALSE(obj.empty());
        for (std::size_t k = 1; k < obj.size(); ++k) CHECK(obj[k] <= obj[k - 1] + 1e-12 * std::abs(obj[k - 1]));
    }
}

TEST_CASE("lasso reports non-convergence with the last iterate") {
    testgen::Rng rng(12);
    MatrixXd X = testgen::normal_matrix(rng, 100, 5);
    X.col(1) = X.col(0) + 1e-3 * X.col(1);
    const VectorXd y = X.col(0) + testgen::normal_vector(rng, 100);
    LassoOptions opt;
    opt.max_sweeps = 1;
    opt.tolerance = 1e-15;
    try {
        lasso(X, y, 1e-4, VectorXd::Ones(5), opt);
        FAIL("expected ConvergenceError");
    } catch (const ConvergenceError& e) {
        CHECK(e.last_iterate.coefficients.size() == 5);
    }
}

TEST_CASE("adaptive lasso recovers a sparse support") {
    int exact = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        testgen::Rng rng(seed);
        const MatrixXd X = testgen::normal_matrix(rng, 500, 4);
        const VectorXd y = 3.0 * X.col(0) + 1.5 * X.col(3) + 0.5 * testgen::normal_vector(rng, 500);
        const auto fit = adaptive_lasso_bic(X, y);
        exact += fit.support() == std::vector<Eigen::Index>{0, 3};
    }
    CHECK(exact >= 95);
}

TEST_CASE("adaptive lasso on pure noise selects nothing") {
    // BIC admits a null regressor with probability about P(chi2_1 > ln 500).
    int empty = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        testgen::Rng rng(seed + 1000);
        const auto fit = adaptive_lasso_bic(testgen::normal_matrix(rng, 500, 4), testgen::normal_vector(rng, 500));
        empty += fit.support().empty();
    }
    CHECK(empty >= 170);
}

TEST_CASE("one-point grid is the plain weighted lasso refit") {
    testgen::Rng rng(13);
    const MatrixXd X = testgen::normal_matrix(rng, 200, 3);
    const VectorXd y = X.col(0) + 0.2 * X.col(1) + testgen::normal_vector(rng, 200);
    AdaptiveLassoOptions opt;
    opt.lambdas = {0.05};
    const auto fit = adaptive_lasso_bic(X, y, opt);
    const auto b = ols(X, y);
    const VectorXd xs = (X.rowwise() - X.colwise().mean()).array().square().colwise().mean().sqrt();
    VectorXd w(3);
    for (Eigen::Index j = 0; j < 3; ++j) w(j) = 1.0 / std::abs(b.coefficients(j) * xs(j));
    const auto plain = lasso(X, y, 0.05, w);
    CHECK(fit.support() == plain.support());
    CHECK(fit.lambda == 0.05);
}

TEST_CASE("first principal component") {
    testgen::Rng rng(14);
    const VectorXd x = testgen::normal_vector(rng, 100);
    MatrixXd twin(100, 2);
    twin << x, x;
    const auto pc = first_principal_component(twin);
    CHECK(pc.explained_variance == doctest::Approx(1.0));
    CHECK(std::abs(corr(pc.scores, x)) == doctest::Approx(1.0));

    // diag(4, 1) rotated by 45 degrees.
    MatrixXd M(20000, 2);
    const double c = std::sqrt(0.5);
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        const double a = 2.0 * testgen::normal(rng), b = testgen::normal(rng);
        M(i, 0) = c * a - c * b;
        M(i, 1) = c * a + c * b;
    }
    const auto rot = first_principal_component(M);
    CHECK(std::abs(rot.loadings(0) - c) < 1e-6);
    CHECK(std::abs(rot.loadings(1) - c) < 1e-6);

    MatrixXd flat = MatrixXd::Constant(10, 2, 1.0);
    CHECK_THROWS_AS(first_principal_component(flat), Error);
}

TEST_CASE("principal component sign rule and permutation invariance") {
    testgen::Rng rng(15);
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::Index n = testgen::integer(rng, 10, 200), p = testgen::integer(rng, 2, 6);
        MatrixXd M = testgen::normal_matrix(rng, n, p);
        for (Eigen::Index j = 1; j < p; ++j) M.col(j) += testgen::uniform(rng, -2, 2) * M.col(0);
        const auto pc = first_principal_component(M);
        Eigen::Index arg;
        pc.loadings.cwiseAbs().maxCoeff(&arg);
        CHECK(pc.loadings(arg) > 0);
        std::vector<Eigen::Index> perm(static_cast<std::size_t>(p));
        for (Eigen::Index j = 0; j < p; ++j) perm[static_cast<std::size_t>(j)] = j;
        std::shuffle(perm.begin(), perm.end(), rng);
        MatrixXd P(n, p);
        for (Eigen::Index j = 0; j < p; ++j) P.col(j) = M.col(perm[static_cast<std::size_t>(j)]);
        const auto pp = first_principal_component(P);
        const double tol = 1e-8 * std::max(1.0, pc.scores.cwiseAbs().maxCoeff());
        std::vector<double> mags(pc.loadings.data(), pc.loadings.data() + p);
        for (auto& m : mags) m = std::abs(m);
        std::sort(mags.rbegin(), mags.rend());
        if (mags[0] - mags[1] > 1e-6)
            CHECK((pp.scores - pc.scores).cwiseAbs().maxCoeff() < tol);
        else
            CHECK(std::min((pp.scores - pc.scores).cwiseAbs().maxCoeff(), (pp.scores + pc.scores).cwiseAbs().maxCoeff()) < tol);
    }
}

TEST_CASE("direction measure finds the cause of a uniform pair") {
    int right = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        testgen::Rng rng(seed);
        VectorXd u(5000), v(5000);
        for (Eigen::Index i = 0; i < 5000; ++i) {
            u(i) = testgen::uniform(rng, -1, 1);
            v(i) = u(i) + testgen::uniform(rng, -1, 1);
        }
        right += pairwise_direction_measure(u, v) > 0;
    }
    CHECK(right >= 95);
}

TEST_CASE("direction measure is exactly antisymmetric") {
    testgen::Rng rng(16);
    for (int trial = 0; trial < 500; ++trial) {
        const Eigen::Index n = testgen::integer(rng, 10, 500);
        VectorXd u(n), v(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            u(i) = testgen::coin(rng) ? testgen::normal(rng) : testgen::uniform(rng, -3, 3);
            v(i) = testgen::uniform(rng, -1, 1) * u(i) + testgen::normal(rng);
        }
        CHECK(pairwise_direction_measure(u, v) == -pairwise_direction_measure(v, u));
    }
    CHECK_THROWS_AS(pairwise_direction_measure(VectorXd::Ones(10), testgen::normal_vector(rng, 10)), Error);
}

TEST_CASE("direction measure is small on a Gaussian pair") {
    std::vector<double> scores;
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        testgen::Rng rng(seed + 77);
        const VectorXd u = testgen::normal_vector(rng, 5000);
        const VectorXd v = 0.8 * u + 0.6 * testgen::normal_vector(rng, 5000);
        scores.push_back(pairwise_direction_measure(u, v));
    }
    const auto positive = std::count_if(scores.begin(), scores.end(), [](double s) { return s > 0; });
    CHECK(positive > 5);
    CHECK(positive < 35);
    for (double s : scores) CHECK(std::abs(s) < 0.01);
}
