#include "tscausal/ci_tester.hpp"
#include "tscausal/discovery.hpp"
#include "tscausal/stats.hpp"

#include "lagged_design.hpp"
#include "orientation.hpp"
#include "subsets.hpp"

#include <cmath>
#include <optional>
#include <set>

namespace tscausal {

ExtendedSummaryCausalGraph pcgce(const AlignedPanel& panel, const DiscoveryConfig& cfg, RunLog* log) {
    cfg.validate();
    const auto X = detail::build_lagged_design(panel, cfg.gamma_max);
    const auto d = X.d;
    const auto n = X.rows();
    const auto N = 2 * d;
    const int limit = cfg.cond_limit(d);

    // Nodes 0..d-1 are the present slice, d + p the reduced past of series p.
    Eigen::MatrixXd data = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(N));
    data.leftCols(static_cast<Eigen::Index>(d)) = X.data.leftCols(static_cast<Eigen::Index>(d));
    std::vector<char> active(N, 1);
    for (std::size_t p = 0; p < d; ++p) {
        Eigen::MatrixXd past(n, X.gamma);
        for (int lag = 1; lag <= X.gamma; ++lag)
            past.col(lag - 1) = X.data.col(static_cast<Eigen::Index>(X.column(p, lag)));
        const double sd = std::sqrt((past.rowwise() - past.colwise().mean()).array().square().sum());
        if (sd <= 1e-12) {
            active[d + p] = 0;
            if (log) log->notes.push_back("constant past slice, no past node: " + panel.names[p]);
            continue;
        }
        data.col(static_cast<Eigen::Index>(d + p)) =
            X.gamma == 1 ? Eigen::VectorXd(past.col(0)) : first_principal_component(past).scores;
    }

    const CorrelationCITester tester(data, cfg.alpha);
    std::vector<char> adj(N * N, 0);
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j)
            if (i != j && active[i] && active[j]) adj[i * N + j] = 1;

    detail::SepsetMap sepsets;
    std::set<std::string> degenerate;
    auto node_name = [&](std::size_t v) {
        return v < d ? panel.names[v] : panel.names[v - d] + "@past";
    };

    for (int k = 0; k <= limit; ++k) {
        const auto frozen = adj;
        bool testable = false;
        std::vector<NodePair> removed;
        for (std::size_t i = 0; i < N; ++i) {
            for (std::size_t j = i + 1; j < N; ++j) {
                if (!frozen[i * N + j]) continue;
                // Every subset at this level is tried and the sepset is the one
                // with the largest p-value, so the result does not depend on
                // how the series are numbered.
                std::optional<std::vector<std::size_t>> best;
                double best_p = -1.0;
                for (auto side : {i, j}) {
                    const auto other = side == i ? j : i;
                    std::vector<std::size_t> pool;
                    for (std::size_t v = 0; v < N; ++v)
                        if (v != other && frozen[side * N + v]) pool.push_back(v);
                    if (pool.size() < static_cast<std::size_t>(k)) continue;
                    testable = true;
                    detail::for_each_subset(pool, static_cast<std::size_t>(k), [&](const std::vector<std::size_t>& S) {
                        const auto res = tester.test(i, j, S);
                        if (res.degenerate) {
                            degenerate.insert(node_name(i) + " - " + node_name(j));
                            return false;
                        }
                        if (res.independent && res.p_value > best_p) {
                            best_p = res.p_value;
                            best = S;
                        }
                        return false;
                    });
                }
                if (best) {
                    sepsets[{i, j}] = *best;
                    removed.emplace_back(i, j);
                }
            }
        }
        for (auto [i, j] : removed) adj[i * N + j] = adj[j * N + i] = 0;
        if (!testable) break;
    }

    detail::OrientationGraph og(d, N);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i + 1; j < d; ++j)
            if (adj[i * N + j]) og.connect(i, j);
    for (std::size_t p = 0; p < d; ++p)
        for (std::size_t q = 0; q < d; ++q)
            if (adj[(d + p) * N + q]) og.connect_directed(d + p, q);
    detail::orient_all(og, sepsets);

    ExtendedSummaryCausalGraph g(panel.names);
    for (std::size_t p = 0; p < d; ++p)
        for (std::size_t q = 0; q < d; ++q)
            if (adj[(d + p) * N + q]) g.add_past_edge(p, q);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i + 1; j < d; ++j) {
            if (!adj[i * N + j]) continue;
            const auto mark = og.mark(i, j);
            if (mark != EdgeMark::Directed)
                g.add_present_edge(i, j, mark);
            else if (og.directed(i, j))
                g.add_present_edge(i, j);
            else
                g.add_present_edge(j, i);
        }

    if (log) {
        log->ci_tests += tester.tests_run();
        log->degenerate_tests += tester.degenerate_tests();
        for (const auto& s : degenerate) log->notes.push_back("degenerate CI test, edge kept: " + s);
    }
    return g;
}

} // namespace tscausal
