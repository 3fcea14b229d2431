#include "tscausal/ci_tester.hpp"
#include "tscausal/discovery.hpp"

#include "lagged_design.hpp"
#include "orientation.hpp"
#include "subsets.hpp"

#include <algorithm>
#include <limits>
#include <optional>
#include <set>

namespace tscausal {

namespace {

using detail::LaggedDesign;
using detail::SepsetMap;

struct Screening {
    std::vector<std::vector<std::size_t>> parents; // design columns, (series, lag) order
    SepsetMap sepsets;
};

// (series, lag) order on design columns.
auto series_lag_less(const LaggedDesign& X) {
    return [&X](std::size_t a, std::size_t b) {
        const auto sa = X.series_of(a), sb = X.series_of(b);
        return sa != sb ? sa < sb : X.lag_of(a) < X.lag_of(b);
    };
}

std::string link_name(const AlignedPanel& panel, const LaggedDesign& X, std::size_t col, std::size_t q) {
    return panel.names[X.series_of(col)] + "@" + std::to_string(X.lag_of(col)) + " -> " + panel.names[q];
}

Screening screen_lagged(const AlignedPanel& panel, const LaggedDesign& X, const CorrelationCITester& tester,
                        int max_level, std::set<std::string>& degenerate) {
    const auto d = X.d;
    const auto less = series_lag_less(X);
    Screening out;
    out.parents.resize(d);
    for (std::size_t q = 0; q < d; ++q) {
        std::vector<std::size_t> cand;
        for (std::size_t p = 0; p < d; ++p)
            for (int lag = 1; lag <= X.gamma; ++lag) cand.push_back(X.column(p, lag));
        std::vector<double> strength(X.data.cols(), std::numeric_limits<double>::infinity());
        for (int k = 0; k <= max_level && cand.size() > static_cast<std::size_t>(k); ++k) {
            // Rank once per level so every candidate sees the same ordering.
            auto ranked = cand;
            std::stable_sort(ranked.begin(), ranked.end(),
                             [&](std::size_t a, std::size_t b) { return strength[a] > strength[b]; });
            std::vector<std::size_t> removed;
            for (auto c : cand) {
                std::vector<std::size_t> z;
                for (auto o : ranked) {
                    if (z.size() == static_cast<std::size_t>(k)) break;
                    if (o != c) z.push_back(o);
                }
                const auto res = tester.test(c, q, z);
                strength[c] = std::min(strength[c], std::abs(res.statistic));
                if (res.degenerate) {
                    degenerate.insert(link_name(panel, X, c, q));
                } else if (res.independent) {
                    removed.push_back(c);
                    out.sepsets[detail::ordered_pair(c, q)] = z;
                }
            }
            std::erase_if(cand, [&](std::size_t c) {
                return std::find(removed.begin(), removed.end(), c) != removed.end();
            });
        }
        std::sort(cand.begin(), cand.end(), less);
        out.parents[q] = std::move(cand);
    }
    return out;
}

void finish_log(RunLog* log, const CorrelationCITester& tester, const std::set<std::string>& degenerate) {
    if (!log) return;
    log->ci_tests += tester.tests_run();
    log->degenerate_tests += tester.degenerate_tests();
    for (const auto& s : degenerate) log->notes.push_back("degenerate CI test, edge kept: " + s);
}

} // namespace

std::vector<std::vector<LaggedLink>> pcmci_lagged_screening(const AlignedPanel& panel, const DiscoveryConfig& cfg,
                                                            int max_level, RunLog* log) {
    cfg.validate();
    const auto X = detail::build_lagged_design(panel, cfg.gamma_max);
    const CorrelationCITester tester(X.data, cfg.alpha);
    std::set<std::string> degenerate;
    const auto s = screen_lagged(panel, X, tester, max_level, degenerate);
    finish_log(log, tester, degenerate);
    std::vector<std::vector<LaggedLink>> out(X.d);
    for (std::size_t q = 0; q < X.d; ++q)
        for (auto c : s.parents[q]) out[q].push_back({X.series_of(c), X.lag_of(c), q});
    return out;
}

WindowCausalGraph pcmci_plus(const AlignedPanel& panel, const DiscoveryConfig& cfg, RunLog* log) {
    cfg.validate();
    const auto X = detail::build_lagged_design(panel, cfg.gamma_max);
    const auto d = X.d;
    const int limit = cfg.cond_limit(d);
    const CorrelationCITester tester(X.data, cfg.alpha);
    std::set<std::string> degenerate;

    auto screening = screen_lagged(panel, X, tester, limit, degenerate);
    const auto& B = screening.parents;
    SepsetMap sepsets = std::move(screening.sepsets);

    // Links in (source series, lag, target) order; lag-0 pairs once with p < q.
    std::vector<LaggedLink> links;
    for (std::size_t q = 0; q < d; ++q)
        for (auto c : B[q]) links.push_back({X.series_of(c), X.lag_of(c), q});
    for (std::size_t p = 0; p < d; ++p)
        for (std::size_t q = p + 1; q < d; ++q) links.push_back({p, 0, q});
    std::sort(links.begin(), links.end());

    std::vector<char> adj0(d * d, 1);
    for (std::size_t p = 0; p < d; ++p) adj0[p * d + p] = 0;
    std::set<LaggedLink> alive(links.begin(), links.end());

    auto shifted_parents = [&](std::size_t p, int tau) {
        std::vector<std::size_t> out;
        for (auto c : B[p]) {
            const int lag = X.lag_of(c) + tau;
            if (lag <= X.gamma) out.push_back(X.column(X.series_of(c), lag));
        }
        return out;
    };

    for (int k = 0; k <= limit; ++k) {
        const auto frozen = adj0;
        bool testable = false;
        std::vector<LaggedLink> removed;
        for (const auto& link : links) {
            if (!alive.count(link)) continue;
            const auto p = link.source, q = link.target;
            const auto src = X.column(p, link.lag);
            std::vector<std::size_t> pool;
            for (std::size_t r = 0; r < d; ++r) {
                if (r == q || (link.lag == 0 && r == p)) continue;
                if (frozen[q * d + r] || (link.lag == 0 && frozen[p * d + r])) pool.push_back(r);
            }
            if (pool.size() < static_cast<std::size_t>(k)) continue;
            testable = true;
            std::vector<std::size_t> fixed = B[q];
            for (auto c : shifted_parents(p, link.lag)) fixed.push_back(c);
            std::erase(fixed, src);
            // The sepset is the subset with the largest p-value at this level,
            // which keeps it independent of series numbering.
            std::optional<std::vector<std::size_t>> best;
            double best_p = -1.0;
            detail::for_each_subset(pool, static_cast<std::size_t>(k), [&](const std::vector<std::size_t>& S) {
                auto z = fixed;
                z.insert(z.end(), S.begin(), S.end());
                const auto res = tester.test(src, q, z);
                if (res.degenerate) {
                    degenerate.insert(link_name(panel, X, src, q));
                    return false;
                }
                if (res.independent && res.p_value > best_p) {
                    best_p = res.p_value;
                    best = std::move(z);
                }
                return false;
            });
            if (best) {
                std::sort(best->begin(), best->end());
                best->erase(std::unique(best->begin(), best->end()), best->end());
                sepsets[detail::ordered_pair(src, q)] = std::move(*best);
                removed.push_back(link);
            }
        }
        for (const auto& link : removed) {
            alive.erase(link);
            if (link.lag == 0) adj0[link.source * d + link.target] = adj0[link.target * d + link.source] = 0;
        }
        if (!testable) break;
    }

    detail::OrientationGraph og(d, static_cast<std::size_t>(X.data.cols()));
    for (const auto& link : alive) {
        if (link.lag == 0)
            og.connect(link.source, link.target);
        else
            og.connect_directed(X.column(link.source, link.lag), link.target);
    }
    detail::orient_all(og, sepsets);

    WindowCausalGraph g(panel.names, cfg.gamma_max);
    for (const auto& link : alive) {
        if (link.lag > 0) {
            g.add_edge(link.source, link.lag, link.target);
            continue;
        }
        const auto a = link.source, b = link.target;
        const auto mark = og.mark(a, b);
        if (mark != EdgeMark::Directed)
            g.add_edge(a, 0, b, mark);
        else if (og.directed(a, b))
            g.add_edge(a, 0, b);
        else
            g.add_edge(b, 0, a);
    }
    finish_log(log, tester, degenerate);
    return g;
}

} // namespace tscausal
