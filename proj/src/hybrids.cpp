#include "tscausal/discovery.hpp"
#include "tscausal/stats.hpp"

#include "lagged_design.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace tscausal {

namespace {

enum class Choice { Forward, Backward, Tie, Skip };

bool reaches(std::size_t d, const std::set<NodePair>& directed, std::size_t from, std::size_t to) {
    std::vector<char> seen(d, 0);
    std::vector<std::size_t> stack{from};
    seen[from] = 1;
    while (!stack.empty()) {
        const auto u = stack.back();
        stack.pop_back();
        if (u == to) return true;
        for (auto it = directed.lower_bound({u, 0}); it != directed.end() && it->first == u; ++it)
            if (!seen[it->second]) {
                seen[it->second] = 1;
                stack.push_back(it->second);
            }
    }
    return false;
}

double residual_measure(const Eigen::MatrixXd& res, std::size_t a, std::size_t b) {
    const auto ua = res.col(static_cast<Eigen::Index>(a)), ub = res.col(static_cast<Eigen::Index>(b));
    auto flat = [](const auto& x) {
        const double m = x.mean();
        return std::sqrt((x.array() - m).square().mean()) <= 1e-12 * std::max(1.0, std::abs(m));
    };
    if (flat(ua) || flat(ub)) return 0.0;
    return pairwise_direction_measure(ua, ub);
}

// Decides the undecided pairs (a < b) strongest evidence first; a choice
// that would close a directed cycle is skipped.
std::vector<std::pair<NodePair, Choice>> decide(std::size_t d, std::set<NodePair> directed,
                                                const std::vector<NodePair>& pending, const Eigen::MatrixXd& res) {
    if (res.cols() != static_cast<Eigen::Index>(d)) throw Error("residual matrix does not match the graph");
    std::vector<std::pair<NodePair, double>> scored;
    for (auto pr : pending) scored.emplace_back(pr, residual_measure(res, pr.first, pr.second));
    std::stable_sort(scored.begin(), scored.end(),
                     [](const auto& x, const auto& y) { return std::abs(x.second) > std::abs(y.second); });
    std::vector<std::pair<NodePair, Choice>> out;
    for (auto [pr, r] : scored) {
        if (std::abs(r) < 1e-12) {
            out.emplace_back(pr, Choice::Tie);
            continue;
        }
        const auto from = r > 0 ? pr.first : pr.second;
        const auto to = r > 0 ? pr.second : pr.first;
        if (reaches(d, directed, to, from)) {
            out.emplace_back(pr, Choice::Skip);
            continue;
        }
        directed.insert({from, to});
        out.emplace_back(pr, r > 0 ? Choice::Forward : Choice::Backward);
    }
    return out;
}

std::vector<std::size_t> ranks(const std::vector<std::size_t>& order) {
    std::vector<std::size_t> rank(order.size());
    for (std::size_t k = 0; k < order.size(); ++k) rank[order[k]] = k;
    return rank;
}

} // namespace

WindowCausalGraph orient_by_residuals(WindowCausalGraph g, const Eigen::MatrixXd& residuals, RunLog* log) {
    std::set<NodePair> directed;
    std::vector<NodePair> pending;
    for (const auto& [link, mark] : g.edges()) {
        if (link.lag != 0) continue;
        if (mark == EdgeMark::Directed)
            directed.insert({link.source, link.target});
        else
            pending.push_back({link.source, link.target});
    }
    for (auto [pr, choice] : decide(g.size(), directed, pending, residuals)) {
        switch (choice) {
        case Choice::Forward: g.add_edge(pr.first, 0, pr.second); break;
        case Choice::Backward: g.add_edge(pr.second, 0, pr.first); break;
        case Choice::Tie: g.add_edge(pr.first, 0, pr.second, EdgeMark::Unoriented); break;
        case Choice::Skip:
            if (log) log->notes.push_back("orientation skipped to avoid a cycle: " + g.names()[pr.first] + " - " +
                                          g.names()[pr.second]);
            break;
        }
    }
    return g;
}

ExtendedSummaryCausalGraph orient_by_residuals(ExtendedSummaryCausalGraph g, const Eigen::MatrixXd& residuals,
                                               RunLog* log) {
    std::set<NodePair> directed;
    std::vector<NodePair> pending;
    for (const auto& [pr, mark] : g.present_edges()) {
        if (mark == EdgeMark::Directed)
            directed.insert(pr);
        else
            pending.push_back(pr);
    }
    for (auto [pr, choice] : decide(g.size(), directed, pending, residuals)) {
        switch (choice) {
        case Choice::Forward: g.add_present_edge(pr.first, pr.second); break;
        case Choice::Backward: g.add_present_edge(pr.second, pr.first); break;
        case Choice::Tie: g.add_present_edge(pr.first, pr.second, EdgeMark::Unoriented); break;
        case Choice::Skip:
            if (log) log->notes.push_back("orientation skipped to avoid a cycle: " + g.names()[pr.first] + " - " +
                                          g.names()[pr.second]);
            break;
        }
    }
    return g;
}

AnyGraph nbcb(const AlignedPanel& panel, const DiscoveryConfig& cfg, HybridVariant variant, RunLog* log) {
    const auto rank = ranks(var_causal_order(panel, cfg, log).order);
    if (variant == HybridVariant::Window) {
        const auto skeleton = pcmci_plus(panel, cfg, log);
        WindowCausalGraph g(panel.names, cfg.gamma_max);
        for (const auto& [link, mark] : skeleton.edges()) {
            if (link.lag > 0 || rank[link.source] < rank[link.target])
                g.add_edge(link.source, link.lag, link.target);
            else
                g.add_edge(link.target, 0, link.source);
        }
        return g;
    }
    const auto skeleton = pcgce(panel, cfg, log);
    ExtendedSummaryCausalGraph g(panel.names);
    for (auto [p, q] : skeleton.past_edges()) g.add_past_edge(p, q);
    for (const auto& [pr, mark] : skeleton.present_edges()) {
        if (rank[pr.first] < rank[pr.second])
            g.add_present_edge(pr.first, pr.second);
        else
            g.add_present_edge(pr.second, pr.first);
    }
    return g;
}

AnyGraph cbnb(const AlignedPanel& panel, const DiscoveryConfig& cfg, HybridVariant variant, RunLog* log) {
    if (variant == HybridVariant::Window) {
        auto g = pcmci_plus(panel, cfg, log);
        const auto X = detail::build_lagged_design(panel, cfg.gamma_max);
        return orient_by_residuals(std::move(g), detail::var_residuals(X, log), log);
    }
    auto g = pcgce(panel, cfg, log);
    const auto X = detail::build_lagged_design(panel, cfg.gamma_max);
    return orient_by_residuals(std::move(g), detail::var_residuals(X, log), log);
}

} // namespace tscausal
