#include "orientation.hpp"

#include <algorithm>
#include <functional>

namespace tscausal::detail {

OrientationGraph::OrientationGraph(std::size_t present, std::size_t nodes)
    : present_(present), n_(nodes), adj_(nodes * nodes, 0), head_(nodes * nodes, 0) {}

void OrientationGraph::connect(std::size_t i, std::size_t j) {
    adj_[i * n_ + j] = adj_[j * n_ + i] = 1;
}

void OrientationGraph::connect_directed(std::size_t from, std::size_t to) {
    connect(from, to);
    orient(from, to);
}

EdgeMark OrientationGraph::mark(std::size_t i, std::size_t j) const {
    const bool a = head(i, j), b = head(j, i);
    if (a && b) return EdgeMark::Bidirected;
    if (!a && !b) return EdgeMark::Unoriented;
    return EdgeMark::Directed;
}

bool OrientationGraph::reaches(std::size_t from, std::size_t to) const {
    std::vector<char> seen(present_, 0);
    std::vector<std::size_t> stack{from};
    seen[from] = 1;
    while (!stack.empty()) {
        const auto u = stack.back();
        stack.pop_back();
        if (u == to) return true;
        for (std::size_t v = 0; v < present_; ++v)
            if (!seen[v] && directed(u, v)) {
                seen[v] = 1;
                stack.push_back(v);
            }
    }
    return false;
}

void orient_colliders(OrientationGraph& g, const SepsetMap& sepsets) {
    const auto n = g.nodes();
    // Decide on the unmodified graph, then apply, so the result does not
    // depend on the triple order.
    std::vector<NodePair> heads;
    for (std::size_t k = 0; k < g.present(); ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            if (i == k || !g.adjacent(i, k)) continue;
            for (std::size_t j = i + 1; j < n; ++j) {
                if (j == k || !g.adjacent(j, k) || g.adjacent(i, j)) continue;
                // Two non-present endpoints already point into k.
                if (i >= g.present() && j >= g.present()) continue;
                const auto it = sepsets.find(ordered_pair(i, j));
                if (it == sepsets.end()) continue;
                if (std::find(it->second.begin(), it->second.end(), k) != it->second.end()) continue;
                heads.emplace_back(i, k);
                heads.emplace_back(j, k);
            }
        }
    }
    for (auto [from, to] : heads) g.set_head(from, to, true);
}

void apply_meek_rules(OrientationGraph& g) {
    const auto P = g.present();
    const auto n = g.nodes();
    auto try_orient = [&](std::size_t a, std::size_t b) {
        if (g.reaches(b, a)) return false;
        g.orient(a, b);
        return true;
    };
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t b = 0; b < P; ++b) {
            for (std::size_t c = 0; c < P; ++c) {
                if (b == c || !g.undirected(b, c)) continue;
                bool orient = false;
                // R1: a -> b - c with a, c non-adjacent.
                for (std::size_t a = 0; a < n && !orient; ++a)
                    if (a != c && g.directed(a, b) && !g.adjacent(a, c)) orient = true;
                // R2: b -> a -> c with b - c.
                for (std::size_t a = 0; a < P && !orient; ++a)
                    if (g.directed(b, a) && g.directed(a, c)) orient = true;
                // R3: b - x -> c, b - y -> c, x and y non-adjacent.
                for (std::size_t x = 0; x < P && !orient; ++x) {
                    if (!g.undirected(b, x) || !g.directed(x, c)) continue;
                    for (std::size_t y = x + 1; y < P; ++y)
                        if (g.undirected(b, y) && g.directed(y, c) && !g.adjacent(x, y)) {
                            orient = true;
                            break;
                        }
                }
                if (orient && try_orient(b, c)) changed = true;
            }
        }
    }
}

void break_cycles(OrientationGraph& g) {
    const auto P = g.present();
    // Tarjan strongly connected components over the directed present edges.
    std::vector<int> index(P, -1), low(P, 0), comp(P, -1);
    std::vector<char> on_stack(P, 0);
    std::vector<std::size_t> stack;
    int counter = 0, ncomp = 0;
    std::function<void(std::size_t)> visit = [&](std::size_t u) {
        index[u] = low[u] = counter++;
        stack.push_back(u);
        on_stack[u] = 1;
        for (std::size_t v = 0; v < P; ++v) {
            if (!g.directed(u, v)) continue;
            if (index[v] < 0) {
                visit(v);
                low[u] = std::min(low[u], low[v]);
            } else if (on_stack[v]) {
                low[u] = std::min(low[u], index[v]);
            }
        }
        if (low[u] == index[u]) {
            std::size_t w;
            do {
                w = stack.back();
                stack.pop_back();
                on_stack[w] = 0;
                comp[w] = ncomp;
            } while (w != u);
            ++ncomp;
        }
    };
    for (std::size_t u = 0; u < P; ++u)
        if (index[u] < 0) visit(u);
    for (std::size_t u = 0; u < P; ++u)
        for (std::size_t v = 0; v < P; ++v)
            if (u != v && comp[u] == comp[v] && g.directed(u, v)) {
                g.set_head(u, v, false);
                g.set_head(v, u, false);
            }
}

} // namespace tscausal::detail
