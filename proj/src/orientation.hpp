#pragma once

#include "tscausal/graphs.hpp"

#include <map>
#include <vector>

namespace tscausal::detail {

/// Partially oriented graph used by the constraint-based learners.
///
/// Nodes [0, present) are the present slice and may be oriented; the other
/// nodes (lagged or past) only ever point into the present. Edge marks are
/// kept as arrowheads: head(i, j) means an arrowhead at j on the edge i-j.
class OrientationGraph {
public:
    OrientationGraph(std::size_t present, std::size_t nodes);

    std::size_t present() const noexcept { return present_; }
    std::size_t nodes() const noexcept { return n_; }

    void connect(std::size_t i, std::size_t j);
    /// Time-ordered edge from a non-present node into the present.
    void connect_directed(std::size_t from, std::size_t to);
    bool adjacent(std::size_t i, std::size_t j) const { return adj_[i * n_ + j] != 0; }
    bool head(std::size_t i, std::size_t j) const { return head_[i * n_ + j] != 0; }
    bool directed(std::size_t i, std::size_t j) const { return adjacent(i, j) && head(i, j) && !head(j, i); }
    bool undirected(std::size_t i, std::size_t j) const { return adjacent(i, j) && !head(i, j) && !head(j, i); }

    void set_head(std::size_t i, std::size_t j, bool on) { head_[i * n_ + j] = on ? 1 : 0; }
    void orient(std::size_t from, std::size_t to) {
        set_head(from, to, true);
        set_head(to, from, false);
    }

    /// Mark of the present pair {i, j}; Directed means check directed(i, j).
    EdgeMark mark(std::size_t i, std::size_t j) const;

    /// True when a directed path runs from `from` to `to` over present nodes.
    bool reaches(std::size_t from, std::size_t to) const;

private:
    std::size_t present_;
    std::size_t n_;
    std::vector<char> adj_;
    std::vector<char> head_;
};

/// Separating sets keyed by (min, max) node pair.
using SepsetMap = std::map<NodePair, std::vector<std::size_t>>;

inline NodePair ordered_pair(std::size_t a, std::size_t b) { return a < b ? NodePair{a, b} : NodePair{b, a}; }

/// Unshielded triples i * k - j with k present and k outside sepset(i, j)
/// get arrowheads at k. Pairs without a recorded sepset are never
/// colliders. Opposing arrowheads leave the edge Bidirected.
void orient_colliders(OrientationGraph& g, const SepsetMap& sepsets);

/// Meek rules 1-3 to a fixed point, skipping any orientation that would
/// close a directed cycle.
void apply_meek_rules(OrientationGraph& g);

/// Edges on a directed cycle in the present slice become unoriented.
void break_cycles(OrientationGraph& g);

inline void orient_all(OrientationGraph& g, const SepsetMap& sepsets) {
    orient_colliders(g, sepsets);
    apply_meek_rules(g);
    break_cycles(g);
}

} // namespace tscausal::detail
