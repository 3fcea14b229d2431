#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace tscausal {

/// Orientation state of an instantaneous (lag 0) edge. Lagged edges are
/// always Directed: time orients them.
enum class EdgeMark { Directed, Bidirected, Unoriented };

const char* to_string(EdgeMark mark);
EdgeMark edge_mark_from_string(const std::string& s);

using NodePair = std::pair<std::size_t, std::size_t>;

/// X^source_{t-lag} -> X^target_t.
struct LaggedLink {
    std::size_t source = 0;
    int lag = 0;
    std::size_t target = 0;
    friend auto operator<=>(const LaggedLink&, const LaggedLink&) = default;
};

/// Window graph over lags 0..gamma_max, one entry per (source, lag, target)
/// under consistency through time.
///
/// A lag-0 edge whose mark is not Directed is stored once, with
/// source < target. Adding any lag-0 edge replaces whatever entry the same
/// unordered pair had.
class WindowCausalGraph {
public:
    WindowCausalGraph() = default;
    WindowCausalGraph(std::vector<std::string> names, int gamma_max);

    /// Throws Error for out-of-range nodes or lags and for a lag-0 self edge.
    void add_edge(std::size_t source, int lag, std::size_t target, EdgeMark mark = EdgeMark::Directed);
    void remove_edge(std::size_t source, int lag, std::size_t target);
    /// Directed test for lag > 0; for lag 0 true when the pair is adjacent
    /// with any mark compatible with source -> target.
    bool has_edge(std::size_t source, int lag, std::size_t target) const;
    /// Mark of the lag-0 pair {a, b}, if adjacent. For Directed the caller
    /// checks direction through has_edge.
    std::optional<EdgeMark> contemporaneous_mark(std::size_t a, std::size_t b) const;

    const std::vector<std::string>& names() const noexcept { return names_; }
    std::size_t size() const noexcept { return names_.size(); }
    int gamma_max() const noexcept { return gamma_max_; }
    const std::map<LaggedLink, EdgeMark>& edges() const noexcept { return edges_; }

    /// Throws Error when the lag-0 Directed subgraph has a cycle.
    void validate() const;

    friend bool operator==(const WindowCausalGraph&, const WindowCausalGraph&) = default;

private:
    std::vector<std::string> names_;
    int gamma_max_ = 1;
    std::map<LaggedLink, EdgeMark> edges_;
};

/// Two time slices: the past of each series and its present.
class ExtendedSummaryCausalGraph {
public:
    ExtendedSummaryCausalGraph() = default;
    explicit ExtendedSummaryCausalGraph(std::vector<std::string> names);

    /// X^p_{t-} -> X^q_t; p == q allowed.
    void add_past_edge(std::size_t p, std::size_t q);
    /// X^p_t -> X^q_t (p != q). Same storage rule as lag-0 window edges.
    void add_present_edge(std::size_t p, std::size_t q, EdgeMark mark = EdgeMark::Directed);
    void remove_present_edge(std::size_t p, std::size_t q);
    std::optional<EdgeMark> present_mark(std::size_t a, std::size_t b) const;

    const std::vector<std::string>& names() const noexcept { return names_; }
    std::size_t size() const noexcept { return names_.size(); }
    const std::set<NodePair>& past_edges() const noexcept { return past_; }
    const std::map<NodePair, EdgeMark>& present_edges() const noexcept { return present_; }

    void validate() const;

    friend bool operator==(const ExtendedSummaryCausalGraph&, const ExtendedSummaryCausalGraph&) = default;

private:
    std::vector<std::string> names_;
    std::set<NodePair> past_;
    std::map<NodePair, EdgeMark> present_;
};

/// One node per series; a plain relation that may hold cycles and self loops.
class SummaryCausalGraph {
public:
    SummaryCausalGraph() = default;
    explicit SummaryCausalGraph(std::vector<std::string> names);

    void add_edge(std::size_t p, std::size_t q);
    void remove_edge(std::size_t p, std::size_t q);
    bool has_edge(std::size_t p, std::size_t q) const { return edges_.count({p, q}) > 0; }

    const std::vector<std::string>& names() const noexcept { return names_; }
    std::size_t size() const noexcept { return names_.size(); }
    const std::set<NodePair>& edges() const noexcept { return edges_; }
    std::size_t index_of(const std::string& name) const;

    friend bool operator==(const SummaryCausalGraph&, const SummaryCausalGraph&) = default;

private:
    std::vector<std::string> names_;
    std::set<NodePair> edges_;
};

SummaryCausalGraph window_to_summary(const WindowCausalGraph& g);
SummaryCausalGraph extended_to_summary(const ExtendedSummaryCausalGraph& g);
ExtendedSummaryCausalGraph window_to_extended(const WindowCausalGraph& g);

/// Kahn's algorithm over `d` nodes.
bool is_acyclic(std::size_t d, const std::vector<NodePair>& directed_edges);

} // namespace tscausal
