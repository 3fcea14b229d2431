#include "tscausal/graphs.hpp"
#include "tscausal/error.hpp"

#include <algorithm>
#include <queue>

namespace tscausal {

const char* to_string(EdgeMark mark) {
    switch (mark) {
    case EdgeMark::Directed: return "directed";
    case EdgeMark::Bidirected: return "bidirected";
    case EdgeMark::Unoriented: return "unoriented";
    }
    return "?";
}

EdgeMark edge_mark_from_string(const std::string& s) {
    if (s == "directed") return EdgeMark::Directed;
    if (s == "bidirected") return EdgeMark::Bidirected;
    if (s == "unoriented") return EdgeMark::Unoriented;
    throw Error("unknown edge mark '" + s + "'");
}

namespace {

void check_node(std::size_t i, std::size_t d) {
    if (i >= d) throw Error("node index " + std::to_string(i) + " out of range for " + std::to_string(d) + " nodes");
}

void check_names(const std::vector<std::string>& names) {
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i].empty()) throw Error("node names must be non-empty");
        for (std::size_t j = 0; j < i; ++j)
            if (names[i] == names[j]) throw Error("duplicate node name '" + names[i] + "'");
    }
}

} // namespace

bool is_acyclic(std::size_t d, const std::vector<NodePair>& directed_edges) {
    std::vector<std::vector<std::size_t>> out(d);
    std::vector<std::size_t> indeg(d, 0);
    for (const auto& [a, b] : directed_edges) {
        if (a == b) return false;
        out[a].push_back(b);
        ++indeg[b];
    }
    std::queue<std::size_t> ready;
    for (std::size_t i = 0; i < d; ++i)
        if (indeg[i] == 0) ready.push(i);
    std::size_t seen = 0;
    while (!ready.empty()) {
        const auto n = ready.front();
        ready.pop();
        ++seen;
        for (auto m : out[n])
            if (--indeg[m] == 0) ready.push(m);
    }
    return seen == d;
}

// --- window -------------------------------------------------------------------

WindowCausalGraph::WindowCausalGraph(std::vector<std::string> names, int gamma_max)
    : names_(std::move(names)), gamma_max_(gamma_max) {
    check_names(names_);
    if (gamma_max_ < 1) throw Error("gamma_max must be at least 1");
}

void WindowCausalGraph::add_edge(std::size_t source, int lag, std::size_t target, EdgeMark mark) {
    check_node(source, size());
    check_node(target, size());
    if (lag < 0 || lag > gamma_max_)
        throw Error("lag " + std::to_string(lag) + " outside 0.." + std::to_string(gamma_max_));
    if (lag > 0) {
        edges_[{source, lag, target}] = EdgeMark::Directed;
        return;
    }
    if (source == target) throw Error("self edge at lag 0 on '" + names_[source] + "'");
    edges_.erase({source, 0, target});
    edges_.erase({target, 0, source});
    if (mark == EdgeMark::Directed)
        edges_[{source, 0, target}] = mark;
    else
        edges_[{std::min(source, target), 0, std::max(source, target)}] = mark;
}

void WindowCausalGraph::remove_edge(std::size_t source, int lag, std::size_t target) {
    edges_.erase({source, lag, target});
    if (lag == 0) edges_.erase({target, 0, source});
}

bool WindowCausalGraph::has_edge(std::size_t source, int lag, std::size_t target) const {
    const auto it = edges_.find({source, lag, target});
    if (it != edges_.end()) return true;
    if (lag != 0) return false;
    const auto rev = edges_.find({target, 0, source});
    return rev != edges_.end() && rev->second != EdgeMark::Directed;
}

std::optional<EdgeMark> WindowCausalGraph::contemporaneous_mark(std::size_t a, std::size_t b) const {
    if (auto it = edges_.find({a, 0, b}); it != edges_.end()) return it->second;
    if (auto it = edges_.find({b, 0, a}); it != edges_.end()) return it->second;
    return std::nullopt;
}

void WindowCausalGraph::validate() const {
    check_names(names_);
    std::vector<NodePair> directed;
    for (const auto& [link, mark] : edges_) {
        check_node(link.source, size());
        check_node(link.target, size());
        if (link.lag == 0 && link.source == link.target) throw Error("self edge at lag 0");
        if (link.lag == 0 && mark == EdgeMark::Directed) directed.emplace_back(link.source, link.target);
    }
    if (!is_acyclic(size(), directed)) throw Error("instantaneous directed edges form a cycle");
}

// --- extended -----------------------------------------------------------------

ExtendedSummaryCausalGraph::ExtendedSummaryCausalGraph(std::vector<std::string> names) : names_(std::move(names)) {
    check_names(names_);
}

void ExtendedSummaryCausalGraph::add_past_edge(std::size_t p, std::size_t q) {
    check_node(p, size());
    check_node(q, size());
    past_.insert({p, q});
}

void ExtendedSummaryCausalGraph::add_present_edge(std::size_t p, std::size_t q, EdgeMark mark) {
    check_node(p, size());
    check_node(q, size());
    if (p == q) throw Error("present self edge on '" + names_[p] + "'");
    present_.erase({p, q});
    present_.erase({q, p});
    if (mark == EdgeMark::Directed)
        present_[{p, q}] = mark;
    else
        present_[{std::min(p, q), std::max(p, q)}] = mark;
}

void ExtendedSummaryCausalGraph::remove_present_edge(std::size_t p, std::size_t q) {
    present_.erase({p, q});
    present_.erase({q, p});
}

std::optional<EdgeMark> ExtendedSummaryCausalGraph::present_mark(std::size_t a, std::size_t b) const {
    if (auto it = present_.find({a, b}); it != present_.end()) return it->second;
    if (auto it = present_.find({b, a}); it != present_.end()) return it->second;
    return std::nullopt;
}

void ExtendedSummaryCausalGraph::validate() const {
    check_names(names_);
    std::vector<NodePair> directed;
    for (const auto& [pair, mark] : present_) {
        if (pair.first == pair.second) throw Error("present self edge");
        if (mark == EdgeMark::Directed) directed.push_back(pair);
    }
    if (!is_acyclic(size(), directed)) throw Error("present directed edges form a cycle");
}

// --- summary ------------------------------------------------------------------

SummaryCausalGraph::SummaryCausalGraph(std::vector<std::string> names) : names_(std::move(names)) {
    check_names(names_);
}

void SummaryCausalGraph::add_edge(std::size_t p, std::size_t q) {
    check_node(p, size());
    check_node(q, size());
    edges_.insert({p, q});
}

void SummaryCausalGraph::remove_edge(std::size_t p, std::size_t q) { edges_.erase({p, q}); }

std::size_t SummaryCausalGraph::index_of(const std::string& name) const {
    const auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) throw Error("unknown node '" + name + "'");
    return static_cast<std::size_t>(it - names_.begin());
}

// --- projections --------------------------------------------------------------

SummaryCausalGraph window_to_summary(const WindowCausalGraph& g) {
    SummaryCausalGraph s(g.names());
    for (const auto& [link, mark] : g.edges()) {
        s.add_edge(link.source, link.target);
        if (link.lag == 0 && mark != EdgeMark::Directed) s.add_edge(link.target, link.source);
    }
    return s;
}

SummaryCausalGraph extended_to_summary(const ExtendedSummaryCausalGraph& g) {
    SummaryCausalGraph s(g.names());
    for (const auto& [p, q] : g.past_edges()) s.add_edge(p, q);
    for (const auto& [pair, mark] : g.present_edges()) {
        s.add_edge(pair.first, pair.second);
        if (mark != EdgeMark::Directed) s.add_edge(pair.second, pair.first);
    }
    return s;
}

ExtendedSummaryCausalGraph window_to_extended(const WindowCausalGraph& g) {
    ExtendedSummaryCausalGraph e(g.names());
    for (const auto& [link, mark] : g.edges()) {
        if (link.lag > 0)
            e.add_past_edge(link.source, link.target);
        else
            e.add_present_edge(link.source, link.target, mark);
    }
    return e;
}

} // namespace tscausal
