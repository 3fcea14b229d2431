#pragma once

#include "tscausal/graphs.hpp"

#include <json.hpp>

#include <string>
#include <string_view>
#include <variant>

namespace tscausal {

using AnyGraph = std::variant<SummaryCausalGraph, WindowCausalGraph, ExtendedSummaryCausalGraph>;

// Edge-list text format, one statement per line, `#` starts a comment:
//
//   kind: window            # optional: summary (default) | window | extended
//   gamma_max: 2            # window graphs only
//   nodes: s,p,q,r
//   s -> p @2               # lagged edge (window), `@past` for extended
//   p -> r @0               # instantaneous, directed
//   p -- q @0               # instantaneous, unoriented
//   p <-> q @0              # instantaneous, bidirected
//
// Summary graphs omit the kind header and the `@` suffix: `a -> b`, self
// loops `a -> a`. Repeated edge lines are idempotent.

std::string to_text(const SummaryCausalGraph& g);
std::string to_text(const WindowCausalGraph& g);
std::string to_text(const ExtendedSummaryCausalGraph& g);
std::string to_text(const AnyGraph& g);

std::string to_dot(const SummaryCausalGraph& g);
std::string to_dot(const WindowCausalGraph& g);
std::string to_dot(const ExtendedSummaryCausalGraph& g);
std::string to_dot(const AnyGraph& g);

/// {"kind", "nodes": [...], "edges": [[src, dst, lag?, mark?], ...]}; window
/// graphs add "gamma_max", extended past edges use lag "past".
nlohmann::json to_json(const SummaryCausalGraph& g);
nlohmann::json to_json(const WindowCausalGraph& g);
nlohmann::json to_json(const ExtendedSummaryCausalGraph& g);
nlohmann::json to_json(const AnyGraph& g);

AnyGraph parse_graph(std::string_view text);
AnyGraph graph_from_json(const nlohmann::json& j);
/// Ground-truth fixtures are summary graphs; anything else is an error.
SummaryCausalGraph parse_ground_truth(std::string_view text);

/// Reads text or JSON (detected by a leading `{`).
AnyGraph load_graph(const std::string& path);

SummaryCausalGraph to_summary(const AnyGraph& g);

} // namespace tscausal
