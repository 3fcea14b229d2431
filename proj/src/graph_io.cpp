#include "tscausal/graph_io.hpp"
#include "tscausal/error.hpp"
#include "text_util.hpp"

#include <fstream>
#include <sstream>

namespace tscausal {

using detail::trim;

namespace {

std::string join_names(const std::vector<std::string>& names) {
    std::string out;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i) out += ',';
        out += names[i];
    }
    return out;
}

const char* mark_operator(EdgeMark m) {
    switch (m) {
    case EdgeMark::Directed: return "->";
    case EdgeMark::Bidirected: return "<->";
    case EdgeMark::Unoriented: return "--";
    }
    return "->";
}

std::string dot_quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    return out + "\"";
}

const char* dot_dir(EdgeMark m) {
    switch (m) {
    case EdgeMark::Directed: return "forward";
    case EdgeMark::Bidirected: return "both";
    case EdgeMark::Unoriented: return "none";
    }
    return "forward";
}

} // namespace

// --- text -----------------------------------------------------------------------

std::string to_text(const SummaryCausalGraph& g) {
    std::ostringstream out;
    out << "nodes: " << join_names(g.names()) << '\n';
    for (const auto& [p, q] : g.edges()) out << g.names()[p] << " -> " << g.names()[q] << '\n';
    return out.str();
}

std::string to_text(const WindowCausalGraph& g) {
    std::ostringstream out;
    out << "kind: window\ngamma_max: " << g.gamma_max() << "\nnodes: " << join_names(g.names()) << '\n';
    for (const auto& [l, mark] : g.edges())
        out << g.names()[l.source] << ' ' << mark_operator(mark) << ' ' << g.names()[l.target] << " @" << l.lag
            << '\n';
    return out.str();
}

std::string to_text(const ExtendedSummaryCausalGraph& g) {
    std::ostringstream out;
    out << "kind: extended\nnodes: " << join_names(g.names()) << '\n';
    for (const auto& [p, q] : g.past_edges()) out << g.names()[p] << " -> " << g.names()[q] << " @past\n";
    for (const auto& [pair, mark] : g.present_edges())
        out << g.names()[pair.first] << ' ' << mark_operator(mark) << ' ' << g.names()[pair.second] << " @0\n";
    return out.str();
}

std::string to_text(const AnyGraph& g) {
    return std::visit([](const auto& x) { return to_text(x); }, g);
}

namespace {

enum class Kind { Summary, Window, Extended };

struct EdgeLine {
    std::string from, to;
    EdgeMark mark = EdgeMark::Directed;
    std::optional<std::string> lag;
};

std::optional<EdgeLine> split_edge(std::string_view line) {
    static constexpr std::pair<std::string_view, EdgeMark> ops[] = {
        {"<->", EdgeMark::Bidirected}, {"->", EdgeMark::Directed}, {"--", EdgeMark::Unoriented}};
    for (const auto& [op, mark] : ops) {
        const auto pos = line.find(op);
        if (pos == std::string_view::npos) continue;
        EdgeLine e;
        e.mark = mark;
        e.from = std::string(trim(line.substr(0, pos)));
        std::string_view rest = line.substr(pos + op.size());
        if (const auto at = rest.find('@'); at != std::string_view::npos) {
            e.lag = std::string(trim(rest.substr(at + 1)));
            rest = rest.substr(0, at);
        }
        e.to = std::string(trim(rest));
        return e;
    }
    return std::nullopt;
}

} // namespace

AnyGraph parse_graph(std::string_view text) {
    Kind kind = Kind::Summary;
    int gamma_max = 1;
    bool have_nodes = false;
    std::vector<std::string> names;
    std::vector<std::pair<EdgeLine, std::size_t>> edge_lines;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        if (auto e = split_edge(line)) {
            if (!have_nodes) throw ParseError("edge before the 'nodes:' header", line_no);
            edge_lines.emplace_back(std::move(*e), line_no);
            continue;
        }
        const auto colon = line.find(':');
        if (colon == std::string_view::npos) throw ParseError("unrecognised line '" + std::string(line) + "'", line_no);
        const std::string key = detail::lower(trim(line.substr(0, colon)));
        const std::string_view value = trim(line.substr(colon + 1));
        if (key == "kind") {
            const auto v = detail::lower(value);
            if (v == "summary") kind = Kind::Summary;
            else if (v == "window") kind = Kind::Window;
            else if (v == "extended") kind = Kind::Extended;
            else throw ParseError("unknown graph kind '" + v + "'", line_no);
        } else if (key == "gamma_max") {
            const auto g = detail::parse_int(value);
            if (!g || *g < 1) throw ParseError("gamma_max must be a positive integer", line_no);
            gamma_max = static_cast<int>(*g);
        } else if (key == "nodes") {
            if (have_nodes) throw ParseError("duplicate 'nodes:' header", line_no);
            have_nodes = true;
            if (!value.empty()) names = detail::split(value, ',');
        } else {
            throw ParseError("unknown header '" + key + "'", line_no);
        }
    }
    if (!have_nodes) throw ParseError("missing 'nodes:' header", line_no);

    auto index = [&](const std::string& name, std::size_t line) {
        for (std::size_t i = 0; i < names.size(); ++i)
            if (names[i] == name) return i;
        throw ParseError("unknown node '" + name + "'", line);
    };

    // Re-raise graph errors with the offending line.
    auto at_line = [](std::size_t line, auto&& fn) {
        try {
            fn();
        } catch (const ParseError&) {
            throw;
        } catch (const Error& e) {
            throw ParseError(e.what(), line);
        }
    };

    switch (kind) {
        case Kind::Summary: {
            SummaryCausalGraph g(names);
            for (const auto& [e, line] : edge_lines) {
                if (e.mark == EdgeMark::Unoriented) throw ParseError("summary graphs take only '->' and '<->'", line);
                if (e.lag) throw ParseError("summary edges carry no '@' annotation (missing 'kind:' header?)", line);
                const auto a = index(e.from, line), b = index(e.to, line);
                g.add_edge(a, b);
                if (e.mark == EdgeMark::Bidirected) g.add_edge(b, a);
            }
            return g;
        }
        case Kind::Window: {
            WindowCausalGraph g(names, gamma_max);
            for (const auto& [e, line] : edge_lines) {
                if (!e.lag) throw ParseError("window edge needs '@lag'", line);
                const auto lag = detail::parse_int(*e.lag);
                if (!lag) throw ParseError("bad lag '" + *e.lag + "'", line);
                if (*lag > 0 && e.mark != EdgeMark::Directed) throw ParseError("lagged edges are always '->'", line);
                at_line(line, [&] { g.add_edge(index(e.from, line), static_cast<int>(*lag), index(e.to, line), e.mark); });
            }
            g.validate();
            return g;
        }
        case Kind::Extended: {
            ExtendedSummaryCausalGraph g(names);
            for (const auto& [e, line] : edge_lines) {
                if (!e.lag || (*e.lag != "past" && *e.lag != "0"))
                    throw ParseError("extended edge needs '@past' or '@0'", line);
                if (*e.lag == "past") {
                    if (e.mark != EdgeMark::Directed) throw ParseError("past edges are always '->'", line);
                    g.add_past_edge(index(e.from, line), index(e.to, line));
                } else {
                    at_line(line, [&] { g.add_present_edge(index(e.from, line), index(e.to, line), e.mark); });
                }
            }
            g.validate();
            return g;
        }
    }
    throw Error("unreachable graph kind");
}

SummaryCausalGraph parse_ground_truth(std::string_view text) {
    auto g = parse_graph(text);
    if (!std::holds_alternative<SummaryCausalGraph>(g)) throw Error("ground truth must be a summary graph");
    return std::get<SummaryCausalGraph>(std::move(g));
}

// --- DOT ---------------------------------------------------------------------

std::string to_dot(const SummaryCausalGraph& g) {
    std::ostringstream out;
    out << "digraph summary {\n";
    for (const auto& n : g.names()) out << "  " << dot_quote(n) << ";\n";
    for (const auto& [p, q] : g.edges()) out << "  " << dot_quote(g.names()[p]) << " -> " << dot_quote(g.names()[q]) << ";\n";
    out << "}\n";
    return out.str();
}

std::string to_dot(const WindowCausalGraph& g) {
    std::ostringstream out;
    out << "digraph window {\n  rankdir=LR;\n";
    auto node = [&](std::size_t i, int lag) {
        return dot_quote(g.names()[i] + (lag == 0 ? "_t" : "_t-" + std::to_string(lag)));
    };
    for (int lag = g.gamma_max(); lag >= 0; --lag)
        for (std::size_t i = 0; i < g.size(); ++i) out << "  " << node(i, lag) << ";\n";
    // Edges drawn into the present slice only.
    for (const auto& [l, mark] : g.edges())
        out << "  " << node(l.source, l.lag) << " -> " << node(l.target, 0) << " [dir=" << dot_dir(mark) << "];\n";
    out << "}\n";
    return out.str();
}

std::string to_dot(const ExtendedSummaryCausalGraph& g) {
    std::ostringstream out;
    out << "digraph extended {\n  rankdir=LR;\n";
    for (const auto& n : g.names()) out << "  " << dot_quote(n + "_t-") << ";\n  " << dot_quote(n + "_t") << ";\n";
    for (const auto& [p, q] : g.past_edges())
        out << "  " << dot_quote(g.names()[p] + "_t-") << " -> " << dot_quote(g.names()[q] + "_t") << ";\n";
    for (const auto& [pair, mark] : g.present_edges())
        out << "  " << dot_quote(g.names()[pair.first] + "_t") << " -> " << dot_quote(g.names()[pair.second] + "_t")
            << " [dir=" << dot_dir(mark) << "];\n";
    out << "}\n";
    return out.str();
}

std::string to_dot(const AnyGraph& g) {
    return std::visit([](const auto& x) { return to_dot(x); }, g);
}

// --- JSON --------------------------------------------------------------------

nlohmann::json to_json(const SummaryCausalGraph& g) {
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& [p, q] : g.edges()) edges.push_back({g.names()[p], g.names()[q]});
    return {{"kind", "summary"}, {"nodes", g.names()}, {"edges", edges}};
}

nlohmann::json to_json(const WindowCausalGraph& g) {
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& [l, mark] : g.edges())
        edges.push_back({g.names()[l.source], g.names()[l.target], l.lag, to_string(mark)});
    return {{"kind", "window"}, {"gamma_max", g.gamma_max()}, {"nodes", g.names()}, {"edges", edges}};
}

nlohmann::json to_json(const ExtendedSummaryCausalGraph& g) {
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& [p, q] : g.past_edges()) edges.push_back({g.names()[p], g.names()[q], "past", "directed"});
    for (const auto& [pair, mark] : g.present_edges())
        edges.push_back({g.names()[pair.first], g.names()[pair.second], 0, to_string(mark)});
    return {{"kind", "extended"}, {"nodes", g.names()}, {"edges", edges}};
}

nlohmann::json to_json(const AnyGraph& g) {
    return std::visit([](const auto& x) { return to_json(x); }, g);
}

AnyGraph graph_from_json(const nlohmann::json& j) {
    const std::string kind = j.value("kind", "summary");
    const auto names = j.at("nodes").get<std::vector<std::string>>();
    auto index = [&](const nlohmann::json& v) {
        const auto name = v.get<std::string>();
        for (std::size_t i = 0; i < names.size(); ++i)
            if (names[i] == name) return i;
        throw Error("unknown node '" + name + "' in JSON graph");
    };
    const auto& edges = j.contains("edges") ? j.at("edges") : nlohmann::json::array();
    auto mark_of = [](const nlohmann::json& e) {
        return e.size() > 3 ? edge_mark_from_string(e[3].get<std::string>()) : EdgeMark::Directed;
    };
    if (kind == "summary") {
        SummaryCausalGraph g(names);
        for (const auto& e : edges) g.add_edge(index(e.at(0)), index(e.at(1)));
        return g;
    }
    if (kind == "window") {
        WindowCausalGraph g(names, j.at("gamma_max").get<int>());
        for (const auto& e : edges) g.add_edge(index(e.at(0)), e.at(2).get<int>(), index(e.at(1)), mark_of(e));
        g.validate();
        return g;
    }
    if (kind == "extended") {
        ExtendedSummaryCausalGraph g(names);
        for (const auto& e : edges) {
            if (e.at(2).is_string() && e.at(2).get<std::string>() == "past")
                g.add_past_edge(index(e.at(0)), index(e.at(1)));
            else
                g.add_present_edge(index(e.at(0)), index(e.at(1)), mark_of(e));
        }
        g.validate();
        return g;
    }
    throw Error("unknown graph kind '" + kind + "'");
}

AnyGraph load_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') return graph_from_json(nlohmann::json::parse(text));
    return parse_graph(text);
}

SummaryCausalGraph to_summary(const AnyGraph& g) {
    struct Projector {
        SummaryCausalGraph operator()(const SummaryCausalGraph& s) const { return s; }
        SummaryCausalGraph operator()(const WindowCausalGraph& w) const { return window_to_summary(w); }
        SummaryCausalGraph operator()(const ExtendedSummaryCausalGraph& e) const { return extended_to_summary(e); }
    };
    return std::visit(Projector{}, g);
}

} // namespace tscausal
