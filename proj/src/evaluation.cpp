#include "tscausal/evaluation.hpp"

#include "text_util.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace tscausal {

using detail::format_double;

EdgeConfusion edge_confusion(const SummaryCausalGraph& truth, const SummaryCausalGraph& inferred,
                             bool include_self_loops) {
    const std::set<std::string> a(truth.names().begin(), truth.names().end());
    const std::set<std::string> b(inferred.names().begin(), inferred.names().end());
    if (a != b || a.size() != truth.size() || b.size() != inferred.size()) {
        std::string only_truth, only_inferred;
        for (const auto& n : a)
            if (!b.count(n)) only_truth += " " + n;
        for (const auto& n : b)
            if (!a.count(n)) only_inferred += " " + n;
        throw Error("node sets differ; only in truth:" + (only_truth.empty() ? std::string(" -") : only_truth) +
                    "; only in inferred:" + (only_inferred.empty() ? std::string(" -") : only_inferred));
    }
    auto named = [&](const SummaryCausalGraph& g) {
        std::set<std::pair<std::string, std::string>> out;
        for (auto [p, q] : g.edges())
            if (include_self_loops || p != q) out.emplace(g.names()[p], g.names()[q]);
        return out;
    };
    const auto t = named(truth), i = named(inferred);
    EdgeConfusion c;
    c.include_self_loops = include_self_loops;
    for (const auto& e : i) (t.count(e) ? c.tp : c.fp)++;
    for (const auto& e : t)
        if (!i.count(e)) ++c.fn;
    return c;
}

double f1(std::size_t tp, std::size_t fp, std::size_t fn) {
    const auto den = 2 * tp + fp + fn;
    return den == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(den);
}

double f1(const EdgeConfusion& c) { return f1(c.tp, c.fp, c.fn); }

BenchReport tabulate(std::vector<BenchRow> rows, const std::vector<std::string>& dataset_order) {
    auto pos = [&](const std::string& name) {
        auto it = std::find(dataset_order.begin(), dataset_order.end(), name);
        return static_cast<std::size_t>(it - dataset_order.begin());
    };
    std::stable_sort(rows.begin(), rows.end(), [&](const BenchRow& x, const BenchRow& y) {
        if (x.method != y.method) return x.method < y.method;
        const auto px = pos(x.dataset), py = pos(y.dataset);
        if (px != py) return px < py;
        if (x.dataset != y.dataset) return x.dataset < y.dataset;
        return x.gamma_max < y.gamma_max;
    });
    return BenchReport{std::move(rows)};
}

std::string report_to_csv(const BenchReport& report) {
    std::ostringstream out;
    out << kReportHeader << '\n';
    for (const auto& r : report.rows) {
        out << method_key(r.method) << ',' << detail::csv_escape(r.dataset) << ',' << r.gamma_max << ','
            << format_double(r.alpha) << ',';
        if (r.confusion)
            out << r.confusion->tp << ',' << r.confusion->fp << ',' << r.confusion->fn << ','
                << format_double(f1(*r.confusion));
        else
            out << ",,,error";
        out << ',';
        if (r.runtime_ms) out << format_double(*r.runtime_ms);
        out << '\n';
    }
    return out.str();
}

BenchReport parse_report_csv(std::string_view text) {
    BenchReport report;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (detail::trim(line).empty()) continue;
        if (!header) {
            if (line != kReportHeader) throw ParseError("unexpected report header", lineno);
            header = true;
            continue;
        }
        const auto cells = detail::split_csv_line(line);
        if (cells.size() != 9) throw ParseError("expected 9 report columns", lineno);
        BenchRow r;
        try {
            r.method = parse_method(cells[0]);
        } catch (const Error& e) {
            throw ParseError(e.what(), lineno);
        }
        r.dataset = cells[1];
        const auto g = detail::parse_int(cells[2]);
        const auto a = detail::parse_double(cells[3]);
        if (!g || !a) throw ParseError("bad gamma_max or alpha", lineno);
        r.gamma_max = static_cast<int>(*g);
        r.alpha = *a;
        if (cells[7] == "error") {
            r.error = "error";
        } else {
            const auto tp = detail::parse_int(cells[4]), fp = detail::parse_int(cells[5]),
                       fn = detail::parse_int(cells[6]);
            if (!tp || !fp || !fn || *tp < 0 || *fp < 0 || *fn < 0) throw ParseError("bad confusion counts", lineno);
            r.confusion = EdgeConfusion{static_cast<std::size_t>(*tp), static_cast<std::size_t>(*fp),
                                        static_cast<std::size_t>(*fn), false};
        }
        if (!cells[8].empty()) {
            const auto ms = detail::parse_double(cells[8]);
            if (!ms) throw ParseError("bad runtime_ms", lineno);
            r.runtime_ms = *ms;
        }
        report.rows.push_back(std::move(r));
    }
    if (!header) throw Error("report is empty");
    return report;
}

std::string report_to_table(const BenchReport& report) {
    std::vector<std::string> columns;
    std::vector<MethodId> methods;
    std::map<std::pair<MethodId, std::string>, std::string> cell;
    const bool multi_gamma = [&] {
        std::set<int> g;
        for (const auto& r : report.rows) g.insert(r.gamma_max);
        return g.size() > 1;
    }();
    for (const auto& r : report.rows) {
        const auto col = multi_gamma ? r.dataset + " (" + std::to_string(r.gamma_max) + ")" : r.dataset;
        if (std::find(columns.begin(), columns.end(), col) == columns.end()) columns.push_back(col);
        if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) methods.push_back(r.method);
        cell[{r.method, col}] = r.ok() ? detail::format_fixed(r.f1(), 2) : "error";
    }
    std::size_t first = 6;
    for (auto m : methods) first = std::max(first, method_label(m).size());
    std::vector<std::size_t> width;
    for (const auto& c : columns) width.push_back(std::max<std::size_t>(c.size(), 5));

    std::ostringstream out;
    auto pad = [&](const std::string& s, std::size_t w) { out << s << std::string(w - std::min(w, s.size()), ' '); };
    pad("method", first);
    for (std::size_t k = 0; k < columns.size(); ++k) {
        out << "  ";
        pad(columns[k], width[k]);
    }
    out << '\n';
    for (auto m : methods) {
        pad(std::string(method_label(m)), first);
        for (std::size_t k = 0; k < columns.size(); ++k) {
            out << "  ";
            auto it = cell.find({m, columns[k]});
            pad(it == cell.end() ? "-" : it->second, width[k]);
        }
        out << '\n';
    }
    return out.str();
}

} // namespace tscausal
