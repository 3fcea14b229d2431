#pragma once

#include "tscausal/discovery.hpp"
#include "tscausal/graphs.hpp"

#include <optional>
#include <string>
#include <vector>

namespace tscausal {

struct EdgeConfusion {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    bool include_self_loops = false;
    friend bool operator==(const EdgeConfusion&, const EdgeConfusion&) = default;
};

/// Ordered-pair comparison of two summary graphs over the same node names
/// (matched by name, so node order may differ). An inferred mutual pair
/// against a one-way truth edge scores one TP and one FP.
EdgeConfusion edge_confusion(const SummaryCausalGraph& truth, const SummaryCausalGraph& inferred,
                             bool include_self_loops = false);

/// 2tp / (2tp + fp + fn), with 0/0 taken as 0.
double f1(const EdgeConfusion& c);
double f1(std::size_t tp, std::size_t fp, std::size_t fn);

struct BenchRow {
    MethodId method{};
    std::string dataset;
    int gamma_max = 0;
    double alpha = 0.05;
    /// Empty on error rows.
    std::optional<EdgeConfusion> confusion;
    std::optional<double> runtime_ms;
    std::string error;
    std::vector<std::string> graph_paths; ///< not part of the CSV

    bool ok() const { return confusion.has_value(); }
    double f1() const { return confusion ? tscausal::f1(*confusion) : 0.0; }
    friend bool operator==(const BenchRow&, const BenchRow&) = default;
};

struct BenchReport {
    std::vector<BenchRow> rows;
    friend bool operator==(const BenchReport&, const BenchReport&) = default;
};

/// Orders rows by method id, then dataset position in `dataset_order`, then
/// gamma_max. Datasets missing from `dataset_order` sort last by name.
BenchReport tabulate(std::vector<BenchRow> rows, const std::vector<std::string>& dataset_order = {});

inline constexpr const char* kReportHeader = "method,dataset,gamma_max,alpha,tp,fp,fn,f1,runtime_ms";

/// Error rows leave tp, fp, fn empty and put "error" in the f1 column.
std::string report_to_csv(const BenchReport& report);
/// Inverse of report_to_csv (graph paths and error text are not stored).
BenchReport parse_report_csv(std::string_view text);
/// Method-by-dataset grid of F1 values, one column per (dataset, gamma_max).
std::string report_to_table(const BenchReport& report);

} // namespace tscausal
