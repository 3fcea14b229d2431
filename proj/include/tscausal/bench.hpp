#pragma once

#include "tscausal/discovery.hpp"
#include "tscausal/evaluation.hpp"
#include "tscausal/preprocess.hpp"

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace tscausal {

// Experiment config: `key = value` lines, `#` or `;` comments, global keys
// first and then one section per dataset:
//
//   methods = gcmvl, pcmciplus, varlingam     # or: all
//   gamma_max = auto                          # or a list: 3, 5, 10, 15
//   alpha = 0.05
//   output_dir = out
//   parallelism = 4
//
//   [dataset web1]
//   csv_path = web.csv
//   truth_path = web.txt
//   strategy = 1
//
// A dataset gives either csv_path + truth_path or sem_spec (a simulated
// panel scored against its own graph). Relative paths resolve against the
// config file's directory.

struct DatasetConfig {
    std::string name;
    std::filesystem::path csv_path;
    std::filesystem::path truth_path;
    std::filesystem::path sem_spec;
    AlignmentStrategy strategy = AlignmentStrategy::NearestValue;
    std::optional<Millis> period_override;
    TimestampUnit timestamp_unit = TimestampUnit::Milliseconds;
    std::size_t line = 0; ///< section header line
};

struct ExperimentConfig {
    std::vector<DatasetConfig> datasets;
    std::vector<MethodId> methods;
    /// Empty means "auto": the gamma_max rule on each panel's period.
    std::vector<int> gamma_max;
    Millis max_delay_ms = 900'000;
    double alpha = 0.05;
    std::optional<int> max_cond_size;
    std::filesystem::path output_dir = "bench_out";
    int parallelism = 1;
    /// Off by default so that reports are byte-identical across runs;
    /// wall-clock times always go to the run log.
    bool report_runtime = false;

    void validate() const;
};

ExperimentConfig parse_experiment_config(std::string_view text, const std::filesystem::path& base_dir = {});
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

/// BENCH_THREADS, when set to a positive integer, overrides cfg.parallelism.
int effective_parallelism(const ExperimentConfig& cfg);

struct PreparedDataset {
    AlignedPanel panel;
    SummaryCausalGraph truth;
};

/// Ingests and aligns (or simulates) one dataset and loads its truth graph.
PreparedDataset prepare_dataset(const DatasetConfig& ds);

struct RunOptions {
    bool write_outputs = true;
    std::ostream* progress = nullptr;
};

/// Runs every (method, dataset, gamma_max) cell. Failures become error rows.
/// With write_outputs, writes report.csv, report.txt, run_log.jsonl and the
/// native and summary graph of every cell under cfg.output_dir.
BenchReport run_experiment(const ExperimentConfig& cfg, const RunOptions& options = {});

} // namespace tscausal
