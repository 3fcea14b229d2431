#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tscausal {

/// Timestamps and periods are integer milliseconds since the Unix epoch.
using Millis = std::int64_t;

struct Observation {
    Millis time = 0;
    std::optional<double> value; ///< empty when the collector reported nothing usable

    bool missing() const noexcept { return !value.has_value(); }
    friend bool operator==(const Observation&, const Observation&) = default;
};

struct Series {
    std::string name;
    std::vector<Observation> points; ///< strictly increasing in time

    std::vector<Millis> times() const;
    friend bool operator==(const Series&, const Series&) = default;
};

/// Raw, independently timestamped series as collected. Series keep the order
/// in which they were added (CSV column order).
class TimeSeriesSet {
public:
    /// Throws Error if the name is empty or already present, if timestamps are
    /// not strictly increasing, or if a present value is not finite.
    void add(Series series);

    const std::vector<Series>& series() const noexcept { return series_; }
    const Series& at(std::string_view name) const;
    bool contains(std::string_view name) const;
    std::size_t size() const noexcept { return series_.size(); }
    bool empty() const noexcept { return series_.empty(); }
    std::vector<std::string> names() const;

    std::map<std::string, std::string> metadata;

    friend bool operator==(const TimeSeriesSet&, const TimeSeriesSet&) = default;

private:
    std::vector<Series> series_;
};

using MissingMask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Uniformly sampled T x d panel. Row r sits at start + r * period.
/// Missing cells hold NaN in `values` and true in `missing`.
struct AlignedPanel {
    std::vector<std::string> names;
    Millis period = 0;
    Millis start = 0;
    Eigen::MatrixXd values;
    MissingMask missing;

    static AlignedPanel from_values(std::vector<std::string> names, Millis period, Millis start,
                                    Eigen::MatrixXd values);

    Eigen::Index rows() const noexcept { return values.rows(); }
    Eigen::Index cols() const noexcept { return values.cols(); }
    Millis time_at(Eigen::Index row) const noexcept { return start + row * period; }
    bool has_missing() const { return missing.any(); }
    std::size_t index_of(std::string_view name) const;

    /// Throws Error when a shape or mask invariant is broken.
    void validate() const;
};

enum class TimestampUnit { Milliseconds, Seconds };
enum class CsvLayout { Auto, Wide, Long };

/// How CSV columns map onto series.
///
/// Wide layout: one timestamp column plus one column per series; a blank or
/// "NaN" cell is a missing observation at that timestamp.
/// Long layout: columns `series,timestamp,value`, one observation per row,
/// which is how misaligned raw collections are stored.
/// Auto picks Long when the header is exactly `series,timestamp,value`.
struct ColumnMapping {
    CsvLayout layout = CsvLayout::Auto;
    std::string timestamp_column;           ///< empty: first column
    std::vector<std::string> value_columns; ///< empty: every other column
    TimestampUnit unit = TimestampUnit::Milliseconds; ///< unit of numeric timestamps
    char delimiter = ',';
};

TimeSeriesSet ingest_csv(std::istream& in, const ColumnMapping& mapping = {});
TimeSeriesSet ingest_csv_text(std::string_view text, const ColumnMapping& mapping = {});
TimeSeriesSet load_csv(const std::string& path, const ColumnMapping& mapping = {});

/// Writes the Wide layout when every series shares one timestamp vector,
/// the Long layout otherwise. Timestamps are written in milliseconds.
void write_csv(std::ostream& out, const TimeSeriesSet& set);
std::string to_csv(const TimeSeriesSet& set);

/// Panel to CSV (Wide layout, missing cells blank).
void write_panel_csv(std::ostream& out, const AlignedPanel& panel);

/// Parses an integer or ISO-8601 timestamp cell. Returns nullopt when the
/// cell is neither.
std::optional<Millis> parse_timestamp(std::string_view cell, TimestampUnit unit);

/// Median of the inter-timestamp gaps (lower median for an even count).
Millis estimate_sampling_period(std::span<const Millis> times);
Millis estimate_sampling_period(const Series& series);

struct RowInterval {
    std::size_t start_row = 0;
    std::size_t end_row = 0; ///< inclusive
    friend bool operator==(const RowInterval&, const RowInterval&) = default;
};

struct SeriesDiagnostics {
    std::string name;
    Millis sampling_period_estimate = 0; ///< 0 when fewer than two points
    std::vector<RowInterval> sleeping_intervals;
    std::size_t missing_count = 0;
    std::size_t max_consecutive_missing = 0;
};

/// A sleeping interval is a maximal run of at least `sleep_min_len`
/// identical consecutive values. Missing points break runs.
std::vector<SeriesDiagnostics> diagnose(const TimeSeriesSet& set, std::size_t sleep_min_len = 10);
std::vector<SeriesDiagnostics> diagnose(const AlignedPanel& panel, std::size_t sleep_min_len = 10);

} // namespace tscausal
