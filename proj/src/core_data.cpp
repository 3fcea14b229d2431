#include "tscausal/core_data.hpp"
#include "tscausal/error.hpp"
#include "text_util.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <sstream>

namespace tscausal {

using detail::trim;

std::vector<Millis> Series::times() const {
    std::vector<Millis> out;
    out.reserve(points.size());
    for (const auto& p : points) out.push_back(p.time);
    return out;
}

void TimeSeriesSet::add(Series series) {
    if (series.name.empty()) throw Error("series name must not be empty");
    if (contains(series.name)) throw Error("duplicate series name '" + series.name + "'");
    for (std::size_t i = 0; i < series.points.size(); ++i) {
        const auto& p = series.points[i];
        if (p.value && !std::isfinite(*p.value))
            throw Error("series '" + series.name + "': non-finite value at point " + std::to_string(i));
        if (i > 0 && p.time <= series.points[i - 1].time)
            throw Error("series '" + series.name + "': timestamps not strictly increasing at point " +
                        std::to_string(i));
    }
    series_.push_back(std::move(series));
}

const Series& TimeSeriesSet::at(std::string_view name) const {
    for (const auto& s : series_)
        if (s.name == name) return s;
    throw Error("unknown series '" + std::string(name) + "'");
}

bool TimeSeriesSet::contains(std::string_view name) const {
    return std::any_of(series_.begin(), series_.end(), [&](const Series& s) { return s.name == name; });
}

std::vector<std::string> TimeSeriesSet::names() const {
    std::vector<std::string> out;
    for (const auto& s : series_) out.push_back(s.name);
    return out;
}

AlignedPanel AlignedPanel::from_values(std::vector<std::string> names, Millis period, Millis start,
                                       Eigen::MatrixXd values) {
    AlignedPanel p;
    p.names = std::move(names);
    p.period = period;
    p.start = start;
    p.missing = values.array().isNaN();
    p.values = std::move(values);
    p.validate();
    return p;
}

std::size_t AlignedPanel::index_of(std::string_view name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return i;
    throw Error("panel has no series '" + std::string(name) + "'");
}

void AlignedPanel::validate() const {
    if (names.empty()) throw Error("panel must have at least one series");
    if (period <= 0) throw Error("panel period must be positive");
    if (values.rows() < 2) throw Error("panel must have at least two rows");
    if (static_cast<std::size_t>(values.cols()) != names.size())
        throw Error("panel has " + std::to_string(values.cols()) + " columns but " +
                    std::to_string(names.size()) + " names");
    if (missing.rows() != values.rows() || missing.cols() != values.cols())
        throw Error("missing mask shape does not match values");
    for (Eigen::Index c = 0; c < values.cols(); ++c)
        for (Eigen::Index r = 0; r < values.rows(); ++r)
            if (missing(r, c) != std::isnan(values(r, c)))
                throw Error("missing mask disagrees with values at row " + std::to_string(r) + ", series '" +
                            names[static_cast<std::size_t>(c)] + "'");
}

// --- timestamps -----------------------------------------------------------

namespace {

// Days since 1970-01-01 for a proleptic Gregorian date.
constexpr std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const auto yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

bool read_digits(std::string_view s, std::size_t& pos, std::size_t count, int& out) {
    if (pos + count > s.size()) return false;
    int v = 0;
    for (std::size_t i = 0; i < count; ++i) {
        const char c = s[pos + i];
        if (c < '0' || c > '9') return false;
        v = v * 10 + (c - '0');
    }
    pos += count;
    out = v;
    return true;
}

std::optional<Millis> parse_iso8601(std::string_view s) {
    std::size_t pos = 0;
    int year = 0, month = 0, day = 0, hour = 0, minute = 0, second = 0;
    if (!read_digits(s, pos, 4, year) || pos >= s.size() || s[pos++] != '-') return std::nullopt;
    if (!read_digits(s, pos, 2, month) || pos >= s.size() || s[pos++] != '-') return std::nullopt;
    if (!read_digits(s, pos, 2, day)) return std::nullopt;
    if (month < 1 || month > 12 || day < 1 || day > 31) return std::nullopt;
    Millis ms = 0;
    if (pos < s.size() && (s[pos] == 'T' || s[pos] == ' ')) {
        ++pos;
        if (!read_digits(s, pos, 2, hour) || pos >= s.size() || s[pos++] != ':') return std::nullopt;
        if (!read_digits(s, pos, 2, minute)) return std::nullopt;
        if (pos < s.size() && s[pos] == ':') {
            ++pos;
            if (!read_digits(s, pos, 2, second)) return std::nullopt;
            if (pos < s.size() && (s[pos] == '.' || s[pos] == ',')) {
                ++pos;
                int scale = 100;
                bool any = false;
                while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
                    ms += (s[pos] - '0') * scale;
                    scale /= 10;
                    ++pos;
                    any = true;
                }
                if (!any) return std::nullopt;
            }
        }
        if (hour > 23 || minute > 59 || second > 60) return std::nullopt;
    }
    Millis offset_min = 0;
    if (pos < s.size()) {
        if (s[pos] == 'Z') {
            ++pos;
        } else if (s[pos] == '+' || s[pos] == '-') {
            const int sign = s[pos] == '-' ? -1 : 1;
            ++pos;
            int oh = 0, om = 0;
            if (!read_digits(s, pos, 2, oh)) return std::nullopt;
            if (pos < s.size() && s[pos] == ':') ++pos;
            if (pos < s.size() && !read_digits(s, pos, 2, om)) return std::nullopt;
            offset_min = sign * (oh * 60 + om);
        }
    }
    if (pos != s.size()) return std::nullopt;
    const std::int64_t days = days_from_civil(year, static_cast<unsigned>(month), static_cast<unsigned>(day));
    const std::int64_t secs = days * 86400 + hour * 3600 + minute * 60 + second - offset_min * 60;
    return secs * 1000 + ms;
}

} // namespace

std::optional<Millis> parse_timestamp(std::string_view cell, TimestampUnit unit) {
    cell = trim(cell);
    if (cell.empty()) return std::nullopt;
    const Millis scale = unit == TimestampUnit::Seconds ? 1000 : 1;
    if (auto i = detail::parse_int(cell)) return *i * scale;
    if (auto d = detail::parse_double(cell); d && std::isfinite(*d))
        return static_cast<Millis>(std::llround(*d * static_cast<double>(scale)));
    return parse_iso8601(cell);
}

// --- CSV ingestion ----------------------------------------------------------

namespace {

std::optional<double> parse_value_cell(std::string_view cell) {
    cell = trim(cell);
    if (cell.empty()) return std::nullopt;
    const auto v = detail::parse_double(cell);
    if (!v || !std::isfinite(*v)) return std::nullopt; // NaN, inf and garbage are all missing
    return v;
}

struct RawPoint {
    Millis time;
    std::optional<double> value;
    std::size_t line;
};

Series finish_series(std::string name, std::vector<RawPoint> raw) {
    std::stable_sort(raw.begin(), raw.end(), [](const RawPoint& a, const RawPoint& b) { return a.time < b.time; });
    Series s;
    s.name = std::move(name);
    s.points.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (i > 0 && raw[i].time == raw[i - 1].time) {
            const auto row = std::max(raw[i].line, raw[i - 1].line);
            throw ParseError("duplicate timestamp " + std::to_string(raw[i].time) + " in series '" + s.name + "'",
                             row);
        }
        s.points.push_back({raw[i].time, raw[i].value});
    }
    return s;
}

} // namespace

TimeSeriesSet ingest_csv(std::istream& in, const ColumnMapping& mapping) {
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        if (!trim(line).empty()) {
            header = detail::split_csv_line(line, mapping.delimiter);
            break;
        }
    }
    if (header.empty()) throw Error("empty CSV input");
    if (line_no == 1 && header[0].rfind("\xEF\xBB\xBF", 0) == 0) header[0].erase(0, 3);
    for (auto& h : header) h = std::string(trim(h));

    auto column = [&](const std::string& name) -> std::size_t {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw ParseError("no column named '" + name + "'", line_no);
        return static_cast<std::size_t>(it - header.begin());
    };

    CsvLayout layout = mapping.layout;
    if (layout == CsvLayout::Auto) {
        const bool long_header = header.size() == 3 && detail::lower(header[0]) == "series" &&
                                 detail::lower(header[1]) == "timestamp" && detail::lower(header[2]) == "value";
        layout = long_header ? CsvLayout::Long : CsvLayout::Wide;
    }

    TimeSeriesSet set;
    if (layout == CsvLayout::Long) {
        const std::size_t cs = 0, ct = 1, cv = 2;
        std::vector<std::string> order;
        std::map<std::string, std::vector<RawPoint>> raw;
        while (std::getline(in, line)) {
            ++line_no;
            if (trim(line).empty()) continue;
            const auto f = detail::split_csv_line(line, mapping.delimiter);
            if (f.size() < 3) throw ParseError("expected 3 fields", line_no);
            const std::string name(trim(f[cs]));
            if (name.empty()) throw ParseError("empty series name", line_no);
            const auto t = parse_timestamp(f[ct], mapping.unit);
            if (!t) throw ParseError("unparseable timestamp '" + f[ct] + "'", line_no);
            if (!raw.count(name)) order.push_back(name);
            raw[name].push_back({*t, parse_value_cell(f[cv]), line_no});
        }
        for (const auto& name : order) set.add(finish_series(name, std::move(raw[name])));
        return set;
    }

    const std::size_t tcol = mapping.timestamp_column.empty() ? 0 : column(mapping.timestamp_column);
    std::vector<std::size_t> vcols;
    if (mapping.value_columns.empty()) {
        for (std::size_t c = 0; c < header.size(); ++c)
            if (c != tcol) vcols.push_back(c);
    } else {
        for (const auto& name : mapping.value_columns) vcols.push_back(column(name));
    }
    if (vcols.empty()) throw ParseError("CSV needs a timestamp column and at least one value column", line_no);

    std::vector<std::vector<RawPoint>> raw(vcols.size());
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto f = detail::split_csv_line(line, mapping.delimiter);
        if (tcol >= f.size()) throw ParseError("missing timestamp cell", line_no);
        const auto t = parse_timestamp(f[tcol], mapping.unit);
        if (!t) throw ParseError("unparseable timestamp '" + f[tcol] + "'", line_no);
        for (std::size_t k = 0; k < vcols.size(); ++k) {
            const std::string_view cell = vcols[k] < f.size() ? std::string_view(f[vcols[k]]) : std::string_view{};
            raw[k].push_back({*t, parse_value_cell(cell), line_no});
        }
    }
    for (std::size_t k = 0; k < vcols.size(); ++k) set.add(finish_series(header[vcols[k]], std::move(raw[k])));
    return set;
}

TimeSeriesSet ingest_csv_text(std::string_view text, const ColumnMapping& mapping) {
    std::istringstream in{std::string(text)};
    return ingest_csv(in, mapping);
}

TimeSeriesSet load_csv(const std::string& path, const ColumnMapping& mapping) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    return ingest_csv(in, mapping);
}

void write_csv(std::ostream& out, const TimeSeriesSet& set) {
    const auto& all = set.series();
    bool shared = !all.empty();
    for (std::size_t k = 1; shared && k < all.size(); ++k) {
        const auto& a = all[0].points;
        const auto& b = all[k].points;
        shared = a.size() == b.size() &&
                 std::equal(a.begin(), a.end(), b.begin(), [](auto& x, auto& y) { return x.time == y.time; });
    }
    auto cell = [](const Observation& o) { return o.value ? detail::format_double(*o.value) : std::string{}; };
    if (shared) {
        out << "timestamp";
        for (const auto& s : all) out << ',' << detail::csv_escape(s.name);
        out << '\n';
        for (std::size_t r = 0; r < all[0].points.size(); ++r) {
            out << all[0].points[r].time;
            for (const auto& s : all) out << ',' << cell(s.points[r]);
            out << '\n';
        }
        return;
    }
    out << "series,timestamp,value\n";
    for (const auto& s : all)
        for (const auto& p : s.points) out << detail::csv_escape(s.name) << ',' << p.time << ',' << cell(p) << '\n';
}

std::string to_csv(const TimeSeriesSet& set) {
    std::ostringstream out;
    write_csv(out, set);
    return out.str();
}

void write_panel_csv(std::ostream& out, const AlignedPanel& panel) {
    out << "timestamp";
    for (const auto& n : panel.names) out << ',' << detail::csv_escape(n);
    out << '\n';
    for (Eigen::Index r = 0; r < panel.rows(); ++r) {
        out << panel.time_at(r);
        for (Eigen::Index c = 0; c < panel.cols(); ++c) {
            out << ',';
            if (!panel.missing(r, c)) out << detail::format_double(panel.values(r, c));
        }
        out << '\n';
    }
}

// --- diagnostics -------------------------------------------------------------

Millis estimate_sampling_period(std::span<const Millis> times) {
    if (times.size() < 2) throw Error("sampling period needs at least 2 points");
    std::vector<Millis> gaps(times.size() - 1);
    for (std::size_t i = 1; i < times.size(); ++i) gaps[i - 1] = times[i] - times[i - 1];
    const auto mid = gaps.begin() + static_cast<std::ptrdiff_t>((gaps.size() - 1) / 2);
    std::nth_element(gaps.begin(), mid, gaps.end());
    return *mid;
}

Millis estimate_sampling_period(const Series& series) {
    const auto t = series.times();
    return estimate_sampling_period(std::span<const Millis>(t));
}

namespace {

SeriesDiagnostics diagnose_values(std::string name, const std::vector<std::optional<double>>& values,
                                  std::size_t sleep_min_len) {
    SeriesDiagnostics d;
    d.name = std::move(name);
    std::size_t miss_run = 0;
    std::size_t run_start = 0, run_len = 0;
    auto close_run = [&](std::size_t end_exclusive) {
        if (run_len >= sleep_min_len) d.sleeping_intervals.push_back({run_start, end_exclusive - 1});
        run_len = 0;
    };
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!values[i]) {
            ++d.missing_count;
            d.max_consecutive_missing = std::max(d.max_consecutive_missing, ++miss_run);
            close_run(i);
            continue;
        }
        miss_run = 0;
        if (run_len > 0 && *values[i] == *values[i - 1]) {
            ++run_len;
        } else {
            close_run(i);
            run_start = i;
            run_len = 1;
        }
    }
    close_run(values.size());
    return d;
}

} // namespace

std::vector<SeriesDiagnostics> diagnose(const TimeSeriesSet& set, std::size_t sleep_min_len) {
    if (sleep_min_len < 2) throw Error("sleep_min_len must be at least 2");
    std::vector<SeriesDiagnostics> out;
    for (const auto& s : set.series()) {
        std::vector<std::optional<double>> values;
        for (const auto& p : s.points) values.push_back(p.value);
        auto d = diagnose_values(s.name, values, sleep_min_len);
        if (s.points.size() >= 2) d.sampling_period_estimate = estimate_sampling_period(s);
        out.push_back(std::move(d));
    }
    return out;
}

std::vector<SeriesDiagnostics> diagnose(const AlignedPanel& panel, std::size_t sleep_min_len) {
    if (sleep_min_len < 2) throw Error("sleep_min_len must be at least 2");
    std::vector<SeriesDiagnostics> out;
    for (Eigen::Index c = 0; c < panel.cols(); ++c) {
        std::vector<std::optional<double>> values;
        for (Eigen::Index r = 0; r < panel.rows(); ++r)
            values.push_back(panel.missing(r, c) ? std::nullopt : std::optional<double>(panel.values(r, c)));
        auto d = diagnose_values(panel.names[static_cast<std::size_t>(c)], values, sleep_min_len);
        d.sampling_period_estimate = panel.period;
        out.push_back(std::move(d));
    }
    return out;
}

} // namespace tscausal
