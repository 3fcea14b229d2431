#include "tscausal/preprocess.hpp"
#include "tscausal/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tscausal {

AlignmentGrid alignment_grid(const TimeSeriesSet& set, const AlignmentSpec& spec) {
    if (set.empty()) throw Error("cannot align an empty series set");
    Millis period = 0;
    for (const auto& s : set.series()) {
        if (s.points.empty()) throw Error("series '" + s.name + "' is empty");
        if (s.points.size() >= 2) period = std::max(period, estimate_sampling_period(s));
    }
    if (spec.target_period) {
        if (*spec.target_period <= 0) throw Error("target period must be positive");
        period = *spec.target_period;
    }
    if (period <= 0) throw Error("cannot infer a sampling period: every series has a single point");

    const Series* latest_start = &set.series().front();
    const Series* earliest_end = &set.series().front();
    for (const auto& s : set.series()) {
        if (s.points.front().time > latest_start->points.front().time) latest_start = &s;
        if (s.points.back().time < earliest_end->points.back().time) earliest_end = &s;
    }
    const Millis start = latest_start->points.front().time;
    const Millis end = earliest_end->points.back().time;
    if (start > end)
        throw Error("series '" + latest_start->name + "' starts after series '" + earliest_end->name +
                    "' ends: their spans do not overlap");
    const Eigen::Index rows = static_cast<Eigen::Index>((end - start) / period) + 1;
    if (rows < 2)
        throw Error("overlap of series spans shorter than two periods of " + std::to_string(period) + " ms");
    return {start, period, rows};
}

namespace {

AlignedPanel empty_panel(const TimeSeriesSet& set, const AlignmentGrid& grid) {
    AlignedPanel p;
    p.names = set.names();
    p.period = grid.period;
    p.start = grid.start;
    const auto d = static_cast<Eigen::Index>(set.size());
    p.values = Eigen::MatrixXd::Constant(grid.rows, d, std::numeric_limits<double>::quiet_NaN());
    p.missing = MissingMask::Constant(grid.rows, d, true);
    return p;
}

AlignedPanel finish(AlignedPanel panel, const AlignmentSpec& spec) {
    if (spec.interpolate && panel.has_missing()) return interpolate_missing(std::move(panel));
    panel.validate();
    return panel;
}

} // namespace

AlignedPanel align_strategy1(const TimeSeriesSet& set, const AlignmentSpec& spec) {
    const auto grid = alignment_grid(set, spec);
    auto panel = empty_panel(set, grid);
    for (std::size_t c = 0; c < set.size(); ++c) {
        std::vector<const Observation*> present;
        for (const auto& p : set.series()[c].points)
            if (!p.missing()) present.push_back(&p);
        if (present.empty()) continue;
        for (Eigen::Index r = 0; r < grid.rows; ++r) {
            const Millis g = panel.time_at(r);
            const auto it = std::lower_bound(present.begin(), present.end(), g,
                                             [](const Observation* o, Millis t) { return o->time < t; });
            const Observation* best = nullptr;
            if (it != present.end()) best = *it;
            // Earlier point wins ties.
            if (it != present.begin()) {
                const Observation* before = *(it - 1);
                if (!best || g - before->time <= best->time - g) best = before;
            }
            const Millis dist = best->time > g ? best->time - g : g - best->time;
            if (2 * dist > grid.period) continue;
            panel.values(r, static_cast<Eigen::Index>(c)) = *best->value;
            panel.missing(r, static_cast<Eigen::Index>(c)) = false;
        }
    }
    return finish(std::move(panel), spec);
}

AlignedPanel align_strategy2(const TimeSeriesSet& set, const AlignmentSpec& spec) {
    const auto grid = alignment_grid(set, spec);
    auto panel = empty_panel(set, grid);
    for (std::size_t c = 0; c < set.size(); ++c) {
        const auto& pts = set.series()[c].points;
        const std::size_t m = pts.size();
        if (m < 2) continue;
        const Millis own_period = estimate_sampling_period(set.series()[c]);
        const auto n = static_cast<std::size_t>(
            std::max<long long>(1, std::llround(static_cast<double>(grid.period) / static_cast<double>(own_period))));
        // s_0 = 0 at the first timestamp; s_i = x_i (t_i - t_{i-1}) + s_{i-1}.
        // A missing x_i contributes nothing but poisons every window containing it.
        std::vector<long double> s(m, 0.0L);
        std::vector<std::size_t> missing_prefix(m, 0);
        for (std::size_t i = 1; i < m; ++i) {
            const auto dt = static_cast<long double>(pts[i].time - pts[i - 1].time);
            s[i] = s[i - 1] + (pts[i].value ? static_cast<long double>(*pts[i].value) * dt : 0.0L);
            missing_prefix[i] = missing_prefix[i - 1] + (pts[i].missing() ? 1 : 0);
        }
        for (Eigen::Index r = 0; r < grid.rows; ++r) {
            const Millis g = panel.time_at(r);
            // First raw point at or after the grid time.
            const auto it = std::lower_bound(pts.begin(), pts.end(), g,
                                             [](const Observation& o, Millis t) { return o.time < t; });
            if (it == pts.end()) continue;
            const auto i = static_cast<std::size_t>(it - pts.begin());
            if (i < n) continue;
            if (missing_prefix[i] != missing_prefix[i - n]) continue;
            const Millis span = pts[i].time - pts[i - n].time;
            if (span == 0)
                throw Error("series '" + set.series()[c].name + "': degenerate averaging window at point " +
                            std::to_string(i));
            panel.values(r, static_cast<Eigen::Index>(c)) =
                static_cast<double>((s[i] - s[i - n]) / static_cast<long double>(span));
            panel.missing(r, static_cast<Eigen::Index>(c)) = false;
        }
    }
    return finish(std::move(panel), spec);
}

AlignedPanel align(const TimeSeriesSet& set, const AlignmentSpec& spec) {
    return spec.strategy == AlignmentStrategy::NearestValue ? align_strategy1(set, spec) : align_strategy2(set, spec);
}

AlignedPanel interpolate_missing(AlignedPanel panel) {
    const Eigen::Index T = panel.rows();
    for (Eigen::Index c = 0; c < panel.cols(); ++c) {
        std::vector<Eigen::Index> known;
        for (Eigen::Index r = 0; r < T; ++r)
            if (!panel.missing(r, c)) known.push_back(r);
        if (known.empty())
            throw Error("series '" + panel.names[static_cast<std::size_t>(c)] + "' has no observed value to interpolate from");
        auto col = panel.values.col(c);
        for (Eigen::Index r = 0; r < known.front(); ++r) col(r) = col(known.front());
        for (Eigen::Index r = known.back() + 1; r < T; ++r) col(r) = col(known.back());
        for (std::size_t k = 1; k < known.size(); ++k) {
            const Eigen::Index a = known[k - 1], b = known[k];
            for (Eigen::Index r = a + 1; r < b; ++r) {
                const double w = static_cast<double>(r - a) / static_cast<double>(b - a);
                col(r) = col(a) + w * (col(b) - col(a));
            }
        }
    }
    panel.missing.setConstant(false);
    panel.validate();
    return panel;
}

int gamma_max_rule(Millis period, Millis max_delay) {
    if (period <= 0) throw Error("period must be positive");
    return static_cast<int>(std::max<Millis>(1, max_delay / period));
}

} // namespace tscausal
