#pragma once

#include "tscausal/core_data.hpp"

#include <optional>

namespace tscausal {

enum class AlignmentStrategy {
    NearestValue,  ///< Strategy 1: nearest raw point to each grid time
    IntegralMean,  ///< Strategy 2: windowed average of the cumulative integral
};

struct AlignmentSpec {
    AlignmentStrategy strategy = AlignmentStrategy::NearestValue;
    std::optional<Millis> target_period; ///< default: the coarsest per-series sampling period
    bool interpolate = true;
};

/// The grid both strategies share: coarsest period (unless overridden),
/// starting at the latest series start and ending at the earliest series end.
struct AlignmentGrid {
    Millis start = 0;
    Millis period = 0;
    Eigen::Index rows = 0;
};
AlignmentGrid alignment_grid(const TimeSeriesSet& set, const AlignmentSpec& spec);

AlignedPanel align_strategy1(const TimeSeriesSet& set, const AlignmentSpec& spec = {});
AlignedPanel align_strategy2(const TimeSeriesSet& set, const AlignmentSpec& spec = {});
/// Dispatches on spec.strategy.
AlignedPanel align(const TimeSeriesSet& set, const AlignmentSpec& spec);

/// Linear interpolation of interior gaps, nearest-value extension at the
/// edges. Throws Error for an all-missing column.
AlignedPanel interpolate_missing(AlignedPanel panel);

/// Maximal lag covering `max_delay`: floor(max_delay / period), at least 1.
int gamma_max_rule(Millis period, Millis max_delay = 900'000);

} // namespace tscausal
