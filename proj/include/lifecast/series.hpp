#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "lifecast/metrics.hpp"
#include "lifecast/partition.hpp"
#include "lifecast/types.hpp"

namespace lifecast::series {

/// Time-stamped observations, times strictly increasing.
struct SeriesPoints {
    std::vector<double> times;
    std::vector<double> values;
};

struct FeatureSeriesResult {
    SeriesPoints points;
    std::size_t missing_sources = 0;  // lead events whose source sat outside the window
};

/// Per-event feature series: walks every window's lead events once, scoring
/// each event by its source's value on that window's graph. Sources outside
/// the window score zero and are counted. Simultaneous events average.
/// `window_scores[w]` must align with `graphs[w]` local indices.
FeatureSeriesResult feature_series(const Cascade& cascade,
                                   std::span<const TemporalWindow> windows,
                                   std::span<const metrics::WindowGraph> graphs,
                                   std::span<const std::vector<double>> window_scores);

/// Response series: the gap from each distinct event time to the previous
/// distinct event time. The first distinct time has no point.
SeriesPoints response_series(const Cascade& cascade);

struct AlignedSeries {
    std::vector<double> times;
    std::vector<double> feature;
    std::vector<double> response;
};

/// Intersects the two series on exactly matching times, keeping points with
/// time <= t_e, optionally restricted to a closed [lo, hi] range.
AlignedSeries align(const SeriesPoints& feature, const SeriesPoints& response, double t_e,
                    std::optional<std::pair<double, double>> clip = std::nullopt);

}  // namespace lifecast::series
