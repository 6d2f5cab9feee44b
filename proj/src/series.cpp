#include "lifecast/series.hpp"

#include <algorithm>

namespace lifecast::series {

FeatureSeriesResult feature_series(const Cascade& cascade,
                                   std::span<const TemporalWindow> windows,
                                   std::span<const metrics::WindowGraph> graphs,
                                   std::span<const std::vector<double>> window_scores) {
    FeatureSeriesResult result;
    double pending_time = 0.0;
    double pending_sum = 0.0;
    std::size_t pending_count = 0;
    auto flush = [&] {
        if (pending_count == 0) return;
        result.points.times.push_back(pending_time);
        result.points.values.push_back(pending_sum / static_cast<double>(pending_count));
        pending_sum = 0.0;
        pending_count = 0;
    };
    // lead ranges tile a prefix of the event list in window order, so one
    // pass visits times in nondecreasing order
    for (std::size_t w = 0; w < windows.size(); ++w) {
        const TemporalWindow& window = windows[w];
        const metrics::WindowGraph& graph = graphs[w];
        const std::vector<double>& scores = window_scores[w];
        for (std::size_t e = window.lead_event_begin; e < window.lead_event_end; ++e) {
            const ReshareEvent& event = cascade.events[e];
            if (pending_count > 0 && event.time != pending_time) flush();
            double value = 0.0;
            std::size_t local = graph.index_of(event.source);
            if (local < graph.size()) {
                value = scores[local];
            } else {
                ++result.missing_sources;
            }
            pending_time = event.time;
            pending_sum += value;
            ++pending_count;
        }
    }
    flush();
    return result;
}

SeriesPoints response_series(const Cascade& cascade) {
    SeriesPoints points;
    bool have_prev = false;
    double prev = 0.0;
    for (const ReshareEvent& event : cascade.events) {
        if (have_prev && event.time == prev) continue;
        if (have_prev) {
            points.times.push_back(event.time);
            points.values.push_back(event.time - prev);
        }
        prev = event.time;
        have_prev = true;
    }
    return points;
}

AlignedSeries align(const SeriesPoints& feature, const SeriesPoints& response, double t_e,
                    std::optional<std::pair<double, double>> clip) {
    AlignedSeries aligned;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < feature.times.size() && j < response.times.size()) {
        const double tf = feature.times[i];
        const double tr = response.times[j];
        if (tf < tr) {
            ++i;
        } else if (tr < tf) {
            ++j;
        } else {
            bool keep = tf <= t_e;
            if (clip) keep = keep && tf >= clip->first && tf <= clip->second;
            if (keep) {
                aligned.times.push_back(tf);
                aligned.feature.push_back(feature.values[i]);
                aligned.response.push_back(response.values[j]);
            }
            ++i;
            ++j;
        }
    }
    return aligned;
}

}  // namespace lifecast::series
