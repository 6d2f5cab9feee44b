#include "lifecast/hawkes.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <unordered_map>
#include <unordered_set>

#include "lifecast/errors.hpp"
#include "lifecast/parallel.hpp"
#include "lifecast/stats.hpp"

namespace lifecast::hawkes {

ReactionKernel ReactionKernel::power_law(double s0, double theta) {
    if (!(s0 > 0.0) || !(theta > 0.0)) {
        throw ConfigError("power-law kernel needs s0 > 0 and theta > 0");
    }
    ReactionKernel k;
    k.kind_ = Kind::PowerLaw;
    k.s0_ = s0;
    k.theta_ = theta;
    // unit mass: scale * s0 + scale * s0 / theta = 1
    k.scale_ = theta / (s0 * (theta + 1.0));
    return k;
}

ReactionKernel ReactionKernel::from_samples(std::span<const double> gaps, std::size_t bins) {
    if (gaps.empty()) throw ConfigError("histogram kernel needs at least one gap sample");
    if (bins == 0) throw ConfigError("histogram kernel needs at least one bin");
    double max_gap = 0.0;
    for (double g : gaps) {
        if (!(g >= 0.0)) throw ConfigError("histogram kernel gaps must be nonnegative");
        max_gap = std::max(max_gap, g);
    }
    if (max_gap <= 0.0) throw ConfigError("histogram kernel needs a positive gap range");
    ReactionKernel k;
    k.kind_ = Kind::Histogram;
    k.bin_width_ = max_gap / static_cast<double>(bins);
    k.density_.assign(bins, 0.0);
    for (double g : gaps) {
        std::size_t idx = std::min(bins - 1, static_cast<std::size_t>(g / k.bin_width_));
        k.density_[idx] += 1.0;
    }
    double norm = static_cast<double>(gaps.size()) * k.bin_width_;
    for (double& d : k.density_) d /= norm;
    return k;
}

double ReactionKernel::operator()(double gap) const {
    if (gap < 0.0) return 0.0;
    if (kind_ == Kind::PowerLaw) {
        if (gap < s0_) return scale_;
        return scale_ * std::pow(gap / s0_, -(1.0 + theta_));
    }
    std::size_t idx = static_cast<std::size_t>(gap / bin_width_);
    return idx < density_.size() ? density_[idx] : 0.0;
}

double ReactionKernel::mass() const {
    if (kind_ == Kind::PowerLaw) {
        return scale_ * s0_ + scale_ * s0_ / theta_;
    }
    double m = 0.0;
    for (double d : density_) m += d * bin_width_;
    return m;
}

double ReactionKernel::mass_between(double a, double b) const {
    if (!(a >= 0.0) || b < a) throw ConfigError("kernel mass range needs 0 <= a <= b");
    if (kind_ == Kind::PowerLaw) {
        auto cumulative = [&](double t) {
            if (t <= s0_) return scale_ * t;
            // flat head plus the closed-form power-law tail piece
            return scale_ * s0_ + scale_ * s0_ / theta_ * (1.0 - std::pow(t / s0_, -theta_));
        };
        return cumulative(b) - cumulative(a);
    }
    double m = 0.0;
    for (std::size_t i = 0; i < density_.size(); ++i) {
        const double lo = std::max(a, bin_width_ * static_cast<double>(i));
        const double hi = std::min(b, bin_width_ * static_cast<double>(i + 1));
        if (hi > lo) m += density_[i] * (hi - lo);
    }
    return m;
}

std::vector<double> event_weights(const Cascade& cascade, const HistoryGraph& history) {
    std::vector<double> weights(cascade.events.size(), 0.0);
    std::unordered_map<NodeId, std::unordered_set<NodeId>> cascade_adj;
    for (std::size_t i = 0; i < cascade.events.size(); ++i) {
        const ReshareEvent& e = cascade.events[i];
        if (history.contains(e.source)) {
            weights[i] = static_cast<double>(history.degree(e.source));
        } else {
            // cascade degree accumulated strictly before this event
            auto it = cascade_adj.find(e.source);
            weights[i] = it == cascade_adj.end() ? 0.0 : static_cast<double>(it->second.size());
        }
        cascade_adj[e.source].insert(e.target);
        cascade_adj[e.target].insert(e.source);
    }
    return weights;
}

HawkesCurve intensity(const Cascade& cascade, const HistoryGraph& history,
                      const ReactionKernel& kernel, double p, double alpha) {
    if (cascade.events.empty()) throw DegenerateCascadeError("empty cascade");
    const double span = cascade.span();
    if (!(span > 0.0)) {
        throw DegenerateCascadeError("cascade " + cascade.id + ": zero observation span");
    }
    const std::int64_t n = static_cast<std::int64_t>(cascade.events.size());
    HawkesCurve curve;
    curve.times.resize(n);
    curve.values.assign(n, 0.0);
    for (std::int64_t i = 0; i < n; ++i) curve.times[i] = cascade.events[i].time;
    const std::vector<double> weights = event_weights(cascade, history);
    const double* times = curve.times.data();

#pragma omp parallel for schedule(static)
    for (std::int64_t j = 0; j < n; ++j) {
        const double tj = times[j];
        const double window = alpha * std::exp(tj / span);
        // gaps shrink with i, so events outside the window form a prefix
        const double* lo = std::partition_point(
            times, times + j, [&](double ti) { return tj - ti > window; });
        double sum = 0.0;
        for (const double* ti = lo; ti < times + j; ++ti) {
            double gap = tj - *ti;
            double term = weights[ti - times] * kernel(gap);
            sum += term;
        }
        curve.values[j] = p * sum;
    }
    return curve;
}

IntervalCurve interval_curve(const HawkesCurve& curve, double span, double alpha) {
    if (!(span > 1.0)) {
        throw DegenerateCascadeError("interval curve needs a span above one minute");
    }
    IntervalCurve ic;
    ic.width = alpha * std::log(span);
    const std::size_t bins = static_cast<std::size_t>(span / ic.width) + 1;
    ic.values.assign(bins, 0.0);
    for (std::size_t i = 0; i < curve.times.size(); ++i) {
        std::size_t idx = std::min(bins - 1, static_cast<std::size_t>(curve.times[i] / ic.width));
        ic.values[idx] += curve.values[i];
    }
    return ic;
}

ExtremaResult find_extrema(const IntervalCurve& curve) {
    const std::size_t n = curve.values.size();
    if (n < 7) {
        throw TooShortError("extrema need at least 7 intervals, have " + std::to_string(n));
    }
    ExtremaResult result;
    const auto& v = curve.values;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        bool is_max = true;
        bool is_min = true;
        for (std::size_t d = 1; d <= 3; ++d) {
            if (i >= d) {
                is_max = is_max && v[i] > v[i - d];
                is_min = is_min && v[i] < v[i - d];
            }
            if (i + d < n) {
                is_max = is_max && v[i] > v[i + d];
                is_min = is_min && v[i] < v[i + d];
            }
        }
        if (is_max) result.maxima.push_back(i);
        if (is_min) result.minima.push_back(i);
    }
    result.steep_index =
        static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
    return result;
}

std::vector<InhibitionCandidate> moving_mean_filter(const IntervalCurve& curve,
                                                    std::span<const std::size_t> minima,
                                                    double delta_k) {
    if (!(delta_k > 0.0)) throw ConfigError("moving-mean lookback must be positive");
    const std::size_t w = static_cast<std::size_t>(std::ceil(delta_k / curve.width));
    std::vector<InhibitionCandidate> kept;
    for (std::size_t i : minima) {
        if (i == 0) {
            kept.push_back({curve.start(i), i, true});
            continue;
        }
        std::size_t begin = i > w ? i - w : 0;
        double sum = 0.0;
        for (std::size_t j = begin; j < i; ++j) sum += curve.values[j];
        double mean = sum / static_cast<double>(i - begin);
        if (curve.values[i] < mean) {
            kept.push_back({curve.start(i), i, false});
        }
    }
    return kept;
}

namespace {

double cumulative_size_at(const Cascade& cascade, double t) {
    auto it = std::upper_bound(cascade.events.begin(), cascade.events.end(), t,
                               [](double value, const ReshareEvent& e) { return value < e.time; });
    return static_cast<double>(it - cascade.events.begin());
}

}  // namespace

CascadeDetection detect_cascade(const Cascade& cascade, const HistoryGraph& history,
                                const DetectConfig& config) {
    HawkesCurve curve = intensity(cascade, history, config.kernel, config.p, config.alpha);
    IntervalCurve ic = interval_curve(curve, cascade.span(), config.alpha);
    ExtremaResult extrema = find_extrema(ic);
    std::vector<InhibitionCandidate> filtered =
        moving_mean_filter(ic, extrema.minima, config.delta_k);

    CascadeDetection det;
    det.cascade_id = cascade.id;
    det.steep_index = extrema.steep_index;
    det.t_steep = ic.start(extrema.steep_index);
    det.interval_width = ic.width;
    det.span = cascade.span();
    det.size_at_steep = cumulative_size_at(cascade, det.t_steep);
    // only minima after the steep onset can mark inhibition; earlier dips
    // would put negative gaps into the Poisson pools
    for (const InhibitionCandidate& c : filtered) {
        if (c.interval_index > extrema.steep_index) {
            det.candidates.push_back(c);
            det.size_at_candidate.push_back(cumulative_size_at(cascade, c.time));
        }
    }
    return det;
}

double fit_poisson_rate(std::span<const double> pool) {
    if (pool.empty()) throw CalibrationError("empty observation pool");
    double mean = 0.0;
    for (double x : pool) {
        if (!(x >= 0.0)) throw CalibrationError("Poisson pool observations must be nonnegative");
        mean += x;
    }
    mean /= static_cast<double>(pool.size());
    if (mean == 0.0) return 0.0;

    double lgamma_term = 0.0;
    for (double x : pool) lgamma_term += stats::log_gamma(x + 1.0);
    lgamma_term /= static_cast<double>(pool.size());

    auto nll = [&](std::span<const double> beta) {
        double b = beta[0];
        if (!(b > 0.0)) return std::numeric_limits<double>::infinity();
        return b - mean * std::log(b) + lgamma_term;
    };
    stats::NelderMeadOptions options;
    options.tolerance = 1e-12;
    options.max_iterations = 500;
    options.steps = {std::max(0.05 * mean, 1e-4)};
    double start[] = {mean};
    auto fit = stats::nelder_mead(nll, start, options);
    return fit.argmin[0];
}

ThresholdParams calibrate_thresholds(std::span<const CascadeDetection> corpus) {
    std::vector<double> gap_pool;
    std::vector<double> growth_pool;
    for (const CascadeDetection& det : corpus) {
        for (std::size_t k = 0; k < det.candidates.size(); ++k) {
            gap_pool.push_back(det.candidates[k].time - det.t_steep);
            growth_pool.push_back(det.size_at_candidate[k] / det.size_at_steep);
        }
    }
    if (gap_pool.empty()) {
        throw CalibrationError("no inhibition candidates in corpus, cannot calibrate");
    }
    ThresholdParams params;
    params.beta_tg = fit_poisson_rate(gap_pool);
    params.beta_g = fit_poisson_rate(growth_pool);
    params.tg_p = params.beta_tg;
    params.g_p = params.beta_g;
    return params;
}

EventTimes finalize_inhibition(const CascadeDetection& detection,
                               const ThresholdParams& thresholds, double t_th) {
    EventTimes times;
    times.cascade_id = detection.cascade_id;
    times.t_steep = detection.t_steep;
    times.candidates = detection.candidates;
    times.type = detection.t_steep <= t_th ? CascadeType::TypeI : CascadeType::Other;
    for (std::size_t k = 0; k < detection.candidates.size(); ++k) {
        double gap = detection.candidates[k].time - detection.t_steep;
        double growth = detection.size_at_candidate[k] / detection.size_at_steep;
        if (gap > thresholds.tg_p && growth > thresholds.g_p) {
            times.t_inhib = detection.candidates[k].time;
            break;
        }
    }
    return times;
}

std::vector<SensitivityRow> alpha_sensitivity(std::span<const Cascade> cascades,
                                              const HistoryGraph& history,
                                              const DetectConfig& base,
                                              std::span<const double> grid, int threads) {
    std::vector<SensitivityRow> rows;
    const std::int64_t n = static_cast<std::int64_t>(cascades.size());
    const int team = resolve_threads(threads);
    for (double alpha : grid) {
        DetectConfig config = base;
        config.alpha = alpha;
        std::vector<std::optional<CascadeDetection>> results(cascades.size());
#pragma omp parallel for schedule(dynamic) num_threads(team)
        for (std::int64_t i = 0; i < n; ++i) {
            try {
                results[i] = detect_cascade(cascades[i], history, config);
            } catch (const Error&) {
                results[i] = std::nullopt;
            }
        }
        SensitivityRow row;
        row.alpha = alpha;
        std::vector<CascadeDetection> detections;
        for (auto& r : results) {
            if (r) {
                detections.push_back(std::move(*r));
                row.analyzed += 1;
            } else {
                row.skipped += 1;
            }
        }
        try {
            ThresholdParams params = calibrate_thresholds(detections);
            row.beta_tg = params.beta_tg;
            row.beta_g = params.beta_g;
        } catch (const CalibrationError&) {
            row.beta_tg = std::numeric_limits<double>::quiet_NaN();
            row.beta_g = std::numeric_limits<double>::quiet_NaN();
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace lifecast::hawkes
