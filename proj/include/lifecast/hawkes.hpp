#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lifecast/types.hpp"

namespace lifecast::hawkes {

/// Reaction-time kernel h(t): how likely a reshare is to trigger a follower
/// reaction after a gap of t minutes. Normalized to unit mass.
class ReactionKernel {
public:
    enum class Kind { PowerLaw, Histogram };

    /// Constant density up to s0 minutes, power-law decay t^-(1+theta) after.
    static ReactionKernel power_law(double s0 = kDefaultS0, double theta = kDefaultTheta);

    /// Histogram density estimated from observed reaction gaps (minutes).
    static ReactionKernel from_samples(std::span<const double> gaps, std::size_t bins = 200);

    double operator()(double gap) const;
    double mass() const;
    /// Integral of the kernel over [a, b], 0 <= a <= b.
    double mass_between(double a, double b) const;
    Kind kind() const { return kind_; }
    double s0() const { return s0_; }
    double theta() const { return theta_; }

    static constexpr double kDefaultS0 = 5.0;      // minutes
    static constexpr double kDefaultTheta = 0.242;

private:
    Kind kind_ = Kind::PowerLaw;
    double s0_ = kDefaultS0;
    double theta_ = kDefaultTheta;
    double scale_ = 0.0;      // power-law normalization constant
    double bin_width_ = 0.0;  // histogram mode
    std::vector<double> density_;
};

/// Point intensity at each reshare time.
struct HawkesCurve {
    std::vector<double> times;
    std::vector<double> values;
};

/// Influence weight n_i per event: the source's degree in the history graph,
/// falling back to the source's cascade degree accumulated so far when the
/// history graph does not know the node.
std::vector<double> event_weights(const Cascade& cascade, const HistoryGraph& history);

/// Self-exciting intensity H[t_j] = p * sum over prior events within the
/// sliding window [t_j - dt_j, t_j], dt_j = alpha * e^(t_j / span), of
/// n_i * h(t_j - t_i). The first event has an empty window and intensity 0.
/// Events outside the window are located by bisection instead of rescanning
/// the full prefix; entries are independent, so the loop is OpenMP-parallel.
HawkesCurve intensity(const Cascade& cascade, const HistoryGraph& history,
                      const ReactionKernel& kernel, double p = 1.0, double alpha = 5.0);

/// Intensity summed over fixed intervals of width K = alpha * ln(span)
/// tiling [0, span]; interval i covers [i*K, (i+1)*K). Every point lands in
/// exactly one interval.
struct IntervalCurve {
    double width = 0.0;
    std::vector<double> values;
    double start(std::size_t i) const { return width * static_cast<double>(i); }
};

IntervalCurve interval_curve(const HawkesCurve& curve, double span, double alpha = 5.0);

/// Local extrema against neighbor offsets {1, 2, 3}. An index qualifies only
/// with at least one neighbor on each side; offsets past the boundary are
/// skipped. The steep index is the global argmax (earliest on ties) and does
/// not require local-maximum status.
struct ExtremaResult {
    std::size_t steep_index = 0;
    std::vector<std::size_t> maxima;
    std::vector<std::size_t> minima;
};

ExtremaResult find_extrema(const IntervalCurve& curve);

/// A local minimum that survived the trailing moving-mean filter.
struct InhibitionCandidate {
    double time = 0.0;  // interval start, minutes
    std::size_t interval_index = 0;
    bool lookback_empty = false;  // kept without a mean comparison
};

/// Keeps minima whose interval value drops strictly below the mean of the
/// prior ceil(delta_k / width) intervals (current interval excluded).
std::vector<InhibitionCandidate> moving_mean_filter(const IntervalCurve& curve,
                                                    std::span<const std::size_t> minima,
                                                    double delta_k = 300.0);

struct DetectConfig {
    double alpha = 5.0;
    double p = 1.0;
    double delta_k = 300.0;      // moving-mean lookback, minutes
    double t_th = 5000.0;        // steep-onset threshold separating type I cascades
    ReactionKernel kernel = ReactionKernel::power_law();
};

/// Steep onset plus the filtered inhibition candidates after it, with the
/// cumulative cascade sizes the threshold calibration needs.
struct CascadeDetection {
    std::string cascade_id;
    double t_steep = 0.0;
    std::size_t steep_index = 0;
    std::vector<InhibitionCandidate> candidates;
    double size_at_steep = 0.0;           // events with time <= t_steep
    std::vector<double> size_at_candidate;
    double interval_width = 0.0;
    double span = 0.0;
};

CascadeDetection detect_cascade(const Cascade& cascade, const HistoryGraph& history,
                                const DetectConfig& config);

/// Poisson maximum likelihood rate for a pool of nonnegative observations,
/// found by Nelder-Mead on the negative log likelihood (factorials extended
/// through the gamma function for non-integer observations).
double fit_poisson_rate(std::span<const double> pool);

// Threshold defaults from a large-corpus calibration; used when no corpus
// calibration is requested.
inline constexpr double kDefaultTimeGapThreshold = 4171.25;  // minutes
inline constexpr double kDefaultGrowthThreshold = 4.25;

struct ThresholdParams {
    double tg_p = kDefaultTimeGapThreshold;
    double g_p = kDefaultGrowthThreshold;
    double beta_tg = kDefaultTimeGapThreshold;  // fitted Poisson means
    double beta_g = kDefaultGrowthThreshold;
};

/// Pools time gaps (candidate - t_steep) and growth ratios
/// (size[candidate] / size[t_steep]) across the corpus and fits each pool
/// to a Poisson rate. Throws CalibrationError on an empty pool.
ThresholdParams calibrate_thresholds(std::span<const CascadeDetection> corpus);

enum class CascadeType { TypeI, Other };

struct EventTimes {
    std::string cascade_id;
    double t_steep = 0.0;
    std::vector<InhibitionCandidate> candidates;
    std::optional<double> t_inhib;
    CascadeType type = CascadeType::TypeI;
};

/// Picks the earliest candidate whose time gap and growth ratio both strictly
/// exceed the thresholds; absent when none qualifies. Type is TypeI when
/// t_steep <= t_th.
EventTimes finalize_inhibition(const CascadeDetection& detection,
                               const ThresholdParams& thresholds, double t_th = 5000.0);

inline constexpr double kAlphaGrid[] = {1.0, 3.0, 5.0, 7.0, 10.0, 15.0};

struct SensitivityRow {
    double alpha = 0.0;
    double beta_tg = 0.0;
    double beta_g = 0.0;
    std::size_t analyzed = 0;
    std::size_t skipped = 0;
};

/// Reruns detection and calibration for each alpha in the grid. Cascades that
/// fail detection at a given alpha are skipped and counted; an alpha whose
/// candidate pool ends up empty reports NaN betas.
std::vector<SensitivityRow> alpha_sensitivity(std::span<const Cascade> cascades,
                                              const HistoryGraph& history,
                                              const DetectConfig& base,
                                              std::span<const double> grid,
                                              int threads = 0);

}  // namespace lifecast::hawkes
