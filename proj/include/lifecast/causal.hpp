#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace lifecast::causal {

/// 5% critical value for the unit-root t statistic with a constant term.
inline constexpr double kAdfCritical = -2.86;

struct AdfResult {
    double statistic = 0.0;
    int lag_order = 0;   // differenced lags chosen by AIC
    bool stationary = false;
    std::size_t rows = 0;
};

/// Augmented Dickey-Fuller test with constant:
///   dx_t = c + gamma x_{t-1} + sum_i phi_i dx_{t-i} + e_t.
/// The lag count is picked from 0..max_lag by AIC on the sample rows all
/// candidates share; the reported statistic comes from that same sample.
/// Throws TooShortError for short series and CollinearityError for
/// constant-like series.
AdfResult adf_test(std::span<const double> x, int max_lag = 3);

struct StationaryResult {
    std::vector<double> x;
    std::vector<double> y;
    bool x_differenced = false;
    bool y_differenced = false;
    AdfResult x_adf;
    AdfResult y_adf;
};

/// Tests both series; a nonstationary one is replaced by its first
/// difference, and the partner drops its first point to stay aligned.
/// At most one differencing round is applied.
StationaryResult prepare_stationary(std::span<const double> x, std::span<const double> y,
                                    int max_lag = 3);

inline constexpr int kDefaultMaxVarOrder = 5;

/// Joint lag order for the (x, y) system, chosen from 1..max_order by AIC
/// over the regression rows every candidate shares. Ties take the smaller
/// order. Requires at least 3 * (max_order + 1) points.
int select_var_order(std::span<const double> x, std::span<const double> y,
                     int max_order = kDefaultMaxVarOrder);

inline constexpr double kCausalPValue = 0.05;

struct GrangerResult {
    double f_statistic = 0.0;
    double p_value = 1.0;
    bool causal = false;
    bool perfect_fit = false;  // full-model residual collapsed to zero
    int lag_order = 0;
    std::size_t rows = 0;
    double rss_restricted = 0.0;
    double rss_full = 0.0;
};

/// Tests whether lags of `driver` improve the autoregression of `target`:
/// restricted model = intercept + target lags, full model adds driver lags,
/// both on the same rows. A full model with (near) zero residual is flagged
/// and reported causal with p = 0. Requires rows >= 2 * lag_order + 5.
GrangerResult granger_test(std::span<const double> target, std::span<const double> driver,
                           int lag_order);

struct ForecastResult {
    double predicted_driver_only = 0.0;  // intercept + driver lags
    double predicted_full = 0.0;         // intercept + target lags + driver lags
    double actual = 0.0;
    int lag_order = 0;
    std::size_t train_rows = 0;
};

/// One-step forecast of the final target point. Models train on rows
/// p .. L-p-2, holding out the last p+1 target rows, then predict index
/// L-1 from observed lags. Requires L >= 2 * (lag_order + 1).
ForecastResult forecast_last(std::span<const double> target, std::span<const double> driver,
                             int lag_order);

}  // namespace lifecast::causal
