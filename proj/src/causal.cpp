#include "lifecast/causal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "lifecast/errors.hpp"
#include "lifecast/stats.hpp"

namespace lifecast::causal {

namespace {

std::vector<double> first_difference(std::span<const double> x) {
    std::vector<double> dx(x.size() > 0 ? x.size() - 1 : 0);
    for (std::size_t t = 1; t < x.size(); ++t) dx[t - 1] = x[t] - x[t - 1];
    return dx;
}

}  // namespace

AdfResult adf_test(std::span<const double> x, int max_lag) {
    if (max_lag < 0) throw ConfigError("adf max_lag must be nonnegative");
    const std::size_t n = x.size();
    const std::size_t qmax = static_cast<std::size_t>(max_lag);
    // shared sample must leave at least one residual degree of freedom at
    // the largest candidate lag
    if (n < 2 * qmax + 4) {
        throw TooShortError("adf needs at least " + std::to_string(2 * qmax + 4) +
                            " points, have " + std::to_string(n));
    }
    std::vector<double> dx = first_difference(x);
    const std::size_t m = n - 1 - qmax;

    double best_aic = std::numeric_limits<double>::infinity();
    AdfResult best;
    for (std::size_t q = 0; q <= qmax; ++q) {
        const std::size_t params = q + 2;
        stats::Matrix design(m, params);
        std::vector<double> target(m);
        for (std::size_t r = 0; r < m; ++r) {
            const std::size_t t = qmax + r;  // dx[t] = x[t+1] - x[t]
            target[r] = dx[t];
            design(r, 0) = 1.0;
            design(r, 1) = x[t];  // level lagged once relative to the dependent
            for (std::size_t i = 1; i <= q; ++i) design(r, 1 + i) = dx[t - i];
        }
        auto fit = stats::ols(design, target);
        const double aic = std::log(fit.rss / static_cast<double>(m)) +
                           2.0 * static_cast<double>(params) / static_cast<double>(m);
        if (aic < best_aic) {
            best_aic = aic;
            const double dof = static_cast<double>(m - params);
            const double se = std::sqrt(fit.rss / dof * fit.cov_unscaled_diag[1]);
            best.statistic = fit.coefficients[1] / se;
            best.lag_order = static_cast<int>(q);
            best.rows = m;
        }
    }
    best.stationary = best.statistic < kAdfCritical;
    return best;
}

StationaryResult prepare_stationary(std::span<const double> x, std::span<const double> y,
                                    int max_lag) {
    StationaryResult result;
    result.x_adf = adf_test(x, max_lag);
    result.y_adf = adf_test(y, max_lag);
    result.x_differenced = !result.x_adf.stationary;
    result.y_differenced = !result.y_adf.stationary;
    const bool any = result.x_differenced || result.y_differenced;
    if (result.x_differenced) {
        result.x = first_difference(x);
    } else {
        result.x.assign(any ? x.begin() + 1 : x.begin(), x.end());
    }
    if (result.y_differenced) {
        result.y = first_difference(y);
    } else {
        result.y.assign(any ? y.begin() + 1 : y.begin(), y.end());
    }
    return result;
}

int select_var_order(std::span<const double> x, std::span<const double> y, int max_order) {
    if (max_order < 1) throw ConfigError("var order selection needs max_order >= 1");
    if (x.size() != y.size()) throw ConfigError("var order selection needs equal-length series");
    const std::size_t pmax = static_cast<std::size_t>(max_order);
    const std::size_t n = x.size();
    if (n < 3 * (pmax + 1)) {
        throw TooShortError("var order selection needs at least " +
                            std::to_string(3 * (pmax + 1)) + " points, have " +
                            std::to_string(n));
    }
    const std::size_t m = n - pmax;  // rows shared by every candidate order

    double best_aic = std::numeric_limits<double>::infinity();
    int best_order = 1;
    for (std::size_t p = 1; p <= pmax; ++p) {
        const std::size_t params = 2 * p + 1;
        stats::Matrix design(m, params);
        std::vector<double> tx(m);
        std::vector<double> ty(m);
        for (std::size_t r = 0; r < m; ++r) {
            const std::size_t t = pmax + r;
            tx[r] = x[t];
            ty[r] = y[t];
            design(r, 0) = 1.0;
            for (std::size_t i = 1; i <= p; ++i) {
                design(r, i) = x[t - i];
                design(r, p + i) = y[t - i];
            }
        }
        auto fit_x = stats::ols(design, tx);
        auto fit_y = stats::ols(design, ty);
        // cross-residual covariance for the determinant term
        double cross = 0.0;
        {
            std::vector<double> ex(m, 0.0);
            std::vector<double> ey(m, 0.0);
            for (std::size_t r = 0; r < m; ++r) {
                double px = 0.0;
                double py = 0.0;
                for (std::size_t c = 0; c < params; ++c) {
                    px += design(r, c) * fit_x.coefficients[c];
                    py += design(r, c) * fit_y.coefficients[c];
                }
                ex[r] = tx[r] - px;
                ey[r] = ty[r] - py;
                cross += ex[r] * ey[r];
            }
        }
        const double md = static_cast<double>(m);
        const double det = (fit_x.rss / md) * (fit_y.rss / md) - (cross / md) * (cross / md);
        const double log_det = det > 1e-300 ? std::log(det) : -std::numeric_limits<double>::infinity();
        const double aic = log_det + 2.0 * static_cast<double>(2 * params) / md;
        if (aic < best_aic) {
            best_aic = aic;
            best_order = static_cast<int>(p);
        }
    }
    return best_order;
}

GrangerResult granger_test(std::span<const double> target, std::span<const double> driver,
                           int lag_order) {
    if (lag_order < 1) throw ConfigError("granger test needs lag_order >= 1");
    if (target.size() != driver.size()) throw ConfigError("granger test needs equal-length series");
    const std::size_t p = static_cast<std::size_t>(lag_order);
    const std::size_t n = target.size();
    if (n < p) throw TooShortError("granger test series shorter than the lag order");
    const std::size_t m = n - p;
    if (m < 2 * p + 5) {
        throw TooShortError("granger test needs at least " + std::to_string(3 * p + 5) +
                            " points for lag order " + std::to_string(p));
    }

    stats::Matrix restricted(m, p + 1);
    stats::Matrix full(m, 2 * p + 1);
    std::vector<double> dep(m);
    for (std::size_t r = 0; r < m; ++r) {
        const std::size_t t = p + r;
        dep[r] = target[t];
        restricted(r, 0) = 1.0;
        full(r, 0) = 1.0;
        for (std::size_t i = 1; i <= p; ++i) {
            restricted(r, i) = target[t - i];
            full(r, i) = target[t - i];
            full(r, p + i) = driver[t - i];
        }
    }
    auto fit_r = stats::ols(restricted, dep);
    auto fit_f = stats::ols(full, dep);

    GrangerResult result;
    result.lag_order = lag_order;
    result.rows = m;
    result.rss_restricted = fit_r.rss;
    result.rss_full = fit_f.rss;

    double mean = 0.0;
    for (double v : dep) mean += v;
    mean /= static_cast<double>(m);
    double tss = 0.0;
    for (double v : dep) tss += (v - mean) * (v - mean);
    if (fit_f.rss <= 1e-12 * std::max(1.0, tss)) {
        result.perfect_fit = true;
        result.causal = true;
        result.p_value = 0.0;
        result.f_statistic = std::numeric_limits<double>::infinity();
        return result;
    }

    const double dof = static_cast<double>(m - 2 * p - 1);
    result.f_statistic = ((fit_r.rss - fit_f.rss) / static_cast<double>(p)) / (fit_f.rss / dof);
    result.p_value = stats::f_sf(result.f_statistic, static_cast<double>(p), dof);
    result.causal = result.p_value < kCausalPValue;
    return result;
}

ForecastResult forecast_last(std::span<const double> target, std::span<const double> driver,
                             int lag_order) {
    if (lag_order < 1) throw ConfigError("forecast needs lag_order >= 1");
    if (target.size() != driver.size()) throw ConfigError("forecast needs equal-length series");
    const std::size_t p = static_cast<std::size_t>(lag_order);
    const std::size_t n = target.size();
    if (n < 2 * (p + 1)) {
        throw TooShortError("forecast needs at least " + std::to_string(2 * (p + 1)) +
                            " points for lag order " + std::to_string(p));
    }
    const std::size_t last_train = n - p - 2;  // holds out the last p+1 target rows
    const std::size_t m = last_train - p + 1;

    stats::Matrix driver_only(m, p + 1);
    stats::Matrix full(m, 2 * p + 1);
    std::vector<double> dep(m);
    for (std::size_t r = 0; r < m; ++r) {
        const std::size_t t = p + r;
        dep[r] = target[t];
        driver_only(r, 0) = 1.0;
        full(r, 0) = 1.0;
        for (std::size_t i = 1; i <= p; ++i) {
            driver_only(r, i) = driver[t - i];
            full(r, i) = target[t - i];
            full(r, p + i) = driver[t - i];
        }
    }
    auto fit_d = stats::ols(driver_only, dep);
    auto fit_f = stats::ols(full, dep);

    ForecastResult result;
    result.lag_order = lag_order;
    result.train_rows = m;
    result.actual = target[n - 1];
    result.predicted_driver_only = fit_d.coefficients[0];
    result.predicted_full = fit_f.coefficients[0];
    for (std::size_t i = 1; i <= p; ++i) {
        result.predicted_driver_only += fit_d.coefficients[i] * driver[n - 1 - i];
        result.predicted_full += fit_f.coefficients[i] * target[n - 1 - i];
        result.predicted_full += fit_f.coefficients[p + i] * driver[n - 1 - i];
    }
    return result;
}

}  // namespace lifecast::causal
