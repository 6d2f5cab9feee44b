#include "lifecast/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace lifecast::stats {

double compensated_sum(std::span<const double> values) {
    double sum = 0.0;
    double comp = 0.0;
    for (double x : values) {
        double t = sum + x;
        if (std::abs(sum) >= std::abs(x)) {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    return sum + comp;
}

LeastSquaresFit ols(const Matrix& design, std::span<const double> target) {
    const std::size_t m = design.rows;
    const std::size_t n = design.cols;
    if (n == 0 || m < n) {
        throw CollinearityError("least squares: need at least as many rows as columns");
    }
    if (target.size() != m) {
        throw Error("least squares: target length does not match design rows");
    }

    Matrix r = design;
    std::vector<double> qty(target.begin(), target.end());

    // Householder sweep; reflectors are applied to the target on the fly.
    for (std::size_t k = 0; k < n; ++k) {
        double norm = 0.0;
        for (std::size_t i = k; i < m; ++i) norm = std::hypot(norm, r(i, k));
        if (norm == 0.0) {
            throw CollinearityError("least squares: rank-deficient design");
        }
        double alpha = r(k, k) > 0 ? -norm : norm;
        std::vector<double> v(m - k);
        v[0] = r(k, k) - alpha;
        for (std::size_t i = k + 1; i < m; ++i) v[i - k] = r(i, k);
        double vtv = 0.0;
        for (double vi : v) vtv += vi * vi;
        r(k, k) = alpha;
        for (std::size_t i = k + 1; i < m; ++i) r(i, k) = 0.0;
        if (vtv == 0.0) continue;
        for (std::size_t j = k + 1; j < n; ++j) {
            double dot = 0.0;
            for (std::size_t i = k; i < m; ++i) dot += v[i - k] * r(i, j);
            double scale = 2.0 * dot / vtv;
            for (std::size_t i = k; i < m; ++i) r(i, j) -= scale * v[i - k];
        }
        double dot = 0.0;
        for (std::size_t i = k; i < m; ++i) dot += v[i - k] * qty[i];
        double scale = 2.0 * dot / vtv;
        for (std::size_t i = k; i < m; ++i) qty[i] -= scale * v[i - k];
    }

    double diag_max = 0.0;
    for (std::size_t k = 0; k < n; ++k) diag_max = std::max(diag_max, std::abs(r(k, k)));
    for (std::size_t k = 0; k < n; ++k) {
        if (std::abs(r(k, k)) < 1e-10 * diag_max) {
            throw CollinearityError("least squares: rank-deficient design");
        }
    }

    LeastSquaresFit fit;
    fit.n_obs = m;
    fit.n_params = n;
    fit.coefficients.assign(n, 0.0);
    for (std::size_t k = n; k-- > 0;) {
        double s = qty[k];
        for (std::size_t j = k + 1; j < n; ++j) s -= r(k, j) * fit.coefficients[j];
        fit.coefficients[k] = s / r(k, k);
    }
    double rss = 0.0;
    for (std::size_t i = n; i < m; ++i) rss += qty[i] * qty[i];
    fit.rss = rss;

    // diag of (X^T X)^-1 = squared row norms of R^-T, one forward solve per column
    fit.cov_unscaled_diag.assign(n, 0.0);
    std::vector<double> w(n);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            double s = (i == j) ? 1.0 : 0.0;
            for (std::size_t k = 0; k < i; ++k) s -= r(k, i) * w[k];
            w[i] = s / r(i, i);
        }
        double sq = 0.0;
        for (std::size_t i = j; i < n; ++i) sq += w[i] * w[i];
        fit.cov_unscaled_diag[j] = sq;
    }
    return fit;
}

double log_gamma(double x) {
    // Lanczos, g = 7, 9 coefficients
    static constexpr double kCoef[9] = {
        0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
        771.32342877765313,   -176.61502916214059,   12.507343278686905,
        -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
    constexpr double pi = std::numbers::pi;
    if (x < 0.5) {
        return std::log(pi / std::sin(pi * x)) - log_gamma(1.0 - x);
    }
    x -= 1.0;
    double acc = kCoef[0];
    double t = x + 7.5;
    for (int i = 1; i < 9; ++i) acc += kCoef[i] / (x + i);
    return 0.5 * std::log(2.0 * pi) + (x + 0.5) * std::log(t) - t + std::log(acc);
}

namespace {

// Continued fraction for the incomplete beta, modified Lentz with the
// standard even/odd term recurrence.
double beta_continued_fraction(double a, double b, double x) {
    constexpr int kMaxTerms = 200;
    constexpr double kEps = 1e-15;
    constexpr double kTiny = 1e-300;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxTerms; ++m) {
        double md = static_cast<double>(m);
        double aa = md * (b - md) * x / ((qam + 2.0 * md) * (a + 2.0 * md));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + md) * (qab + md) * x / ((a + 2.0 * md) * (qap + 2.0 * md));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return h;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double ln_front = a * std::log(x) + b * std::log1p(-x) + log_gamma(a + b) -
                      log_gamma(a) - log_gamma(b);
    double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * beta_continued_fraction(a, b, x) / a;
    }
    return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double f_sf(double x, double d1, double d2) {
    if (!(d1 > 0.0) || !(d2 > 0.0)) {
        throw Error("f_sf: degrees of freedom must be positive");
    }
    if (x <= 0.0) return 1.0;
    double y = d2 / (d2 + d1 * x);
    return regularized_incomplete_beta(d2 / 2.0, d1 / 2.0, y);
}

NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                             std::span<const double> start,
                             const NelderMeadOptions& options) {
    const std::size_t n = start.size();
    if (n == 0) throw Error("nelder_mead: empty start point");

    std::vector<std::vector<double>> pts(n + 1, std::vector<double>(start.begin(), start.end()));
    for (std::size_t i = 0; i < n; ++i) {
        double step;
        if (i < options.steps.size() && options.steps[i] != 0.0) {
            step = options.steps[i];
        } else {
            step = std::abs(start[i]) > 1e-6 ? 0.05 * start[i] : 0.00025;
        }
        pts[i + 1][i] += step;
    }
    std::vector<double> vals(n + 1);
    for (std::size_t i = 0; i <= n; ++i) vals[i] = f(pts[i]);

    auto order = [&] {
        std::vector<std::size_t> idx(n + 1);
        for (std::size_t i = 0; i <= n; ++i) idx[i] = i;
        std::stable_sort(idx.begin(), idx.end(),
                         [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
        std::vector<std::vector<double>> p2(n + 1);
        std::vector<double> v2(n + 1);
        for (std::size_t i = 0; i <= n; ++i) {
            p2[i] = std::move(pts[idx[i]]);
            v2[i] = vals[idx[i]];
        }
        pts = std::move(p2);
        vals = std::move(v2);
    };

    NelderMeadResult result;
    order();
    int iter = 0;
    for (; iter < options.max_iterations; ++iter) {
        if (vals[n] - vals[0] < options.tolerance) {
            result.converged = true;
            break;
        }
        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) centroid[j] += pts[i][j];
        }
        for (double& c : centroid) c /= static_cast<double>(n);

        auto blend = [&](double coef) {
            std::vector<double> p(n);
            for (std::size_t j = 0; j < n; ++j) {
                p[j] = centroid[j] + coef * (centroid[j] - pts[n][j]);
            }
            return p;
        };

        std::vector<double> reflected = blend(1.0);
        double fr = f(reflected);
        if (fr < vals[0]) {
            std::vector<double> expanded = blend(2.0);
            double fe = f(expanded);
            if (fe < fr) {
                pts[n] = std::move(expanded);
                vals[n] = fe;
            } else {
                pts[n] = std::move(reflected);
                vals[n] = fr;
            }
        } else if (fr < vals[n - 1]) {
            pts[n] = std::move(reflected);
            vals[n] = fr;
        } else {
            bool outside = fr < vals[n];
            std::vector<double> contracted = blend(outside ? 0.5 : -0.5);
            double fc = f(contracted);
            if ((outside && fc <= fr) || (!outside && fc < vals[n])) {
                pts[n] = std::move(contracted);
                vals[n] = fc;
            } else {
                for (std::size_t i = 1; i <= n; ++i) {
                    for (std::size_t j = 0; j < n; ++j) {
                        pts[i][j] = pts[0][j] + 0.5 * (pts[i][j] - pts[0][j]);
                    }
                    vals[i] = f(pts[i]);
                }
            }
        }
        order();
    }
    result.argmin = pts[0];
    result.value = vals[0];
    result.iterations = iter;
    return result;
}

PowerIterationResult power_iteration(const Matrix& sym, double tol, int max_iterations) {
    const std::size_t n = sym.rows;
    if (n == 0 || sym.cols != n) throw Error("power_iteration: matrix must be square");

    std::vector<double> v(n, 1.0 / std::sqrt(static_cast<double>(n)));
    std::vector<double> av(n);
    auto matvec = [&](const std::vector<double>& x, std::vector<double>& out) {
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j) s += sym(i, j) * x[j];
            out[i] = s;
        }
    };

    double rayleigh = 0.0;
    for (int it = 0; it < max_iterations; ++it) {
        matvec(v, av);
        rayleigh = 0.0;
        for (std::size_t i = 0; i < n; ++i) rayleigh += v[i] * av[i];
        double resid = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double d = av[i] - rayleigh * v[i];
            resid += d * d;
        }
        if (std::sqrt(resid) < tol) {
            return {rayleigh, v, it};
        }
        // iterate on A + I: keeps strictly dominant magnitude at the top
        // of the spectrum even for bipartite-style +/- pairs
        double norm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            av[i] += v[i];
            norm += av[i] * av[i];
        }
        norm = std::sqrt(norm);
        if (norm == 0.0) {
            return {0.0, v, it};
        }
        for (std::size_t i = 0; i < n; ++i) v[i] = av[i] / norm;
    }
    throw ConvergenceError("power_iteration: residual did not converge", rayleigh);
}

std::vector<double> solve_dense(Matrix a, std::vector<double> b) {
    const std::size_t n = a.rows;
    if (a.cols != n || b.size() != n) throw Error("solve_dense: shape mismatch");
    double scale = 0.0;
    for (double x : a.data) scale = std::max(scale, std::abs(x));
    if (scale == 0.0) scale = 1.0;

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t pivot = k;
        for (std::size_t i = k + 1; i < n; ++i) {
            if (std::abs(a(i, k)) > std::abs(a(pivot, k))) pivot = i;
        }
        if (std::abs(a(pivot, k)) < 1e-13 * scale) {
            throw SingularMatrixError("solve_dense: singular matrix");
        }
        if (pivot != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(pivot, j));
            std::swap(b[k], b[pivot]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            double factor = a(i, k) / a(k, k);
            if (factor == 0.0) continue;
            for (std::size_t j = k; j < n; ++j) a(i, j) -= factor * a(k, j);
            b[i] -= factor * b[k];
        }
    }
    std::vector<double> x(n);
    for (std::size_t k = n; k-- > 0;) {
        double s = b[k];
        for (std::size_t j = k + 1; j < n; ++j) s -= a(k, j) * x[j];
        x[k] = s / a(k, k);
    }
    return x;
}

}  // namespace lifecast::stats
