#include "lifecast/reference.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>

#include "lifecast/errors.hpp"

namespace lifecast::reference {

hawkes::HawkesCurve intensity_quadratic(const Cascade& cascade, const HistoryGraph& history,
                                        const hawkes::ReactionKernel& kernel, double p,
                                        double alpha) {
    if (cascade.events.empty()) throw DegenerateCascadeError("empty cascade");
    const double span = cascade.span();
    if (!(span > 0.0)) {
        throw DegenerateCascadeError("cascade " + cascade.id + ": zero observation span");
    }
    const std::size_t n = cascade.events.size();
    hawkes::HawkesCurve curve;
    curve.times.resize(n);
    curve.values.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) curve.times[i] = cascade.events[i].time;
    const std::vector<double> weights = hawkes::event_weights(cascade, history);
    for (std::size_t j = 0; j < n; ++j) {
        const double tj = curve.times[j];
        const double window = alpha * std::exp(tj / span);
        double sum = 0.0;
        for (std::size_t i = 0; i < j; ++i) {
            if (tj - curve.times[i] > window) continue;
            double gap = tj - curve.times[i];
            double term = weights[i] * kernel(gap);
            sum += term;
        }
        curve.values[j] = p * sum;
    }
    return curve;
}

hawkes::IntervalCurve bin_sums_by_scan(const hawkes::HawkesCurve& curve, double span,
                                       double alpha) {
    if (!(span > 1.0)) {
        throw DegenerateCascadeError("interval curve needs a span above one minute");
    }
    hawkes::IntervalCurve ic;
    ic.width = alpha * std::log(span);
    const std::size_t bins = static_cast<std::size_t>(span / ic.width) + 1;
    ic.values.assign(bins, 0.0);
    for (std::size_t b = 0; b < bins; ++b) {
        for (std::size_t i = 0; i < curve.times.size(); ++i) {
            const std::size_t idx =
                std::min(bins - 1, static_cast<std::size_t>(curve.times[i] / ic.width));
            if (idx == b) ic.values[b] += curve.values[i];
        }
    }
    return ic;
}

std::vector<double> degree_by_edge_count(const metrics::WindowGraph& g) {
    std::vector<double> scores(g.size(), 0.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        std::size_t count = 0;
        for (std::size_t j = 0; j < g.size(); ++j) {
            if (j != i && g.has_edge(i, j)) ++count;
        }
        scores[i] = static_cast<double>(count);
    }
    return scores;
}

std::vector<double> entropy_direct(const metrics::WindowGraph& g) {
    std::vector<double> scores(g.size(), 0.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const long double ki = static_cast<long double>(g.degree(i));
        if (ki <= 1.0L) continue;
        long double h = 0.0L;
        for (std::size_t j = 0; j < g.size(); ++j) {
            if (j == i || !g.has_edge(i, j)) continue;
            const long double share = static_cast<long double>(g.degree(j)) / ki;
            h -= share * std::log(share);
        }
        scores[i] = h > 0.0L ? static_cast<double>(h) : 0.0;
    }
    return scores;
}

std::vector<double> clustering_triples(const metrics::WindowGraph& g) {
    std::vector<double> scores(g.size(), 0.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const std::size_t k = g.degree(i);
        if (k < 2) continue;
        std::size_t closed = 0;
        std::size_t open = 0;
        for (std::size_t a = 0; a < g.size(); ++a) {
            for (std::size_t b = a + 1; b < g.size(); ++b) {
                if (a == i || b == i) continue;
                if (!g.has_edge(i, a) || !g.has_edge(i, b)) continue;
                ++open;
                if (g.has_edge(a, b)) ++closed;
            }
        }
        scores[i] = static_cast<double>(closed) / static_cast<double>(open);
    }
    return scores;
}

namespace {

// Gauss-Jordan solve of a dense system; the reference path avoids the
// library's LU routine on purpose.
std::vector<double> gauss_jordan(stats::Matrix a, std::vector<double> b) {
    const std::size_t n = a.rows;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
        }
        if (std::abs(a(pivot, col)) < 1e-12) throw SingularMatrixError("reference solve: singular");
        if (pivot != col) {
            for (std::size_t c = 0; c < n; ++c) std::swap(a(pivot, c), a(col, c));
            std::swap(b[pivot], b[col]);
        }
        const double inv = 1.0 / a(col, col);
        for (std::size_t c = 0; c < n; ++c) a(col, c) *= inv;
        b[col] *= inv;
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double factor = a(r, col);
            if (factor == 0.0) continue;
            for (std::size_t c = 0; c < n; ++c) a(r, c) -= factor * a(col, c);
            b[r] -= factor * b[col];
        }
    }
    return b;
}

}  // namespace

std::vector<double> pagerank_dense(const metrics::WindowGraph& g, double damping) {
    const std::size_t n = g.size();
    if (n == 0) return {};
    stats::Matrix system(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double transition = 0.0;
            if (g.degree(j) == 0) {
                transition = 1.0 / static_cast<double>(n);
            } else if (g.has_edge(j, i)) {
                transition = 1.0 / static_cast<double>(g.degree(j));
            }
            system(i, j) = (i == j ? 1.0 : 0.0) - damping * transition;
        }
    }
    std::vector<double> rhs(n, (1.0 - damping) / static_cast<double>(n));
    return gauss_jordan(std::move(system), std::move(rhs));
}

namespace {

struct PathCounts {
    std::vector<long long> dist;
    std::vector<double> sigma;
};

PathCounts bfs_counts(const metrics::WindowGraph& g, std::size_t source) {
    PathCounts pc;
    pc.dist.assign(g.size(), -1);
    pc.sigma.assign(g.size(), 0.0);
    pc.dist[source] = 0;
    pc.sigma[source] = 1.0;
    std::queue<std::size_t> frontier;
    frontier.push(source);
    while (!frontier.empty()) {
        const std::size_t v = frontier.front();
        frontier.pop();
        for (std::size_t w : g.neighbors(v)) {
            if (pc.dist[w] < 0) {
                pc.dist[w] = pc.dist[v] + 1;
                frontier.push(w);
            }
            if (pc.dist[w] == pc.dist[v] + 1) pc.sigma[w] += pc.sigma[v];
        }
    }
    return pc;
}

}  // namespace

std::vector<double> betweenness_path_counts(const metrics::WindowGraph& g) {
    const std::size_t n = g.size();
    std::vector<PathCounts> from(n);
    for (std::size_t s = 0; s < n; ++s) from[s] = bfs_counts(g, s);
    std::vector<double> scores(n, 0.0);
    for (std::size_t s = 0; s < n; ++s) {
        for (std::size_t t = s + 1; t < n; ++t) {
            if (from[s].dist[t] < 0) continue;
            const double total = from[s].sigma[t];
            for (std::size_t v = 0; v < n; ++v) {
                if (v == s || v == t) continue;
                if (from[s].dist[v] < 0 || from[t].dist[v] < 0) continue;
                if (from[s].dist[v] + from[t].dist[v] != from[s].dist[t]) continue;
                scores[v] += from[s].sigma[v] * from[t].sigma[v] / total;
            }
        }
    }
    return scores;
}

double largest_eigenvalue_jacobi(const stats::Matrix& sym) {
    const std::size_t n = sym.rows;
    if (n == 0) return 0.0;
    stats::Matrix a = sym;
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        }
        if (off < 1e-26) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (a(p, q) == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    double largest = a(0, 0);
    for (std::size_t i = 1; i < n; ++i) largest = std::max(largest, a(i, i));
    return largest;
}

std::vector<double> alpha_centrality_inverse(const metrics::WindowGraph& g, double fraction) {
    if (!(fraction >= 0.0) || fraction >= 1.0) {
        throw ConfigError("alpha centrality fraction must lie in [0, 1)");
    }
    const std::size_t n = g.size();
    std::vector<double> ones(n, 1.0);
    if (n == 0 || fraction == 0.0) return ones;
    stats::Matrix adj(n, n);
    bool any = false;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j : g.neighbors(i)) {
            adj(i, j) = 1.0;
            any = true;
        }
    }
    if (!any) return ones;
    const double lambda = largest_eigenvalue_jacobi(adj);
    if (!(lambda > 1e-12)) return ones;
    const double alpha = fraction / lambda;
    // explicit inverse, column by column
    stats::Matrix inverse(n, n);
    for (std::size_t col = 0; col < n; ++col) {
        stats::Matrix system(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                system(i, j) = (i == j ? 1.0 : 0.0) - alpha * adj(i, j);
            }
        }
        std::vector<double> unit(n, 0.0);
        unit[col] = 1.0;
        std::vector<double> column = gauss_jordan(std::move(system), std::move(unit));
        for (std::size_t i = 0; i < n; ++i) inverse(i, col) = column[i];
    }
    std::vector<double> scores(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) scores[i] += inverse(i, j);
    }
    return scores;
}

std::vector<double> ols_normal_equations(const stats::Matrix& design,
                                         std::span<const double> target) {
    const std::size_t k = design.cols;
    stats::Matrix gram(k, k);
    std::vector<double> moment(k, 0.0);
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = 0; b < k; ++b) {
            double s = 0.0;
            for (std::size_t r = 0; r < design.rows; ++r) s += design(r, a) * design(r, b);
            gram(a, b) = s;
        }
        double s = 0.0;
        for (std::size_t r = 0; r < design.rows; ++r) s += design(r, a) * target[r];
        moment[a] = s;
    }
    return gauss_jordan(std::move(gram), std::move(moment));
}

namespace {

double simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm,
               double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol) {
        return left + right + (left + right - whole) / 15.0;
    }
    return simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol) {
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson(f, a, b, fa, fm, fb, whole, tol, 40);
}

}  // namespace

double f_upper_tail_quadrature(double x, double d1, double d2) {
    if (x <= 0.0) return 1.0;
    const double a = 0.5 * d2;
    const double b = 0.5 * d1;
    const double u = d2 / (d2 + d1 * x);
    const double log_beta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
    // The normalized density goes inside the integrand so the tolerance is
    // absolute with respect to the returned probability.
    if (a < 1.0) {
        // t = v^2 absorbs the t^(a-1) endpoint singularity (a = 1/2 when the
        // denominator has a single degree of freedom)
        auto integrand = [&](double v) {
            if (v <= 0.0) {
                return a == 0.5 ? 2.0 * std::exp(-log_beta) : 0.0;
            }
            const double t = v * v;
            return 2.0 * std::exp((2.0 * a - 1.0) * std::log(v) +
                                  (b - 1.0) * std::log1p(-t) - log_beta);
        };
        return adaptive_simpson(integrand, 0.0, std::sqrt(u), 1e-13);
    }
    auto integrand = [&](double t) {
        if (t <= 0.0) return a == 1.0 ? std::exp(-log_beta) : 0.0;
        return std::exp((a - 1.0) * std::log(t) + (b - 1.0) * std::log1p(-t) - log_beta);
    };
    return adaptive_simpson(integrand, 0.0, u, 1e-13);
}

}  // namespace lifecast::reference
