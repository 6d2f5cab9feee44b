#include "lifecast/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <queue>

#include "lifecast/errors.hpp"
#include "lifecast/parallel.hpp"
#include "lifecast/stats.hpp"

namespace lifecast::metrics {

std::string_view measure_name(Measure m) {
    switch (m) {
        case Measure::Degree: return "degree";
        case Measure::DegreeEntropy: return "degree_entropy";
        case Measure::Clustering: return "clustering";
        case Measure::PageRank: return "pagerank";
        case Measure::Betweenness: return "betweenness";
        case Measure::AlphaCentrality: return "alpha_centrality";
    }
    return "unknown";
}

WindowGraph WindowGraph::build(const TemporalWindow& window) {
    return build(window.nodes, window.edges);
}

WindowGraph WindowGraph::build(std::span<const NodeId> nodes, std::span<const Edge> edges) {
    WindowGraph g;
    g.nodes_.assign(nodes.begin(), nodes.end());
    std::sort(g.nodes_.begin(), g.nodes_.end());
    g.nodes_.erase(std::unique(g.nodes_.begin(), g.nodes_.end()), g.nodes_.end());

    const std::size_t n = g.nodes_.size();
    std::vector<std::pair<std::size_t, std::size_t>> local;
    local.reserve(edges.size());
    for (const Edge& e : edges) {
        std::size_t i = g.index_of(e.a);
        std::size_t j = g.index_of(e.b);
        if (i >= n || j >= n || i == j) continue;
        local.emplace_back(i, j);
    }
    std::sort(local.begin(), local.end());
    local.erase(std::unique(local.begin(), local.end()), local.end());

    std::vector<std::size_t> counts(n, 0);
    for (auto [i, j] : local) {
        ++counts[i];
        ++counts[j];
    }
    g.offsets_.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) g.offsets_[i + 1] = g.offsets_[i] + counts[i];
    g.adjacency_.resize(g.offsets_[n]);
    std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
    for (auto [i, j] : local) {
        g.adjacency_[cursor[i]++] = j;
        g.adjacency_[cursor[j]++] = i;
    }
    for (std::size_t i = 0; i < n; ++i) {
        std::sort(g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[i]),
                  g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[i + 1]));
    }
    return g;
}

std::size_t WindowGraph::index_of(NodeId v) const {
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), v);
    if (it == nodes_.end() || *it != v) return nodes_.size();
    return static_cast<std::size_t>(it - nodes_.begin());
}

std::span<const std::size_t> WindowGraph::neighbors(std::size_t i) const {
    return {adjacency_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
}

bool WindowGraph::has_edge(std::size_t i, std::size_t j) const {
    auto nb = neighbors(i);
    return std::binary_search(nb.begin(), nb.end(), j);
}

std::vector<double> degree_scores(const WindowGraph& g) {
    std::vector<double> scores(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) scores[i] = static_cast<double>(g.degree(i));
    return scores;
}

std::vector<double> degree_entropy_scores(const WindowGraph& g) {
    std::vector<double> scores(g.size(), 0.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double ki = static_cast<double>(g.degree(i));
        if (ki <= 1.0) continue;
        double h = 0.0;
        for (std::size_t j : g.neighbors(i)) {
            double ratio = static_cast<double>(g.degree(j)) / ki;
            h -= ratio * std::log(ratio);
        }
        scores[i] = h > 0.0 ? h : 0.0;
    }
    return scores;
}

std::vector<double> clustering_scores(const WindowGraph& g) {
    std::vector<double> scores(g.size(), 0.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        auto nb = g.neighbors(i);
        const std::size_t k = nb.size();
        if (k < 2) continue;
        std::size_t links = 0;
        for (std::size_t x = 0; x < k; ++x) {
            for (std::size_t y = x + 1; y < k; ++y) {
                if (g.has_edge(nb[x], nb[y])) ++links;
            }
        }
        scores[i] = 2.0 * static_cast<double>(links) /
                    (static_cast<double>(k) * static_cast<double>(k - 1));
    }
    return scores;
}

std::vector<double> pagerank_scores(const WindowGraph& g, const PageRankOptions& options) {
    const std::size_t n = g.size();
    if (n == 0) return {};
    const double uniform = 1.0 / static_cast<double>(n);
    std::vector<double> rank(n, uniform);
    std::vector<double> next(n, 0.0);
    double delta = 0.0;
    for (int iter = 0; iter < options.max_iterations; ++iter) {
        double dangling = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (g.degree(i) == 0) dangling += rank[i];
        }
        const double base = (1.0 - options.damping) * uniform +
                            options.damping * dangling * uniform;
        std::fill(next.begin(), next.end(), base);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t k = g.degree(i);
            if (k == 0) continue;
            const double share = options.damping * rank[i] / static_cast<double>(k);
            for (std::size_t j : g.neighbors(i)) next[j] += share;
        }
        delta = 0.0;
        for (std::size_t i = 0; i < n; ++i) delta += std::abs(next[i] - rank[i]);
        rank.swap(next);
        if (delta < options.tolerance) return rank;
    }
    throw ConvergenceError("pagerank did not converge, last L1 change " +
                               std::to_string(delta),
                           delta);
}

namespace {

// One Brandes sweep from `source`; adds this source's dependency scores
// into `out`.
void brandes_source(const WindowGraph& g, std::size_t source, std::vector<double>& out) {
    const std::size_t n = g.size();
    std::vector<std::size_t> order;
    order.reserve(n);
    std::vector<std::int64_t> dist(n, -1);
    std::vector<double> sigma(n, 0.0);
    std::vector<std::vector<std::size_t>> preds(n);
    dist[source] = 0;
    sigma[source] = 1.0;
    std::queue<std::size_t> frontier;
    frontier.push(source);
    while (!frontier.empty()) {
        std::size_t v = frontier.front();
        frontier.pop();
        order.push_back(v);
        for (std::size_t w : g.neighbors(v)) {
            if (dist[w] < 0) {
                dist[w] = dist[v] + 1;
                frontier.push(w);
            }
            if (dist[w] == dist[v] + 1) {
                sigma[w] += sigma[v];
                preds[w].push_back(v);
            }
        }
    }
    std::vector<double> delta(n, 0.0);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        std::size_t w = *it;
        for (std::size_t v : preds[w]) {
            delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
        }
        if (w != source) out[w] += delta[w];
    }
}

}  // namespace

std::vector<double> betweenness_scores(const WindowGraph& g, int threads) {
    const std::size_t n = g.size();
    std::vector<std::vector<double>> per_source(n);
    const int team = resolve_threads(threads);
#pragma omp parallel for schedule(dynamic) num_threads(team)
    for (std::int64_t s = 0; s < static_cast<std::int64_t>(n); ++s) {
        per_source[s].assign(n, 0.0);
        brandes_source(g, static_cast<std::size_t>(s), per_source[s]);
    }
    // fixed source-order reduction keeps sums identical across thread counts
    std::vector<double> scores(n, 0.0);
    for (std::size_t s = 0; s < n; ++s) {
        for (std::size_t i = 0; i < n; ++i) scores[i] += per_source[s][i];
    }
    for (double& x : scores) x *= 0.5;
    return scores;
}

std::vector<double> alpha_centrality_scores(const WindowGraph& g, double fraction) {
    if (!(fraction >= 0.0) || fraction >= 1.0) {
        throw ConfigError("alpha centrality fraction must lie in [0, 1)");
    }
    const std::size_t n = g.size();
    std::vector<double> ones(n, 1.0);
    if (n == 0 || fraction == 0.0) return ones;
    bool has_edge = false;
    for (std::size_t i = 0; i < n && !has_edge; ++i) has_edge = g.degree(i) > 0;
    if (!has_edge) return ones;

    stats::Matrix adj(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j : g.neighbors(i)) adj(i, j) = 1.0;
    }
    const double lambda = stats::power_iteration(adj).eigenvalue;
    if (!(lambda > 1e-12)) return ones;
    const double alpha = fraction / lambda;

    stats::Matrix system(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            system(i, j) = (i == j ? 1.0 : 0.0) - alpha * adj(i, j);
        }
    }
    return stats::solve_dense(std::move(system), std::move(ones));
}

std::vector<double> scores_for(Measure m, const WindowGraph& g, int threads) {
    switch (m) {
        case Measure::Degree: return degree_scores(g);
        case Measure::DegreeEntropy: return degree_entropy_scores(g);
        case Measure::Clustering: return clustering_scores(g);
        case Measure::PageRank: return pagerank_scores(g);
        case Measure::Betweenness: return betweenness_scores(g, threads);
        case Measure::AlphaCentrality: return alpha_centrality_scores(g);
    }
    throw ConfigError("unknown measure");
}

namespace {

std::vector<std::size_t> topk_indices(const WindowGraph& g, std::span<const double> scores,
                                      std::size_t k) {
    std::vector<std::size_t> idx(g.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) {
        if (scores[x] != scores[y]) return scores[x] > scores[y];
        return g.node(x) < g.node(y);
    });
    idx.resize(std::min(k, idx.size()));
    std::sort(idx.begin(), idx.end());
    return idx;
}

}  // namespace

double jaccard_topk(const WindowGraph& g, std::span<const double> a, std::span<const double> b,
                    std::size_t k) {
    k = std::min(k, g.size());
    std::vector<std::size_t> ta = topk_indices(g, a, k);
    std::vector<std::size_t> tb = topk_indices(g, b, k);
    std::vector<std::size_t> both;
    std::set_intersection(ta.begin(), ta.end(), tb.begin(), tb.end(), std::back_inserter(both));
    const std::size_t unions = ta.size() + tb.size() - both.size();
    if (unions == 0) return 1.0;
    return static_cast<double>(both.size()) / static_cast<double>(unions);
}

}  // namespace lifecast::metrics
