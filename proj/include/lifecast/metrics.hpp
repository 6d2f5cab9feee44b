#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "lifecast/partition.hpp"
#include "lifecast/types.hpp"

namespace lifecast::metrics {

enum class Measure {
    Degree,
    DegreeEntropy,
    Clustering,
    PageRank,
    Betweenness,
    AlphaCentrality,
};

inline constexpr std::array<Measure, 6> kAllMeasures = {
    Measure::Degree,        Measure::DegreeEntropy, Measure::Clustering,
    Measure::PageRank,      Measure::Betweenness,   Measure::AlphaCentrality,
};

std::string_view measure_name(Measure m);

/// Undirected simple graph induced on a window's node set. Stored edges
/// with an endpoint outside the node set are dropped; parallel edges
/// collapse to one.
class WindowGraph {
public:
    static WindowGraph build(const TemporalWindow& window);
    static WindowGraph build(std::span<const NodeId> nodes, std::span<const Edge> edges);

    std::size_t size() const { return nodes_.size(); }
    NodeId node(std::size_t i) const { return nodes_[i]; }
    /// Local index of a node, or size() when the node is not in the graph.
    std::size_t index_of(NodeId v) const;
    std::span<const std::size_t> neighbors(std::size_t i) const;
    std::size_t degree(std::size_t i) const { return neighbors(i).size(); }
    bool has_edge(std::size_t i, std::size_t j) const;

private:
    std::vector<NodeId> nodes_;            // sorted
    std::vector<std::size_t> offsets_;     // CSR adjacency over local indices
    std::vector<std::size_t> adjacency_;
};

/// All scores are per-node, aligned with WindowGraph local indices.
std::vector<double> degree_scores(const WindowGraph& g);

/// Entropy of the neighbor-degree distribution seen from each node:
/// H_i = -sum_{j in n(i)} (k_j / k_i) ln(k_j / k_i), floored at zero.
/// Nodes with degree <= 1 score zero.
std::vector<double> degree_entropy_scores(const WindowGraph& g);

/// Local clustering coefficient 2 t_i / (k_i (k_i - 1)); zero below degree 2.
std::vector<double> clustering_scores(const WindowGraph& g);

struct PageRankOptions {
    double damping = 0.85;
    double tolerance = 1e-10;  // L1 change between iterations
    int max_iterations = 1000;
};

/// Power-method PageRank over the undirected graph; dangling mass is spread
/// uniformly, so the scores always sum to one. Throws ConvergenceError.
std::vector<double> pagerank_scores(const WindowGraph& g, const PageRankOptions& options = {});

/// Shortest-path betweenness (Brandes), unnormalized, with each undirected
/// path counted once. The per-source accumulation order is fixed, so results
/// are identical across thread counts.
std::vector<double> betweenness_scores(const WindowGraph& g, int threads = 0);

/// Alpha centrality x = (I - alpha A)^-1 e with alpha = fraction / lambda_max.
/// fraction must lie in [0, 1); zero fraction or an edgeless graph gives
/// all-ones scores.
std::vector<double> alpha_centrality_scores(const WindowGraph& g, double fraction = 0.5);

std::vector<double> scores_for(Measure m, const WindowGraph& g, int threads = 0);

inline constexpr std::size_t kDefaultTopK = 20;

/// Jaccard similarity of the top-k node sets under two scores on the same
/// graph. Ranking ties break toward the smaller node id; k is clamped to the
/// graph size.
double jaccard_topk(const WindowGraph& g, std::span<const double> a, std::span<const double> b,
                    std::size_t k = kDefaultTopK);

}  // namespace lifecast::metrics
