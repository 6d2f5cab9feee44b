#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace lifecast {

using NodeId = std::uint32_t;

/// Undirected node pair, stored with the smaller id first.
struct Edge {
    NodeId a = 0;
    NodeId b = 0;

    Edge() = default;
    Edge(NodeId x, NodeId y) : a(x < y ? x : y), b(x < y ? y : x) {}

    friend bool operator==(const Edge&, const Edge&) = default;
    friend auto operator<=>(const Edge&, const Edge&) = default;
};

struct EdgeHash {
    std::size_t operator()(const Edge& e) const {
        return (static_cast<std::size_t>(e.a) << 32) ^ e.b;
    }
};

/// Interns node names to dense ids in first-appearance order.
class NodeTable {
public:
    NodeId intern(const std::string& name) {
        auto [it, inserted] = index_.try_emplace(name, static_cast<NodeId>(names_.size()));
        if (inserted) names_.push_back(name);
        return it->second;
    }
    const std::string& name(NodeId id) const { return names_[id]; }
    std::size_t size() const { return names_.size(); }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, NodeId> index_;
};

/// One reshare: `source` already holds the content, `target` adopts it at `time`.
/// Times are minutes relative to the cascade's first event.
struct ReshareEvent {
    NodeId source = 0;
    NodeId target = 0;
    double time = 0.0;
};

struct Cascade {
    std::string id;
    std::vector<ReshareEvent> events;  // sorted by time, first at 0

    std::size_t size() const { return events.size(); }
    /// Observation span: time of the last event minus the first.
    double span() const {
        return events.empty() ? 0.0 : events.back().time - events.front().time;
    }
};

/// Undirected interaction graph from the historical diffusion period.
class HistoryGraph {
public:
    void add_edge(NodeId a, NodeId b);
    void finalize();  // sort + dedupe adjacency lists

    bool contains(NodeId v) const { return v < adj_.size() && !adj_[v].empty(); }
    std::size_t degree(NodeId v) const { return v < adj_.size() ? adj_[v].size() : 0; }
    bool has_edge(NodeId a, NodeId b) const;
    const std::vector<NodeId>& neighbors(NodeId v) const;
    std::size_t edge_count() const { return edge_count_; }

private:
    std::vector<std::vector<NodeId>> adj_;
    std::size_t edge_count_ = 0;
};

}  // namespace lifecast
