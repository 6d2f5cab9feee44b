#include "lifecast/types.hpp"

#include <algorithm>

namespace lifecast {

void HistoryGraph::add_edge(NodeId a, NodeId b) {
    if (a == b) return;
    NodeId hi = std::max(a, b);
    if (hi >= adj_.size()) adj_.resize(hi + 1);
    adj_[a].push_back(b);
    adj_[b].push_back(a);
}

void HistoryGraph::finalize() {
    edge_count_ = 0;
    for (auto& nbrs : adj_) {
        std::sort(nbrs.begin(), nbrs.end());
        nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
        edge_count_ += nbrs.size();
    }
    edge_count_ /= 2;
}

bool HistoryGraph::has_edge(NodeId a, NodeId b) const {
    if (a >= adj_.size()) return false;
    const auto& nbrs = adj_[a];
    return std::binary_search(nbrs.begin(), nbrs.end(), b);
}

const std::vector<NodeId>& HistoryGraph::neighbors(NodeId v) const {
    static const std::vector<NodeId> kEmpty;
    return v < adj_.size() ? adj_[v] : kEmpty;
}

}  // namespace lifecast
