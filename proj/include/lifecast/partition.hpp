#pragma once

#include <cstddef>
#include <vector>

#include "lifecast/types.hpp"

namespace lifecast {

inline constexpr std::size_t kDefaultSubsequenceNodeCount = 40;

/// A slice of a cascade that closes once `node_count` distinct nodes have
/// joined. A node joins at its first appearance as a reshare target; sources
/// never seen as targets (roots) count toward the first subsequence.
struct Subsequence {
    int index = 1;  // 1-based position within the cascade
    std::vector<NodeId> nodes;
    std::vector<Edge> edges;  // first-occurrence reshare pairs + history pairs inside `nodes`
    double t_start = 0.0;
    double t_end = 0.0;
    std::size_t event_begin = 0;  // owned events: [event_begin, event_end)
    std::size_t event_end = 0;
    bool terminal = false;
};

struct SubsequenceResult {
    std::vector<Subsequence> subsequences;
    bool single_partial = false;  // cascade never reached node_count joins
    bool multiple_roots = false;
};

SubsequenceResult build_subsequences(const Cascade& cascade, const HistoryGraph& history,
                                     std::size_t node_count = kDefaultSubsequenceNodeCount);

/// Union of two consecutive subsequences. `index` is the 1-based index of the
/// second constituent, so the sequence starts at 2. `edges` is the stored
/// union (both subsequences' edges plus history pairs inside `nodes`); pairs
/// whose far endpoint joined an older subsequence keep that endpoint even
/// though it is outside `nodes`, and graph construction drops them later.
struct TemporalWindow {
    int index = 2;
    std::vector<NodeId> nodes;  // sorted
    std::vector<Edge> edges;
    double t_start = 0.0;
    double t_end = 0.0;
    std::size_t lead_event_begin = 0;  // events owned by the first constituent
    std::size_t lead_event_end = 0;
    bool has_terminal = false;
};

struct WindowResult {
    std::vector<TemporalWindow> windows;
    bool too_few_subsequences = false;
};

WindowResult build_windows(const std::vector<Subsequence>& subsequences,
                           const HistoryGraph& history);

}  // namespace lifecast
