#include "lifecast/partition.hpp"

#include <algorithm>
#include <unordered_set>

#include "lifecast/errors.hpp"

namespace lifecast {

namespace {

void append_history_pairs(const std::vector<NodeId>& nodes, const HistoryGraph& history,
                          std::vector<Edge>& out) {
    // nodes is sorted; for each member, take history neighbors that are also
    // members and larger, so every pair is produced once
    for (NodeId v : nodes) {
        for (NodeId u : history.neighbors(v)) {
            if (u > v && std::binary_search(nodes.begin(), nodes.end(), u)) {
                out.emplace_back(v, u);
            }
        }
    }
}

}  // namespace

SubsequenceResult build_subsequences(const Cascade& cascade, const HistoryGraph& history,
                                     std::size_t node_count) {
    if (node_count < 2) throw ConfigError("subsequence node count must be at least 2");
    SubsequenceResult result;
    if (cascade.events.empty()) return result;

    std::unordered_set<NodeId> target_set;
    for (const ReshareEvent& e : cascade.events) target_set.insert(e.target);

    // roots: sources that never appear as targets, assigned to subsequence 1
    std::vector<NodeId> roots;
    std::unordered_set<NodeId> joined;
    for (const ReshareEvent& e : cascade.events) {
        if (!target_set.contains(e.source) && joined.insert(e.source).second) {
            roots.push_back(e.source);
        }
    }
    result.multiple_roots = roots.size() > 1;

    std::vector<Subsequence> subs;
    Subsequence current;
    current.index = 1;
    current.nodes = roots;
    current.event_begin = 0;
    std::size_t member_count = roots.size();

    for (std::size_t i = 0; i < cascade.events.size(); ++i) {
        const ReshareEvent& e = cascade.events[i];
        if (joined.insert(e.target).second) {
            current.nodes.push_back(e.target);
            member_count += 1;
        }
        if (member_count >= node_count) {
            current.event_end = i + 1;
            current.t_start = cascade.events[current.event_begin].time;
            current.t_end = e.time;
            subs.push_back(std::move(current));
            current = Subsequence{};
            current.index = static_cast<int>(subs.size()) + 1;
            current.event_begin = i + 1;
            member_count = 0;
        }
    }
    if (current.event_begin < cascade.events.size()) {
        current.event_end = cascade.events.size();
        current.t_start = cascade.events[current.event_begin].time;
        current.t_end = cascade.events.back().time;
        current.terminal = true;
        subs.push_back(std::move(current));
    }
    result.single_partial = subs.size() == 1 && subs.front().terminal;

    // edge sets: reshare pairs by first occurrence, then history pairs among
    // members; every pair lands in exactly one subsequence
    std::unordered_set<Edge, EdgeHash> seen;
    for (Subsequence& s : subs) {
        std::sort(s.nodes.begin(), s.nodes.end());
        std::vector<Edge> candidates;
        for (std::size_t i = s.event_begin; i < s.event_end; ++i) {
            candidates.emplace_back(cascade.events[i].source, cascade.events[i].target);
        }
        append_history_pairs(s.nodes, history, candidates);
        for (const Edge& e : candidates) {
            if (seen.insert(e).second) s.edges.push_back(e);
        }
        std::sort(s.edges.begin(), s.edges.end());
    }
    result.subsequences = std::move(subs);
    return result;
}

WindowResult build_windows(const std::vector<Subsequence>& subsequences,
                           const HistoryGraph& history) {
    WindowResult result;
    if (subsequences.size() < 2) {
        result.too_few_subsequences = true;
        return result;
    }
    for (std::size_t i = 1; i < subsequences.size(); ++i) {
        const Subsequence& first = subsequences[i - 1];
        const Subsequence& second = subsequences[i];
        TemporalWindow w;
        w.index = second.index;
        w.nodes.reserve(first.nodes.size() + second.nodes.size());
        std::merge(first.nodes.begin(), first.nodes.end(), second.nodes.begin(),
                   second.nodes.end(), std::back_inserter(w.nodes));
        w.nodes.erase(std::unique(w.nodes.begin(), w.nodes.end()), w.nodes.end());

        std::vector<Edge> edges = first.edges;
        edges.insert(edges.end(), second.edges.begin(), second.edges.end());
        append_history_pairs(w.nodes, history, edges);
        std::sort(edges.begin(), edges.end());
        edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
        w.edges = std::move(edges);

        w.t_start = first.t_start;
        w.t_end = second.t_end;
        w.lead_event_begin = first.event_begin;
        w.lead_event_end = first.event_end;
        w.has_terminal = second.terminal;
        result.windows.push_back(std::move(w));
    }
    return result;
}

}  // namespace lifecast
