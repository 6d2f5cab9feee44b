#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "lifecast/hawkes.hpp"
#include "lifecast/metrics.hpp"
#include "lifecast/reference.hpp"
#include "lifecast/synth.hpp"
#include "lifecast/types.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

template <typename F>
double best_of(int reps, F&& f) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto start = Clock::now();
        f();
        best = std::min(best, ms_since(start));
    }
    return best;
}

void set_threads(int n) {
#ifdef _OPENMP
    omp_set_num_threads(n);
#else
    (void)n;
#endif
}

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace

int main() {
    using namespace lifecast;

    std::printf("lifecast benchmarks (best of 3, ms)\n\n");

    {
        synth::SynthSpec spec;
        spec.mode = synth::Mode::HawkesThinning;
        spec.events = 12000;
        spec.max_time = 2e6;
        spec.seed = 7;
        spec.root_mark = 25;     // keep the cascade alive to the event cap
        spec.branching = 0.7;    // supercritical so the cap, not die-out, ends it
        NodeTable nodes;
        const auto generated = synth::hawkes_thinning(spec, nodes);
        HistoryGraph history;
        for (const Edge& e : generated.history_edges) history.add_edge(e.a, e.b);
        history.finalize();
        const auto kernel = hawkes::ReactionKernel::power_law();
        const Cascade& cascade = generated.cascade;
        std::printf("intensity, %zu events\n", cascade.events.size());

        const int hw = max_threads();
        set_threads(1);
        const double t_ref =
            best_of(3, [&] { reference::intensity_quadratic(cascade, history, kernel); });
        const double t_serial =
            best_of(3, [&] { hawkes::intensity(cascade, history, kernel); });
        set_threads(hw);
        const double t_parallel =
            best_of(3, [&] { hawkes::intensity(cascade, history, kernel); });

        set_threads(1);
        const auto a = hawkes::intensity(cascade, history, kernel);
        set_threads(hw);
        const auto b = hawkes::intensity(cascade, history, kernel);
        const auto r = reference::intensity_quadratic(cascade, history, kernel);
        double max_diff = 0.0;
        for (std::size_t i = 0; i < a.values.size(); ++i) {
            max_diff = std::max(max_diff, std::abs(a.values[i] - r.values[i]));
            max_diff = std::max(max_diff, std::abs(a.values[i] - b.values[i]));
        }
        std::printf("  quadratic reference   %10.2f\n", t_ref);
        std::printf("  bisected, 1 thread    %10.2f  (%.1fx)\n", t_serial, t_ref / t_serial);
        std::printf("  bisected, %2d threads  %10.2f  (%.1fx)\n", hw, t_parallel,
                    t_ref / t_parallel);
        std::printf("  max |diff|            %10.3g\n\n", max_diff);
    }

    {
        const std::size_t n = 3000;
        const std::size_t m = 15000;
        synth::Rng rng(11);
        std::vector<NodeId> nodes(n);
        for (std::size_t i = 0; i < n; ++i) nodes[i] = static_cast<NodeId>(i);
        std::vector<Edge> edges;
        edges.reserve(m);
        while (edges.size() < m) {
            const auto a = static_cast<NodeId>(rng.below(n));
            const auto b = static_cast<NodeId>(rng.below(n));
            if (a != b) edges.push_back({a, b});
        }
        const auto g = metrics::WindowGraph::build(nodes, edges);
        std::printf("betweenness, %zu nodes / %zu edges\n", n, m);

        const int hw = max_threads();
        const double t_serial = best_of(3, [&] { metrics::betweenness_scores(g, 1); });
        const double t_parallel = best_of(3, [&] { metrics::betweenness_scores(g, hw); });

        const auto serial = metrics::betweenness_scores(g, 1);
        const auto parallel = metrics::betweenness_scores(g, hw);
        double max_diff = 0.0;
        for (std::size_t i = 0; i < serial.size(); ++i) {
            max_diff = std::max(max_diff, std::abs(serial[i] - parallel[i]));
        }
        std::printf("  brandes, 1 thread     %10.2f\n", t_serial);
        std::printf("  brandes, %2d threads   %10.2f  (%.1fx)\n", hw, t_parallel,
                    t_serial / t_parallel);
        std::printf("  max |serial-parallel| %10.3g\n", max_diff);
    }

    return 0;
}
