#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "doctest.h"
#include "lifecast/errors.hpp"
#include "lifecast/hawkes.hpp"
#include "lifecast/synth.hpp"
#include "lifecast/types.hpp"

using namespace lifecast;

TEST_SUITE("rng_and_marks") {

TEST_CASE("uniform stays inside the unit interval and is seed-stable") {
    synth::Rng a(5), b(5), c(6);
    bool all_match = true;
    for (int i = 0; i < 1000; ++i) {
        double u = a.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        all_match = all_match && u == b.uniform();
    }
    CHECK(all_match);
    double first_c = c.uniform();
    synth::Rng a2(5);
    CHECK(first_c != a2.uniform());
}

TEST_CASE("below respects the bound") {
    synth::Rng rng(8);
    for (int i = 0; i < 500; ++i) {
        CHECK(rng.below(7) < 7);
    }
    CHECK(rng.below(1) == 0);
}

TEST_CASE("mark sampler follows the discrete power law") {
    synth::MarkSampler marks(2.5, 30);
    synth::Rng rng(12);
    std::map<unsigned, int> counts;
    const int n = 200000;
    for (int i = 0; i < n; ++i) counts[marks.sample(rng)] += 1;
    for (auto [w, c] : counts) {
        CHECK(w >= 1);
        CHECK(w <= 30);
    }
    // normalized frequency of 1 vs 2 should approach 2^2.5
    double ratio = static_cast<double>(counts[1]) / static_cast<double>(counts[2]);
    CHECK(ratio == doctest::Approx(std::pow(2.0, 2.5)).epsilon(0.05));
    double empirical_mean = 0.0;
    for (auto [w, c] : counts) empirical_mean += static_cast<double>(w) * c;
    empirical_mean /= static_cast<double>(n);
    CHECK(empirical_mean == doctest::Approx(marks.mean()).epsilon(0.02));
    CHECK_THROWS_AS(synth::MarkSampler(1.0, 30), SynthSpecError);
    CHECK_THROWS_AS(synth::MarkSampler(2.5, 0), SynthSpecError);
}

}  // rng_and_marks suite

TEST_SUITE("planted_logistic") {

TEST_CASE("event times are sorted, zero-based, and span-terminated") {
    synth::SynthSpec spec;
    spec.seed = 21;
    NodeTable nodes;
    auto made = synth::planted_logistic(spec, nodes);
    const auto& ev = made.cascade.events;
    REQUIRE(ev.size() >= spec.events);
    CHECK(ev.front().time == 0.0);
    CHECK(std::is_sorted(ev.begin(), ev.end(),
                         [](const auto& a, const auto& b) { return a.time < b.time; }));
    CHECK(made.truth.t_steep == spec.t_steep);
    CHECK(made.truth.t_inhib == spec.t_inhib);
    CHECK(made.truth.span == ev.back().time);
    CHECK(made.truth.events == ev.size());
    CHECK(made.truth.span > spec.t_inhib);
}

TEST_CASE("the main phase concentrates half its mass near the steep time") {
    synth::SynthSpec spec;
    spec.seed = 22;
    spec.events = 1000;
    NodeTable nodes;
    auto made = synth::planted_logistic(spec, nodes);
    // events within one quarter gap of t_steep on each side
    double lo = spec.t_steep - 0.25 * (spec.t_inhib - spec.t_steep);
    double hi = spec.t_steep + 0.25 * (spec.t_inhib - spec.t_steep);
    std::size_t inside = 0, main_total = 0;
    for (const auto& e : made.cascade.events) {
        if (e.time <= spec.t_inhib) ++main_total;
        if (e.time >= lo && e.time <= hi) ++inside;
    }
    // logistic mass between -1.5 and 1.5 sharpness units is about 0.64
    CHECK(static_cast<double>(inside) / static_cast<double>(main_total) > 0.5);
}

TEST_CASE("the same seed reproduces the cascade bitwise") {
    synth::SynthSpec spec;
    spec.seed = 23;
    NodeTable n1, n2;
    auto a = synth::planted_logistic(spec, n1);
    auto b = synth::planted_logistic(spec, n2);
    REQUIRE(a.cascade.events.size() == b.cascade.events.size());
    for (std::size_t i = 0; i < a.cascade.events.size(); ++i) {
        CHECK(a.cascade.events[i].time == b.cascade.events[i].time);
        CHECK(a.cascade.events[i].source == b.cascade.events[i].source);
        CHECK(a.cascade.events[i].target == b.cascade.events[i].target);
    }
    CHECK(a.history_edges == b.history_edges);
    spec.seed = 24;
    NodeTable n3;
    auto c = synth::planted_logistic(spec, n3);
    CHECK(a.history_edges != c.history_edges);
}

TEST_CASE("history degrees realize the drawn marks when cross edges are off") {
    synth::SynthSpec spec;
    spec.seed = 25;
    spec.events = 200;
    spec.cross_edge_p = 0.0;
    NodeTable nodes;
    auto made = synth::planted_logistic(spec, nodes);
    HistoryGraph history;
    for (const Edge& e : made.history_edges) history.add_edge(e.a, e.b);
    history.finalize();
    std::set<NodeId> members;
    for (const auto& e : made.cascade.events) {
        members.insert(e.source);
        members.insert(e.target);
    }
    for (NodeId v : members) {
        CHECK(history.degree(v) >= 1);
        CHECK(history.degree(v) <= spec.mark_cap);
    }
}

TEST_CASE("infeasible tail budgets are rejected") {
    synth::SynthSpec spec;
    spec.events = 16;
    NodeTable nodes;
    CHECK_THROWS_AS(synth::planted_logistic(spec, nodes), SynthSpecError);
    spec.events = 40;
    spec.tail_fraction = 1e-6;
    CHECK_THROWS_AS(synth::planted_logistic(spec, nodes), SynthSpecError);
    spec.tail_fraction = 0.18;
    spec.t_inhib = spec.t_steep;
    CHECK_THROWS_AS(synth::planted_logistic(spec, nodes), SynthSpecError);
}

TEST_CASE("detection recovers the planted steep time within one bin") {
    synth::SynthSpec spec;
    spec.seed = 26;
    NodeTable nodes;
    auto made = synth::planted_logistic(spec, nodes);
    HistoryGraph history;
    for (const Edge& e : made.history_edges) history.add_edge(e.a, e.b);
    history.finalize();
    auto det = hawkes::detect_cascade(made.cascade, history, hawkes::DetectConfig{});
    CHECK(std::abs(det.t_steep - spec.t_steep) <= det.interval_width);
    CHECK(!det.candidates.empty());
}

}  // planted_logistic suite

TEST_SUITE("hawkes_thinning") {

TEST_CASE("events are time-sorted from zero and capped") {
    synth::SynthSpec spec;
    spec.mode = synth::Mode::HawkesThinning;
    spec.seed = 31;
    spec.events = 200;
    spec.root_mark = 25;
    spec.branching = 0.5;
    NodeTable nodes;
    auto made = synth::hawkes_thinning(spec, nodes);
    const auto& ev = made.cascade.events;
    REQUIRE(!ev.empty());
    CHECK(ev.size() <= spec.events);
    CHECK(ev.front().time == 0.0);
    CHECK(std::is_sorted(ev.begin(), ev.end(),
                         [](const auto& a, const auto& b) { return a.time < b.time; }));
    CHECK(made.truth.span == made.cascade.span());
}

TEST_CASE("single-generation offspring counts match the kernel mass") {
    // with only the root emitting, the count is Poisson with mean
    // branching * root_mark * kernel mass over the horizon
    const double branching = 0.3;
    const unsigned root_mark = 20;
    const double horizon = 2000.0;
    auto kernel = hawkes::ReactionKernel::power_law();
    const double expected =
        branching * static_cast<double>(root_mark) * kernel.mass_between(0.0, horizon);

    double total = 0.0;
    const int runs = 400;
    for (int r = 0; r < runs; ++r) {
        synth::SynthSpec spec;
        spec.mode = synth::Mode::HawkesThinning;
        spec.seed = 8000 + r;
        spec.events = 1000;
        spec.max_generation = 1;
        spec.max_time = horizon;
        spec.root_mark = root_mark;
        spec.branching = branching;
        NodeTable nodes;
        total += static_cast<double>(synth::hawkes_thinning(spec, nodes).cascade.events.size());
    }
    double mean = total / static_cast<double>(runs);
    CHECK(std::abs(mean - expected) / expected < 0.15);
}

TEST_CASE("every reshare source is an earlier adopter") {
    synth::SynthSpec spec;
    spec.mode = synth::Mode::HawkesThinning;
    spec.seed = 32;
    spec.events = 300;
    spec.root_mark = 25;
    spec.branching = 0.5;
    NodeTable nodes;
    auto made = synth::hawkes_thinning(spec, nodes);
    std::set<NodeId> adopters = {nodes.intern(spec.id + "_root")};
    for (const auto& e : made.cascade.events) {
        CHECK(adopters.contains(e.source));
        adopters.insert(e.target);
    }
}

TEST_CASE("thinning validates its spec") {
    synth::SynthSpec spec;
    spec.mode = synth::Mode::HawkesThinning;
    spec.branching = 0.0;
    NodeTable nodes;
    CHECK_THROWS_AS(synth::hawkes_thinning(spec, nodes), SynthSpecError);
}

}  // hawkes_thinning suite

TEST_SUITE("corpus") {

TEST_CASE("corpus generation is reproducible and well-formed") {
    synth::CorpusSpec spec;
    spec.cascades = 8;
    spec.base.events = 120;
    spec.base.tail_fraction = 0.35;
    spec.seed = 77;
    auto corpus = synth::build_corpus(spec);
    REQUIRE(corpus.cascades.size() == 8);
    REQUIRE(corpus.truth.size() == 8);
    CHECK(corpus.history.edge_count() > 0);

    std::set<std::string> ids;
    for (std::size_t c = 0; c < corpus.cascades.size(); ++c) {
        ids.insert(corpus.cascades[c].id);
        CHECK(corpus.cascades[c].id == corpus.truth[c].cascade_id);
        CHECK(corpus.truth[c].t_steep >= spec.t_steep_min);
        CHECK(corpus.truth[c].t_steep <= spec.t_steep_max);
        CHECK(corpus.truth[c].t_inhib - corpus.truth[c].t_steep >= spec.gap_min);
        CHECK(corpus.truth[c].t_inhib - corpus.truth[c].t_steep <= spec.gap_max);
    }
    CHECK(ids.size() == 8);
    CHECK(corpus.cascades[0].id == "synth-0001");
    CHECK(corpus.cascades[7].id == "synth-0008");

    auto again = synth::build_corpus(spec);
    for (std::size_t c = 0; c < corpus.cascades.size(); ++c) {
        REQUIRE(again.cascades[c].events.size() == corpus.cascades[c].events.size());
        for (std::size_t i = 0; i < corpus.cascades[c].events.size(); ++i) {
            CHECK(again.cascades[c].events[i].time == corpus.cascades[c].events[i].time);
        }
    }
}

TEST_CASE("corpus specs are validated") {
    synth::CorpusSpec spec;
    spec.cascades = 0;
    CHECK_THROWS_AS(synth::build_corpus(spec), SynthSpecError);
    spec.cascades = 2;
    spec.gap_min = 300.0;
    spec.gap_max = 200.0;
    CHECK_THROWS_AS(synth::build_corpus(spec), SynthSpecError);
}

}  // corpus suite
