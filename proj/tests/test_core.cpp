#include <cmath>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "lifecast/errors.hpp"
#include "lifecast/ingest.hpp"
#include "lifecast/partition.hpp"
#include "lifecast/synth.hpp"
#include "lifecast/textio.hpp"
#include "lifecast/types.hpp"

using namespace lifecast;

namespace {

std::filesystem::path temp_file(const std::string& name, const std::string& content) {
    auto path = std::filesystem::temp_directory_path() / ("lifecast_core_" + name);
    textio::write_file(path, content);
    return path;
}

}  // namespace

TEST_SUITE("textio") {

TEST_CASE("split_fields handles tabs, commas, and space runs") {
    CHECK(textio::split_fields("a\tb\tc") == std::vector<std::string>{"a", "b", "c"});
    CHECK(textio::split_fields("a,b,c") == std::vector<std::string>{"a", "b", "c"});
    CHECK(textio::split_fields("a  b   c") == std::vector<std::string>{"a", "b", "c"});
    // tabs win even when commas are present inside fields
    CHECK(textio::split_fields("a,1\tb,2") == std::vector<std::string>{"a,1", "b,2"});
}

TEST_CASE("parse_number is strict about trailing garbage") {
    REQUIRE(textio::parse_number("42.5"));
    CHECK(*textio::parse_number("42.5") == 42.5);
    CHECK(*textio::parse_number("-1e3") == -1000.0);
    CHECK_FALSE(textio::parse_number("42.5x"));
    CHECK_FALSE(textio::parse_number(""));
    CHECK_FALSE(textio::parse_number("abc"));
}

TEST_CASE("parse_time_minutes accepts minutes and ISO 8601 stamps") {
    CHECK(*textio::parse_time_minutes("90") == 90.0);
    auto a = textio::parse_time_minutes("2024-05-01T10:30:00Z");
    auto b = textio::parse_time_minutes("2024-05-01T10:31:30Z");
    REQUIRE(a);
    REQUIRE(b);
    CHECK(*b - *a == doctest::Approx(1.5).epsilon(1e-12));
    auto no_seconds = textio::parse_time_minutes("2024-05-01 10:30");
    REQUIRE(no_seconds);
    CHECK(*no_seconds == doctest::Approx(*a).epsilon(1e-12));
    CHECK_FALSE(textio::parse_time_minutes("yesterday"));
    CHECK_FALSE(textio::parse_time_minutes("2024-13-01T00:00:00Z"));
}

TEST_CASE("format_double round-trips bitwise") {
    for (double v : {0.1, 1.0 / 3.0, 4171.25, -2.86, 1e-17, 123456789.123456789, 0.0}) {
        CHECK(std::stod(textio::format_double(v)) == v);
    }
}

}  // textio suite

TEST_SUITE("ingest") {

TEST_CASE("header row may reorder columns") {
    NodeTable names;
    IngestReport report;
    std::vector<std::string> lines = {
        "t,target,source,cascade_id",
        "5,b,a,c1",
        "7,c,b,c1",
    };
    auto cascades = ingest_cascades(lines, 2, names, report);
    REQUIRE(cascades.size() == 1);
    CHECK(cascades[0].id == "c1");
    REQUIRE(cascades[0].events.size() == 2);
    CHECK(names.name(cascades[0].events[0].source) == "a");
    CHECK(names.name(cascades[0].events[0].target) == "b");
    CHECK(cascades[0].events[0].time == 0.0);
    CHECK(cascades[0].events[1].time == 2.0);
    CHECK(report.total_rows == 2);
    CHECK(report.accepted_events == 2);
}

TEST_CASE("JSON rows mix with delimited rows") {
    NodeTable names;
    IngestReport report;
    std::vector<std::string> lines = {
        "c1,a,b,0",
        R"({"cascade_id":"c1","source":"b","target":"c","t":4})",
        "c1,c,d,9",
    };
    auto cascades = ingest_cascades(lines, 2, names, report);
    REQUIRE(cascades.size() == 1);
    REQUIRE(cascades[0].events.size() == 3);
    CHECK(names.name(cascades[0].events[1].source) == "b");
    CHECK(cascades[0].events[1].time == 4.0);
    CHECK(report.rejected.empty());
}

TEST_CASE("bad rows are recorded with line numbers and skipped") {
    NodeTable names;
    IngestReport report;
    std::vector<std::string> lines = {
        "c1,a,b,0",
        "c1,b,b,1",       // self-loop
        "c1,b,c,oops",    // bad time
        "c1,c",           // short row
        R"({"cascade_id":"c1"})",
        "c1,b,c,5",
    };
    auto cascades = ingest_cascades(lines, 2, names, report);
    REQUIRE(cascades.size() == 1);
    CHECK(cascades[0].events.size() == 2);
    REQUIRE(report.rejected.size() == 4);
    CHECK(report.rejected[0].line == 2);
    CHECK(report.rejected[0].reason == "self-loop reshare");
    CHECK(report.rejected[1].line == 3);
    CHECK(report.rejected[2].line == 4);
    CHECK(report.rejected[3].line == 5);
    CHECK(report.total_rows == 6);
}

TEST_CASE("cascades below min_size are dropped and counted") {
    NodeTable names;
    IngestReport report;
    std::vector<std::string> lines = {"c1,a,b,0", "c2,a,b,0", "c2,b,c,1", "c2,c,d,2"};
    auto cascades = ingest_cascades(lines, 3, names, report);
    REQUIRE(cascades.size() == 1);
    CHECK(cascades[0].id == "c2");
    CHECK(report.dropped_small_cascades == 1);
}

TEST_CASE("events sort stably by time with a zero offset") {
    NodeTable names;
    IngestReport report;
    std::vector<std::string> lines = {"c1,a,b,100", "c1,b,c,90", "c1,b,d,100", "c1,d,e,95"};
    auto cascades = ingest_cascades(lines, 2, names, report);
    REQUIRE(cascades.size() == 1);
    const auto& ev = cascades[0].events;
    REQUIRE(ev.size() == 4);
    CHECK(ev[0].time == 0.0);
    CHECK(names.name(ev[0].source) == "b");
    CHECK(ev[1].time == 5.0);
    // equal times keep input order: a->b before b->d
    CHECK(names.name(ev[2].target) == "b");
    CHECK(names.name(ev[3].target) == "d");
    CHECK(cascades[0].span() == 10.0);
}

TEST_CASE("cascades come back sorted by id") {
    NodeTable names;
    IngestReport report;
    std::vector<std::string> lines = {"zeta,a,b,0", "zeta,b,c,1", "alpha,a,b,0", "alpha,b,c,1"};
    auto cascades = ingest_cascades(lines, 2, names, report);
    REQUIRE(cascades.size() == 2);
    CHECK(cascades[0].id == "alpha");
    CHECK(cascades[1].id == "zeta");
}

TEST_CASE("normalized event log reingests to the same corpus") {
    synth::CorpusSpec spec;
    spec.cascades = 4;
    spec.base.events = 60;
    spec.base.tail_fraction = 0.5;  // small budgets need a heavier tail
    spec.seed = 11;
    auto corpus = synth::build_corpus(spec);

    std::string log = normalized_event_log(corpus.cascades, corpus.nodes);
    NodeTable names2;
    IngestReport report2;
    std::vector<std::string> lines;
    for (std::size_t pos = 0; pos < log.size();) {
        std::size_t nl = log.find('\n', pos);
        lines.push_back(log.substr(pos, nl - pos));
        pos = nl + 1;
    }
    auto round = ingest_cascades(lines, 2, names2, report2);
    REQUIRE(round.size() == corpus.cascades.size());
    for (std::size_t c = 0; c < round.size(); ++c) {
        CHECK(round[c].id == corpus.cascades[c].id);
        REQUIRE(round[c].events.size() == corpus.cascades[c].events.size());
        for (std::size_t i = 0; i < round[c].events.size(); ++i) {
            const auto& got = round[c].events[i];
            const auto& want = corpus.cascades[c].events[i];
            CHECK(got.time == want.time);
            CHECK(names2.name(got.source) == corpus.nodes.name(want.source));
            CHECK(names2.name(got.target) == corpus.nodes.name(want.target));
        }
    }
    CHECK(report2.rejected.empty());
}

TEST_CASE("history file loads with dedup and self-loop skip") {
    auto path = temp_file("hist.csv", "source,target\na,b\nb,a\na,b\nc,c\nb,c\n");
    NodeTable names;
    HistoryGraph g = load_history_file(path, names);
    NodeId a = names.intern("a"), b = names.intern("b"), c = names.intern("c");
    CHECK(g.edge_count() == 2);
    CHECK(g.degree(a) == 1);
    CHECK(g.degree(b) == 2);
    CHECK(g.has_edge(a, b));
    CHECK(g.has_edge(b, c));
    CHECK_FALSE(g.has_edge(a, c));
    std::filesystem::remove(path);
}

TEST_CASE("history row with one column is a config error") {
    auto path = temp_file("hist_bad.csv", "a,b\nc\n");
    NodeTable names;
    CHECK_THROWS_AS(load_history_file(path, names), ConfigError);
    std::filesystem::remove(path);
}

}  // ingest suite

TEST_SUITE("types") {

TEST_CASE("edges store the smaller endpoint first") {
    Edge e(5, 2);
    CHECK(e.a == 2);
    CHECK(e.b == 5);
    CHECK(Edge(2, 5) == e);
}

TEST_CASE("node table interns names to dense stable ids") {
    NodeTable t;
    NodeId a = t.intern("a");
    NodeId b = t.intern("b");
    CHECK(a == 0);
    CHECK(b == 1);
    CHECK(t.intern("a") == a);
    CHECK(t.size() == 2);
    CHECK(t.name(b) == "b");
}

TEST_CASE("history graph finalize is idempotent and lookups are bounds-safe") {
    HistoryGraph g;
    g.add_edge(0, 1);
    g.add_edge(1, 0);
    g.add_edge(1, 2);
    g.finalize();
    g.finalize();
    CHECK(g.edge_count() == 2);
    CHECK(g.degree(1) == 2);
    CHECK(g.degree(99) == 0);
    CHECK(g.neighbors(99).empty());
    CHECK_FALSE(g.contains(99));
}

}  // types suite

TEST_SUITE("partition") {

namespace {

Cascade five_event_toy(NodeTable& names) {
    Cascade c;
    c.id = "toy";
    auto ev = [&](const char* s, const char* t, double time) {
        c.events.push_back({names.intern(s), names.intern(t), time});
    };
    ev("a", "b", 0.0);
    ev("b", "c", 5.0);
    ev("a", "d", 7.0);
    ev("c", "e", 9.0);
    ev("d", "f", 9.0);
    return c;
}

}  // namespace

TEST_CASE("subsequences close at the node-count boundary") {
    NodeTable names;
    Cascade c = five_event_toy(names);
    HistoryGraph history;
    history.add_edge(names.intern("a"), names.intern("c"));
    history.finalize();

    auto result = build_subsequences(c, history, 2);
    REQUIRE(result.subsequences.size() == 3);
    CHECK_FALSE(result.single_partial);
    CHECK_FALSE(result.multiple_roots);

    const auto& s1 = result.subsequences[0];
    const auto& s2 = result.subsequences[1];
    const auto& s3 = result.subsequences[2];
    NodeId a = names.intern("a"), b = names.intern("b"), cc = names.intern("c");
    NodeId d = names.intern("d"), e = names.intern("e"), f = names.intern("f");

    CHECK(s1.index == 1);
    CHECK(s1.nodes == std::vector<NodeId>{a, b});
    CHECK(s1.event_begin == 0);
    CHECK(s1.event_end == 1);
    CHECK(s1.t_start == 0.0);
    CHECK(s1.t_end == 0.0);
    CHECK(s1.edges == std::vector<Edge>{Edge(a, b)});
    CHECK_FALSE(s1.terminal);

    CHECK(s2.nodes == std::vector<NodeId>{cc, d});
    CHECK(s2.event_begin == 1);
    CHECK(s2.event_end == 3);
    CHECK(s2.t_start == 5.0);
    CHECK(s2.t_end == 7.0);
    // the a-c history pair spans two subsequences, so neither owns it
    CHECK(s2.edges == std::vector<Edge>{Edge(a, d), Edge(b, cc)});

    CHECK(s3.nodes == std::vector<NodeId>{e, f});
    CHECK(s3.edges == std::vector<Edge>{Edge(cc, e), Edge(d, f)});
    CHECK_FALSE(s3.terminal);
}

TEST_CASE("one root with 119 targets at 40 nodes gives three full subsequences") {
    NodeTable names;
    Cascade c;
    c.id = "chain";
    NodeId root = names.intern("r");
    for (int k = 1; k <= 119; ++k) {
        c.events.push_back({root, names.intern("n" + std::to_string(k)),
                            static_cast<double>(k)});
    }
    HistoryGraph history;
    history.finalize();
    auto result = build_subsequences(c, history, 40);
    REQUIRE(result.subsequences.size() == 3);
    for (const auto& s : result.subsequences) {
        CHECK(s.nodes.size() == 40);
        CHECK_FALSE(s.terminal);
    }
    CHECK(result.subsequences[0].event_end == 39);
    CHECK(result.subsequences[2].event_end == 119);
    CHECK_FALSE(result.single_partial);
}

TEST_CASE("leftover events form a terminal partial subsequence") {
    NodeTable names;
    Cascade c = five_event_toy(names);
    HistoryGraph history;
    history.finalize();
    auto result = build_subsequences(c, history, 4);
    REQUIRE(result.subsequences.size() == 2);
    CHECK_FALSE(result.subsequences[0].terminal);
    CHECK(result.subsequences[1].terminal);
    CHECK(result.subsequences[1].nodes.size() == 2);
    CHECK_FALSE(result.single_partial);
}

TEST_CASE("a cascade that never fills one subsequence is a single partial") {
    NodeTable names;
    Cascade c = five_event_toy(names);
    HistoryGraph history;
    history.finalize();
    auto result = build_subsequences(c, history, 40);
    REQUIRE(result.subsequences.size() == 1);
    CHECK(result.subsequences[0].terminal);
    CHECK(result.single_partial);
}

TEST_CASE("multiple roots are flagged and share the first subsequence") {
    NodeTable names;
    Cascade c;
    c.id = "two_roots";
    c.events.push_back({names.intern("a"), names.intern("b"), 0.0});
    c.events.push_back({names.intern("c"), names.intern("d"), 1.0});
    HistoryGraph history;
    history.finalize();
    auto result = build_subsequences(c, history, 4);
    CHECK(result.multiple_roots);
    REQUIRE(result.subsequences.size() == 1);
    CHECK(result.subsequences[0].nodes.size() == 4);
}

TEST_CASE("node count below two is a config error") {
    NodeTable names;
    Cascade c = five_event_toy(names);
    HistoryGraph history;
    history.finalize();
    CHECK_THROWS_AS(build_subsequences(c, history, 1), ConfigError);
}

TEST_CASE("windows pair consecutive subsequences and pull in history pairs") {
    NodeTable names;
    Cascade c = five_event_toy(names);
    HistoryGraph history;
    history.add_edge(names.intern("a"), names.intern("c"));
    history.finalize();
    auto subs = build_subsequences(c, history, 2);
    auto windows = build_windows(subs.subsequences, history);
    REQUIRE(windows.windows.size() == 2);
    CHECK_FALSE(windows.too_few_subsequences);

    NodeId a = names.intern("a"), b = names.intern("b"), cc = names.intern("c");
    NodeId d = names.intern("d"), e = names.intern("e"), f = names.intern("f");

    const auto& w2 = windows.windows[0];
    CHECK(w2.index == 2);
    CHECK(w2.nodes == std::vector<NodeId>{a, b, cc, d});
    // union edges now include the a-c history pair
    CHECK(w2.edges == std::vector<Edge>{Edge(a, b), Edge(a, cc), Edge(a, d), Edge(b, cc)});
    CHECK(w2.t_start == 0.0);
    CHECK(w2.t_end == 7.0);
    CHECK(w2.lead_event_begin == 0);
    CHECK(w2.lead_event_end == 1);

    const auto& w3 = windows.windows[1];
    CHECK(w3.index == 3);
    CHECK(w3.nodes == std::vector<NodeId>{cc, d, e, f});
    // stored edges keep far endpoints from the older subsequence
    CHECK(w3.edges == std::vector<Edge>{Edge(a, d), Edge(b, cc), Edge(cc, e), Edge(d, f)});
    CHECK(w3.lead_event_begin == 1);
    CHECK(w3.lead_event_end == 3);
}

TEST_CASE("fewer than two subsequences yields no windows") {
    NodeTable names;
    Cascade c = five_event_toy(names);
    HistoryGraph history;
    history.finalize();
    auto subs = build_subsequences(c, history, 40);
    auto windows = build_windows(subs.subsequences, history);
    CHECK(windows.windows.empty());
    CHECK(windows.too_few_subsequences);
}

TEST_CASE("window carries the terminal flag of its second constituent") {
    NodeTable names;
    Cascade c = five_event_toy(names);
    HistoryGraph history;
    history.finalize();
    auto subs = build_subsequences(c, history, 4);
    auto windows = build_windows(subs.subsequences, history);
    REQUIRE(windows.windows.size() == 1);
    CHECK(windows.windows[0].has_terminal);
}

}  // partition suite
