#include <cmath>
#include <vector>

#include "doctest.h"
#include "lifecast/causal.hpp"
#include "lifecast/errors.hpp"
#include "lifecast/metrics.hpp"
#include "lifecast/partition.hpp"
#include "lifecast/series.hpp"
#include "lifecast/synth.hpp"
#include "lifecast/types.hpp"

using namespace lifecast;

TEST_SUITE("series") {

namespace {

struct Prepared {
    NodeTable names;
    Cascade cascade;
    HistoryGraph history;
    std::vector<TemporalWindow> windows;
    std::vector<metrics::WindowGraph> graphs;
};

Prepared five_event_fixture(bool simultaneous_leads) {
    Prepared p;
    auto ev = [&](const char* s, const char* t, double time) {
        p.cascade.events.push_back({p.names.intern(s), p.names.intern(t), time});
    };
    p.cascade.id = "toy";
    if (simultaneous_leads) {
        ev("a", "b", 0.0);
        ev("b", "c", 5.0);
        ev("a", "d", 5.0);
        ev("c", "e", 9.0);
        ev("d", "f", 9.0);
    } else {
        ev("a", "b", 0.0);
        ev("b", "c", 5.0);
        ev("a", "d", 7.0);
        ev("c", "e", 9.0);
        ev("d", "f", 9.0);
    }
    p.history.add_edge(p.names.intern("a"), p.names.intern("c"));
    p.history.finalize();
    auto subs = build_subsequences(p.cascade, p.history, 2);
    p.windows = build_windows(subs.subsequences, p.history).windows;
    for (const auto& w : p.windows) p.graphs.push_back(metrics::WindowGraph::build(w));
    return p;
}

}  // namespace

TEST_CASE("feature series scores lead events by source and counts missing ones") {
    auto p = five_event_fixture(false);
    REQUIRE(p.windows.size() == 2);
    std::vector<std::vector<double>> scores;
    for (const auto& g : p.graphs) scores.push_back(metrics::degree_scores(g));

    auto feature = series::feature_series(p.cascade, p.windows, p.graphs, scores);
    // window 2 leads with the root event; window 3 leads with events at 5 and 7
    // whose sources joined older subsequences
    CHECK(feature.points.times == std::vector<double>{0.0, 5.0, 7.0});
    REQUIRE(feature.points.values.size() == 3);
    CHECK(feature.points.values[0] == 3.0);
    CHECK(feature.points.values[1] == 0.0);
    CHECK(feature.points.values[2] == 0.0);
    CHECK(feature.missing_sources == 2);
}

TEST_CASE("simultaneous lead events average into one point") {
    auto p = five_event_fixture(true);
    std::vector<std::vector<double>> scores;
    for (const auto& g : p.graphs) scores.push_back(metrics::degree_scores(g));
    auto feature = series::feature_series(p.cascade, p.windows, p.graphs, scores);
    CHECK(feature.points.times == std::vector<double>{0.0, 5.0});
    CHECK(feature.points.values[1] == 0.0);
    CHECK(feature.missing_sources == 2);
}

TEST_CASE("response series holds gaps between distinct event times") {
    auto p = five_event_fixture(false);
    auto response = series::response_series(p.cascade);
    CHECK(response.times == std::vector<double>{5.0, 7.0, 9.0});
    CHECK(response.values == std::vector<double>{5.0, 2.0, 2.0});

    auto q = five_event_fixture(true);
    auto collapsed = series::response_series(q.cascade);
    CHECK(collapsed.times == std::vector<double>{5.0, 9.0});
    CHECK(collapsed.values == std::vector<double>{5.0, 4.0});
}

TEST_CASE("alignment intersects on exact times up to the event horizon") {
    series::SeriesPoints feature{{0.0, 5.0, 7.0}, {3.0, 0.0, 1.0}};
    series::SeriesPoints response{{5.0, 7.0, 9.0}, {5.0, 2.0, 2.0}};

    auto aligned = series::align(feature, response, 10.0);
    CHECK(aligned.times == std::vector<double>{5.0, 7.0});
    CHECK(aligned.feature == std::vector<double>{0.0, 1.0});
    CHECK(aligned.response == std::vector<double>{5.0, 2.0});

    auto cut = series::align(feature, response, 5.0);
    CHECK(cut.times == std::vector<double>{5.0});

    auto clipped = series::align(feature, response, 10.0, std::pair{6.0, 10.0});
    CHECK(clipped.times == std::vector<double>{7.0});
    auto closed = series::align(feature, response, 10.0, std::pair{5.0, 7.0});
    CHECK(closed.times == std::vector<double>{5.0, 7.0});
}

}  // series suite

TEST_SUITE("adf") {

TEST_CASE("white noise reads stationary almost always") {
    int hits = 0;
    for (int trial = 0; trial < 100; ++trial) {
        synth::Rng rng(1000 + trial);
        std::vector<double> x;
        for (int t = 0; t < 200; ++t) x.push_back(rng.normal(0.0, 1.0));
        auto result = causal::adf_test(x);
        if (result.stationary) ++hits;
        CHECK(result.lag_order >= 0);
        CHECK(result.lag_order <= 3);
    }
    CHECK(hits >= 90);
}

TEST_CASE("random walks read nonstationary almost always") {
    int hits = 0;
    for (int trial = 0; trial < 100; ++trial) {
        synth::Rng rng(2000 + trial);
        std::vector<double> x = {0.0};
        for (int t = 1; t < 200; ++t) x.push_back(x.back() + rng.normal(0.0, 1.0));
        if (!causal::adf_test(x).stationary) ++hits;
    }
    CHECK(hits >= 90);
}

TEST_CASE("constant series cannot be tested") {
    std::vector<double> flat(50, 3.25);
    CHECK_THROWS_AS(causal::adf_test(flat), CollinearityError);
}

TEST_CASE("short series are rejected by the row gate") {
    std::vector<double> x = {1, 2, 1, 3, 1, 2, 1, 3, 1};
    CHECK_THROWS_AS(causal::adf_test(x, 3), TooShortError);
}

TEST_CASE("statistic is computed on the shared candidate sample") {
    synth::Rng rng(77);
    std::vector<double> x;
    for (int t = 0; t < 120; ++t) x.push_back(rng.normal(0.0, 1.0));
    auto result = causal::adf_test(x, 3);
    // rows shared by lag candidates 0..3: n - 1 - 3
    CHECK(result.rows == x.size() - 4);
    CHECK(result.stationary == (result.statistic < causal::kAdfCritical));
}

}  // adf suite

TEST_SUITE("stationarity_preparation") {

TEST_CASE("stationary pairs pass through untouched") {
    synth::Rng rng(31);
    std::vector<double> x, y;
    for (int t = 0; t < 150; ++t) {
        x.push_back(rng.normal(0.0, 1.0));
        y.push_back(rng.normal(0.0, 1.0));
    }
    auto prepared = causal::prepare_stationary(x, y);
    CHECK_FALSE(prepared.x_differenced);
    CHECK_FALSE(prepared.y_differenced);
    CHECK(prepared.x == x);
    CHECK(prepared.y == y);
}

TEST_CASE("a nonstationary member is differenced and the partner trimmed") {
    synth::Rng rng(32);
    std::vector<double> walk = {0.0};
    std::vector<double> level;
    level.push_back(rng.normal(0.0, 1.0));
    for (int t = 1; t < 200; ++t) {
        walk.push_back(walk.back() + rng.normal(0.0, 1.0));
        level.push_back(rng.normal(0.0, 1.0));
    }
    auto prepared = causal::prepare_stationary(walk, level);
    CHECK(prepared.x_differenced);
    CHECK_FALSE(prepared.y_differenced);
    REQUIRE(prepared.x.size() == walk.size() - 1);
    REQUIRE(prepared.y.size() == level.size() - 1);
    CHECK(prepared.x[0] == walk[1] - walk[0]);
    CHECK(prepared.y[0] == level[1]);
    CHECK(prepared.y.back() == level.back());
}

TEST_CASE("two walks are both differenced once") {
    synth::Rng rng(33);
    std::vector<double> a = {0.0}, b = {0.0};
    for (int t = 1; t < 200; ++t) {
        a.push_back(a.back() + rng.normal(0.0, 1.0));
        b.push_back(b.back() + rng.normal(0.0, 1.0));
    }
    auto prepared = causal::prepare_stationary(a, b);
    CHECK(prepared.x_differenced);
    CHECK(prepared.y_differenced);
    CHECK(prepared.x.size() == a.size() - 1);
    CHECK(prepared.y.size() == b.size() - 1);
}

}  // stationarity_preparation suite

TEST_SUITE("var_order") {

TEST_CASE("a lag-two system is recovered most of the time") {
    int hits = 0;
    for (int trial = 0; trial < 100; ++trial) {
        synth::VarCoupledSpec spec;
        spec.seed = 3000 + trial;
        spec.length = 300;
        spec.response_lags = {0.4, -0.35};
        spec.driver_lags = {0.0, 0.5};
        spec.noise = 0.1;
        auto sim = synth::var_coupled(spec);
        if (causal::select_var_order(sim.response, sim.driver, 5) == 2) ++hits;
    }
    CHECK(hits >= 80);
}

TEST_CASE("a unit ceiling returns order one") {
    synth::VarCoupledSpec spec;
    spec.seed = 4;
    spec.response_lags = {0.5};
    spec.driver_lags = {0.3};
    auto sim = synth::var_coupled(spec);
    CHECK(causal::select_var_order(sim.response, sim.driver, 1) == 1);
}

TEST_CASE("the point gate rejects short inputs") {
    std::vector<double> x(17, 0.0), y(17, 0.0);
    for (int t = 0; t < 17; ++t) x[t] = y[t] = std::sin(0.7 * t);
    CHECK_THROWS_AS(causal::select_var_order(x, y, 5), TooShortError);
}

}  // var_order suite

TEST_SUITE("granger") {

TEST_CASE("a strongly coupled pair tests causal") {
    int hits = 0;
    for (int trial = 0; trial < 20; ++trial) {
        synth::VarCoupledSpec spec;
        spec.seed = 5000 + trial;
        spec.length = 300;
        spec.response_lags = {0.3};
        spec.driver_lags = {0.8};
        spec.noise = 0.1;
        auto sim = synth::var_coupled(spec);
        auto prepared = causal::prepare_stationary(sim.response, sim.driver);
        int order = causal::select_var_order(prepared.x, prepared.y, 5);
        auto result = causal::granger_test(prepared.x, prepared.y, order);
        if (result.causal) ++hits;
        CHECK(result.rows == prepared.x.size() - static_cast<std::size_t>(order));
    }
    CHECK(hits >= 18);
}

TEST_CASE("an uncoupled pair rarely tests causal") {
    int false_positives = 0;
    for (int trial = 0; trial < 100; ++trial) {
        synth::VarCoupledSpec spec;
        spec.seed = 6000 + trial;
        spec.length = 300;
        spec.response_lags = {0.3};
        spec.driver_lags = {};
        spec.noise = 1.0;
        auto sim = synth::var_coupled(spec);
        CHECK_FALSE(sim.causal_truth);
        auto prepared = causal::prepare_stationary(sim.response, sim.driver);
        int order = causal::select_var_order(prepared.x, prepared.y, 5);
        if (causal::granger_test(prepared.x, prepared.y, order).causal) ++false_positives;
    }
    CHECK(false_positives <= 15);
}

TEST_CASE("a constant driver is collinear") {
    synth::Rng rng(61);
    std::vector<double> target, driver;
    for (int t = 0; t < 80; ++t) {
        target.push_back(rng.normal(0.0, 1.0));
        driver.push_back(5.0);
    }
    CHECK_THROWS_AS(causal::granger_test(target, driver, 1), CollinearityError);
}

TEST_CASE("restricted residuals never beat the full model") {
    synth::Rng rng(62);
    for (int trial = 0; trial < 15; ++trial) {
        std::vector<double> target, driver;
        for (int t = 0; t < 60; ++t) {
            target.push_back(rng.normal(0.0, 1.0));
            driver.push_back(rng.normal(0.0, 1.0));
        }
        for (int order = 1; order <= 3; ++order) {
            auto result = causal::granger_test(target, driver, order);
            CHECK(result.rss_restricted >= result.rss_full - 1e-9);
            CHECK(result.f_statistic >= 0.0);
            CHECK(result.p_value >= 0.0);
            CHECK(result.p_value <= 1.0);
        }
    }
}

TEST_CASE("an exact linear dependence is flagged as a perfect fit") {
    synth::Rng rng(63);
    std::vector<double> driver = {0.3};
    for (int t = 1; t < 60; ++t) driver.push_back(0.6 * driver.back() + rng.normal(0.0, 0.5));
    std::vector<double> target = {0.1};
    for (int t = 1; t < 60; ++t) {
        target.push_back(0.3 * target[t - 1] + 0.7 * driver[t - 1]);
    }
    auto result = causal::granger_test(target, driver, 1);
    CHECK(result.perfect_fit);
    CHECK(result.causal);
    CHECK(result.p_value == 0.0);
    CHECK(std::isinf(result.f_statistic));
}

TEST_CASE("the row gate rejects short pairs") {
    std::vector<double> x = {1, 2, 3, 1, 2, 3};
    std::vector<double> y = {2, 1, 3, 2, 1, 3};
    CHECK_THROWS_AS(causal::granger_test(x, y, 1), TooShortError);
}

}  // granger suite

TEST_SUITE("forecast") {

TEST_CASE("noise-free driver recursions are predicted exactly") {
    synth::Rng rng(71);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> driver;
        for (int t = 0; t < 40; ++t) driver.push_back(rng.uniform(-2.0, 2.0));
        std::vector<double> target(40, 0.0);
        double c = rng.uniform(-1.0, 1.0);
        double b = rng.uniform(0.5, 2.0);
        for (int t = 1; t < 40; ++t) target[t] = c + b * driver[t - 1];
        auto result = causal::forecast_last(target, driver, 1);
        CHECK(std::abs(result.predicted_driver_only - result.actual) < 1e-9);
        CHECK(std::abs(result.predicted_full - result.actual) < 1e-6);
        CHECK(result.actual == target.back());
        CHECK(result.train_rows == 37);
        CHECK(result.lag_order == 1);
    }
}

TEST_CASE("lag-two recursions need both driver lags") {
    synth::Rng rng(72);
    std::vector<double> driver;
    for (int t = 0; t < 50; ++t) driver.push_back(rng.uniform(-2.0, 2.0));
    std::vector<double> target(50, 0.0);
    for (int t = 2; t < 50; ++t) target[t] = 0.5 + 1.2 * driver[t - 1] - 0.7 * driver[t - 2];
    auto result = causal::forecast_last(target, driver, 2);
    CHECK(std::abs(result.predicted_driver_only - result.actual) < 1e-9);
    CHECK(result.train_rows == 50 - 2 * 2 - 1);
}

TEST_CASE("the length gate rejects short series") {
    std::vector<double> x = {1, 2, 3};
    std::vector<double> y = {3, 2, 1};
    CHECK_THROWS_AS(causal::forecast_last(x, y, 1), TooShortError);
}

}  // forecast suite

TEST_SUITE("var_coupled_generator") {

TEST_CASE("zero noise reproduces the recursion exactly") {
    synth::VarCoupledSpec spec;
    spec.seed = 9;
    spec.length = 120;
    spec.response_lags = {0.4, -0.2};
    spec.driver_lags = {0.5, 0.1};
    spec.noise = 0.0;
    auto sim = synth::var_coupled(spec);
    REQUIRE(sim.response.size() == 120);
    REQUIRE(sim.driver.size() == 120);
    for (std::size_t t = 2; t < sim.response.size(); ++t) {
        double expect = 0.4 * sim.response[t - 1] - 0.2 * sim.response[t - 2] +
                        0.5 * sim.driver[t - 1] + 0.1 * sim.driver[t - 2];
        CHECK(sim.response[t] == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("causal truth reflects the driver coefficients") {
    synth::VarCoupledSpec coupled;
    coupled.driver_lags = {0.0, 0.8};
    CHECK(synth::var_coupled(coupled).causal_truth);
    synth::VarCoupledSpec null_spec;
    null_spec.driver_lags = {0.0, 0.0};
    CHECK_FALSE(synth::var_coupled(null_spec).causal_truth);
    synth::VarCoupledSpec empty_spec;
    empty_spec.driver_lags = {};
    CHECK_FALSE(synth::var_coupled(empty_spec).causal_truth);
}

TEST_CASE("the same seed reproduces the same series") {
    synth::VarCoupledSpec spec;
    spec.seed = 99;
    spec.driver_lags = {0.5};
    auto a = synth::var_coupled(spec);
    auto b = synth::var_coupled(spec);
    CHECK(a.driver == b.driver);
    CHECK(a.response == b.response);
}

}  // var_coupled_generator suite
