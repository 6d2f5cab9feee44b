#include "lifecast/pipeline.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "json.hpp"

#include "lifecast/causal.hpp"
#include "lifecast/errors.hpp"
#include "lifecast/ingest.hpp"
#include "lifecast/metrics.hpp"
#include "lifecast/parallel.hpp"
#include "lifecast/series.hpp"
#include "lifecast/synth.hpp"
#include "lifecast/textio.hpp"

namespace lifecast::pipeline {
namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

fs::path artifact_path(const RunConfig& config, std::string_view name) {
    return config.run_dir / name;
}

void require_artifact(const fs::path& path) {
    if (!fs::exists(path)) {
        throw MissingArtifactError("missing artifact: " + path.string());
    }
}

void ensure_run_dir(const RunConfig& config) {
    if (config.run_dir.empty()) throw ConfigError("run directory required");
    std::error_code ec;
    fs::create_directories(config.run_dir, ec);
    if (ec) {
        throw ConfigError("cannot create run directory " + config.run_dir.string() + ": " +
                          ec.message());
    }
}

void check_common(const RunConfig& config) {
    if (config.format != "csv" && config.format != "json") {
        throw ConfigError("format must be csv or json, got: " + config.format);
    }
    if (config.threads < 0) throw ConfigError("threads must be >= 0");
}

void write_json_file(const fs::path& path, const ordered_json& doc) {
    textio::write_file(path, doc.dump(2) + "\n");
}

ordered_json read_json_file(const fs::path& path) {
    require_artifact(path);
    std::ifstream in(path);
    try {
        return ordered_json::parse(in);
    } catch (const std::exception& e) {
        throw Error("malformed artifact " + path.string() + ": " + e.what());
    }
}

// Tabular artifacts hold typed cells; CSV rendering keeps the shortest
// round-trip form so rereading a cell reproduces the exact double.
using Cell = ordered_json;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

std::string render_cell_csv(const Cell& cell) {
    if (cell.is_null()) return "";
    if (cell.is_string()) return cell.get<std::string>();
    if (cell.is_boolean()) return cell.get<bool>() ? "true" : "false";
    if (cell.is_number_float()) return textio::format_double(cell.get<double>());
    if (cell.is_number_unsigned()) return std::to_string(cell.get<std::uint64_t>());
    if (cell.is_number_integer()) return std::to_string(cell.get<std::int64_t>());
    return cell.dump();
}

void write_table(const RunConfig& config, std::string_view stem, const Table& table) {
    const fs::path path = tabular_path(config, stem);
    if (config.format == "csv") {
        std::string out;
        for (std::size_t c = 0; c < table.columns.size(); ++c) {
            if (c) out += ',';
            out += table.columns[c];
        }
        out += '\n';
        for (const auto& row : table.rows) {
            for (std::size_t c = 0; c < row.size(); ++c) {
                if (c) out += ',';
                out += render_cell_csv(row[c]);
            }
            out += '\n';
        }
        textio::write_file(path, out);
        return;
    }
    ordered_json rows = ordered_json::array();
    for (const auto& row : table.rows) {
        ordered_json obj;
        for (std::size_t c = 0; c < row.size(); ++c) obj[table.columns[c]] = row[c];
        rows.push_back(std::move(obj));
    }
    write_json_file(path, rows);
}

struct LoadedCorpus {
    std::vector<Cascade> cascades;
    NodeTable names;
    HistoryGraph history;
};

LoadedCorpus load_corpus(const RunConfig& config) {
    LoadedCorpus out;
    const fs::path cascades_path = artifact_path(config, kCascadesFile);
    require_artifact(cascades_path);
    IngestReport report;
    out.cascades = ingest_cascades_file(cascades_path, 2, out.names, report);
    const fs::path history_path = artifact_path(config, kHistoryEdgesFile);
    if (fs::exists(history_path)) {
        out.history = load_history_file(history_path, out.names);
    } else {
        out.history.finalize();
    }
    return out;
}

std::string history_csv(const HistoryGraph& history, const NodeTable& names) {
    std::string out = "source,target\n";
    for (NodeId a = 0; a < names.size(); ++a) {
        for (NodeId b : history.neighbors(a)) {
            if (a < b) {
                out += names.name(a);
                out += ',';
                out += names.name(b);
                out += '\n';
            }
        }
    }
    return out;
}

hawkes::ReactionKernel make_kernel(const RunConfig& config,
                                   const std::vector<Cascade>& cascades) {
    if (config.kernel == "power-law") {
        return hawkes::ReactionKernel::power_law(config.kernel_s0, config.kernel_theta);
    }
    if (config.kernel == "empirical") {
        std::vector<double> gaps;
        for (const auto& cascade : cascades) {
            std::unordered_map<NodeId, double> adoption;
            for (const auto& event : cascade.events) {
                auto it = adoption.find(event.source);
                const double held_since = it == adoption.end() ? 0.0 : it->second;
                const double gap = event.time - held_since;
                if (gap > 0.0) gaps.push_back(gap);
                adoption.emplace(event.target, event.time);
            }
        }
        if (gaps.empty()) {
            throw ConfigError("empirical kernel needs positive reaction gaps in the corpus");
        }
        return hawkes::ReactionKernel::from_samples(gaps);
    }
    throw ConfigError("kernel must be power-law or empirical, got: " + config.kernel);
}

hawkes::DetectConfig make_detect_config(const RunConfig& config,
                                        const std::vector<Cascade>& cascades) {
    if (config.alpha <= 0.0) throw ConfigError("alpha must be positive");
    if (config.p_scale <= 0.0) throw ConfigError("p-scale must be positive");
    if (config.delta_k < 0.0) throw ConfigError("lookback must be nonnegative");
    if (config.t_th <= 0.0) throw ConfigError("onset threshold must be positive");
    hawkes::DetectConfig dc;
    dc.alpha = config.alpha;
    dc.p = config.p_scale;
    dc.delta_k = config.delta_k;
    dc.t_th = config.t_th;
    dc.kernel = make_kernel(config, cascades);
    return dc;
}

struct EventTimesEntry {
    double t_steep = 0.0;
    std::optional<double> t_inhib;
};

std::map<std::string, EventTimesEntry> load_event_times(const RunConfig& config) {
    const ordered_json doc = read_json_file(artifact_path(config, kEventTimesFile));
    std::map<std::string, EventTimesEntry> out;
    for (const auto& entry : doc.at("cascades")) {
        EventTimesEntry e;
        e.t_steep = entry.at("t_steep").get<double>();
        if (!entry.at("t_inhib").is_null()) e.t_inhib = entry.at("t_inhib").get<double>();
        out.emplace(entry.at("id").get<std::string>(), e);
    }
    return out;
}

std::vector<double> measure_scores(const RunConfig& config, metrics::Measure m,
                                   const metrics::WindowGraph& g) {
    switch (m) {
        case metrics::Measure::PageRank: {
            metrics::PageRankOptions options;
            options.damping = config.damping;
            return metrics::pagerank_scores(g, options);
        }
        case metrics::Measure::AlphaCentrality:
            return metrics::alpha_centrality_scores(g, config.alpha_fraction);
        case metrics::Measure::Betweenness:
            return metrics::betweenness_scores(g, 1);
        default:
            return metrics::scores_for(m, g, 1);
    }
}

constexpr std::size_t kMeasureCount = metrics::kAllMeasures.size();

struct CascadeAnalysis {
    std::vector<TemporalWindow> windows;
    std::vector<double> sub_t_end;  // subsequence close times, 1-based via index+1
    std::vector<metrics::WindowGraph> graphs;
    std::array<std::vector<std::vector<double>>, kMeasureCount> scores;
};

// Empty result carries the reason the cascade cannot be windowed or scored.
std::optional<std::string> build_analysis(const RunConfig& config, const Cascade& cascade,
                                          const HistoryGraph& history, CascadeAnalysis& out) {
    auto subs = build_subsequences(cascade, history, config.node_count);
    auto wr = build_windows(subs.subsequences, history);
    if (wr.too_few_subsequences || wr.windows.empty()) {
        return "fewer than two subsequences, no windows";
    }
    out.windows = std::move(wr.windows);
    out.sub_t_end.reserve(subs.subsequences.size());
    for (const auto& sub : subs.subsequences) out.sub_t_end.push_back(sub.t_end);
    out.graphs.reserve(out.windows.size());
    for (const auto& window : out.windows) {
        out.graphs.push_back(metrics::WindowGraph::build(window));
    }
    for (std::size_t mi = 0; mi < kMeasureCount; ++mi) {
        out.scores[mi].reserve(out.graphs.size());
        for (const auto& g : out.graphs) {
            out.scores[mi].push_back(measure_scores(config, metrics::kAllMeasures[mi], g));
        }
    }
    return std::nullopt;
}

// Window index N_e for an event: the first subsequence closing at or after
// the event time (the last one if the event outlives them all), floored at
// the first valid window index.
int window_cutoff(const std::vector<double>& sub_t_end, double t_event) {
    std::size_t s = sub_t_end.size();
    for (std::size_t i = 0; i < sub_t_end.size(); ++i) {
        if (sub_t_end[i] >= t_event) {
            s = i + 1;
            break;
        }
    }
    return std::max<int>(static_cast<int>(s), 2);
}

bool window_in_tail(const RunConfig& config, int window_index, int cutoff) {
    return window_index < cutoff &&
           window_index >= cutoff - static_cast<int>(config.trailing_windows);
}

struct EventRef {
    std::string name;  // "steep" | "inhib"
    double time = 0.0;
};

std::vector<EventRef> cascade_events(const EventTimesEntry& entry) {
    std::vector<EventRef> out{{"steep", entry.t_steep}};
    if (entry.t_inhib) out.push_back({"inhib", *entry.t_inhib});
    return out;
}

void validate_measure_config(const RunConfig& config) {
    if (config.damping <= 0.0 || config.damping >= 1.0) {
        throw ConfigError("damping must lie in (0, 1)");
    }
    if (config.alpha_fraction < 0.0 || config.alpha_fraction >= 1.0) {
        throw ConfigError("alpha-fraction must lie in [0, 1)");
    }
    if (config.top_k == 0) throw ConfigError("top-k must be positive");
    if (config.node_count < 2) throw ConfigError("node-count must be at least 2");
    if (config.max_lag < 1) throw ConfigError("max-lag must be at least 1");
}

std::string classify_skip(const Error& e) {
    if (dynamic_cast<const TooShortError*>(&e)) return "too_short";
    if (dynamic_cast<const CollinearityError*>(&e)) return "collinear";
    if (dynamic_cast<const SingularMatrixError*>(&e)) return "singular";
    if (dynamic_cast<const ConvergenceError*>(&e)) return "no_convergence";
    return "other";
}

ordered_json skip_counts_json(const std::map<std::string, std::size_t>& counts) {
    ordered_json out = ordered_json::object();
    for (const auto& [reason, count] : counts) out[reason] = count;
    return out;
}

}  // namespace

std::filesystem::path tabular_path(const RunConfig& config, std::string_view stem) {
    std::string name(stem);
    name += config.format == "json" ? ".json" : ".csv";
    return config.run_dir / name;
}

void stage_ingest(const RunConfig& config) {
    check_common(config);
    ensure_run_dir(config);
    if (config.input_path.empty()) throw ConfigError("ingest requires an input event log");
    if (!fs::exists(config.input_path)) {
        throw ConfigError("input event log not found: " + config.input_path.string());
    }
    if (config.min_size < 2) throw ConfigError("min-size must be at least 2");

    NodeTable names;
    IngestReport report;
    std::vector<Cascade> cascades =
        ingest_cascades_file(config.input_path, config.min_size, names, report);

    if (!config.history_path.empty()) {
        if (!fs::exists(config.history_path)) {
            throw ConfigError("history graph path not found: " + config.history_path.string());
        }
        HistoryGraph history = load_history_file(config.history_path, names);
        textio::write_file(artifact_path(config, kHistoryEdgesFile),
                           history_csv(history, names));
    }
    textio::write_file(artifact_path(config, kCascadesFile),
                       normalized_event_log(cascades, names));

    ordered_json manifest;
    manifest["version"] = kVersion;
    manifest["input"] = config.input_path.string();
    manifest["history"] =
        config.history_path.empty() ? ordered_json(nullptr) : ordered_json(config.history_path.string());
    manifest["min_size"] = config.min_size;
    manifest["total_rows"] = report.total_rows;
    manifest["accepted_events"] = report.accepted_events;
    manifest["dropped_small_cascades"] = report.dropped_small_cascades;
    manifest["nodes"] = names.size();
    manifest["cascades"] = cascades.size();
    ordered_json ids = ordered_json::array();
    for (const auto& cascade : cascades) ids.push_back(cascade.id);
    manifest["cascade_ids"] = std::move(ids);
    ordered_json rejected = ordered_json::array();
    for (const auto& row : report.rejected) {
        rejected.push_back(ordered_json{{"line", row.line}, {"reason", row.reason}});
    }
    manifest["rejected"] = std::move(rejected);
    write_json_file(artifact_path(config, kIngestManifestFile), manifest);
}

void stage_detect(const RunConfig& config) {
    check_common(config);
    ensure_run_dir(config);
    LoadedCorpus corpus = load_corpus(config);
    const hawkes::DetectConfig dc = make_detect_config(config, corpus.cascades);

    const int n = static_cast<int>(corpus.cascades.size());
    std::vector<std::optional<hawkes::CascadeDetection>> detections(n);
    std::vector<std::string> reasons(n);
    const int team = resolve_threads(config.threads);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(team)
#endif
    for (int i = 0; i < n; ++i) {
        try {
            detections[i] = hawkes::detect_cascade(corpus.cascades[i], corpus.history, dc);
        } catch (const Error& e) {
            reasons[i] = e.what();
        }
    }

    std::vector<hawkes::CascadeDetection> analyzed;
    analyzed.reserve(detections.size());
    for (auto& d : detections) {
        if (d) analyzed.push_back(std::move(*d));
    }

    hawkes::ThresholdParams thresholds;
    std::string mode;
    if (config.time_gap_threshold || config.growth_threshold) {
        if (!(config.time_gap_threshold && config.growth_threshold)) {
            throw ConfigError("time-gap and growth thresholds must be set together");
        }
        thresholds.tg_p = *config.time_gap_threshold;
        thresholds.g_p = *config.growth_threshold;
        thresholds.beta_tg = std::numeric_limits<double>::quiet_NaN();
        thresholds.beta_g = std::numeric_limits<double>::quiet_NaN();
        mode = "explicit";
    } else {
        thresholds = hawkes::calibrate_thresholds(analyzed);
        mode = "calibrated";
    }

    std::size_t pooled = 0;
    ordered_json entries = ordered_json::array();
    for (const auto& detection : analyzed) {
        pooled += detection.candidates.size();
        const hawkes::EventTimes et =
            hawkes::finalize_inhibition(detection, thresholds, config.t_th);
        ordered_json entry;
        entry["id"] = detection.cascade_id;
        entry["t_steep"] = detection.t_steep;
        entry["steep_index"] = detection.steep_index;
        entry["interval_width"] = detection.interval_width;
        entry["span"] = detection.span;
        entry["size_at_steep"] = detection.size_at_steep;
        entry["type"] = et.type == hawkes::CascadeType::TypeI ? "type1" : "other";
        entry["t_inhib"] = et.t_inhib ? ordered_json(*et.t_inhib) : ordered_json(nullptr);
        ordered_json candidates = ordered_json::array();
        for (std::size_t k = 0; k < detection.candidates.size(); ++k) {
            const auto& c = detection.candidates[k];
            candidates.push_back(ordered_json{{"time", c.time},
                                              {"interval_index", c.interval_index},
                                              {"lookback_empty", c.lookback_empty},
                                              {"size", detection.size_at_candidate[k]}});
        }
        entry["candidates"] = std::move(candidates);
        entries.push_back(std::move(entry));
    }

    ordered_json doc;
    doc["version"] = kVersion;
    doc["t_th"] = config.t_th;
    doc["analyzed"] = entries.size();
    doc["cascades"] = std::move(entries);
    ordered_json skipped = ordered_json::array();
    for (int i = 0; i < n; ++i) {
        if (!reasons[i].empty()) {
            skipped.push_back(
                ordered_json{{"id", corpus.cascades[i].id}, {"reason", reasons[i]}});
        }
    }
    doc["skipped"] = std::move(skipped);
    write_json_file(artifact_path(config, kEventTimesFile), doc);

    ordered_json tdoc;
    tdoc["version"] = kVersion;
    tdoc["mode"] = mode;
    tdoc["time_gap_threshold"] = thresholds.tg_p;
    tdoc["growth_threshold"] = thresholds.g_p;
    tdoc["beta_time_gap"] = thresholds.beta_tg;
    tdoc["beta_growth"] = thresholds.beta_g;
    tdoc["pooled_candidates"] = pooled;
    write_json_file(artifact_path(config, kThresholdsFile), tdoc);
}

namespace {

struct MetricsSlot {
    bool analyzed = false;
    std::string reason;
    std::vector<std::vector<Cell>> rows;
    // Jaccard sums per event over that event's trailing windows.
    std::array<std::array<std::array<double, kMeasureCount>, kMeasureCount>, 2> jaccard_sum{};
    std::array<std::size_t, 2> jaccard_windows{};
};

}  // namespace

void stage_metrics(const RunConfig& config) {
    check_common(config);
    validate_measure_config(config);
    ensure_run_dir(config);
    LoadedCorpus corpus = load_corpus(config);
    const auto event_times = load_event_times(config);

    const int n = static_cast<int>(corpus.cascades.size());
    std::vector<MetricsSlot> slots(n);
    const int team = resolve_threads(config.threads);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(team)
#endif
    for (int i = 0; i < n; ++i) {
        const Cascade& cascade = corpus.cascades[i];
        MetricsSlot& slot = slots[i];
        const auto it = event_times.find(cascade.id);
        if (it == event_times.end()) {
            slot.reason = "no detected event times";
            continue;
        }
        try {
            CascadeAnalysis analysis;
            if (auto reason = build_analysis(config, cascade, corpus.history, analysis)) {
                slot.reason = *reason;
                continue;
            }
            const auto events = cascade_events(it->second);
            for (std::size_t ei = 0; ei < events.size(); ++ei) {
                const int cutoff = window_cutoff(analysis.sub_t_end, events[ei].time);
                for (std::size_t w = 0; w < analysis.windows.size(); ++w) {
                    const auto& window = analysis.windows[w];
                    if (!window_in_tail(config, window.index, cutoff)) continue;
                    const auto& g = analysis.graphs[w];

                    std::vector<std::pair<std::string, std::size_t>> order;
                    order.reserve(g.size());
                    for (std::size_t v = 0; v < g.size(); ++v) {
                        order.emplace_back(corpus.names.name(g.node(v)), v);
                    }
                    std::sort(order.begin(), order.end());
                    for (const auto& [name, v] : order) {
                        std::vector<Cell> row{cascade.id,      events[ei].name,
                                              window.index,    window.t_start,
                                              window.t_end,    name};
                        for (std::size_t mi = 0; mi < kMeasureCount; ++mi) {
                            row.push_back(analysis.scores[mi][w][v]);
                        }
                        slot.rows.push_back(std::move(row));
                    }

                    for (std::size_t a = 0; a < kMeasureCount; ++a) {
                        for (std::size_t b = a; b < kMeasureCount; ++b) {
                            const double j = metrics::jaccard_topk(
                                g, analysis.scores[a][w], analysis.scores[b][w], config.top_k);
                            slot.jaccard_sum[ei][a][b] += j;
                            if (a != b) slot.jaccard_sum[ei][b][a] += j;
                        }
                    }
                    slot.jaccard_windows[ei] += 1;
                }
            }
            slot.analyzed = true;
        } catch (const Error& e) {
            slot.reason = e.what();
            slot.rows.clear();
        }
    }

    Table scores;
    scores.columns = {"cascade_id", "event", "window", "t_start", "t_end", "node"};
    for (auto m : metrics::kAllMeasures) scores.columns.emplace_back(metrics::measure_name(m));
    std::array<std::array<std::array<double, kMeasureCount>, kMeasureCount>, 2> jaccard_sum{};
    std::array<std::size_t, 2> jaccard_windows{};
    std::size_t analyzed = 0;
    ordered_json skipped = ordered_json::array();
    for (int i = 0; i < n; ++i) {
        MetricsSlot& slot = slots[i];
        if (!slot.analyzed) {
            skipped.push_back(
                ordered_json{{"id", corpus.cascades[i].id}, {"reason", slot.reason}});
            continue;
        }
        ++analyzed;
        for (auto& row : slot.rows) scores.rows.push_back(std::move(row));
        for (std::size_t ei = 0; ei < 2; ++ei) {
            jaccard_windows[ei] += slot.jaccard_windows[ei];
            for (std::size_t a = 0; a < kMeasureCount; ++a) {
                for (std::size_t b = 0; b < kMeasureCount; ++b) {
                    jaccard_sum[ei][a][b] += slot.jaccard_sum[ei][a][b];
                }
            }
        }
    }
    write_table(config, "scores", scores);

    ordered_json jdoc;
    jdoc["version"] = kVersion;
    jdoc["top_k"] = config.top_k;
    jdoc["analyzed"] = analyzed;
    jdoc["skipped"] = std::move(skipped);
    const std::array<std::string, 2> event_names{"steep", "inhib"};
    ordered_json events = ordered_json::object();
    for (std::size_t ei = 0; ei < 2; ++ei) {
        ordered_json mean = ordered_json::object();
        for (std::size_t a = 0; a < kMeasureCount; ++a) {
            ordered_json row = ordered_json::object();
            for (std::size_t b = 0; b < kMeasureCount; ++b) {
                row[std::string(metrics::measure_name(metrics::kAllMeasures[b]))] =
                    jaccard_sum[ei][a][b] / static_cast<double>(jaccard_windows[ei]);
            }
            mean[std::string(metrics::measure_name(metrics::kAllMeasures[a]))] = std::move(row);
        }
        events[event_names[ei]] =
            ordered_json{{"windows", jaccard_windows[ei]}, {"mean", std::move(mean)}};
    }
    jdoc["events"] = std::move(events);
    write_json_file(artifact_path(config, kJaccardFile), jdoc);
}

namespace {

struct TestAggregate {
    std::size_t tested = 0;
    std::size_t causal = 0;
    double p_sum = 0.0;
};

struct CausalSlot {
    bool analyzed = false;
    std::string reason;
    std::vector<std::vector<Cell>> rows;
    std::array<std::array<TestAggregate, 2>, kMeasureCount> agg{};
    std::map<std::string, std::size_t> skips;
    std::size_t missing_sources = 0;
};

ordered_json aggregate_json(const TestAggregate& a) {
    const double pct =
        a.tested == 0 ? std::numeric_limits<double>::quiet_NaN()
                      : 100.0 * static_cast<double>(a.causal) / static_cast<double>(a.tested);
    const double mean_p =
        a.tested == 0 ? std::numeric_limits<double>::quiet_NaN()
                      : a.p_sum / static_cast<double>(a.tested);
    return ordered_json{{"tested", a.tested},
                        {"causal", a.causal},
                        {"causal_pct", pct},
                        {"mean_p_value", mean_p}};
}

}  // namespace

void stage_causality(const RunConfig& config) {
    check_common(config);
    validate_measure_config(config);
    ensure_run_dir(config);
    LoadedCorpus corpus = load_corpus(config);
    const auto event_times = load_event_times(config);

    const int n = static_cast<int>(corpus.cascades.size());
    std::vector<CausalSlot> slots(n);
    const int team = resolve_threads(config.threads);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(team)
#endif
    for (int i = 0; i < n; ++i) {
        const Cascade& cascade = corpus.cascades[i];
        CausalSlot& slot = slots[i];
        const auto it = event_times.find(cascade.id);
        if (it == event_times.end()) {
            slot.reason = "no detected event times";
            continue;
        }
        try {
            CascadeAnalysis analysis;
            if (auto reason = build_analysis(config, cascade, corpus.history, analysis)) {
                slot.reason = *reason;
                continue;
            }
            const series::SeriesPoints response = series::response_series(cascade);
            const auto events = cascade_events(it->second);
            for (std::size_t mi = 0; mi < kMeasureCount; ++mi) {
                const auto feature = series::feature_series(cascade, analysis.windows,
                                                            analysis.graphs, analysis.scores[mi]);
                if (mi == 0) slot.missing_sources = feature.missing_sources;
                for (std::size_t ei = 0; ei < events.size(); ++ei) {
                    const auto aligned = series::align(feature.points, response, events[ei].time);
                    try {
                        const auto prepared =
                            causal::prepare_stationary(aligned.response, aligned.feature);
                        const int order =
                            causal::select_var_order(prepared.x, prepared.y, config.max_lag);
                        const auto result = causal::granger_test(prepared.x, prepared.y, order);
                        slot.rows.push_back({cascade.id,
                                             std::string(metrics::measure_name(
                                                 metrics::kAllMeasures[mi])),
                                             events[ei].name, result.lag_order,
                                             result.f_statistic, result.p_value, result.causal});
                        TestAggregate& agg = slot.agg[mi][ei];
                        agg.tested += 1;
                        agg.causal += result.causal ? 1 : 0;
                        agg.p_sum += result.p_value;
                    } catch (const Error& e) {
                        slot.skips[classify_skip(e)] += 1;
                    }
                }
            }
            slot.analyzed = true;
        } catch (const Error& e) {
            slot.reason = e.what();
            slot.rows.clear();
        }
    }

    Table table;
    table.columns = {"cascade_id", "measure", "event", "p_order", "f_stat", "p_value", "causal"};
    std::array<std::array<TestAggregate, 2>, kMeasureCount> agg{};
    std::map<std::string, std::size_t> skips;
    std::size_t missing_sources = 0;
    std::size_t analyzed = 0;
    ordered_json skipped = ordered_json::array();
    for (int i = 0; i < n; ++i) {
        CausalSlot& slot = slots[i];
        if (!slot.analyzed) {
            skipped.push_back(
                ordered_json{{"id", corpus.cascades[i].id}, {"reason", slot.reason}});
            continue;
        }
        ++analyzed;
        for (auto& row : slot.rows) table.rows.push_back(std::move(row));
        for (std::size_t mi = 0; mi < kMeasureCount; ++mi) {
            for (std::size_t ei = 0; ei < 2; ++ei) {
                agg[mi][ei].tested += slot.agg[mi][ei].tested;
                agg[mi][ei].causal += slot.agg[mi][ei].causal;
                agg[mi][ei].p_sum += slot.agg[mi][ei].p_sum;
            }
        }
        for (const auto& [reason, count] : slot.skips) skips[reason] += count;
        missing_sources += slot.missing_sources;
    }
    write_table(config, "causality", table);

    ordered_json summary;
    summary["version"] = kVersion;
    summary["p_value_level"] = causal::kCausalPValue;
    summary["analyzed_cascades"] = analyzed;
    ordered_json measures = ordered_json::object();
    for (std::size_t mi = 0; mi < kMeasureCount; ++mi) {
        TestAggregate total;
        total.tested = agg[mi][0].tested + agg[mi][1].tested;
        total.causal = agg[mi][0].causal + agg[mi][1].causal;
        total.p_sum = agg[mi][0].p_sum + agg[mi][1].p_sum;
        ordered_json entry = aggregate_json(total);
        entry["events"] = ordered_json{{"steep", aggregate_json(agg[mi][0])},
                                       {"inhib", aggregate_json(agg[mi][1])}};
        measures[std::string(metrics::measure_name(metrics::kAllMeasures[mi]))] =
            std::move(entry);
    }
    summary["measures"] = std::move(measures);
    summary["skipped_cascades"] = std::move(skipped);
    summary["skipped_tests"] = skip_counts_json(skips);
    summary["missing_source_events"] = missing_sources;
    summary["reference"] =
        ordered_json{{"causal_pct", ordered_json{{"degree_entropy", kReferenceCausalPctDegreeEntropy},
                                                 {"clustering", kReferenceCausalPctClustering}}}};
    write_json_file(artifact_path(config, kCausalitySummaryFile), summary);
}

namespace {

struct ForecastVariant {
    std::string event;    // "steep" | "inhib"
    std::string variant;  // "full" | "clipped"
};

struct ForecastSlot {
    bool analyzed = false;
    std::string reason;
    std::vector<std::vector<Cell>> rows;
    std::map<std::string, std::size_t> skips;
};

struct MaeAggregate {
    double sum = 0.0;
    std::size_t count = 0;
};

}  // namespace

void stage_forecast(const RunConfig& config) {
    check_common(config);
    validate_measure_config(config);
    ensure_run_dir(config);
    LoadedCorpus corpus = load_corpus(config);
    const auto event_times = load_event_times(config);

    const int n = static_cast<int>(corpus.cascades.size());
    std::vector<ForecastSlot> slots(n);
    const int team = resolve_threads(config.threads);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(team)
#endif
    for (int i = 0; i < n; ++i) {
        const Cascade& cascade = corpus.cascades[i];
        ForecastSlot& slot = slots[i];
        const auto it = event_times.find(cascade.id);
        if (it == event_times.end()) {
            slot.reason = "no detected event times";
            continue;
        }
        try {
            CascadeAnalysis analysis;
            if (auto reason = build_analysis(config, cascade, corpus.history, analysis)) {
                slot.reason = *reason;
                continue;
            }
            const EventTimesEntry& entry = it->second;
            std::vector<ForecastVariant> variants{{"steep", "full"}};
            if (entry.t_inhib) {
                variants.push_back({"inhib", "full"});
                if (config.clipped) variants.push_back({"inhib", "clipped"});
            }
            const series::SeriesPoints response = series::response_series(cascade);
            for (std::size_t mi = 0; mi < kMeasureCount; ++mi) {
                const auto feature = series::feature_series(cascade, analysis.windows,
                                                            analysis.graphs, analysis.scores[mi]);
                for (const auto& variant : variants) {
                    series::AlignedSeries aligned;
                    if (variant.event == "steep") {
                        aligned = series::align(feature.points, response, entry.t_steep);
                    } else if (variant.variant == "full") {
                        aligned = series::align(feature.points, response, *entry.t_inhib);
                    } else {
                        aligned = series::align(feature.points, response, *entry.t_inhib,
                                                std::pair{entry.t_steep, *entry.t_inhib});
                    }
                    try {
                        const auto prepared =
                            causal::prepare_stationary(aligned.response, aligned.feature);
                        const int order =
                            causal::select_var_order(prepared.x, prepared.y, config.max_lag);
                        const auto fc = causal::forecast_last(prepared.x, prepared.y, order);
                        double actual = fc.actual;
                        double pred_driver = fc.predicted_driver_only;
                        double pred_full = fc.predicted_full;
                        if (prepared.x_differenced) {
                            const auto& original = aligned.response;
                            const double base = original[original.size() - 2];
                            actual = original.back();
                            pred_driver = base + fc.predicted_driver_only;
                            pred_full = base + fc.predicted_full;
                        }
                        slot.rows.push_back(
                            {cascade.id,
                             std::string(metrics::measure_name(metrics::kAllMeasures[mi])),
                             variant.event, variant.variant, fc.lag_order, fc.train_rows,
                             actual, pred_driver, pred_full, std::abs(pred_driver - actual),
                             std::abs(pred_full - actual)});
                    } catch (const Error& e) {
                        slot.skips[classify_skip(e)] += 1;
                    }
                }
            }
            slot.analyzed = true;
        } catch (const Error& e) {
            slot.reason = e.what();
            slot.rows.clear();
        }
    }

    Table table;
    table.columns = {"cascade_id",          "measure",        "event",
                     "variant",             "p_order",        "train_rows",
                     "actual",              "predicted_driver_only", "predicted_full",
                     "abs_error_driver_only", "abs_error_full"};
    // Group means accumulate in emitted row order, so rebuilding them from the
    // rows reproduces each mean bit for bit.
    std::map<std::array<std::string, 4>, MaeAggregate> groups;
    std::map<std::string, std::size_t> skips;
    std::size_t analyzed = 0;
    ordered_json skipped = ordered_json::array();
    for (int i = 0; i < n; ++i) {
        ForecastSlot& slot = slots[i];
        if (!slot.analyzed) {
            skipped.push_back(
                ordered_json{{"id", corpus.cascades[i].id}, {"reason", slot.reason}});
            continue;
        }
        ++analyzed;
        for (auto& row : slot.rows) {
            const std::string measure = row[1].get<std::string>();
            const std::string event = row[2].get<std::string>();
            const std::string variant = row[3].get<std::string>();
            MaeAggregate& driver = groups[{"driver_only", measure, event, variant}];
            driver.sum += row[9].get<double>();
            driver.count += 1;
            MaeAggregate& full = groups[{"full", measure, event, variant}];
            full.sum += row[10].get<double>();
            full.count += 1;
            table.rows.push_back(std::move(row));
        }
        for (const auto& [reason, count] : slot.skips) skips[reason] += count;
    }
    write_table(config, "forecast", table);

    ordered_json mdoc;
    mdoc["version"] = kVersion;
    mdoc["analyzed_cascades"] = analyzed;
    ordered_json rows = ordered_json::array();
    for (const std::string& model : {std::string("driver_only"), std::string("full")}) {
        for (auto m : metrics::kAllMeasures) {
            const std::string measure(metrics::measure_name(m));
            for (const std::string& event : {std::string("steep"), std::string("inhib")}) {
                for (const std::string& variant :
                     {std::string("full"), std::string("clipped")}) {
                    if (event == "steep" && variant == "clipped") continue;
                    const auto found = groups.find({model, measure, event, variant});
                    if (found == groups.end() || found->second.count == 0) continue;
                    rows.push_back(ordered_json{
                        {"model", model},
                        {"measure", measure},
                        {"event", event},
                        {"variant", variant},
                        {"count", found->second.count},
                        {"mae", found->second.sum /
                                    static_cast<double>(found->second.count)}});
                }
            }
        }
    }
    mdoc["groups"] = std::move(rows);
    mdoc["skipped_cascades"] = std::move(skipped);
    mdoc["skipped_tests"] = skip_counts_json(skips);
    mdoc["reference"] = ordered_json{
        {"mae",
         ordered_json{{"degree_entropy",
                       ordered_json{{"steep", kReferenceMaeDegreeEntropySteep},
                                    {"inhib", kReferenceMaeDegreeEntropyInhib}}},
                      {"clustering",
                       ordered_json{{"steep", kReferenceMaeClusteringSteep},
                                    {"inhib", kReferenceMaeClusteringInhib}}}}}};
    write_json_file(artifact_path(config, kForecastMaeFile), mdoc);
}

namespace {

void append_kv(std::string& out, std::string_view key, const std::string& value) {
    out += "  ";
    out += key;
    std::size_t pad = key.size() < 28 ? 28 - key.size() : 1;
    out.append(pad, ' ');
    out += value;
    out += '\n';
}

std::string fixed(double v, int digits = 4) {
    if (std::isnan(v)) return "-";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

}  // namespace

void stage_report(const RunConfig& config) {
    check_common(config);
    const ordered_json manifest = read_json_file(artifact_path(config, kIngestManifestFile));
    const ordered_json etimes = read_json_file(artifact_path(config, kEventTimesFile));
    const ordered_json thresholds = read_json_file(artifact_path(config, kThresholdsFile));
    const ordered_json causality =
        read_json_file(artifact_path(config, kCausalitySummaryFile));
    const ordered_json mae = read_json_file(artifact_path(config, kForecastMaeFile));

    std::set<std::string> known_ids;
    for (const auto& id : manifest.at("cascade_ids")) known_ids.insert(id.get<std::string>());
    std::size_t type1 = 0;
    std::size_t with_inhib = 0;
    double steep_sum = 0.0;
    double inhib_sum = 0.0;
    for (const auto& entry : etimes.at("cascades")) {
        const std::string id = entry.at("id").get<std::string>();
        if (!known_ids.count(id)) {
            throw Error("event-times cascade id absent from ingest manifest: " + id);
        }
        if (entry.at("type").get<std::string>() == "type1") ++type1;
        steep_sum += entry.at("t_steep").get<double>();
        if (!entry.at("t_inhib").is_null()) {
            ++with_inhib;
            inhib_sum += entry.at("t_inhib").get<double>();
        }
    }
    const std::size_t analyzed = etimes.at("cascades").size();
    const double mean_steep =
        analyzed ? steep_sum / static_cast<double>(analyzed)
                 : std::numeric_limits<double>::quiet_NaN();
    const double mean_inhib =
        with_inhib ? inhib_sum / static_cast<double>(with_inhib)
                   : std::numeric_limits<double>::quiet_NaN();

    ordered_json report;
    report["version"] = kVersion;
    report["corpus"] = ordered_json{{"cascades", manifest.at("cascades")},
                                    {"accepted_events", manifest.at("accepted_events")},
                                    {"nodes", manifest.at("nodes")},
                                    {"rejected_rows", manifest.at("rejected").size()},
                                    {"dropped_small_cascades",
                                     manifest.at("dropped_small_cascades")}};
    report["thresholds"] = ordered_json{{"mode", thresholds.at("mode")},
                                        {"time_gap", thresholds.at("time_gap_threshold")},
                                        {"growth", thresholds.at("growth_threshold")}};
    report["event_times"] = ordered_json{
        {"analyzed", analyzed},
        {"skipped", etimes.at("skipped").size()},
        {"type1", type1},
        {"other", analyzed - type1},
        {"with_inhibition", with_inhib},
        {"mean_t_steep", mean_steep},
        {"mean_t_inhib", mean_inhib}};
    report["causality"] = ordered_json{{"p_value_level", causality.at("p_value_level")},
                                       {"measures", causality.at("measures")},
                                       {"reference", causality.at("reference")}};
    report["forecast"] = ordered_json{{"groups", mae.at("groups")},
                                      {"reference", mae.at("reference")}};
    write_json_file(artifact_path(config, kReportJsonFile), report);

    std::string text = "cascade lifecycle run report\n";
    text += "============================\n\n";
    text += "corpus\n";
    append_kv(text, "cascades", std::to_string(manifest.at("cascades").get<std::size_t>()));
    append_kv(text, "accepted events",
              std::to_string(manifest.at("accepted_events").get<std::size_t>()));
    append_kv(text, "nodes", std::to_string(manifest.at("nodes").get<std::size_t>()));
    append_kv(text, "rejected rows", std::to_string(manifest.at("rejected").size()));
    append_kv(text, "dropped small cascades",
              std::to_string(manifest.at("dropped_small_cascades").get<std::size_t>()));
    text += "\nevent times\n";
    append_kv(text, "analyzed", std::to_string(analyzed));
    append_kv(text, "skipped", std::to_string(etimes.at("skipped").size()));
    append_kv(text, "type I", std::to_string(type1));
    append_kv(text, "with inhibition", std::to_string(with_inhib));
    append_kv(text, "mean t_steep (min)", fixed(mean_steep, 2));
    append_kv(text, "mean t_inhib (min)", fixed(mean_inhib, 2));
    text += "\nthresholds (" + thresholds.at("mode").get<std::string>() + ")\n";
    append_kv(text, "time gap (min)", fixed(thresholds.at("time_gap_threshold").get<double>(), 2));
    append_kv(text, "growth", fixed(thresholds.at("growth_threshold").get<double>(), 2));
    text += "\ncausality (level " + fixed(causality.at("p_value_level").get<double>(), 2) + ")\n";
    {
        char buf[160];
        std::snprintf(buf, sizeof buf, "  %-18s %7s %7s %8s %10s\n", "measure", "tested",
                      "causal", "pct", "mean p");
        text += buf;
        for (const auto& [name, entry] : causality.at("measures").items()) {
            const double pct = entry.at("causal_pct").is_null()
                                   ? std::numeric_limits<double>::quiet_NaN()
                                   : entry.at("causal_pct").get<double>();
            const double mean_p = entry.at("mean_p_value").is_null()
                                      ? std::numeric_limits<double>::quiet_NaN()
                                      : entry.at("mean_p_value").get<double>();
            std::snprintf(buf, sizeof buf, "  %-18s %7zu %7zu %8s %10s\n", name.c_str(),
                          entry.at("tested").get<std::size_t>(),
                          entry.at("causal").get<std::size_t>(), fixed(pct, 2).c_str(),
                          fixed(mean_p, 4).c_str());
            text += buf;
        }
    }
    text += "\nforecast mean absolute error (min)\n";
    {
        char buf[160];
        std::snprintf(buf, sizeof buf, "  %-12s %-18s %-6s %-8s %6s %12s\n", "model",
                      "measure", "event", "variant", "count", "mae");
        text += buf;
        for (const auto& row : mae.at("groups")) {
            std::snprintf(buf, sizeof buf, "  %-12s %-18s %-6s %-8s %6zu %12s\n",
                          row.at("model").get<std::string>().c_str(),
                          row.at("measure").get<std::string>().c_str(),
                          row.at("event").get<std::string>().c_str(),
                          row.at("variant").get<std::string>().c_str(),
                          row.at("count").get<std::size_t>(),
                          fixed(row.at("mae").get<double>(), 4).c_str());
            text += buf;
        }
    }
    textio::write_file(artifact_path(config, kReportTextFile), text);
}

void stage_sensitivity(const RunConfig& config) {
    check_common(config);
    ensure_run_dir(config);
    LoadedCorpus corpus = load_corpus(config);
    const hawkes::DetectConfig base = make_detect_config(config, corpus.cascades);
    const auto rows = hawkes::alpha_sensitivity(corpus.cascades, corpus.history, base,
                                                hawkes::kAlphaGrid, config.threads);
    Table table;
    table.columns = {"alpha", "beta_time_gap", "beta_growth", "analyzed", "skipped"};
    for (const auto& row : rows) {
        table.rows.push_back({row.alpha, row.beta_tg, row.beta_g, row.analyzed, row.skipped});
    }
    write_table(config, "sensitivity", table);
}

void stage_simulate(const RunConfig& config) {
    check_common(config);
    ensure_run_dir(config);
    if (config.sim_mode == "var") {
        synth::VarCoupledSpec spec;
        spec.seed = config.seed;
        spec.length = config.sim_events;
        spec.response_lags = {0.3};
        spec.driver_lags = {0.8};
        const auto result = synth::var_coupled(spec);
        Table table;
        table.columns = {"t", "driver", "response"};
        for (std::size_t t = 0; t < result.driver.size(); ++t) {
            table.rows.push_back(
                {t, result.driver[t], result.response[t]});
        }
        write_table(config, "series", table);
        ordered_json truth;
        truth["mode"] = "var";
        truth["causal"] = result.causal_truth;
        truth["length"] = result.driver.size();
        write_json_file(artifact_path(config, kTruthFile), truth);
        return;
    }

    NodeTable names;
    HistoryGraph history;
    std::vector<Cascade> cascades;
    std::vector<synth::GroundTruth> truths;
    if (config.sim_mode == "planted") {
        synth::CorpusSpec spec;
        spec.cascades = config.sim_cascades;
        spec.seed = config.seed;
        spec.base.events = config.sim_events;
        synth::SynthCorpus corpus = synth::build_corpus(spec);
        cascades = std::move(corpus.cascades);
        truths = std::move(corpus.truth);
        history = std::move(corpus.history);
        names = std::move(corpus.nodes);
    } else if (config.sim_mode == "thinning") {
        for (std::size_t c = 0; c < config.sim_cascades; ++c) {
            synth::SynthSpec spec;
            spec.mode = synth::Mode::HawkesThinning;
            spec.events = config.sim_events;
            spec.seed = config.seed * 0x9E3779B97F4A7C15ull + c + 1;
            char tag[64];
            std::snprintf(tag, sizeof tag, "synth-%04zu", c + 1);
            spec.id = tag;
            synth::GeneratedCascade generated = synth::hawkes_thinning(spec, names);
            for (const Edge& e : generated.history_edges) history.add_edge(e.a, e.b);
            cascades.push_back(std::move(generated.cascade));
            truths.push_back(generated.truth);
        }
        history.finalize();
    } else {
        throw ConfigError("simulate mode must be planted, thinning, or var, got: " +
                          config.sim_mode);
    }

    textio::write_file(config.run_dir / "events.csv", normalized_event_log(cascades, names));
    textio::write_file(config.run_dir / "history.csv", history_csv(history, names));
    ordered_json truth;
    truth["mode"] = config.sim_mode;
    ordered_json entries = ordered_json::array();
    for (const auto& t : truths) {
        entries.push_back(ordered_json{{"id", t.cascade_id},
                                       {"t_steep", t.t_steep},
                                       {"t_inhib", t.t_inhib},
                                       {"span", t.span},
                                       {"events", t.events}});
    }
    truth["cascades"] = std::move(entries);
    write_json_file(artifact_path(config, kTruthFile), truth);
}

int run_pipeline(const RunConfig& config) {
    stage_ingest(config);
    stage_detect(config);
    stage_metrics(config);
    stage_causality(config);
    stage_forecast(config);
    stage_report(config);

    const ordered_json manifest = read_json_file(artifact_path(config, kIngestManifestFile));
    const ordered_json etimes = read_json_file(artifact_path(config, kEventTimesFile));
    const ordered_json jaccard = read_json_file(artifact_path(config, kJaccardFile));
    const ordered_json causality =
        read_json_file(artifact_path(config, kCausalitySummaryFile));
    const ordered_json mae = read_json_file(artifact_path(config, kForecastMaeFile));

    ordered_json doc;
    doc["version"] = kVersion;
    // The parallelism degree is deliberately left out: the artifacts are
    // byte-identical across thread counts and the manifest must be too.
    ordered_json cfg;
    cfg["input"] = config.input_path.string();
    cfg["history"] = config.history_path.empty()
                         ? ordered_json(nullptr)
                         : ordered_json(config.history_path.string());
    cfg["alpha"] = config.alpha;
    cfg["p_scale"] = config.p_scale;
    cfg["kernel"] = config.kernel;
    cfg["kernel_s0"] = config.kernel_s0;
    cfg["kernel_theta"] = config.kernel_theta;
    cfg["delta_k"] = config.delta_k;
    cfg["t_th"] = config.t_th;
    cfg["time_gap_threshold"] = config.time_gap_threshold
                                    ? ordered_json(*config.time_gap_threshold)
                                    : ordered_json(nullptr);
    cfg["growth_threshold"] = config.growth_threshold ? ordered_json(*config.growth_threshold)
                                                      : ordered_json(nullptr);
    cfg["node_count"] = config.node_count;
    cfg["top_k"] = config.top_k;
    cfg["damping"] = config.damping;
    cfg["alpha_fraction"] = config.alpha_fraction;
    cfg["trailing_windows"] = config.trailing_windows;
    cfg["max_lag"] = config.max_lag;
    cfg["clipped"] = config.clipped;
    cfg["min_size"] = config.min_size;
    cfg["seed"] = config.seed;
    cfg["format"] = config.format;
    doc["config"] = std::move(cfg);
    ordered_json stages;
    stages["ingest"] = ordered_json{{"cascades", manifest.at("cascades")},
                                    {"accepted_events", manifest.at("accepted_events")},
                                    {"rejected_rows", manifest.at("rejected").size()},
                                    {"dropped_small_cascades",
                                     manifest.at("dropped_small_cascades")}};
    stages["detect"] = ordered_json{{"analyzed", etimes.at("analyzed")},
                                    {"skipped", etimes.at("skipped").size()}};
    stages["metrics"] = ordered_json{{"analyzed", jaccard.at("analyzed")},
                                     {"skipped", jaccard.at("skipped").size()}};
    std::size_t tested = 0;
    for (const auto& [name, entry] : causality.at("measures").items()) {
        tested += entry.at("tested").get<std::size_t>();
    }
    stages["causality"] = ordered_json{{"analyzed", causality.at("analyzed_cascades")},
                                       {"tests", tested},
                                       {"skipped_tests", causality.at("skipped_tests")}};
    stages["forecast"] = ordered_json{{"analyzed", mae.at("analyzed_cascades")},
                                      {"groups", mae.at("groups").size()},
                                      {"skipped_tests", mae.at("skipped_tests")}};
    stages["report"] = ordered_json{{"written", true}};
    doc["stages"] = std::move(stages);
    write_json_file(artifact_path(config, kRunManifestFile), doc);
    return 0;
}

}  // namespace lifecast::pipeline
