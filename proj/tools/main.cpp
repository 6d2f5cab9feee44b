#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "lifecast/errors.hpp"
#include "lifecast/pipeline.hpp"

namespace {

using lifecast::pipeline::RunConfig;
using ordered_json = nlohmann::ordered_json;

struct SubState {
    RunConfig cfg;
    std::string config_file;
    std::string input;
    std::string history;
    std::string run_dir;
    double time_gap = 0.0;
    double growth = 0.0;
    bool time_gap_set = false;
    bool growth_set = false;
    std::map<std::string, CLI::Option*> flags;
};

void attach(CLI::App* cmd, SubState& s) {
    auto& f = s.flags;
    f["config"] = cmd->add_option("--config", s.config_file,
                                  "JSON config file; explicit flags override its keys");
    f["input"] = cmd->add_option("--input", s.input, "raw event log to ingest");
    f["history"] =
        cmd->add_option("--history", s.history, "historical interaction edge list");
    f["run_dir"] = cmd->add_option("--run-dir", s.run_dir, "artifact directory");
    f["alpha"] = cmd->add_option("--alpha", s.cfg.alpha, "observation window scale");
    f["p_scale"] = cmd->add_option("--p-scale", s.cfg.p_scale, "intensity scale");
    f["kernel"] =
        cmd->add_option("--kernel", s.cfg.kernel, "reaction kernel: power-law | empirical");
    f["kernel_s0"] =
        cmd->add_option("--kernel-s0", s.cfg.kernel_s0, "kernel plateau cutoff, minutes");
    f["kernel_theta"] =
        cmd->add_option("--kernel-theta", s.cfg.kernel_theta, "kernel tail exponent");
    f["delta_k"] =
        cmd->add_option("--delta-k", s.cfg.delta_k, "inhibition lookback, minutes");
    f["t_th"] = cmd->add_option("--t-th", s.cfg.t_th, "type I onset threshold, minutes");
    f["time_gap_threshold"] =
        cmd->add_option("--time-gap-threshold", s.time_gap,
                        "explicit inhibition time-gap threshold (skips calibration)");
    f["growth_threshold"] =
        cmd->add_option("--growth-threshold", s.growth,
                        "explicit inhibition growth threshold (skips calibration)");
    f["node_count"] =
        cmd->add_option("--node-count", s.cfg.node_count, "nodes per subsequence");
    f["top_k"] = cmd->add_option("--top-k", s.cfg.top_k, "top-k size for rank overlap");
    f["damping"] = cmd->add_option("--damping", s.cfg.damping, "pagerank damping");
    f["alpha_fraction"] = cmd->add_option("--alpha-fraction", s.cfg.alpha_fraction,
                                          "alpha centrality fraction of 1/lambda_max");
    f["trailing_windows"] = cmd->add_option("--trailing-windows", s.cfg.trailing_windows,
                                            "windows kept before each event");
    f["max_lag"] =
        cmd->add_option("--max-lag", s.cfg.max_lag, "largest autoregressive order tried");
    f["clipped"] = cmd->add_flag("--clipped,!--no-clipped", s.cfg.clipped,
                                 "also forecast on the steep-to-inhibition clip");
    f["min_size"] =
        cmd->add_option("--min-size", s.cfg.min_size, "smallest cascade kept at ingest");
    f["threads"] = cmd->add_option("--threads", s.cfg.threads, "worker threads; 0 = all");
    f["seed"] = cmd->add_option("--seed", s.cfg.seed, "simulation seed");
    f["format"] =
        cmd->add_option("--format", s.cfg.format, "tabular output format: csv | json");
    f["sim_mode"] = cmd->add_option("--sim-mode", s.cfg.sim_mode,
                                    "simulate mode: planted | thinning | var");
    f["sim_cascades"] =
        cmd->add_option("--sim-cascades", s.cfg.sim_cascades, "simulated cascade count");
    f["sim_events"] =
        cmd->add_option("--sim-events", s.cfg.sim_events, "simulated events per cascade");
}

void apply_config_file(SubState& s) {
    if (s.config_file.empty()) return;
    std::ifstream in(s.config_file);
    if (!in) throw lifecast::ConfigError("cannot read config file: " + s.config_file);
    ordered_json doc;
    try {
        doc = ordered_json::parse(in);
    } catch (const std::exception& e) {
        throw lifecast::ConfigError("malformed config file " + s.config_file + ": " +
                                    e.what());
    }
    if (!doc.is_object()) {
        throw lifecast::ConfigError("config file must hold a JSON object: " + s.config_file);
    }
    for (const auto& [key, value] : doc.items()) {
        const auto it = s.flags.find(key);
        if (it == s.flags.end() || key == "config") {
            throw lifecast::ConfigError("unknown config key: " + key);
        }
        if (it->second->count() > 0) continue;
        try {
            if (key == "input") s.input = value.get<std::string>();
            else if (key == "history") s.history = value.get<std::string>();
            else if (key == "run_dir") s.run_dir = value.get<std::string>();
            else if (key == "alpha") s.cfg.alpha = value.get<double>();
            else if (key == "p_scale") s.cfg.p_scale = value.get<double>();
            else if (key == "kernel") s.cfg.kernel = value.get<std::string>();
            else if (key == "kernel_s0") s.cfg.kernel_s0 = value.get<double>();
            else if (key == "kernel_theta") s.cfg.kernel_theta = value.get<double>();
            else if (key == "delta_k") s.cfg.delta_k = value.get<double>();
            else if (key == "t_th") s.cfg.t_th = value.get<double>();
            else if (key == "time_gap_threshold") {
                s.time_gap = value.get<double>();
                s.time_gap_set = true;
            } else if (key == "growth_threshold") {
                s.growth = value.get<double>();
                s.growth_set = true;
            } else if (key == "node_count") s.cfg.node_count = value.get<std::size_t>();
            else if (key == "top_k") s.cfg.top_k = value.get<std::size_t>();
            else if (key == "damping") s.cfg.damping = value.get<double>();
            else if (key == "alpha_fraction") s.cfg.alpha_fraction = value.get<double>();
            else if (key == "trailing_windows")
                s.cfg.trailing_windows = value.get<std::size_t>();
            else if (key == "max_lag") s.cfg.max_lag = value.get<int>();
            else if (key == "clipped") s.cfg.clipped = value.get<bool>();
            else if (key == "min_size") s.cfg.min_size = value.get<std::size_t>();
            else if (key == "threads") s.cfg.threads = value.get<int>();
            else if (key == "seed") s.cfg.seed = value.get<std::uint64_t>();
            else if (key == "format") s.cfg.format = value.get<std::string>();
            else if (key == "sim_mode") s.cfg.sim_mode = value.get<std::string>();
            else if (key == "sim_cascades") s.cfg.sim_cascades = value.get<std::size_t>();
            else if (key == "sim_events") s.cfg.sim_events = value.get<std::size_t>();
        } catch (const ordered_json::exception& e) {
            throw lifecast::ConfigError("config key " + key + " has the wrong type: " +
                                        e.what());
        }
    }
}

void finalize(SubState& s) {
    if (s.flags.at("time_gap_threshold")->count() > 0) s.time_gap_set = true;
    if (s.flags.at("growth_threshold")->count() > 0) s.growth_set = true;
    apply_config_file(s);
    s.cfg.input_path = s.input;
    s.cfg.history_path = s.history;
    s.cfg.run_dir = s.run_dir;
    if (s.time_gap_set) s.cfg.time_gap_threshold = s.time_gap;
    if (s.growth_set) s.cfg.growth_threshold = s.growth;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "lifecast: cascade lifecycle event detection, temporal network measures,\n"
        "causal effect on response times, and event-time forecasting"};
    app.require_subcommand(1);

    struct Entry {
        const char* name;
        const char* desc;
        std::function<void(const RunConfig&)> fn;
    };
    const std::vector<Entry> entries = {
        {"ingest", "normalize an event log into the run directory",
         lifecast::pipeline::stage_ingest},
        {"detect", "locate steep and inhibition event times",
         lifecast::pipeline::stage_detect},
        {"metrics", "score trailing windows with the six node measures",
         lifecast::pipeline::stage_metrics},
        {"causality", "test whether each measure drives reshare response times",
         lifecast::pipeline::stage_causality},
        {"forecast", "one-step response-time forecasts at each lifecycle event",
         lifecast::pipeline::stage_forecast},
        {"simulate", "generate synthetic cascades or coupled series",
         lifecast::pipeline::stage_simulate},
        {"sensitivity", "rerun threshold calibration across the alpha grid",
         lifecast::pipeline::stage_sensitivity},
        {"report", "assemble the machine- and human-readable run report",
         lifecast::pipeline::stage_report},
        {"run", "full pipeline: ingest through report",
         [](const RunConfig& cfg) { lifecast::pipeline::run_pipeline(cfg); }},
    };

    std::vector<std::unique_ptr<SubState>> states;
    for (const auto& entry : entries) {
        CLI::App* cmd = app.add_subcommand(entry.name, entry.desc);
        states.push_back(std::make_unique<SubState>());
        SubState* state = states.back().get();
        attach(cmd, *state);
        auto fn = entry.fn;
        cmd->callback([state, fn]() {
            finalize(*state);
            fn(state->cfg);
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const lifecast::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const lifecast::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
