#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "lifecast/hawkes.hpp"
#include "lifecast/partition.hpp"

namespace lifecast::pipeline {

inline constexpr std::string_view kVersion = "0.1.0";

// Fixed-name artifacts inside the run directory. Tabular artifacts
// (scores, causality, forecast, sensitivity) take .csv or .json from
// RunConfig::format; everything else is always JSON or normalized text.
inline constexpr std::string_view kCascadesFile = "cascades.csv";
inline constexpr std::string_view kHistoryEdgesFile = "history_edges.csv";
inline constexpr std::string_view kIngestManifestFile = "ingest_manifest.json";
inline constexpr std::string_view kEventTimesFile = "event_times.json";
inline constexpr std::string_view kThresholdsFile = "thresholds.json";
inline constexpr std::string_view kJaccardFile = "jaccard.json";
inline constexpr std::string_view kCausalitySummaryFile = "causality_summary.json";
inline constexpr std::string_view kForecastMaeFile = "forecast_mae.json";
inline constexpr std::string_view kReportJsonFile = "report.json";
inline constexpr std::string_view kReportTextFile = "report.txt";
inline constexpr std::string_view kRunManifestFile = "run_manifest.json";
inline constexpr std::string_view kTruthFile = "truth.json";

// Reference values reported for a large-scale microblog corpus, recorded for
// side-by-side comparison in the report artifacts. Desk-scale runs are not
// expected to reproduce them.
inline constexpr double kReferenceCausalPctDegreeEntropy = 93.95;
inline constexpr double kReferenceCausalPctClustering = 89.4;
inline constexpr double kReferenceMaeDegreeEntropySteep = 33.65;
inline constexpr double kReferenceMaeDegreeEntropyInhib = 81.18;
inline constexpr double kReferenceMaeClusteringSteep = 224.04;
inline constexpr double kReferenceMaeClusteringInhib = 400.03;

struct RunConfig {
    std::filesystem::path input_path;    // raw event log (ingest / run)
    std::filesystem::path history_path;  // optional interaction-history edge list
    std::filesystem::path run_dir;       // artifact directory

    // detection
    double alpha = 5.0;
    double p_scale = 1.0;
    std::string kernel = "power-law";  // power-law | empirical
    double kernel_s0 = hawkes::ReactionKernel::kDefaultS0;
    double kernel_theta = hawkes::ReactionKernel::kDefaultTheta;
    double delta_k = 300.0;
    double t_th = 5000.0;
    // Either both set (calibration skipped) or both empty.
    std::optional<double> time_gap_threshold;
    std::optional<double> growth_threshold;

    // windows and measures
    std::size_t node_count = kDefaultSubsequenceNodeCount;
    std::size_t top_k = 20;
    double damping = 0.85;
    double alpha_fraction = 0.5;
    std::size_t trailing_windows = 20;

    // causality and forecasting
    int max_lag = 5;
    bool clipped = true;  // also emit the [t_steep, t_inhib] forecast variant

    // corpus handling
    std::size_t min_size = 300;
    int threads = 0;  // 0 = all available
    std::uint64_t seed = 1;
    std::string format = "csv";  // csv | json

    // simulate subcommand
    std::string sim_mode = "planted";  // planted | thinning | var
    std::size_t sim_cascades = 50;
    std::size_t sim_events = 600;
};

std::filesystem::path tabular_path(const RunConfig& config, std::string_view stem);

// Each stage reads the previous stage's artifacts from run_dir and writes its
// own; all are runnable standalone. Missing upstream artifacts raise
// MissingArtifactError naming the file, bad settings raise ConfigError, and
// corpus-level dead ends raise the library error they hit. Per-cascade
// failures are recorded in the stage's summary artifact and skipped.
void stage_ingest(const RunConfig& config);
void stage_detect(const RunConfig& config);
void stage_metrics(const RunConfig& config);
void stage_causality(const RunConfig& config);
void stage_forecast(const RunConfig& config);
void stage_report(const RunConfig& config);
void stage_sensitivity(const RunConfig& config);
void stage_simulate(const RunConfig& config);

// ingest → detect → metrics → causality → forecast → report, then the run
// manifest. Returns 0; errors propagate as exceptions.
int run_pipeline(const RunConfig& config);

}  // namespace lifecast::pipeline
