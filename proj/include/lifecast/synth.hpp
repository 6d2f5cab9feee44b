#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "lifecast/types.hpp"

namespace lifecast::synth {

/// Deterministic variate transforms over a fixed-width engine, so generated
/// corpora are stable across standard-library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, 1), 53-bit resolution.
    double uniform();
    double uniform(double lo, double hi);
    double exponential(double rate);
    double normal(double mean, double sd);
    /// Uniform integer in [0, bound), bound >= 1.
    std::uint64_t below(std::uint64_t bound);

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

/// Discrete power law P(w) proportional to w^-exponent on {1, ..., cap}.
class MarkSampler {
public:
    MarkSampler(double exponent, unsigned cap);
    unsigned sample(Rng& rng) const;
    double mean() const;

private:
    std::vector<double> cdf_;
};

enum class Mode { PlantedLogistic, HawkesThinning, VarCoupled };

struct SynthSpec {
    std::uint64_t seed = 1;
    Mode mode = Mode::PlantedLogistic;
    std::string id = "synth-0001";

    // follower-degree marks, realized as history-graph edges
    double mark_exponent = 2.5;
    unsigned mark_cap = 30;
    // chance a new adopter also carries a history tie to an earlier adopter,
    // which closes triangles inside analysis windows
    double cross_edge_p = 0.35;

    // planted-logistic shape
    double t_steep = 500.0;   // planted steep time, minutes
    double t_inhib = 750.0;   // planted inhibition time, minutes
    std::size_t events = 600; // main-phase budget (thinning: total event cap)
    double tail_fraction = 0.18;     // tail activity relative to peak density
    double modulation_depth = 0.6;   // tail dip depth in (0, 1)
    double period_bins = 6.0;        // tail modulation period, detector bins
    std::size_t tail_periods = 5;
    double alpha_hint = 5.0;         // detector bin scale the tail grid assumes

    // hawkes-thinning
    double kernel_s0 = 5.0;
    double kernel_theta = 0.242;
    double branching = 0.3;          // acceptance scale applied to kernel mass
    std::size_t max_generation = 0;  // 0 = unlimited offspring depth
    double max_time = 50000.0;
    unsigned root_mark = 0;          // 0 = draw from the mark law
};

struct GroundTruth {
    std::string cascade_id;
    Mode mode = Mode::PlantedLogistic;
    double t_steep = 0.0;  // planted values; zero for thinning
    double t_inhib = 0.0;
    double span = 0.0;
    std::size_t events = 0;
};

struct GeneratedCascade {
    Cascade cascade;
    std::vector<Edge> history_edges;
    GroundTruth truth;
};

/// Event times follow a logistic cumulative shape peaking at t_steep and
/// leveling off at t_inhib, followed by a decaying modulated tail whose
/// first dip sits at t_inhib. Throws SynthSpecError on infeasible specs.
GeneratedCascade planted_logistic(const SynthSpec& spec, NodeTable& nodes);

/// Self-exciting simulation by thinning against a piecewise-constant bound
/// (the kernel is nonincreasing, so the bound at the current time holds for
/// the whole future). Each accepted event picks its parent proportionally
/// to mark x kernel value and reshares from that parent's adopter.
GeneratedCascade hawkes_thinning(const SynthSpec& spec, NodeTable& nodes);

struct VarCoupledSpec {
    std::uint64_t seed = 1;
    std::size_t length = 300;
    std::vector<double> response_lags;  // response on its own lags
    std::vector<double> driver_lags;    // response on driver lags
    double driver_ar = 0.5;
    double driver_noise = 1.0;
    double noise = 0.1;                 // response innovation scale
    std::size_t burn_in = 50;
};

struct VarCoupledResult {
    std::vector<double> driver;
    std::vector<double> response;
    bool causal_truth = false;  // any nonzero driver lag coefficient
};

/// Paired series from a known recursion, so causality ground truth is exact.
VarCoupledResult var_coupled(const VarCoupledSpec& spec);

struct CorpusSpec {
    std::size_t cascades = 50;
    SynthSpec base;  // id and seed fields are overwritten per cascade
    double t_steep_min = 300.0;
    double t_steep_max = 800.0;
    double gap_min = 200.0;  // t_inhib - t_steep range
    double gap_max = 300.0;
    std::uint64_t seed = 1;
    std::string id_prefix = "synth";
};

struct SynthCorpus {
    std::vector<Cascade> cascades;
    std::vector<GroundTruth> truth;
    HistoryGraph history;  // finalized
    NodeTable nodes;
};

/// Corpus of planted cascades with per-cascade randomized planted times,
/// one derived seed per cascade.
SynthCorpus build_corpus(const CorpusSpec& spec);

}  // namespace lifecast::synth
