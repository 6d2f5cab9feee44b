#include "lifecast/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "lifecast/errors.hpp"
#include "lifecast/hawkes.hpp"

namespace lifecast::synth {

double Rng::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::exponential(double rate) {
    return -std::log1p(-uniform()) / rate;
}

double Rng::normal(double mean, double sd) {
    if (have_spare_) {
        have_spare_ = false;
        return mean + sd * spare_;
    }
    double u1 = 0.0;
    do {
        u1 = uniform();
    } while (u1 == 0.0);
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * 3.14159265358979323846 * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return mean + sd * radius * std::cos(angle);
}

std::uint64_t Rng::below(std::uint64_t bound) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(engine_()) * bound) >> 64);
}

MarkSampler::MarkSampler(double exponent, unsigned cap) {
    if (!(exponent > 1.0) || cap == 0) {
        throw SynthSpecError("mark law needs exponent > 1 and a positive cap");
    }
    cdf_.resize(cap);
    double total = 0.0;
    for (unsigned w = 1; w <= cap; ++w) {
        total += std::pow(static_cast<double>(w), -exponent);
        cdf_[w - 1] = total;
    }
    for (double& c : cdf_) c /= total;
}

unsigned MarkSampler::sample(Rng& rng) const {
    const double u = rng.uniform();
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return static_cast<unsigned>(it - cdf_.begin()) + 1;
}

double MarkSampler::mean() const {
    double m = 0.0;
    double prev = 0.0;
    for (std::size_t w = 1; w <= cdf_.size(); ++w) {
        m += static_cast<double>(w) * (cdf_[w - 1] - prev);
        prev = cdf_[w - 1];
    }
    return m;
}

namespace {

struct NodeFactory {
    NodeTable& table;
    const std::string& prefix;
    std::size_t members = 0;
    std::size_t fillers = 0;

    NodeId member() { return table.intern(prefix + "_n" + std::to_string(members++)); }
    NodeId filler() { return table.intern(prefix + "_h" + std::to_string(fillers++)); }
};

// Gives `node` a history degree equal to its mark using dedicated filler
// endpoints, so detection weights reproduce the drawn marks exactly.
void realize_mark(NodeId node, unsigned mark, NodeFactory& factory,
                  std::vector<Edge>& history_edges) {
    for (unsigned j = 0; j < mark; ++j) history_edges.emplace_back(node, factory.filler());
}

NodeId pick_source(const std::vector<NodeId>& participants, Rng& rng) {
    // recency bias: mostly reshared from recently active adopters
    if (participants.size() > 1 && rng.uniform() < 0.85) {
        const std::size_t window = std::min<std::size_t>(participants.size(), 30);
        return participants[participants.size() - window + rng.below(window)];
    }
    return participants[rng.below(participants.size())];
}

void maybe_cross_edge(NodeId target, NodeId source, const std::vector<NodeId>& participants,
                      double cross_edge_p, Rng& rng, std::vector<Edge>& history_edges) {
    if (participants.size() < 2 || !(cross_edge_p > 0.0)) return;
    if (rng.uniform() >= cross_edge_p) return;
    const NodeId other = pick_source(participants, rng);
    if (other != source && other != target) history_edges.emplace_back(target, other);
}

}  // namespace

GeneratedCascade planted_logistic(const SynthSpec& spec, NodeTable& nodes) {
    if (!(spec.t_steep > 0.0) || !(spec.t_inhib > spec.t_steep)) {
        throw SynthSpecError("planted times need 0 < t_steep < t_inhib");
    }
    if (spec.events < 32) {
        throw SynthSpecError("event budget too small for planted times");
    }
    if (!(spec.modulation_depth > 0.0) || spec.modulation_depth >= 1.0 ||
        !(spec.tail_fraction > 0.0) || !(spec.period_bins > 0.0) || spec.tail_periods == 0) {
        throw SynthSpecError("tail shape parameters out of range");
    }

    constexpr double kSharpness = 6.0;  // logistic argument reached at t_inhib
    const double rate = kSharpness / (spec.t_inhib - spec.t_steep);
    const double q0 = 1.0 / (1.0 + std::exp(rate * spec.t_steep));
    const double q1 = 1.0 / (1.0 + std::exp(-kSharpness));

    // observation span feeds the detector's bin width, which feeds the tail
    // period; a few fixed-point rounds settle it
    double span = spec.t_inhib * 2.0;
    for (int i = 0; i < 40; ++i) {
        span = spec.t_inhib + static_cast<double>(spec.tail_periods) * spec.period_bins *
                                  spec.alpha_hint * std::log(span);
    }
    const double bin_width = spec.alpha_hint * std::log(span);
    const double period = spec.period_bins * bin_width;

    std::vector<double> times;
    times.reserve(spec.events * 2);
    const std::size_t n_main = spec.events;
    for (std::size_t k = 0; k < n_main; ++k) {
        const double u =
            q0 + (q1 - q0) * static_cast<double>(k) / static_cast<double>(n_main - 1);
        times.push_back(spec.t_steep + std::log(u / (1.0 - u)) / rate);
    }
    times.front() = 0.0;

    // modulated decaying tail; the first dip lands exactly at t_inhib
    const double peak_density =
        static_cast<double>(n_main) * rate / (4.0 * (q1 - q0));
    const double base = spec.tail_fraction * peak_density;
    const double tail_len = span - spec.t_inhib;
    const double env_rate = 1.2 / tail_len;
    auto density = [&](double offset) {
        return base * std::exp(-env_rate * offset) *
               (1.0 - spec.modulation_depth * std::cos(2.0 * 3.14159265358979323846 *
                                                        offset / period));
    };
    const double step = bin_width / 64.0;
    const std::size_t cells = static_cast<std::size_t>(tail_len / step) + 1;
    std::vector<double> cumulative(cells + 1, 0.0);
    for (std::size_t c = 0; c < cells; ++c) {
        const double lo = std::min(tail_len, step * static_cast<double>(c));
        const double hi = std::min(tail_len, step * static_cast<double>(c + 1));
        cumulative[c + 1] =
            cumulative[c] + 0.5 * (density(lo) + density(hi)) * (hi - lo);
    }
    const double mass = cumulative.back();
    const std::size_t n_tail = static_cast<std::size_t>(mass);
    if (n_tail < 4 * spec.tail_periods) {
        throw SynthSpecError("event budget too small for planted times");
    }
    for (std::size_t j = 0; j < n_tail; ++j) {
        const double target =
            mass * static_cast<double>(j + 1) / static_cast<double>(n_tail);
        auto cell = std::lower_bound(cumulative.begin(), cumulative.end(), target);
        std::size_t c = cell == cumulative.begin()
                            ? 0
                            : static_cast<std::size_t>(cell - cumulative.begin()) - 1;
        c = std::min(c, cells - 1);
        const double seg = cumulative[c + 1] - cumulative[c];
        const double frac = seg > 0.0 ? (target - cumulative[c]) / seg : 1.0;
        times.push_back(spec.t_inhib +
                        std::min(tail_len, step * (static_cast<double>(c) + frac)));
    }

    GeneratedCascade out;
    out.cascade.id = spec.id;
    out.truth = {spec.id, Mode::PlantedLogistic, spec.t_steep, spec.t_inhib,
                 times.back(), times.size()};

    Rng rng(spec.seed);
    MarkSampler marks(spec.mark_exponent, spec.mark_cap);
    NodeFactory factory{nodes, spec.id};
    std::vector<NodeId> participants;
    participants.reserve(times.size() + 1);
    const NodeId root = nodes.intern(spec.id + "_root");
    realize_mark(root, marks.sample(rng), factory, out.history_edges);
    participants.push_back(root);
    out.cascade.events.reserve(times.size());
    for (std::size_t k = 0; k < times.size(); ++k) {
        const NodeId source = k == 0 ? root : pick_source(participants, rng);
        const NodeId target = factory.member();
        realize_mark(target, marks.sample(rng), factory, out.history_edges);
        maybe_cross_edge(target, source, participants, spec.cross_edge_p, rng,
                         out.history_edges);
        out.cascade.events.push_back({source, target, times[k]});
        participants.push_back(target);
    }
    return out;
}

GeneratedCascade hawkes_thinning(const SynthSpec& spec, NodeTable& nodes) {
    if (!(spec.branching > 0.0)) throw SynthSpecError("thinning needs a positive branching scale");
    if (spec.events < 1) throw SynthSpecError("thinning needs a positive event budget");
    const hawkes::ReactionKernel kernel =
        hawkes::ReactionKernel::power_law(spec.kernel_s0, spec.kernel_theta);

    Rng rng(spec.seed);
    MarkSampler marks(spec.mark_exponent, spec.mark_cap);
    NodeFactory factory{nodes, spec.id};

    GeneratedCascade out;
    out.cascade.id = spec.id;

    struct Emitter {
        double time;
        NodeId adopter;
        double mark;
        std::size_t generation;
    };
    std::vector<Emitter> emitters;
    std::vector<NodeId> adopters;
    const NodeId root = nodes.intern(spec.id + "_root");
    const unsigned root_mark = spec.root_mark > 0 ? spec.root_mark : marks.sample(rng);
    realize_mark(root, root_mark, factory, out.history_edges);
    emitters.push_back({0.0, root, static_cast<double>(root_mark), 0});
    adopters.push_back(root);

    auto active = [&](const Emitter& e) {
        return spec.max_generation == 0 || e.generation < spec.max_generation;
    };
    auto rate_at = [&](double t) {
        double sum = 0.0;
        for (const Emitter& e : emitters) {
            if (!active(e) || e.time >= t) continue;
            sum += e.mark * kernel(t - e.time);
        }
        return spec.branching * sum;
    };

    double now = 0.0;
    while (out.cascade.events.size() < spec.events) {
        // the kernel is nonincreasing, so the current rate bounds the future
        const double bound = rate_at(now + 1e-12);
        if (bound < 1e-12) break;
        now += rng.exponential(bound);
        if (now > spec.max_time) break;
        const double rate = rate_at(now);
        if (rng.uniform() * bound >= rate) continue;
        // parent chosen proportionally to its current excitation share
        double pick = rng.uniform() * rate / spec.branching;
        std::size_t parent = 0;
        for (std::size_t i = 0; i < emitters.size(); ++i) {
            const Emitter& e = emitters[i];
            if (!active(e) || e.time >= now) continue;
            pick -= e.mark * kernel(now - e.time);
            parent = i;
            if (pick <= 0.0) break;
        }
        const NodeId target = factory.member();
        const unsigned mark = marks.sample(rng);
        realize_mark(target, mark, factory, out.history_edges);
        maybe_cross_edge(target, emitters[parent].adopter, adopters, spec.cross_edge_p, rng,
                         out.history_edges);
        out.cascade.events.push_back({emitters[parent].adopter, target, now});
        emitters.push_back({now, target, static_cast<double>(mark),
                            emitters[parent].generation + 1});
        adopters.push_back(target);
    }
    // report gaps relative to the first reshare
    if (!out.cascade.events.empty()) {
        const double t0 = out.cascade.events.front().time;
        for (ReshareEvent& e : out.cascade.events) e.time -= t0;
    }
    out.truth = {spec.id, Mode::HawkesThinning, 0.0, 0.0,
                 out.cascade.span(), out.cascade.events.size()};
    return out;
}

VarCoupledResult var_coupled(const VarCoupledSpec& spec) {
    const std::size_t p = std::max(spec.response_lags.size(), spec.driver_lags.size());
    if (spec.length == 0) throw SynthSpecError("var-coupled needs a positive length");
    VarCoupledResult out;
    for (double b : spec.driver_lags) {
        if (b != 0.0) out.causal_truth = true;
    }
    Rng rng(spec.seed);
    const std::size_t total = spec.burn_in + spec.length + p;
    std::vector<double> x(total, 0.0);
    std::vector<double> y(total, 0.0);
    for (std::size_t t = 1; t < total; ++t) {
        x[t] = spec.driver_ar * x[t - 1] +
               (spec.driver_noise > 0.0 ? rng.normal(0.0, spec.driver_noise) : 0.0);
    }
    for (std::size_t t = p; t < total; ++t) {
        double v = spec.noise > 0.0 ? rng.normal(0.0, spec.noise) : 0.0;
        for (std::size_t i = 0; i < spec.response_lags.size(); ++i) {
            v += spec.response_lags[i] * y[t - 1 - i];
        }
        for (std::size_t i = 0; i < spec.driver_lags.size(); ++i) {
            v += spec.driver_lags[i] * x[t - 1 - i];
        }
        y[t] = v;
    }
    const auto start = static_cast<std::ptrdiff_t>(spec.burn_in + p);
    out.driver.assign(x.begin() + start, x.end());
    out.response.assign(y.begin() + start, y.end());
    return out;
}

SynthCorpus build_corpus(const CorpusSpec& spec) {
    if (spec.cascades == 0) throw SynthSpecError("corpus needs at least one cascade");
    if (!(spec.t_steep_min > 0.0) || spec.t_steep_max < spec.t_steep_min ||
        !(spec.gap_min > 0.0) || spec.gap_max < spec.gap_min) {
        throw SynthSpecError("corpus planted-time ranges out of order");
    }
    SynthCorpus corpus;
    Rng rng(spec.seed);
    for (std::size_t c = 0; c < spec.cascades; ++c) {
        SynthSpec one = spec.base;
        char tag[32];
        std::snprintf(tag, sizeof tag, "%s-%04zu", spec.id_prefix.c_str(), c + 1);
        one.id = tag;
        one.seed = spec.seed * 0x9E3779B97F4A7C15ull + c + 1;
        one.t_steep = rng.uniform(spec.t_steep_min, spec.t_steep_max);
        one.t_inhib = one.t_steep + rng.uniform(spec.gap_min, spec.gap_max);
        GeneratedCascade made = one.mode == Mode::HawkesThinning
                                    ? hawkes_thinning(one, corpus.nodes)
                                    : planted_logistic(one, corpus.nodes);
        corpus.cascades.push_back(std::move(made.cascade));
        corpus.truth.push_back(made.truth);
        for (const Edge& e : made.history_edges) corpus.history.add_edge(e.a, e.b);
    }
    corpus.history.finalize();
    return corpus;
}

}  // namespace lifecast::synth
