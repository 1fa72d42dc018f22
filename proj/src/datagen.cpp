#include "dynbd/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "dynbd/util.hpp"

namespace dynbd {

namespace {

struct WeightedPair {
    int src, dst;
    double weight;
};

} // namespace

TemporalEdgeList make_corpus(const CorpusSpec& spec, uint64_t seed) {
    if (spec.nodes < 3 || spec.events < spec.nodes)
        throw std::invalid_argument("make_corpus: need >= 3 nodes and events >= nodes");
    Rng rng(seed);
    const int n = spec.nodes;
    const int64_t span_s = static_cast<int64_t>(std::llround(spec.timespan_days * 86400.0));
    const int64_t steps = span_s / spec.time_step;

    // Node activities, heavy-tailed over a shuffled order.
    std::vector<double> activity(static_cast<size_t>(n));
    std::vector<int> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    for (int i = n - 1; i > 0; --i)
        std::swap(order[static_cast<size_t>(i)],
                  order[rng.below(static_cast<uint64_t>(i) + 1)]);
    for (int r = 0; r < n; ++r)
        activity[static_cast<size_t>(order[static_cast<size_t>(r)])] =
            1.0 / std::pow(1.0 + r, 0.7);

    // Backbone: one pair per node (covers every node), heavy-tailed rates.
    // Mid tier: extra random pairs. A random remainder draws endpoints by
    // activity.
    std::vector<WeightedPair> pairs;
    for (int r = 0; r < n; ++r) {
        int src = order[static_cast<size_t>(r)];
        int dst = order[static_cast<size_t>((r + 1) % n)];
        pairs.push_back({src, dst, 0.55 / std::pow(1.0 + r, 0.85)});
    }
    const int n_mid = 2 * n;
    for (int i = 0; i < n_mid; ++i) {
        int src = static_cast<int>(rng.below(static_cast<uint64_t>(n)));
        int dst = static_cast<int>(rng.below(static_cast<uint64_t>(n)));
        if (src == dst) dst = (dst + 1) % n;
        pairs.push_back({src, dst, 0.30 / n_mid});
    }
    double pair_mass = 0.0;
    for (const auto& p : pairs) pair_mass += p.weight;
    const double tail_mass = pair_mass * 0.25; // ~20% of all events are background
    std::vector<double> cumulative;
    cumulative.reserve(pairs.size());
    double acc = 0.0;
    for (const auto& p : pairs) {
        acc += p.weight;
        cumulative.push_back(acc);
    }
    const double total = acc + tail_mass;

    std::vector<double> node_cdf(static_cast<size_t>(n));
    double node_acc = 0.0;
    for (int i = 0; i < n; ++i) {
        node_acc += activity[static_cast<size_t>(i)];
        node_cdf[static_cast<size_t>(i)] = node_acc;
    }

    auto draw_node = [&]() {
        double u = rng.uniform() * node_acc;
        auto it = std::lower_bound(node_cdf.begin(), node_cdf.end(), u);
        return static_cast<int>(it - node_cdf.begin());
    };

    TemporalEdgeList out;
    out.node_count = n;
    out.events.reserve(static_cast<size_t>(spec.events));

    // One guaranteed event per backbone pair so every node appears.
    for (int r = 0; r < n; ++r) {
        const auto& p = pairs[static_cast<size_t>(r)];
        int64_t ts = static_cast<int64_t>(rng.below(static_cast<uint64_t>(steps) + 1)) *
                     spec.time_step;
        out.events.push_back({p.src, p.dst, ts});
    }
    while (out.events.size() < static_cast<size_t>(spec.events)) {
        double u = rng.uniform() * total;
        int src, dst;
        if (u < acc) {
            auto it = std::lower_bound(cumulative.begin(), cumulative.end(), u);
            const auto& p = pairs[static_cast<size_t>(it - cumulative.begin())];
            src = p.src;
            dst = p.dst;
        } else {
            src = draw_node();
            dst = draw_node();
            if (src == dst) dst = (dst + 1) % n;
        }
        int64_t ts = static_cast<int64_t>(rng.below(static_cast<uint64_t>(steps) + 1)) *
                     spec.time_step;
        out.events.push_back({src, dst, ts});
    }

    // Pin the exact timespan.
    out.events.front().ts = 0;
    out.events.back().ts = steps * spec.time_step;
    std::stable_sort(out.events.begin(), out.events.end(),
                     [](const TemporalEvent& a, const TemporalEvent& b) { return a.ts < b.ts; });
    return out;
}

TemporalEdgeList make_radoslaw(uint64_t seed) {
    return make_corpus({"radoslaw", 167, 82900, 271.2, 60}, seed);
}

TemporalEdgeList make_contact(uint64_t seed) {
    return make_corpus({"contact", 274, 28200, 3.97, 20}, seed);
}

TemporalEdgeList make_fb_forum(uint64_t seed) {
    return make_corpus({"fb-forum", 899, 50500, 164.5, 60}, seed);
}

TemporalEdgeList make_dnc(uint64_t seed) {
    return make_corpus({"dnc", 2029, 39200, 575.0, 60}, seed);
}

CorpusSpec corpus_spec_by_name(const std::string& name) {
    if (name == "radoslaw") return {"radoslaw", 167, 82900, 271.2, 60};
    if (name == "contact") return {"contact", 274, 28200, 3.97, 20};
    if (name == "fb-forum") return {"fb-forum", 899, 50500, 164.5, 60};
    if (name == "dnc") return {"dnc", 2029, 39200, 575.0, 60};
    throw std::invalid_argument("unknown corpus name: " + name +
                                " (expected radoslaw|contact|fb-forum|dnc)");
}

TemporalEdgeList make_named_corpus(const std::string& name, uint64_t seed) {
    return make_corpus(corpus_spec_by_name(name), seed);
}

TemporalEdgeList make_toy_corpus(int n_nodes, int n_snapshots, int noise_per_snapshot,
                                 uint64_t seed) {
    if (n_nodes < 4) throw std::invalid_argument("make_toy_corpus: need >= 4 nodes");
    if (n_snapshots < 2) throw std::invalid_argument("make_toy_corpus: need >= 2 snapshots");
    Rng rng(seed);
    const int64_t interval = 100;
    TemporalEdgeList out;
    out.node_count = n_nodes;
    for (int k = 0; k < n_snapshots; ++k) {
        const int64_t ts = k * interval + interval / 2;
        for (int i = 0; i < n_nodes; ++i) {
            out.events.push_back({i, (i + 1) % n_nodes, ts});
            if (k % 2 == 0) out.events.push_back({i, (i + 2) % n_nodes, ts});
        }
        for (int e = 0; e < noise_per_snapshot; ++e) {
            int src = static_cast<int>(rng.below(static_cast<uint64_t>(n_nodes)));
            int dst = static_cast<int>(rng.below(static_cast<uint64_t>(n_nodes)));
            if (src == dst) dst = (dst + 1) % n_nodes;
            out.events.push_back({src, dst, ts});
        }
    }
    // Anchor both ends so snapshot partitioning aligns with the pattern.
    out.events.front().ts = 0;
    out.events.back().ts = n_snapshots * interval - 1;
    std::stable_sort(out.events.begin(), out.events.end(),
                     [](const TemporalEvent& a, const TemporalEvent& b) { return a.ts < b.ts; });
    return out;
}

void write_edge_list(const std::string& path, const TemporalEdgeList& edges,
                     const std::string& comment) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    if (!comment.empty()) out << "% " << comment << "\n";
    out << "% directed temporal edge list: src dst ts\n";
    for (const auto& ev : edges.events)
        out << ev.src << " " << ev.dst << " " << ev.ts << "\n";
    if (!out) throw std::runtime_error("write failed for " + path);
}

} // namespace dynbd
