#include "dynbd/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace dynbd {

int64_t TemporalEdgeList::min_ts() const {
    if (events.empty()) throw std::runtime_error("edge list is empty");
    int64_t lo = events.front().ts;
    for (const auto& ev : events) lo = std::min(lo, ev.ts);
    return lo;
}

int64_t TemporalEdgeList::max_ts() const {
    if (events.empty()) throw std::runtime_error("edge list is empty");
    int64_t hi = events.front().ts;
    for (const auto& ev : events) hi = std::max(hi, ev.ts);
    return hi;
}

TemporalEdgeList parse_edge_list(std::istream& in, const EdgeListConfig&) {
    struct RawEvent {
        int64_t src, dst, ts;
    };
    std::vector<RawEvent> raw;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        size_t start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos) continue;
        if (line[start] == '%' || line[start] == '#') continue;
        std::istringstream fields(line);
        RawEvent ev{};
        double ts_raw = 0;
        if (!(fields >> ev.src >> ev.dst >> ts_raw))
            throw std::runtime_error("edge list parse error at line " +
                                     std::to_string(line_no) + ": expected `src dst ts`");
        ev.ts = static_cast<int64_t>(ts_raw);
        if (ev.src == ev.dst) continue; // self-loops dropped at ingestion
        raw.push_back(ev);
    }
    if (raw.empty()) throw std::runtime_error("edge list is empty");

    // Dense remap in first-appearance order.
    std::unordered_map<int64_t, int> remap;
    remap.reserve(raw.size());
    TemporalEdgeList out;
    out.events.reserve(raw.size());
    for (const auto& ev : raw) {
        auto id_of = [&remap](int64_t v) {
            return remap.emplace(v, static_cast<int>(remap.size())).first->second;
        };
        int src = id_of(ev.src);
        int dst = id_of(ev.dst);
        out.events.push_back({src, dst, ev.ts});
    }
    out.node_count = static_cast<int>(remap.size());
    std::stable_sort(out.events.begin(), out.events.end(),
                     [](const TemporalEvent& a, const TemporalEvent& b) { return a.ts < b.ts; });
    return out;
}

TemporalEdgeList parse_edge_list_file(const std::string& path, const EdgeListConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open edge list: " + path);
    return parse_edge_list(in, cfg);
}

SnapshotSequence build_snapshots(const TemporalEdgeList& edges, int n_snapshots) {
    if (n_snapshots < 2) throw std::invalid_argument("build_snapshots: need >= 2 snapshots");
    if (edges.events.empty()) throw std::invalid_argument("build_snapshots: empty edge list");
    if (static_cast<size_t>(n_snapshots) > edges.events.size())
        std::cerr << "warning: " << n_snapshots << " snapshots over "
                  << edges.events.size() << " events; some snapshots will be empty\n";

    SnapshotSequence seq;
    seq.n_nodes = edges.node_count;
    const int64_t lo = edges.min_ts();
    const int64_t hi = edges.max_ts();
    const int64_t span = hi - lo;
    seq.span_per_snapshot = span / n_snapshots;
    seq.snapshots.assign(static_cast<size_t>(n_snapshots),
                         Tensor::zeros(edges.node_count, edges.node_count));
    for (const auto& ev : edges.events) {
        int k;
        if (span == 0) {
            k = 0;
        } else {
            k = static_cast<int>(((ev.ts - lo) * static_cast<int64_t>(n_snapshots)) / (span + 1));
        }
        seq.snapshots[static_cast<size_t>(k)].at(ev.src, ev.dst) = 1.0;
    }
    return seq;
}

std::vector<Sample> make_samples(const SnapshotSequence& seq, int window_len) {
    if (window_len < 1) throw std::invalid_argument("make_samples: window must be >= 1");
    const int count = static_cast<int>(seq.snapshots.size()) - window_len;
    if (count < 1)
        throw std::runtime_error("make_samples: need at least " +
                                 std::to_string(window_len + 1) + " snapshots, have " +
                                 std::to_string(seq.snapshots.size()));
    std::vector<Sample> samples;
    samples.reserve(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i) {
        Sample s;
        s.window.assign(seq.snapshots.begin() + i, seq.snapshots.begin() + i + window_len);
        s.label = seq.snapshots[static_cast<size_t>(i + window_len)];
        s.t_index = i + window_len;
        samples.push_back(std::move(s));
    }
    return samples;
}

std::pair<std::vector<Sample>, std::vector<Sample>>
split_train_test(std::vector<Sample> samples, double train_fraction) {
    if (train_fraction <= 0.0 || train_fraction >= 1.0)
        throw std::invalid_argument("split: train fraction must be in (0,1)");
    const auto count = samples.size();
    const size_t n_train = static_cast<size_t>(
        std::ceil(train_fraction * static_cast<double>(count)));
    if (n_train == 0 || n_train >= count)
        throw std::runtime_error("split: both sides must be non-empty (" +
                                 std::to_string(count) + " samples, fraction " +
                                 std::to_string(train_fraction) + ")");
    std::vector<Sample> test(std::make_move_iterator(samples.begin() + static_cast<long>(n_train)),
                             std::make_move_iterator(samples.end()));
    samples.resize(n_train);
    return {std::move(samples), std::move(test)};
}

DatasetStats stats(const TemporalEdgeList& edges) {
    if (edges.events.empty()) throw std::invalid_argument("stats: empty edge list");
    DatasetStats s;
    s.nodes = edges.node_count;
    s.edges = static_cast<int64_t>(edges.events.size());
    // Total-degree convention: each event contributes to the degree of both
    // endpoints.
    s.average_degree = 2.0 * static_cast<double>(s.edges) / static_cast<double>(s.nodes);
    s.timespan_days =
        static_cast<double>(edges.max_ts() - edges.min_ts()) / 86400.0;
    return s;
}

void save_snapshots_csv(const std::string& path, const SnapshotSequence& seq) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << "# dynbd-snapshots v1 n_nodes=" << seq.n_nodes
        << " n_snapshots=" << seq.snapshots.size()
        << " span_per_snapshot=" << seq.span_per_snapshot << "\n";
    out << "k,i,j\n";
    for (size_t k = 0; k < seq.snapshots.size(); ++k) {
        const Tensor& a = seq.snapshots[k];
        for (int i = 0; i < a.rows; ++i)
            for (int j = 0; j < a.cols; ++j)
                if (a.at(i, j) != 0.0) out << k << "," << i << "," << j << "\n";
    }
    if (!out) throw std::runtime_error("write failed for " + path);
}

SnapshotSequence load_snapshots_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string header;
    std::getline(in, header);
    SnapshotSequence seq;
    int n_snapshots = 0;
    {
        std::istringstream hs(header);
        std::string tok;
        while (hs >> tok) {
            auto eq = tok.find('=');
            if (eq == std::string::npos) continue;
            const std::string key = tok.substr(0, eq);
            const long long val = std::stoll(tok.substr(eq + 1));
            if (key == "n_nodes") seq.n_nodes = static_cast<int>(val);
            else if (key == "n_snapshots") n_snapshots = static_cast<int>(val);
            else if (key == "span_per_snapshot") seq.span_per_snapshot = val;
        }
    }
    if (seq.n_nodes <= 0 || n_snapshots <= 0)
        throw std::runtime_error("bad snapshot cache header in " + path);
    seq.snapshots.assign(static_cast<size_t>(n_snapshots),
                         Tensor::zeros(seq.n_nodes, seq.n_nodes));
    std::string line;
    std::getline(in, line); // column header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        int k, i, j;
        if (std::sscanf(line.c_str(), "%d,%d,%d", &k, &i, &j) != 3)
            throw std::runtime_error("bad snapshot cache row in " + path + ": " + line);
        if (k < 0 || k >= n_snapshots || i < 0 || i >= seq.n_nodes || j < 0 ||
            j >= seq.n_nodes)
            throw std::runtime_error("snapshot cache entry out of range in " + path);
        seq.snapshots[static_cast<size_t>(k)].at(i, j) = 1.0;
    }
    return seq;
}

} // namespace dynbd
