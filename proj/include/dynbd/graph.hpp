#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "dynbd/tensor.hpp"

namespace dynbd {

struct TemporalEvent {
    int src = 0;
    int dst = 0;
    int64_t ts = 0;
};

// Timestamped directed events over a dense node set [0, N). Produced by
// parse_edge_list, which remaps raw ids in first-appearance order, drops
// self-loops and sorts by timestamp.
struct TemporalEdgeList {
    int node_count = 0;
    std::vector<TemporalEvent> events;

    int64_t min_ts() const;
    int64_t max_ts() const;
};

// Ordered binary adjacency matrices over a fixed node set.
struct SnapshotSequence {
    int n_nodes = 0;
    int64_t span_per_snapshot = 0; // seconds, informational
    std::vector<Tensor> snapshots; // each n_nodes x n_nodes, entries in {0,1}
};

// A length-T window of snapshots plus the next snapshot as label. t_index is
// the label's position in the source sequence.
struct Sample {
    std::vector<Tensor> window;
    Tensor label;
    int t_index = 0;
};

struct DatasetStats {
    int nodes = 0;
    int64_t edges = 0;          // total temporal events
    double average_degree = 0;  // total-degree convention: 2*events/nodes
    double timespan_days = 0;
};

struct EdgeListConfig {
    // Columns beyond (src, dst, ts) are ignored; '%' and '#' start comments.
};

TemporalEdgeList parse_edge_list(std::istream& in, const EdgeListConfig& cfg = {});
TemporalEdgeList parse_edge_list_file(const std::string& path,
                                      const EdgeListConfig& cfg = {});

// Partitions the total timespan into n equal intervals; entry (i,j) of
// snapshot k is 1 iff at least one event i->j falls in interval k. Empty
// snapshots are allowed (a warning is printed when n exceeds the event
// count).
SnapshotSequence build_snapshots(const TemporalEdgeList& edges, int n_snapshots);

std::vector<Sample> make_samples(const SnapshotSequence& seq, int window_len);

// Chronological split: first ceil(fraction*count) samples train, rest test.
std::pair<std::vector<Sample>, std::vector<Sample>>
split_train_test(std::vector<Sample> samples, double train_fraction);

DatasetStats stats(const TemporalEdgeList& edges);

// CSV-of-triples cache for snapshot sequences: a comment header carrying
// n_nodes / n_snapshots / span, then one `k,i,j` row per set entry.
void save_snapshots_csv(const std::string& path, const SnapshotSequence& seq);
SnapshotSequence load_snapshots_csv(const std::string& path);

} // namespace dynbd
