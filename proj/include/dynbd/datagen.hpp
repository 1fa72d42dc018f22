#pragma once

#include <cstdint>
#include <string>

#include "dynbd/graph.hpp"

namespace dynbd {

// Seeded synthetic temporal-network generator. Produces directed, unweighted
// event streams with a persistent heavy-tailed backbone (pairs active across
// the whole timespan) plus occasional background noise, so that next-snapshot
// prediction has real signal. Statistics (node count, event count, timespan)
// are matched exactly by construction.
struct CorpusSpec {
    std::string name;
    int nodes = 0;
    int64_t events = 0;
    double timespan_days = 0.0;
    int64_t time_step = 1; // timestamps are multiples of this many seconds
};

TemporalEdgeList make_corpus(const CorpusSpec& spec, uint64_t seed);

// Stand-ins for the benchmark email/contact networks, sized to the usual
// published statistics.
TemporalEdgeList make_radoslaw(uint64_t seed = 2101);  // 167 nodes, 82.9K events, 271.2 days
TemporalEdgeList make_contact(uint64_t seed = 2102);   // 274 nodes, 28.2K events, 3.97 days, 20 s grid
TemporalEdgeList make_fb_forum(uint64_t seed = 2103);  // 899 nodes, 50.5K events, 164.5 days
TemporalEdgeList make_dnc(uint64_t seed = 2104);       // 2029 nodes, 39.2K events, 575 days

CorpusSpec corpus_spec_by_name(const std::string& name);
TemporalEdgeList make_named_corpus(const std::string& name, uint64_t seed);

// Small fully-controlled corpus: a persistent ring i->i+1 in every snapshot,
// parity links i->i+2 in even snapshots only, plus `noise_per_snapshot`
// seeded random links. One event per active link per snapshot interval.
TemporalEdgeList make_toy_corpus(int n_nodes, int n_snapshots, int noise_per_snapshot,
                                 uint64_t seed);

// `src dst ts` lines with a comment header; readable by parse_edge_list.
void write_edge_list(const std::string& path, const TemporalEdgeList& edges,
                     const std::string& comment = "");

} // namespace dynbd
