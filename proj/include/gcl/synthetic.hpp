#pragma once

#include <cstdint>
#include <vector>

#include "gcl/graph.hpp"
#include "gcl/rng.hpp"

namespace gcl {

// Erdos-Renyi style graph with one-hot "type" features; used by property tests.
Graph random_graph(RngStream& rng, int min_nodes, int max_nodes, int feat_dim,
                   double edge_prob);

// Alternating cycles (label 0) and stars (label 1), 4 one-hot node types.
// Structure alone separates the classes; the bundled toy TU directory is this
// set written to disk.
std::vector<Graph> make_cycles_and_stars(int n_graphs, std::uint64_t seed);

// Blatant feature signal (class-pure node types on random trees): supervised
// training should reach 100% train accuracy quickly.
std::vector<Graph> make_separable_fixture(int n_graphs, std::uint64_t seed);

// Desk-scale benchmark stand-in: 188 random trees, 125 vs 63 class split
// (majority 66.5%). Each tree mixes core nodes, whose types follow a
// class-dependent distribution of strength `separation`, with a `clutter`
// fraction of nodes typed from a shared off-pattern distribution. A handful
// of labels underdetermines the classifier on the raw graphs, while views
// that suppress the clutter carry cleaner class evidence than the originals.
std::vector<Graph> make_standin_dataset(std::uint64_t seed, int n_graphs = 188,
                                        int minority = 63, double separation = 1.1,
                                        double clutter = 0.6);

}  // namespace gcl
