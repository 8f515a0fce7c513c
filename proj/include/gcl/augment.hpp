#pragma once

#include <string>

#include "gcl/graph.hpp"
#include "gcl/rng.hpp"

namespace gcl {

enum class AugKind { none, node_drop, edge_perturb, subgraph, attr_mask, random4 };

AugKind parse_aug_kind(const std::string& s);
const char* aug_kind_name(AugKind k);

// Fixed, non-learnable augmentations. ratio must lie in [0, 1); ratio == 0
// returns the input unchanged without consuming any random draws, so a
// zero-ratio sweep cell reproduces the unaugmented baseline exactly.

// removes floor(ratio * N) nodes and their incident edges, re-indexing survivors
Graph node_drop(const Graph& g, double ratio, RngStream& rng);

// removes floor(ratio * E) undirected edges, then adds the same number of new
// uniformly random non-duplicate non-self-loop edges; total edge count is
// preserved exactly
Graph edge_perturb(const Graph& g, double ratio, RngStream& rng);

// BFS from a random center (randomized frontier order) until
// ceil((1 - ratio) * N) nodes are kept; stops early if the component is
// exhausted; all other nodes are removed
Graph subgraph(const Graph& g, double ratio, RngStream& rng);

// zeroes the feature rows of floor(ratio * N) random nodes
Graph attr_mask(const Graph& g, double ratio, RngStream& rng);

// samples two distinct kinds of the four above and composes them in order
Graph random4(const Graph& g, double ratio, RngStream& rng);

Graph apply_fixed_augmentation(AugKind k, const Graph& g, double ratio, RngStream& rng);

}  // namespace gcl
