#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gcl/graph.hpp"

namespace gcl {

// TU-style directory: NAME_A.txt (1-based "u, v" arc lines),
// NAME_graph_indicator.txt, NAME_graph_labels.txt, optional
// NAME_node_labels.txt / NAME_node_attributes.txt. Node labels become one-hot
// columns, attributes are appended as-is, graph labels are remapped to
// contiguous 0-based classes, edges are de-duplicated and symmetrized.
std::vector<Graph> load_tu_dataset(const std::string& dir);

// {"graphs":[{"num_nodes":int,"edges":[[s,d],...],"node_features":[[...]],"label":int}]}
// Edges may be listed once per undirected pair; the loader symmetrizes.
// "node_features" and "label" are optional per graph.
std::vector<Graph> load_graph_json(const std::string& path);

// Writes the TU layout back out (both arc directions, 1-based). Exact one-hot
// feature rows become NAME_node_labels.txt, anything else NAME_node_attributes.txt.
void write_tu_dataset(const std::string& dir, const std::string& name,
                      const std::vector<Graph>& gs);

enum class Protocol { semi, unsup };

Protocol parse_protocol(const std::string& s);
const char* protocol_name(Protocol p);

struct FoldSplit {
  std::vector<int> unlabeled;
  std::vector<int> labeled_train;
  std::vector<int> test;
};

struct SplitPlan {
  Protocol protocol = Protocol::semi;
  int fold_count = 0;
  std::uint64_t seed = 0;
  std::vector<FoldSplit> folds;
};

// Seeded shuffle, then contiguous chunks. Per fold f: test = chunk f.
// semi: labeled_train = chunk (f+1) mod k, unlabeled = the rest (80/10/10 at
// k=10). unsup: labeled_train empty, unlabeled = the rest (90/10).
SplitPlan make_split(int n_graphs, Protocol protocol, std::uint64_t seed, int fold_count = 10);

}  // namespace gcl
