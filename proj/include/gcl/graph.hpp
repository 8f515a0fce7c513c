#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gcl {

// Problems with input data (malformed files, bad indices). The CLI maps this
// to its data-error exit code.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Undirected graphs are stored with both directed arcs so neighbor
// aggregation is a plain scatter_sum over the arc list.
struct Graph {
  int num_nodes = 0;
  Eigen::MatrixXd features;                // num_nodes x F; 0 columns = none
  std::vector<std::pair<int, int>> edges;  // directed arcs
  int label = -1;                          // -1 = absent

  void canonicalize();    // sort arcs, drop exact duplicates
  void validate() const;  // endpoint ranges, feature shape, finite values
  std::vector<int> degrees() const;
};

bool operator==(const Graph& a, const Graph& b);

// unique undirected pairs (u < v), self-loops excluded
std::vector<std::pair<int, int>> undirected_edges(const Graph& g);

struct GraphBatch {
  Eigen::MatrixXd features;       // sum(N_i) x F
  std::vector<int> src, dst;      // arcs with global node ids
  std::vector<int> batch_vector;  // node -> graph index, non-decreasing
  std::vector<int> labels;        // per graph
  std::vector<int> graph_sizes;

  int num_graphs() const { return static_cast<int>(graph_sizes.size()); }
  int num_nodes() const { return static_cast<int>(batch_vector.size()); }
};

GraphBatch batch_graphs(const std::vector<Graph>& gs);
GraphBatch batch_graphs(const std::vector<Graph>& gs, const std::vector<int>& pick);
std::vector<Graph> unbatch(const GraphBatch& b);

// one-hot over min(degree, max_degree); feature width max_degree + 1
Graph degree_onehot_features(const Graph& g, int max_degree);

int observed_max_degree(const std::vector<Graph>& gs);

// Gives every graph a feature matrix: datasets without node information get
// degree one-hots using the dataset-wide max degree, capped.
void ensure_features(std::vector<Graph>& gs, int max_degree_cap = 128);

}  // namespace gcl
