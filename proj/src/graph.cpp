#include "gcl/graph.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace gcl {

void Graph::canonicalize() {
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
}

void Graph::validate() const {
  if (num_nodes < 0) throw DataError("graph: negative node count");
  for (const auto& [u, v] : edges) {
    if (u < 0 || u >= num_nodes || v < 0 || v >= num_nodes)
      throw DataError("graph: arc (" + std::to_string(u) + "," + std::to_string(v) +
                      ") outside node range [0," + std::to_string(num_nodes) + ")");
  }
  if (features.size() > 0 && features.rows() != num_nodes)
    throw DataError("graph: feature rows " + std::to_string(features.rows()) +
                    " != num_nodes " + std::to_string(num_nodes));
  if (features.size() > 0 && !features.allFinite())
    throw DataError("graph: non-finite feature value");
}

std::vector<int> Graph::degrees() const {
  std::vector<int> deg(static_cast<std::size_t>(num_nodes), 0);
  for (const auto& [u, v] : edges) {
    (void)v;
    ++deg[static_cast<std::size_t>(u)];
  }
  return deg;
}

bool operator==(const Graph& a, const Graph& b) {
  return a.num_nodes == b.num_nodes && a.label == b.label && a.edges == b.edges &&
         a.features.rows() == b.features.rows() && a.features.cols() == b.features.cols() &&
         (a.features.size() == 0 || a.features == b.features);
}

std::vector<std::pair<int, int>> undirected_edges(const Graph& g) {
  std::set<std::pair<int, int>> und;
  for (const auto& [u, v] : g.edges)
    if (u != v) und.emplace(std::min(u, v), std::max(u, v));
  return {und.begin(), und.end()};
}

GraphBatch batch_graphs(const std::vector<Graph>& gs, const std::vector<int>& pick) {
  if (pick.empty()) throw DataError("batch_graphs: empty graph list");
  Eigen::Index total = 0, width = -1;
  for (int gi : pick) {
    const Graph& g = gs.at(static_cast<std::size_t>(gi));
    total += g.num_nodes;
    const Eigen::Index w = g.features.size() > 0 ? g.features.cols() : 0;
    if (width < 0)
      width = w;
    else if (width != w)
      throw DataError("batch_graphs: feature width mismatch (" + std::to_string(width) +
                      " vs " + std::to_string(w) + ")");
  }
  GraphBatch b;
  b.features.resize(total, width);
  b.src.reserve(static_cast<std::size_t>(total));
  b.dst.reserve(static_cast<std::size_t>(total));
  b.batch_vector.reserve(static_cast<std::size_t>(total));
  int offset = 0, gi_out = 0;
  for (int gi : pick) {
    const Graph& g = gs[static_cast<std::size_t>(gi)];
    if (g.num_nodes > 0 && width > 0) b.features.middleRows(offset, g.num_nodes) = g.features;
    for (const auto& [u, v] : g.edges) {
      b.src.push_back(u + offset);
      b.dst.push_back(v + offset);
    }
    for (int v = 0; v < g.num_nodes; ++v) b.batch_vector.push_back(gi_out);
    b.labels.push_back(g.label);
    b.graph_sizes.push_back(g.num_nodes);
    offset += g.num_nodes;
    ++gi_out;
  }
  return b;
}

GraphBatch batch_graphs(const std::vector<Graph>& gs) {
  std::vector<int> pick(gs.size());
  for (std::size_t i = 0; i < gs.size(); ++i) pick[i] = static_cast<int>(i);
  return batch_graphs(gs, pick);
}

std::vector<Graph> unbatch(const GraphBatch& b) {
  std::vector<Graph> out(static_cast<std::size_t>(b.num_graphs()));
  std::vector<int> offsets(static_cast<std::size_t>(b.num_graphs()) + 1, 0);
  for (int i = 0; i < b.num_graphs(); ++i)
    offsets[static_cast<std::size_t>(i) + 1] =
        offsets[static_cast<std::size_t>(i)] + b.graph_sizes[static_cast<std::size_t>(i)];
  for (int i = 0; i < b.num_graphs(); ++i) {
    Graph& g = out[static_cast<std::size_t>(i)];
    g.num_nodes = b.graph_sizes[static_cast<std::size_t>(i)];
    g.label = b.labels[static_cast<std::size_t>(i)];
    if (b.features.cols() > 0)
      g.features = b.features.middleRows(offsets[static_cast<std::size_t>(i)], g.num_nodes);
  }
  for (std::size_t e = 0; e < b.src.size(); ++e) {
    const int gi = b.batch_vector[static_cast<std::size_t>(b.src[e])];
    const int off = offsets[static_cast<std::size_t>(gi)];
    out[static_cast<std::size_t>(gi)].edges.emplace_back(b.src[e] - off, b.dst[e] - off);
  }
  return out;
}

Graph degree_onehot_features(const Graph& g, int max_degree) {
  if (max_degree < 0) throw DataError("degree_onehot_features: negative max_degree");
  Graph out = g;
  out.features = Eigen::MatrixXd::Zero(g.num_nodes, max_degree + 1);
  const std::vector<int> deg = g.degrees();
  for (int v = 0; v < g.num_nodes; ++v)
    out.features(v, std::min(deg[static_cast<std::size_t>(v)], max_degree)) = 1.0;
  return out;
}

int observed_max_degree(const std::vector<Graph>& gs) {
  int m = 0;
  for (const Graph& g : gs)
    for (int d : g.degrees()) m = std::max(m, d);
  return m;
}

void ensure_features(std::vector<Graph>& gs, int max_degree_cap) {
  bool missing = false;
  for (const Graph& g : gs)
    if (g.features.size() == 0 && g.num_nodes > 0) missing = true;
  if (!missing) return;
  const int md = std::min(observed_max_degree(gs), max_degree_cap);
  for (Graph& g : gs) g = degree_onehot_features(g, md);
}

}  // namespace gcl
