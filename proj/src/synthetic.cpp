#include "gcl/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace gcl {

namespace {

Eigen::MatrixXd onehot_rows(const std::vector<int>& types, int dim) {
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(static_cast<int>(types.size()), dim);
  for (int i = 0; i < static_cast<int>(types.size()); ++i) f(i, types[i]) = 1.0;
  return f;
}

void add_undirected(Graph& g, int u, int v) {
  g.edges.emplace_back(u, v);
  g.edges.emplace_back(v, u);
}

// Random attachment tree over n nodes.
void random_tree(Graph& g, int n, RngStream& rng) {
  for (int j = 1; j < n; ++j) add_undirected(g, j, rng.uniform_int(j));
}

int sample_categorical(const std::vector<double>& p, RngStream& rng) {
  double u = rng.uniform();
  double acc = 0.0;
  for (int i = 0; i < static_cast<int>(p.size()); ++i) {
    acc += p[i];
    if (u < acc) return i;
  }
  return static_cast<int>(p.size()) - 1;
}

}  // namespace

Graph random_graph(RngStream& rng, int min_nodes, int max_nodes, int feat_dim,
                   double edge_prob) {
  Graph g;
  g.num_nodes = min_nodes + rng.uniform_int(max_nodes - min_nodes + 1);
  std::vector<int> types(g.num_nodes);
  for (int& t : types) t = rng.uniform_int(feat_dim);
  g.features = onehot_rows(types, feat_dim);
  for (int u = 0; u < g.num_nodes; ++u)
    for (int v = u + 1; v < g.num_nodes; ++v)
      if (rng.uniform() < edge_prob) add_undirected(g, u, v);
  g.canonicalize();
  return g;
}

std::vector<Graph> make_cycles_and_stars(int n_graphs, std::uint64_t seed) {
  RngStream rng(derive_seed(seed, {0x746f79ULL}));
  std::vector<Graph> out;
  out.reserve(n_graphs);
  for (int i = 0; i < n_graphs; ++i) {
    int n = 5 + (i / 2) % 4;
    Graph g;
    g.num_nodes = n;
    g.label = i % 2;
    if (g.label == 0) {
      for (int j = 0; j < n; ++j) add_undirected(g, j, (j + 1) % n);
    } else {
      for (int j = 1; j < n; ++j) add_undirected(g, 0, j);
    }
    int rot = rng.uniform_int(4);
    std::vector<int> types(n);
    for (int j = 0; j < n; ++j) types[j] = (j + rot) % 4;
    g.features = onehot_rows(types, 4);
    g.canonicalize();
    out.push_back(std::move(g));
  }
  return out;
}

std::vector<Graph> make_separable_fixture(int n_graphs, std::uint64_t seed) {
  RngStream rng(derive_seed(seed, {0x736570ULL}));
  std::vector<Graph> out;
  out.reserve(n_graphs);
  for (int i = 0; i < n_graphs; ++i) {
    Graph g;
    g.label = i % 2;
    g.num_nodes = 6 + rng.uniform_int(5);
    random_tree(g, g.num_nodes, rng);
    std::vector<int> types(g.num_nodes);
    for (int& t : types) t = g.label * 2 + rng.uniform_int(2);
    g.features = onehot_rows(types, 4);
    g.canonicalize();
    out.push_back(std::move(g));
  }
  return out;
}

std::vector<Graph> make_standin_dataset(std::uint64_t seed, int n_graphs,
                                        int minority, double separation,
                                        double clutter) {
  RngStream rng(derive_seed(seed, {0x7374616e64ULL}));
  std::vector<int> labels(n_graphs, 0);
  std::fill(labels.begin(), labels.begin() + minority, 1);
  rng.shuffle(labels);

  constexpr int kTypes = 7;
  const std::array<double, kTypes> pattern = {1.0, -1.0, 1.0, -1.0, 1.0, -1.0, 0.0};
  // class-independent clutter types, concentrated on the neutral last type
  std::vector<double> clutter_dist(kTypes, 0.4 / kTypes);
  clutter_dist[kTypes - 1] += 0.6;

  std::vector<Graph> out;
  out.reserve(n_graphs);
  for (int i = 0; i < n_graphs; ++i) {
    Graph g;
    g.label = labels[i];
    g.num_nodes = 10 + rng.uniform_int(15);
    random_tree(g, g.num_nodes, rng);

    double sign = g.label == 0 ? -0.5 : 0.5;
    std::vector<double> logits(kTypes);
    for (int t = 0; t < kTypes; ++t)
      logits[t] = sign * separation * pattern[t] + 0.4 * rng.normal();
    double mx = *std::max_element(logits.begin(), logits.end());
    double z = 0.0;
    for (double& l : logits) {
      l = std::exp(l - mx);
      z += l;
    }
    for (double& l : logits) l /= z;

    const int n_clutter = static_cast<int>(std::floor(clutter * g.num_nodes));
    std::vector<char> off_pattern(static_cast<std::size_t>(g.num_nodes), 0);
    for (int v : rng.sample_without_replacement(g.num_nodes, n_clutter))
      off_pattern[static_cast<std::size_t>(v)] = 1;

    std::vector<int> types(g.num_nodes);
    for (int v = 0; v < g.num_nodes; ++v)
      types[v] = sample_categorical(
          off_pattern[static_cast<std::size_t>(v)] ? clutter_dist : logits, rng);
    g.features = onehot_rows(types, kTypes);
    g.canonicalize();
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace gcl
