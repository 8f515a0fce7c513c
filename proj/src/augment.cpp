#include "gcl/augment.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <stdexcept>

namespace gcl {

namespace {

void check_ratio(double ratio) {
  if (ratio < 0.0 || ratio >= 1.0)
    throw std::invalid_argument("augmentation ratio must lie in [0, 1), got " +
                                std::to_string(ratio));
}

// survivors keep their relative order; kept[i] < 0 means removed
Graph keep_nodes(const Graph& g, const std::vector<int>& kept) {
  Graph out;
  out.label = g.label;
  std::vector<int> remap(static_cast<std::size_t>(g.num_nodes), -1);
  int next = 0;
  for (int v = 0; v < g.num_nodes; ++v)
    if (kept[static_cast<std::size_t>(v)] >= 0) remap[static_cast<std::size_t>(v)] = next++;
  out.num_nodes = next;
  if (g.features.size() > 0) {
    out.features.resize(next, g.features.cols());
    for (int v = 0; v < g.num_nodes; ++v)
      if (remap[static_cast<std::size_t>(v)] >= 0)
        out.features.row(remap[static_cast<std::size_t>(v)]) = g.features.row(v);
  }
  for (const auto& [u, v] : g.edges) {
    const int nu = remap[static_cast<std::size_t>(u)], nv = remap[static_cast<std::size_t>(v)];
    if (nu >= 0 && nv >= 0) out.edges.emplace_back(nu, nv);
  }
  out.canonicalize();
  return out;
}

std::vector<std::vector<int>> adjacency(const Graph& g) {
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(g.num_nodes));
  for (const auto& [u, v] : g.edges) adj[static_cast<std::size_t>(u)].push_back(v);
  return adj;
}

}  // namespace

Graph node_drop(const Graph& g, double ratio, RngStream& rng) {
  check_ratio(ratio);
  if (ratio == 0.0) return g;
  const int k = static_cast<int>(std::floor(ratio * g.num_nodes));
  if (k == 0) return g;
  const std::vector<int> dropped = rng.sample_without_replacement(g.num_nodes, k);
  std::vector<int> kept(static_cast<std::size_t>(g.num_nodes), 0);
  for (int v : dropped) kept[static_cast<std::size_t>(v)] = -1;
  return keep_nodes(g, kept);
}

Graph edge_perturb(const Graph& g, double ratio, RngStream& rng) {
  check_ratio(ratio);
  if (ratio == 0.0) return g;
  const auto und = undirected_edges(g);
  const int e_und = static_cast<int>(und.size());
  const int k = static_cast<int>(std::floor(ratio * e_und));
  if (k == 0) return g;
  const std::vector<int> removed_idx = rng.sample_without_replacement(e_und, k);
  std::set<std::pair<int, int>> present(und.begin(), und.end());
  for (int i : removed_idx) present.erase(und[static_cast<std::size_t>(i)]);
  int added = 0;
  while (added < k) {
    int u = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(g.num_nodes)));
    int v = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(g.num_nodes)));
    if (u == v) continue;
    if (u > v) std::swap(u, v);
    if (!present.emplace(u, v).second) continue;
    ++added;
  }
  Graph out = g;
  out.edges.clear();
  for (const auto& [u, v] : present) {
    out.edges.emplace_back(u, v);
    out.edges.emplace_back(v, u);
  }
  out.canonicalize();
  return out;
}

Graph subgraph(const Graph& g, double ratio, RngStream& rng) {
  check_ratio(ratio);
  if (ratio == 0.0 || g.num_nodes == 0) return g;
  const int target = static_cast<int>(std::ceil((1.0 - ratio) * g.num_nodes));
  const int center = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(g.num_nodes)));
  const auto adj = adjacency(g);
  std::vector<int> kept(static_cast<std::size_t>(g.num_nodes), -1);
  std::deque<int> frontier;
  kept[static_cast<std::size_t>(center)] = 0;
  frontier.push_back(center);
  int count = 1;
  while (!frontier.empty() && count < target) {
    const int v = frontier.front();
    frontier.pop_front();
    std::vector<int> nbrs = adj[static_cast<std::size_t>(v)];
    rng.shuffle(nbrs);
    for (int u : nbrs) {
      if (count >= target) break;
      if (kept[static_cast<std::size_t>(u)] >= 0) continue;
      kept[static_cast<std::size_t>(u)] = 0;
      frontier.push_back(u);
      ++count;
    }
  }
  return keep_nodes(g, kept);
}

Graph attr_mask(const Graph& g, double ratio, RngStream& rng) {
  check_ratio(ratio);
  if (ratio == 0.0) return g;
  const int k = static_cast<int>(std::floor(ratio * g.num_nodes));
  if (k == 0) return g;
  Graph out = g;
  for (int v : rng.sample_without_replacement(g.num_nodes, k))
    if (out.features.size() > 0) out.features.row(v).setZero();
  return out;
}

Graph random4(const Graph& g, double ratio, RngStream& rng) {
  check_ratio(ratio);
  if (ratio == 0.0) return g;
  static constexpr AugKind kinds[] = {AugKind::node_drop, AugKind::edge_perturb,
                                      AugKind::subgraph, AugKind::attr_mask};
  const int first = static_cast<int>(rng.uniform_int(4));
  int second = static_cast<int>(rng.uniform_int(3));
  if (second >= first) ++second;
  Graph mid = apply_fixed_augmentation(kinds[first], g, ratio, rng);
  return apply_fixed_augmentation(kinds[second], mid, ratio, rng);
}

Graph apply_fixed_augmentation(AugKind k, const Graph& g, double ratio, RngStream& rng) {
  switch (k) {
    case AugKind::none:
      return g;
    case AugKind::node_drop:
      return node_drop(g, ratio, rng);
    case AugKind::edge_perturb:
      return edge_perturb(g, ratio, rng);
    case AugKind::subgraph:
      return subgraph(g, ratio, rng);
    case AugKind::attr_mask:
      return attr_mask(g, ratio, rng);
    case AugKind::random4:
      return random4(g, ratio, rng);
  }
  throw std::invalid_argument("unknown augmentation kind");
}

AugKind parse_aug_kind(const std::string& s) {
  if (s == "none") return AugKind::none;
  if (s == "node_drop") return AugKind::node_drop;
  if (s == "edge_perturb") return AugKind::edge_perturb;
  if (s == "subgraph") return AugKind::subgraph;
  if (s == "attr_mask") return AugKind::attr_mask;
  if (s == "random4") return AugKind::random4;
  throw std::invalid_argument("unknown augmentation '" + s +
                              "' (none, node_drop, edge_perturb, subgraph, attr_mask, random4)");
}

const char* aug_kind_name(AugKind k) {
  switch (k) {
    case AugKind::none: return "none";
    case AugKind::node_drop: return "node_drop";
    case AugKind::edge_perturb: return "edge_perturb";
    case AugKind::subgraph: return "subgraph";
    case AugKind::attr_mask: return "attr_mask";
    case AugKind::random4: return "random4";
  }
  return "?";
}

}  // namespace gcl
