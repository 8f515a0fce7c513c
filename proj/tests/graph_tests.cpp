#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <vector>

#include "gcl/graph.hpp"
#include "gcl/synthetic.hpp"

using gcl::Graph;
using gcl::GraphBatch;
using Matd = Eigen::MatrixXd;

namespace {

Graph triangle() {
  Graph g;
  g.num_nodes = 3;
  g.edges = {{0, 1}, {1, 0}, {1, 2}, {2, 1}, {0, 2}, {2, 0}};
  g.features = Matd::Identity(3, 3);
  g.label = 1;
  return g;
}

}  // namespace

TEST_CASE("canonicalize sorts and deduplicates arcs") {
  Graph g;
  g.num_nodes = 3;
  g.edges = {{2, 1}, {0, 1}, {2, 1}, {0, 1}, {1, 2}};
  g.canonicalize();
  std::vector<std::pair<int, int>> want = {{0, 1}, {1, 2}, {2, 1}};
  CHECK(g.edges == want);
}

TEST_CASE("validate rejects out-of-range endpoints and bad feature rows") {
  Graph g = triangle();
  CHECK_NOTHROW(g.validate());
  g.edges.push_back({0, 3});
  CHECK_THROWS_AS(g.validate(), gcl::DataError);
  Graph h = triangle();
  h.features = Matd::Identity(2, 2);
  CHECK_THROWS_AS(h.validate(), gcl::DataError);
  Graph neg;
  neg.num_nodes = -1;
  CHECK_THROWS_AS(neg.validate(), gcl::DataError);
}

TEST_CASE("degrees counts incident arcs") {
  Graph g = triangle();
  std::vector<int> d = g.degrees();
  CHECK(d == std::vector<int>{2, 2, 2});
  Graph path;
  path.num_nodes = 3;
  path.edges = {{0, 1}, {1, 0}, {1, 2}, {2, 1}};
  CHECK(path.degrees() == std::vector<int>{1, 2, 1});
}

TEST_CASE("undirected_edges folds arc pairs and drops self-loops") {
  Graph g;
  g.num_nodes = 3;
  g.edges = {{0, 1}, {1, 0}, {2, 2}, {1, 2}};
  auto und = gcl::undirected_edges(g);
  std::vector<std::pair<int, int>> want = {{0, 1}, {1, 2}};
  CHECK(und == want);
}

TEST_CASE("batching concatenates with per-graph offsets") {
  Graph a = triangle();           // 3 nodes
  Graph b;                        // 2 nodes, one edge
  b.num_nodes = 2;
  b.edges = {{0, 1}, {1, 0}};
  b.features = Matd::Ones(2, 3);
  b.label = 0;

  GraphBatch batch = gcl::batch_graphs({a, b});
  CHECK(batch.num_graphs() == 2);
  CHECK(batch.num_nodes() == 5);
  CHECK(batch.batch_vector == std::vector<int>{0, 0, 0, 1, 1});
  CHECK(batch.labels == std::vector<int>{1, 0});
  CHECK(batch.graph_sizes == std::vector<int>{3, 2});
  // second graph's arc endpoints shifted by 3
  bool found = false;
  for (std::size_t e = 0; e < batch.src.size(); ++e)
    if (batch.src[e] == 3 && batch.dst[e] == 4) found = true;
  CHECK(found);
  CHECK(batch.features.rows() == 5);
}

TEST_CASE("batch then unbatch is the identity") {
  gcl::RngStream rng(21);
  for (int t = 0; t < 20; ++t) {
    std::vector<Graph> gs;
    int n = 1 + static_cast<int>(rng.uniform_int(5));
    for (int i = 0; i < n; ++i) {
      Graph g = gcl::random_graph(rng, 2, 8, 4, 0.4);
      g.label = static_cast<int>(rng.uniform_int(3));
      gs.push_back(g);
    }
    GraphBatch b = gcl::batch_graphs(gs);
    std::vector<Graph> back = gcl::unbatch(b);
    REQUIRE(back.size() == gs.size());
    for (std::size_t i = 0; i < gs.size(); ++i) CHECK(back[i] == gs[i]);
  }
}

TEST_CASE("batching a subset by index") {
  Graph a = triangle(), b = triangle(), c = triangle();
  b.label = 0;
  GraphBatch batch = gcl::batch_graphs({a, b, c}, {2, 0});
  CHECK(batch.num_graphs() == 2);
  CHECK(batch.labels == std::vector<int>{1, 1});
}

TEST_CASE("batching rejects empty input and mixed feature widths") {
  CHECK_THROWS_AS((void)gcl::batch_graphs({}), gcl::DataError);
  Graph a = triangle();
  Graph b = triangle();
  b.features = Matd::Ones(3, 5);
  CHECK_THROWS_AS((void)gcl::batch_graphs({a, b}), gcl::DataError);
}

TEST_CASE("degree one-hot features cap at the last bucket") {
  Graph star;
  star.num_nodes = 5;
  for (int i = 1; i < 5; ++i) {
    star.edges.push_back({0, i});
    star.edges.push_back({i, 0});
  }
  Matd f = gcl::degree_onehot_features(star, 3).features;
  CHECK(f.rows() == 5);
  CHECK(f.cols() == 4);  // degrees 0..3
  CHECK(f(0, 3) == 1.0);  // hub degree 4 capped into bucket 3
  CHECK(f(1, 1) == 1.0);
  CHECK(f.row(1).sum() == 1.0);
}

TEST_CASE("ensure_features fills every graph when any lacks features") {
  Graph a = triangle();
  Graph b;
  b.num_nodes = 2;
  b.edges = {{0, 1}, {1, 0}};
  std::vector<Graph> gs = {a, b};
  gcl::ensure_features(gs, 128);
  // mixed input: both replaced by degree one-hots of equal width
  CHECK(gs[0].features.cols() == gs[1].features.cols());
  CHECK(gs[0].features.rows() == 3);
  CHECK(gs[1].features.rows() == 2);

  std::vector<Graph> keep = {triangle(), triangle()};
  gcl::ensure_features(keep, 128);
  CHECK(keep[0].features == Matd::Identity(3, 3));
}

TEST_CASE("observed max degree scans all graphs") {
  Graph a = triangle();
  Graph star;
  star.num_nodes = 4;
  for (int i = 1; i < 4; ++i) {
    star.edges.push_back({0, i});
    star.edges.push_back({i, 0});
  }
  CHECK(gcl::observed_max_degree({a, star}) == 3);
}
