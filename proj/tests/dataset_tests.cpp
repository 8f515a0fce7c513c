#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <set>
#include <string>

#include "gcl/dataset.hpp"
#include "gcl/synthetic.hpp"

namespace fs = std::filesystem;
using gcl::DataError;
using gcl::Graph;

namespace {

struct TempDir {
  fs::path path;
  TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("gcl_test_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream f(p);
  f << content;
}

// two triangles sharing nothing; labels -1 and 1; node labels 7 and 9
void write_two_triangles(const fs::path& dir) {
  fs::create_directories(dir);
  write_file(dir / "T_A.txt",
             "1, 2\n2, 1\n2, 3\n3, 2\n1, 3\n3, 1\n"
             "4, 5\n5, 4\n5, 6\n6, 5\n4, 6\n6, 4\n");
  write_file(dir / "T_graph_indicator.txt", "1\n1\n1\n2\n2\n2\n");
  write_file(dir / "T_graph_labels.txt", "-1\n1\n");
  write_file(dir / "T_node_labels.txt", "7\n9\n7\n9\n7\n9\n");
}

}  // namespace

TEST_CASE("TU loader parses graphs, remaps labels, one-hots node labels") {
  TempDir tmp("tu_basic");
  write_two_triangles(tmp.path / "T");
  std::vector<Graph> gs = gcl::load_tu_dataset((tmp.path / "T").string());
  REQUIRE(gs.size() == 2);
  CHECK(gs[0].num_nodes == 3);
  CHECK(gs[1].num_nodes == 3);
  // {-1, 1} remapped to {0, 1} by sorted order
  CHECK(gs[0].label == 0);
  CHECK(gs[1].label == 1);
  // node labels {7, 9} one-hot in sorted order
  REQUIRE(gs[0].features.cols() == 2);
  CHECK(gs[0].features(0, 0) == 1.0);
  CHECK(gs[0].features(1, 1) == 1.0);
  // both triangles have all three undirected edges
  CHECK(gcl::undirected_edges(gs[0]).size() == 3);
  CHECK(gcl::undirected_edges(gs[1]).size() == 3);
  for (const Graph& g : gs) CHECK_NOTHROW(g.validate());
}

TEST_CASE("TU loader tolerates CRLF, blank lines, and asymmetric arc lists") {
  TempDir tmp("tu_crlf");
  fs::path dir = tmp.path / "T";
  fs::create_directories(dir);
  // arcs listed once only; loader must symmetrize
  write_file(dir / "T_A.txt", "1, 2\r\n2, 3\r\n\r\n");
  write_file(dir / "T_graph_indicator.txt", "1\r\n1\r\n1\r\n");
  write_file(dir / "T_graph_labels.txt", "5\r\n");
  std::vector<Graph> gs = gcl::load_tu_dataset(dir.string());
  REQUIRE(gs.size() == 1);
  CHECK(gs[0].num_nodes == 3);
  CHECK(gs[0].edges.size() == 4);  // both directions of both edges
  CHECK(gs[0].label == 0);
}

TEST_CASE("TU loader appends node attributes to node label one-hots") {
  TempDir tmp("tu_attr");
  fs::path dir = tmp.path / "T";
  write_two_triangles(dir);
  write_file(dir / "T_node_attributes.txt",
             "0.5, 1.5\n0.5, 1.5\n0.5, 1.5\n2.5, 3.5\n2.5, 3.5\n2.5, 3.5\n");
  std::vector<Graph> gs = gcl::load_tu_dataset(dir.string());
  REQUIRE(gs[0].features.cols() == 4);
  CHECK(gs[0].features(0, 2) == 0.5);
  CHECK(gs[1].features(0, 3) == 3.5);
}

TEST_CASE("TU loader rejects edges that cross graph boundaries") {
  TempDir tmp("tu_cross");
  fs::path dir = tmp.path / "T";
  write_two_triangles(dir);
  write_file(dir / "T_A.txt", "1, 2\n2, 1\n3, 4\n4, 3\n");
  CHECK_THROWS_AS((void)gcl::load_tu_dataset(dir.string()), DataError);
}

TEST_CASE("TU loader errors on missing directory or mandatory files") {
  TempDir tmp("tu_missing");
  CHECK_THROWS_AS((void)gcl::load_tu_dataset((tmp.path / "nope").string()), DataError);
  fs::path dir = tmp.path / "T";
  fs::create_directories(dir);
  write_file(dir / "T_A.txt", "1, 2\n2, 1\n");
  CHECK_THROWS_AS((void)gcl::load_tu_dataset(dir.string()), DataError);
}

TEST_CASE("TU writer and loader round trip") {
  TempDir tmp("tu_round");
  std::vector<Graph> gs = gcl::make_cycles_and_stars(8, 3);
  gcl::write_tu_dataset((tmp.path / "RT").string(), "RT", gs);
  std::vector<Graph> back = gcl::load_tu_dataset((tmp.path / "RT").string());
  REQUIRE(back.size() == gs.size());
  for (std::size_t i = 0; i < gs.size(); ++i) {
    CHECK(back[i].num_nodes == gs[i].num_nodes);
    CHECK(back[i].edges == gs[i].edges);
    CHECK(back[i].label == gs[i].label);
    CHECK(back[i].features == gs[i].features);
  }
}

TEST_CASE("JSON loader reads graphs with optional labels") {
  TempDir tmp("json_basic");
  fs::path p = tmp.path / "d.json";
  write_file(p, R"({"graphs": [
    {"num_nodes": 2, "edges": [[0, 1]], "node_features": [[1.0], [2.0]], "label": 1},
    {"num_nodes": 1, "edges": []}
  ]})");
  std::vector<Graph> gs = gcl::load_graph_json(p.string());
  REQUIRE(gs.size() == 2);
  CHECK(gs[0].num_nodes == 2);
  CHECK(gs[0].edges.size() == 2);  // symmetrized
  CHECK(gs[0].label == 1);
  CHECK(gs[0].features(1, 0) == 2.0);
  CHECK(gs[1].label == -1);
}

TEST_CASE("JSON loader reports which graph is broken") {
  TempDir tmp("json_bad");
  fs::path p = tmp.path / "d.json";

  write_file(p, R"({"graphs": [{"num_nodes": 2, "edges": [[0, 5]]}]})");
  CHECK_THROWS_WITH_AS((void)gcl::load_graph_json(p.string()),
                       doctest::Contains("graphs[0]"), DataError);

  write_file(p, R"({"graphs": [{"edges": []}]})");
  CHECK_THROWS_AS((void)gcl::load_graph_json(p.string()), DataError);

  write_file(p, R"({"graphs": [{"num_nodes": 2, "edges": [],
    "node_features": [[1.0], [1.0, 2.0]]}]})");
  CHECK_THROWS_AS((void)gcl::load_graph_json(p.string()), DataError);

  write_file(p, "not json at all");
  CHECK_THROWS_AS((void)gcl::load_graph_json(p.string()), DataError);

  CHECK_THROWS_AS((void)gcl::load_graph_json((tmp.path / "absent.json").string()),
                  DataError);
}

TEST_CASE("semi split: 10-fold chunked 80/10/10 with rotating labeled chunk") {
  const int n = 100;
  gcl::SplitPlan plan = gcl::make_split(n, gcl::Protocol::semi, 17, 10);
  REQUIRE(plan.folds.size() == 10);
  for (int f = 0; f < 10; ++f) {
    const gcl::FoldSplit& s = plan.folds[f];
    CHECK(s.test.size() == 10);
    CHECK(s.labeled_train.size() == 10);
    CHECK(s.unlabeled.size() == 80);
    std::set<int> all;
    for (int i : s.test) all.insert(i);
    for (int i : s.labeled_train) all.insert(i);
    for (int i : s.unlabeled) all.insert(i);
    CHECK(all.size() == n);  // disjoint cover
  }
  // consecutive folds share no test graphs
  std::set<int> t0(plan.folds[0].test.begin(), plan.folds[0].test.end());
  for (int i : plan.folds[1].test) CHECK(t0.count(i) == 0);
  // fold f's labeled chunk is fold (f+1)'s test chunk
  std::set<int> l0(plan.folds[0].labeled_train.begin(), plan.folds[0].labeled_train.end());
  std::set<int> t1(plan.folds[1].test.begin(), plan.folds[1].test.end());
  CHECK(l0 == t1);
}

TEST_CASE("semi split handles sizes that do not divide evenly") {
  gcl::SplitPlan plan = gcl::make_split(17, gcl::Protocol::semi, 3, 5);
  std::size_t total = 0;
  for (const auto& f : plan.folds) {
    std::set<int> all;
    for (int i : f.test) all.insert(i);
    for (int i : f.labeled_train) all.insert(i);
    for (int i : f.unlabeled) all.insert(i);
    CHECK(all.size() == 17);
    total += f.test.size();
  }
  CHECK(total == 17);  // test chunks tile the dataset across folds
}

TEST_CASE("unsup split: 90/10 with no labeled chunk") {
  gcl::SplitPlan plan = gcl::make_split(100, gcl::Protocol::unsup, 17, 10);
  for (const auto& f : plan.folds) {
    CHECK(f.labeled_train.empty());
    CHECK(f.test.size() == 10);
    CHECK(f.unlabeled.size() == 90);
  }
}

TEST_CASE("splits are deterministic in the seed and differ across seeds") {
  gcl::SplitPlan a = gcl::make_split(50, gcl::Protocol::semi, 5, 10);
  gcl::SplitPlan b = gcl::make_split(50, gcl::Protocol::semi, 5, 10);
  gcl::SplitPlan c = gcl::make_split(50, gcl::Protocol::semi, 6, 10);
  CHECK(a.folds[0].test == b.folds[0].test);
  CHECK(a.folds[0].unlabeled == b.folds[0].unlabeled);
  CHECK(a.folds[0].test != c.folds[0].test);
}

TEST_CASE("split rejects degenerate sizes") {
  CHECK_THROWS_AS((void)gcl::make_split(5, gcl::Protocol::semi, 0, 10), DataError);
  CHECK_THROWS_AS((void)gcl::make_split(0, gcl::Protocol::semi, 0, 10), DataError);
}
