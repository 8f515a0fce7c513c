// Regenerates the small datasets bundled under data/. Run from the repo root:
//   build/tools/make_fixtures data
#include <filesystem>
#include <fstream>
#include <iostream>

#include "json.hpp"

#include "gcl/dataset.hpp"
#include "gcl/synthetic.hpp"

int main(int argc, char** argv) {
  std::string root = argc > 1 ? argv[1] : "data";

  std::vector<gcl::Graph> toy = gcl::make_cycles_and_stars(16, 7);
  gcl::write_tu_dataset(root + "/toy16/TOY16", "TOY16", toy);
  std::cout << "wrote " << root << "/toy16/TOY16 (" << toy.size() << " graphs)\n";

  std::vector<gcl::Graph> sep = gcl::make_separable_fixture(6, 7);
  nlohmann::json j;
  auto& arr = j["graphs"] = nlohmann::json::array();
  for (const gcl::Graph& g : sep) {
    nlohmann::json jg;
    jg["num_nodes"] = g.num_nodes;
    jg["label"] = g.label;
    auto& edges = jg["edges"] = nlohmann::json::array();
    for (const auto& [u, v] : g.edges) edges.push_back({u, v});
    auto& feats = jg["node_features"] = nlohmann::json::array();
    for (int r = 0; r < g.features.rows(); ++r) {
      nlohmann::json row = nlohmann::json::array();
      for (int c = 0; c < g.features.cols(); ++c) row.push_back(g.features(r, c));
      feats.push_back(row);
    }
    arr.push_back(jg);
  }
  std::filesystem::create_directories(root);
  std::ofstream out(root + "/toy.json");
  out << j.dump(2) << "\n";
  std::cout << "wrote " << root << "/toy.json (" << sep.size() << " graphs)\n";
  return 0;
}
