#include "gcl/export.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <set>

namespace gcl {

namespace {

constexpr std::uint64_t kExportTag = 0x6578706fULL;

const char* decision_name(int col) {
  switch (col) {
    case kDrop: return "drop";
    case kKeep: return "keep";
    default: return "mask";
  }
}

const char* decision_color(int col) {
  switch (col) {
    case kDrop: return "lightcoral";
    case kKeep: return "palegreen";
    default: return "gold";
  }
}

int hard_decision(const Matd& hard, int node) {
  Eigen::Index best;
  hard.row(node).maxCoeff(&best);
  return static_cast<int>(best);
}

}  // namespace

Model model_from_checkpoint(const Checkpoint& ckpt) {
  const nlohmann::json& meta = ckpt.meta;
  for (const char* key : {"in_dim", "n_classes", "hidden", "layers", "gen_hidden",
                          "gen_layers", "readout"})
    if (!meta.contains(key))
      throw DataError(std::string("checkpoint metadata is missing '") + key + "'");
  ExperimentConfig cfg;
  cfg.hidden = meta["hidden"].get<int>();
  cfg.layers = meta["layers"].get<int>();
  cfg.gen_hidden = meta["gen_hidden"].get<int>();
  cfg.gen_layers = meta["gen_layers"].get<int>();
  cfg.mean_readout = meta["readout"].get<std::string>() == "mean";
  RngStream rng(0);
  Model m = build_model(cfg, meta["in_dim"].get<int>(), meta["n_classes"].get<int>(),
                        rng);
  load_into(ckpt, m.all_params);
  return m;
}

void export_views(const std::vector<Graph>& gs, const Model& m,
                  const ExperimentConfig& cfg, const std::string& out_dir) {
  if (gs.empty()) throw DataError("nothing to export from an empty dataset");
  std::filesystem::create_directories(out_dir);
  RngStream rng(derive_seed(cfg.seed, {kExportTag}));

  for (int s = 0; s < cfg.export_samples; ++s) {
    int gi = static_cast<int>(rng.uniform_int(gs.size()));
    const ViewGenerator& gen = s % 2 == 0 ? m.gen1 : m.gen2;
    GraphBatch b = batch_graphs(gs, {gi});
    auto [view, choice] = generate_view(b, gen, cfg.tau_g, rng);
    const Graph& g = gs[gi];

    nlohmann::json j;
    j["graph_index"] = gi;
    j["generator"] = s % 2 == 0 ? 1 : 2;
    j["label"] = g.label;
    j["num_nodes"] = g.num_nodes;
    auto& decisions = j["decisions"] = nlohmann::json::array();
    for (int n = 0; n < g.num_nodes; ++n)
      decisions.push_back(decision_name(hard_decision(choice.hard, n)));
    auto& orig_edges = j["edges"] = nlohmann::json::array();
    for (const auto& [u, v] : g.edges) orig_edges.push_back({u, v});
    auto& kept = j["kept_edges"] = nlohmann::json::array();
    for (std::size_t e = 0; e < view.src.size(); ++e)
      kept.push_back({view.src[e], view.dst[e]});

    std::string stem = out_dir + "/view_" + std::to_string(s);
    std::ofstream jf(stem + ".json");
    jf << j.dump(2) << "\n";

    std::ofstream df(stem + ".dot");
    df << "graph view_" << s << " {\n";
    df << "  node [style=filled];\n";
    for (int n = 0; n < g.num_nodes; ++n)
      df << "  n" << n << " [fillcolor=" << decision_color(hard_decision(choice.hard, n))
         << "];\n";
    std::set<std::pair<int, int>> survived;
    for (std::size_t e = 0; e < view.src.size(); ++e) {
      int u = view.src[e], v = view.dst[e];
      survived.insert({std::min(u, v), std::max(u, v)});
    }
    for (const auto& [u, v] : undirected_edges(g)) {
      df << "  n" << u << " -- n" << v;
      if (survived.count({u, v}) == 0) df << " [style=dashed, color=gray]";
      df << ";\n";
    }
    df << "}\n";
  }
}

void export_embeddings(const std::vector<Graph>& gs, const Encoder& enc,
                       int batch_size, const std::string& csv_path) {
  if (gs.empty()) throw DataError("nothing to export from an empty dataset");
  std::filesystem::path p(csv_path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(csv_path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + csv_path + "'");

  out << "graph_id,label";
  for (int h = 0; h < enc.hidden(); ++h) out << ",e" << h;
  out << "\n";
  out << std::setprecision(10);

  std::vector<int> all(gs.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
  for (std::size_t at = 0; at < all.size(); at += batch_size) {
    std::size_t end = std::min(all.size(), at + batch_size);
    std::vector<int> chunk(all.begin() + at, all.begin() + end);
    GraphBatch b = batch_graphs(gs, chunk);
    Matd e = enc.embed(full_view(b)).value();
    for (int r = 0; r < e.rows(); ++r) {
      out << chunk[r] << "," << gs[chunk[r]].label;
      for (int h = 0; h < e.cols(); ++h) out << "," << e(r, h);
      out << "\n";
    }
  }
}

}  // namespace gcl
