#include "gcl/dataset.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

#include "gcl/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace gcl {

namespace {

std::vector<std::string> read_lines(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw DataError("cannot open " + p.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
    lines.push_back(line);
  }
  while (!lines.empty() && lines.back().find_first_not_of(" \t") == std::string::npos)
    lines.pop_back();
  return lines;
}

std::vector<double> parse_numbers(const std::string& line, const fs::path& p, std::size_t ln) {
  std::string s = line;
  std::replace(s.begin(), s.end(), ',', ' ');
  std::istringstream iss(s);
  std::vector<double> out;
  double v;
  while (iss >> v) out.push_back(v);
  if (!iss.eof())
    throw DataError(p.string() + ":" + std::to_string(ln + 1) + ": not numeric: '" + line + "'");
  return out;
}

long parse_int(const std::string& line, const fs::path& p, std::size_t ln) {
  const auto nums = parse_numbers(line, p, ln);
  if (nums.size() != 1)
    throw DataError(p.string() + ":" + std::to_string(ln + 1) + ": expected one integer, got '" +
                    line + "'");
  return static_cast<long>(nums[0]);
}

}  // namespace

std::vector<Graph> load_tu_dataset(const std::string& dir) {
  const fs::path root(dir);
  if (!fs::is_directory(root)) throw DataError("not a directory: " + dir);
  std::string prefix;
  for (const auto& e : fs::directory_iterator(root)) {
    const std::string name = e.path().filename().string();
    if (name.size() > 6 && name.ends_with("_A.txt")) {
      prefix = name.substr(0, name.size() - 6);
      break;
    }
  }
  if (prefix.empty()) throw DataError("no *_A.txt file in " + dir);

  const fs::path a_path = root / (prefix + "_A.txt");
  const fs::path ind_path = root / (prefix + "_graph_indicator.txt");
  const fs::path glab_path = root / (prefix + "_graph_labels.txt");
  const fs::path nlab_path = root / (prefix + "_node_labels.txt");
  const fs::path nattr_path = root / (prefix + "_node_attributes.txt");
  if (!fs::exists(ind_path)) throw DataError("missing " + ind_path.string());
  if (!fs::exists(glab_path)) throw DataError("missing " + glab_path.string());

  const auto ind_lines = read_lines(ind_path);
  const std::size_t n_nodes = ind_lines.size();
  std::vector<int> node_graph(n_nodes);  // 0-based graph index per global node
  int n_graphs = 0;
  for (std::size_t i = 0; i < n_nodes; ++i) {
    const long g = parse_int(ind_lines[i], ind_path, i);
    if (g < 1) throw DataError(ind_path.string() + ": graph indicator must be >= 1");
    node_graph[i] = static_cast<int>(g - 1);
    n_graphs = std::max(n_graphs, static_cast<int>(g));
  }

  const auto glab_lines = read_lines(glab_path);
  if (static_cast<int>(glab_lines.size()) != n_graphs)
    throw DataError(glab_path.string() + ": " + std::to_string(glab_lines.size()) +
                    " labels for " + std::to_string(n_graphs) + " graphs");
  std::vector<long> raw_labels(glab_lines.size());
  for (std::size_t i = 0; i < glab_lines.size(); ++i)
    raw_labels[i] = parse_int(glab_lines[i], glab_path, i);
  std::set<long> label_set(raw_labels.begin(), raw_labels.end());
  std::map<long, int> label_map;
  for (long v : label_set) label_map.emplace(v, static_cast<int>(label_map.size()));

  std::vector<int> local_id(n_nodes);
  std::vector<int> graph_size(static_cast<std::size_t>(n_graphs), 0);
  for (std::size_t i = 0; i < n_nodes; ++i)
    local_id[i] = graph_size[static_cast<std::size_t>(node_graph[i])]++;

  std::vector<Graph> graphs(static_cast<std::size_t>(n_graphs));
  for (int g = 0; g < n_graphs; ++g) {
    graphs[static_cast<std::size_t>(g)].num_nodes = graph_size[static_cast<std::size_t>(g)];
    graphs[static_cast<std::size_t>(g)].label =
        label_map.at(raw_labels[static_cast<std::size_t>(g)]);
  }

  std::vector<std::set<std::pair<int, int>>> arcs(static_cast<std::size_t>(n_graphs));
  const auto a_lines = read_lines(a_path);
  for (std::size_t i = 0; i < a_lines.size(); ++i) {
    if (a_lines[i].find_first_not_of(" \t") == std::string::npos) continue;
    const auto nums = parse_numbers(a_lines[i], a_path, i);
    if (nums.size() != 2)
      throw DataError(a_path.string() + ":" + std::to_string(i + 1) + ": expected 'u, v'");
    const long u = static_cast<long>(nums[0]), v = static_cast<long>(nums[1]);
    if (u < 1 || v < 1 || u > static_cast<long>(n_nodes) || v > static_cast<long>(n_nodes))
      throw DataError(a_path.string() + ":" + std::to_string(i + 1) + ": node id out of range");
    const std::size_t ui = static_cast<std::size_t>(u - 1), vi = static_cast<std::size_t>(v - 1);
    if (node_graph[ui] != node_graph[vi])
      throw DataError(a_path.string() + ":" + std::to_string(i + 1) +
                      ": edge crosses graph boundary (nodes " + std::to_string(u) + ", " +
                      std::to_string(v) + ")");
    auto& bag = arcs[static_cast<std::size_t>(node_graph[ui])];
    bag.emplace(local_id[ui], local_id[vi]);
    bag.emplace(local_id[vi], local_id[ui]);
  }
  for (int g = 0; g < n_graphs; ++g)
    graphs[static_cast<std::size_t>(g)].edges.assign(arcs[static_cast<std::size_t>(g)].begin(),
                                                     arcs[static_cast<std::size_t>(g)].end());

  Eigen::MatrixXd onehot;  // n_nodes x label classes
  if (fs::exists(nlab_path)) {
    const auto lines = read_lines(nlab_path);
    if (lines.size() != n_nodes)
      throw DataError(nlab_path.string() + ": " + std::to_string(lines.size()) +
                      " rows for " + std::to_string(n_nodes) + " nodes");
    std::vector<long> raw(n_nodes);
    std::set<long> vals;
    for (std::size_t i = 0; i < n_nodes; ++i) {
      raw[i] = parse_int(lines[i], nlab_path, i);
      vals.insert(raw[i]);
    }
    std::map<long, int> vmap;
    for (long v : vals) vmap.emplace(v, static_cast<int>(vmap.size()));
    onehot = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_nodes),
                                   static_cast<Eigen::Index>(vmap.size()));
    for (std::size_t i = 0; i < n_nodes; ++i)
      onehot(static_cast<Eigen::Index>(i), vmap.at(raw[i])) = 1.0;
  }

  Eigen::MatrixXd attrs;  // n_nodes x attr width
  if (fs::exists(nattr_path)) {
    const auto lines = read_lines(nattr_path);
    if (lines.size() != n_nodes)
      throw DataError(nattr_path.string() + ": " + std::to_string(lines.size()) +
                      " rows for " + std::to_string(n_nodes) + " nodes");
    for (std::size_t i = 0; i < n_nodes; ++i) {
      const auto nums = parse_numbers(lines[i], nattr_path, i);
      if (i == 0)
        attrs.resize(static_cast<Eigen::Index>(n_nodes), static_cast<Eigen::Index>(nums.size()));
      else if (static_cast<Eigen::Index>(nums.size()) != attrs.cols())
        throw DataError(nattr_path.string() + ":" + std::to_string(i + 1) +
                        ": inconsistent attribute count");
      for (std::size_t j = 0; j < nums.size(); ++j)
        attrs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = nums[j];
    }
  }

  const Eigen::Index width = (onehot.size() ? onehot.cols() : 0) + (attrs.size() ? attrs.cols() : 0);
  if (width > 0) {
    for (int g = 0; g < n_graphs; ++g)
      graphs[static_cast<std::size_t>(g)].features = Eigen::MatrixXd::Zero(
          graphs[static_cast<std::size_t>(g)].num_nodes, width);
    for (std::size_t i = 0; i < n_nodes; ++i) {
      auto row = graphs[static_cast<std::size_t>(node_graph[i])].features.row(local_id[i]);
      Eigen::Index c = 0;
      if (onehot.size()) {
        row.segment(0, onehot.cols()) = onehot.row(static_cast<Eigen::Index>(i));
        c = onehot.cols();
      }
      if (attrs.size()) row.segment(c, attrs.cols()) = attrs.row(static_cast<Eigen::Index>(i));
    }
  }

  for (auto& g : graphs) g.validate();
  return graphs;
}

std::vector<Graph> load_graph_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw DataError(path + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("graphs") || !doc["graphs"].is_array())
    throw DataError(path + ": expected top-level object with a \"graphs\" array");
  std::vector<Graph> out;
  std::size_t idx = 0;
  for (const auto& jg : doc["graphs"]) {
    const std::string where = path + ": graphs[" + std::to_string(idx++) + "]";
    if (!jg.is_object() || !jg.contains("num_nodes") || !jg["num_nodes"].is_number_integer())
      throw DataError(where + ": missing integer \"num_nodes\"");
    Graph g;
    g.num_nodes = jg["num_nodes"].get<int>();
    if (g.num_nodes < 0) throw DataError(where + ": negative num_nodes");
    std::set<std::pair<int, int>> arcs;
    if (jg.contains("edges")) {
      if (!jg["edges"].is_array()) throw DataError(where + ": \"edges\" must be an array");
      for (const auto& je : jg["edges"]) {
        if (!je.is_array() || je.size() != 2 || !je[0].is_number_integer() ||
            !je[1].is_number_integer())
          throw DataError(where + ": each edge must be [src, dst]");
        const int u = je[0].get<int>(), v = je[1].get<int>();
        if (u < 0 || u >= g.num_nodes || v < 0 || v >= g.num_nodes)
          throw DataError(where + ": edge [" + std::to_string(u) + "," + std::to_string(v) +
                          "] outside node range");
        arcs.emplace(u, v);
        arcs.emplace(v, u);
      }
    }
    g.edges.assign(arcs.begin(), arcs.end());
    if (jg.contains("node_features")) {
      if (!jg["node_features"].is_array() ||
          static_cast<int>(jg["node_features"].size()) != g.num_nodes)
        throw DataError(where + ": \"node_features\" must have one row per node");
      Eigen::Index width = -1;
      Eigen::Index r = 0;
      for (const auto& jr : jg["node_features"]) {
        if (!jr.is_array()) throw DataError(where + ": feature rows must be arrays");
        if (width < 0) {
          width = static_cast<Eigen::Index>(jr.size());
          g.features.resize(g.num_nodes, width);
        } else if (static_cast<Eigen::Index>(jr.size()) != width) {
          throw DataError(where + ": ragged feature rows");
        }
        for (Eigen::Index c = 0; c < width; ++c) {
          if (!jr[static_cast<std::size_t>(c)].is_number())
            throw DataError(where + ": feature values must be numbers");
          g.features(r, c) = jr[static_cast<std::size_t>(c)].get<double>();
        }
        ++r;
      }
    }
    if (jg.contains("label")) {
      if (!jg["label"].is_number_integer()) throw DataError(where + ": \"label\" must be an integer");
      g.label = jg["label"].get<int>();
    }
    g.validate();
    out.push_back(std::move(g));
  }
  if (out.empty()) throw DataError(path + ": empty graph list");
  return out;
}

void write_tu_dataset(const std::string& dir, const std::string& name,
                      const std::vector<Graph>& gs) {
  fs::create_directories(dir);
  const fs::path root(dir);
  std::ofstream a(root / (name + "_A.txt"));
  std::ofstream ind(root / (name + "_graph_indicator.txt"));
  std::ofstream glab(root / (name + "_graph_labels.txt"));
  bool all_onehot = true;
  for (const Graph& g : gs) {
    if (g.features.size() == 0) {
      all_onehot = false;
      break;
    }
    for (Eigen::Index i = 0; i < g.features.rows(); ++i) {
      const auto row = g.features.row(i);
      if (row.sum() != 1.0 || row.minCoeff() < 0.0 || row.maxCoeff() != 1.0) all_onehot = false;
    }
  }
  const bool any_features = std::any_of(gs.begin(), gs.end(),
                                        [](const Graph& g) { return g.features.size() > 0; });
  std::ofstream nlab, nattr;
  if (any_features && all_onehot) nlab.open(root / (name + "_node_labels.txt"));
  if (any_features && !all_onehot) nattr.open(root / (name + "_node_attributes.txt"));

  int offset = 0, gid = 1;
  for (const Graph& g : gs) {
    for (const auto& [u, v] : g.edges)
      a << (u + offset + 1) << ", " << (v + offset + 1) << "\n";
    for (int v = 0; v < g.num_nodes; ++v) {
      ind << gid << "\n";
      if (nlab.is_open()) {
        Eigen::Index arg = 0;
        g.features.row(v).maxCoeff(&arg);
        nlab << arg << "\n";
      }
      if (nattr.is_open()) {
        for (Eigen::Index c = 0; c < g.features.cols(); ++c)
          nattr << (c ? ", " : "") << g.features(v, c);
        nattr << "\n";
      }
    }
    glab << g.label << "\n";
    offset += g.num_nodes;
    ++gid;
  }
}

Protocol parse_protocol(const std::string& s) {
  if (s == "semi") return Protocol::semi;
  if (s == "unsup") return Protocol::unsup;
  throw DataError("unknown protocol '" + s + "' (expected semi or unsup)");
}

const char* protocol_name(Protocol p) {
  return p == Protocol::semi ? "semi" : "unsup";
}

SplitPlan make_split(int n_graphs, Protocol protocol, std::uint64_t seed, int fold_count) {
  if (n_graphs < fold_count)
    throw DataError("make_split: " + std::to_string(n_graphs) + " graphs cannot fill " +
                    std::to_string(fold_count) + " folds");
  if (fold_count < 2) throw DataError("make_split: need at least 2 folds");
  std::vector<int> perm(static_cast<std::size_t>(n_graphs));
  for (int i = 0; i < n_graphs; ++i) perm[static_cast<std::size_t>(i)] = i;
  RngStream rng(derive_seed(seed, {0x53504c4954ULL}));
  rng.shuffle(perm);
  std::vector<std::vector<int>> chunks(static_cast<std::size_t>(fold_count));
  for (int c = 0; c < fold_count; ++c) {
    const int lo = static_cast<int>(static_cast<long>(c) * n_graphs / fold_count);
    const int hi = static_cast<int>(static_cast<long>(c + 1) * n_graphs / fold_count);
    chunks[static_cast<std::size_t>(c)].assign(perm.begin() + lo, perm.begin() + hi);
  }
  SplitPlan plan;
  plan.protocol = protocol;
  plan.fold_count = fold_count;
  plan.seed = seed;
  plan.folds.resize(static_cast<std::size_t>(fold_count));
  for (int f = 0; f < fold_count; ++f) {
    FoldSplit& fold = plan.folds[static_cast<std::size_t>(f)];
    fold.test = chunks[static_cast<std::size_t>(f)];
    const int labeled_chunk = (f + 1) % fold_count;
    for (int c = 0; c < fold_count; ++c) {
      if (c == f) continue;
      if (protocol == Protocol::semi && c == labeled_chunk) {
        fold.labeled_train = chunks[static_cast<std::size_t>(c)];
      } else {
        fold.unlabeled.insert(fold.unlabeled.end(), chunks[static_cast<std::size_t>(c)].begin(),
                              chunks[static_cast<std::size_t>(c)].end());
      }
    }
  }
  return plan;
}

}  // namespace gcl
