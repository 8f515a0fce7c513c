#include "gcl/config.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"

namespace gcl {

namespace {

const char* kStrategyNames[] = {"supervised",    "aug_only",     "graphcl",
                                "naive",         "joint",        "joint_cls",
                                "joint_cls_sim", "joint_cl_cls"};

int parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    int out = std::stoi(v, &pos);
    if (pos == v.size()) return out;
  } catch (const std::exception&) {
  }
  throw UsageError("config key '" + key + "' expects an integer, got '" + v + "'");
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    unsigned long long out = std::stoull(v, &pos);
    // stoull accepts a leading minus and wraps; reject that explicitly
    if (pos == v.size() && v.find('-') == std::string::npos) return out;
  } catch (const std::exception&) {
  }
  throw UsageError("config key '" + key + "' expects an unsigned integer, got '" +
                   v + "'");
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    double out = std::stod(v, &pos);
    if (pos == v.size()) return out;
  } catch (const std::exception&) {
  }
  throw UsageError("config key '" + key + "' expects a number, got '" + v + "'");
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw UsageError(msg);
}

}  // namespace

Strategy parse_strategy(const std::string& s) {
  for (int i = 0; i < 8; ++i)
    if (s == kStrategyNames[i]) return static_cast<Strategy>(i);
  throw UsageError("unknown strategy '" + s + "'");
}

std::string strategy_name(Strategy s) {
  return kStrategyNames[static_cast<int>(s)];
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  if (key == "dataset.path") {
    dataset_path = value;
  } else if (key == "dataset.kind") {
    if (value == "tu")
      dataset_kind = DatasetKind::tu;
    else if (value == "json")
      dataset_kind = DatasetKind::json;
    else
      throw UsageError("dataset.kind must be 'tu' or 'json', got '" + value + "'");
  } else if (key == "protocol") {
    try {
      protocol = parse_protocol(value);
    } catch (const std::exception& e) {
      throw UsageError(e.what());
    }
  } else if (key == "strategy") {
    strategy = parse_strategy(value);
  } else if (key == "epochs") {
    epochs = parse_int(key, value);
  } else if (key == "finetune_epochs") {
    finetune_epochs = parse_int(key, value);
  } else if (key == "batch_size") {
    batch_size = parse_int(key, value);
  } else if (key == "hidden") {
    hidden = parse_int(key, value);
  } else if (key == "layers") {
    layers = parse_int(key, value);
  } else if (key == "gen_hidden") {
    gen_hidden = parse_int(key, value);
  } else if (key == "gen_layers") {
    gen_layers = parse_int(key, value);
  } else if (key == "lr") {
    lr = parse_double(key, value);
  } else if (key == "gen_lr") {
    gen_lr = parse_double(key, value);
  } else if (key == "tau") {
    tau = parse_double(key, value);
  } else if (key == "tau_g") {
    tau_g = parse_double(key, value);
  } else if (key == "lambda") {
    lambda = parse_double(key, value);
  } else if (key == "folds") {
    folds = parse_int(key, value);
  } else if (key == "seeds") {
    seeds = parse_int(key, value);
  } else if (key == "seed") {
    seed = parse_u64(key, value);
  } else if (key == "max_degree") {
    max_degree = parse_int(key, value);
  } else if (key == "aug.kind") {
    try {
      aug_kind = parse_aug_kind(value);
    } catch (const std::exception& e) {
      throw UsageError(e.what());
    }
  } else if (key == "aug.ratio") {
    aug_ratio = parse_double(key, value);
  } else if (key == "readout") {
    if (value == "sum")
      mean_readout = false;
    else if (value == "mean")
      mean_readout = true;
    else
      throw UsageError("readout must be 'sum' or 'mean', got '" + value + "'");
  } else if (key == "probe.epochs") {
    probe_epochs = parse_int(key, value);
  } else if (key == "probe.lr") {
    probe_lr = parse_double(key, value);
  } else if (key == "probe.l2") {
    probe_l2 = parse_double(key, value);
  } else if (key == "jobs") {
    jobs = parse_int(key, value);
  } else if (key == "export.samples") {
    export_samples = parse_int(key, value);
  } else if (key == "out") {
    out = value;
  } else {
    throw UsageError("unknown config key '" + key + "'");
  }
}

void ExperimentConfig::validate() const {
  require(!dataset_path.empty(), "dataset.path must not be empty");
  require(epochs > 0, "epochs must be positive");
  require(finetune_epochs > 0, "finetune_epochs must be positive");
  require(batch_size > 0, "batch_size must be positive");
  require(hidden > 0, "hidden must be positive");
  require(layers >= 1, "layers must be at least 1");
  require(gen_hidden > 0, "gen_hidden must be positive");
  require(gen_layers >= 1, "gen_layers must be at least 1");
  require(lr > 0.0, "lr must be positive");
  require(gen_lr > 0.0, "gen_lr must be positive");
  require(tau > 0.0, "tau must be positive");
  require(tau_g > 0.0, "tau_g must be positive");
  require(lambda >= 0.0, "lambda must be non-negative");
  require(folds >= 2, "folds must be at least 2");
  require(seeds >= 1, "seeds must be at least 1");
  require(max_degree >= 1, "max_degree must be at least 1");
  require(aug_ratio >= 0.0 && aug_ratio < 1.0, "aug.ratio must be in [0, 1)");
  require(probe_epochs > 0, "probe.epochs must be positive");
  require(probe_lr > 0.0, "probe.lr must be positive");
  require(probe_l2 >= 0.0, "probe.l2 must be non-negative");
  require(jobs >= 1, "jobs must be at least 1");
  require(export_samples >= 1, "export.samples must be at least 1");
  require(!out.empty(), "out must not be empty");
}

std::string ExperimentConfig::serialize() const {
  std::ostringstream os;
  os << "dataset.path = " << dataset_path << "\n";
  os << "dataset.kind = " << (dataset_kind == DatasetKind::tu ? "tu" : "json")
     << "\n";
  os << "protocol = " << protocol_name(protocol) << "\n";
  os << "strategy = " << strategy_name(strategy) << "\n";
  os << "epochs = " << epochs << "\n";
  os << "finetune_epochs = " << finetune_epochs << "\n";
  os << "batch_size = " << batch_size << "\n";
  os << "hidden = " << hidden << "\n";
  os << "layers = " << layers << "\n";
  os << "gen_hidden = " << gen_hidden << "\n";
  os << "gen_layers = " << gen_layers << "\n";
  os << "lr = " << fmt(lr) << "\n";
  os << "gen_lr = " << fmt(gen_lr) << "\n";
  os << "tau = " << fmt(tau) << "\n";
  os << "tau_g = " << fmt(tau_g) << "\n";
  os << "lambda = " << fmt(lambda) << "\n";
  os << "folds = " << folds << "\n";
  os << "seeds = " << seeds << "\n";
  os << "seed = " << seed << "\n";
  os << "max_degree = " << max_degree << "\n";
  os << "aug.kind = " << aug_kind_name(aug_kind) << "\n";
  os << "aug.ratio = " << fmt(aug_ratio) << "\n";
  os << "readout = " << (mean_readout ? "mean" : "sum") << "\n";
  os << "probe.epochs = " << probe_epochs << "\n";
  os << "probe.lr = " << fmt(probe_lr) << "\n";
  os << "probe.l2 = " << fmt(probe_l2) << "\n";
  os << "jobs = " << jobs << "\n";
  os << "export.samples = " << export_samples << "\n";
  os << "out = " << out << "\n";
  return os.str();
}

std::string ExperimentConfig::to_json() const {
  nlohmann::json j;
  j["dataset.path"] = dataset_path;
  j["dataset.kind"] = dataset_kind == DatasetKind::tu ? "tu" : "json";
  j["protocol"] = protocol_name(protocol);
  j["strategy"] = strategy_name(strategy);
  j["epochs"] = epochs;
  j["finetune_epochs"] = finetune_epochs;
  j["batch_size"] = batch_size;
  j["hidden"] = hidden;
  j["layers"] = layers;
  j["gen_hidden"] = gen_hidden;
  j["gen_layers"] = gen_layers;
  j["lr"] = lr;
  j["gen_lr"] = gen_lr;
  j["tau"] = tau;
  j["tau_g"] = tau_g;
  j["lambda"] = lambda;
  j["folds"] = folds;
  j["seeds"] = seeds;
  j["seed"] = seed;
  j["max_degree"] = max_degree;
  j["aug.kind"] = aug_kind_name(aug_kind);
  j["aug.ratio"] = aug_ratio;
  j["readout"] = mean_readout ? "mean" : "sum";
  j["probe.epochs"] = probe_epochs;
  j["probe.lr"] = probe_lr;
  j["probe.l2"] = probe_l2;
  j["jobs"] = jobs;
  j["export.samples"] = export_samples;
  j["out"] = out;
  return j.dump();
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file '" + path + "'");
  ExperimentConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::string t = trim(line);
    if (t.empty()) continue;
    std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw UsageError(path + ":" + std::to_string(lineno) +
                       ": expected 'key = value'");
    cfg.set(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  return cfg;
}

void apply_override(ExperimentConfig& cfg, const std::string& assignment) {
  std::size_t eq = assignment.find('=');
  if (eq == std::string::npos)
    throw UsageError("override '" + assignment + "' is not of the form key=value");
  cfg.set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

}  // namespace gcl
