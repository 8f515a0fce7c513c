#include "gcl/metrics.hpp"

#include <cmath>
#include <filesystem>

namespace gcl {

double mean_of(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double stddev_of(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  double m = mean_of(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

std::vector<std::string> protocol_notes() {
  return {
      "splits are contiguous chunks of a seeded shuffle, not stratified by label",
      "unsup protocol scores a linear probe trained on frozen pre-projection "
      "embeddings",
      "subgraph augmentation keeps ceil((1-ratio)*n) nodes around a random "
      "center",
      "view generators embed with their own message-passing stack, no weight "
      "sharing with the encoder",
  };
}

MetricsWriter::MetricsWriter(const std::string& path, const ExperimentConfig& cfg)
    : path_(path) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  out_.open(path, std::ios::trunc);
  if (!out_) throw std::runtime_error("cannot open metrics file '" + path + "'");
  nlohmann::json header;
  header["type"] = "header";
  header["config"] = nlohmann::json::parse(cfg.to_json());
  header["notes"] = protocol_notes();
  out_ << header.dump() << "\n";
  out_.flush();
}

void MetricsWriter::event(const std::string& type, nlohmann::json fields) {
  fields["type"] = type;
  out_ << fields.dump() << "\n";
  out_.flush();
}

}  // namespace gcl
