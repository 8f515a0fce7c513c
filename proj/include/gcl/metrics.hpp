#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "gcl/config.hpp"

namespace gcl {

double mean_of(const std::vector<double>& xs);
// Sample standard deviation (n-1 in the denominator); 0 for fewer than two values.
double stddev_of(const std::vector<double>& xs);

// Append-only JSON-lines log. The first line is a header event carrying the
// fully resolved config plus notes on protocol details that affect comparisons
// with other implementations.
class MetricsWriter {
 public:
  MetricsWriter(const std::string& path, const ExperimentConfig& cfg);

  void event(const std::string& type, nlohmann::json fields);
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::ofstream out_;
};

std::vector<std::string> protocol_notes();

}  // namespace gcl
