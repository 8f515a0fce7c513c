#pragma once

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "gcl/nn.hpp"

namespace gcl {

// On-disk layout: 8-byte magic "GCLCKPT1", little-endian u32 manifest length,
// JSON manifest {meta, tensors: [{name, rows, cols, offset}]}, then row-major
// little-endian float64 payload.
struct Checkpoint {
  nlohmann::json meta;
  std::vector<std::pair<std::string, Matd>> tensors;

  const Matd* find(const std::string& name) const;
};

void save_checkpoint(const std::string& path, const nlohmann::json& meta,
                     const ParamRegistry& params);

// Throws DataError on truncated, corrupt, or wrong-magic files.
Checkpoint load_checkpoint(const std::string& path);

// Copies checkpoint values into matching registry entries. The checkpoint must
// carry exactly the registry's names with identical shapes.
void load_into(const Checkpoint& ckpt, ParamRegistry& params);

}  // namespace gcl
