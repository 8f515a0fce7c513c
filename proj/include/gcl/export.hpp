#pragma once

#include <string>
#include <vector>

#include "gcl/checkpoint.hpp"
#include "gcl/train.hpp"

namespace gcl {

// Rebuilds encoder and generators from checkpoint metadata and loads weights.
Model model_from_checkpoint(const Checkpoint& ckpt);

// Writes view_<i>.json and view_<i>.dot for cfg.export_samples sampled graphs.
// DOT nodes are colored by decision: kept palegreen, masked gold, dropped
// lightcoral; arcs removed by the view are dashed gray.
void export_views(const std::vector<Graph>& gs, const Model& m,
                  const ExperimentConfig& cfg, const std::string& out_dir);

// CSV with one row per graph: graph_id,label,e0..e{H-1} (pre-projection
// embeddings from the frozen encoder).
void export_embeddings(const std::vector<Graph>& gs, const Encoder& enc,
                       int batch_size, const std::string& csv_path);

}  // namespace gcl
