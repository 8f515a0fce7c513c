#pragma once

#include <string>
#include <vector>

#include "gcl/config.hpp"
#include "gcl/dataset.hpp"
#include "gcl/loss.hpp"
#include "gcl/metrics.hpp"
#include "gcl/optim.hpp"
#include "gcl/view.hpp"

namespace gcl {

// Encoder plus the two view generators, with parameter registries split the
// way the training phases need them.
struct Model {
  Encoder enc;
  ViewGenerator gen1, gen2;
  ParamRegistry enc_params;  // enc.*
  ParamRegistry gen_params;  // gen1.*, gen2.*
  ParamRegistry all_params;
};

Model build_model(const ExperimentConfig& cfg, int in_dim, int n_classes,
                  RngStream& rng);

struct EpochLog {
  int epoch = 0;
  double contrastive = 0.0;
  double classification = 0.0;
  double similarity = 0.0;
  double train_acc = 0.0;
  double test_acc = 0.0;
};

struct FoldResult {
  int fold = 0;
  int seed_index = 0;
  double test_acc = 0.0;
  double train_acc = 0.0;  // final accuracy on the labeled training set
  double view_acc = 0.0;   // classifier accuracy on generated views of the test set
  std::vector<EpochLog> epochs;
};

struct RunSummary {
  std::vector<FoldResult> folds;
  double mean_acc = 0.0;
  double std_acc = 0.0;
};

std::vector<Graph> load_dataset(const ExperimentConfig& cfg);

double evaluate_accuracy(const Encoder& enc, const std::vector<Graph>& gs,
                         const std::vector<int>& idx, int batch_size);

// Classifier accuracy on one generated view per test graph from each generator.
double evaluate_view_accuracy(const Model& m, const std::vector<Graph>& gs,
                              const std::vector<int>& idx, double tau_g,
                              int batch_size, RngStream& rng);

// One (fold, seed repeat) work item under the configured strategy and protocol.
FoldResult run_fold(const std::vector<Graph>& graphs, const SplitPlan& plan,
                    int fold, int seed_index, const ExperimentConfig& cfg);

// All folds times cfg.seeds repeats; results are deterministic for a given
// config regardless of cfg.jobs. When `checkpoint_path` is non-empty the model
// from the first work item is saved there.
RunSummary run_experiment(const std::vector<Graph>& graphs,
                          const ExperimentConfig& cfg, MetricsWriter* metrics,
                          const std::string& checkpoint_path = "");

struct AblationRow {
  std::string kind;
  double ratio = 0.0;
  double mean = 0.0;
  double std = 0.0;
  int runs = 0;
};

// Fixed-augmentation contrastive runs over {node_drop, edge_perturb, subgraph,
// attr_mask} x {0.0, 0.1, 0.2} plus a draw-nothing baseline row (kind "none").
std::vector<AblationRow> run_ablation(const std::vector<Graph>& graphs,
                                      const ExperimentConfig& cfg,
                                      MetricsWriter* metrics);

std::string ablation_csv(const std::vector<AblationRow>& rows);

}  // namespace gcl
