#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "gcl/augment.hpp"
#include "gcl/dataset.hpp"

namespace gcl {

// Bad flags, bad config keys, out-of-range values. CLI maps this to exit 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Strategy {
  supervised,     // labeled data only
  aug_only,       // frozen random generators as data augmentation
  graphcl,        // fixed-augmentation contrastive pretrain, then finetune
  naive,          // learned-view contrastive pretrain, then finetune
  joint,          // alternating contrastive / supervised phases, similarity on
  joint_cls,      // supervised phase only
  joint_cls_sim,  // supervised phase only, similarity on
  joint_cl_cls,   // alternating phases, similarity off
};

Strategy parse_strategy(const std::string& s);
std::string strategy_name(Strategy s);

enum class DatasetKind { tu, json };

struct ExperimentConfig {
  std::string dataset_path = "data/toy16/TOY16";
  DatasetKind dataset_kind = DatasetKind::tu;
  Protocol protocol = Protocol::semi;
  Strategy strategy = Strategy::joint;

  int epochs = 30;
  int finetune_epochs = 30;
  int batch_size = 128;
  int hidden = 128;
  int layers = 5;
  int gen_hidden = 128;
  int gen_layers = 5;

  double lr = 1e-3;
  double gen_lr = 2e-4;
  double tau = 0.5;
  double tau_g = 1.0;
  double lambda = 1.0;

  int folds = 10;
  int seeds = 5;
  std::uint64_t seed = 0;
  int max_degree = 128;

  AugKind aug_kind = AugKind::random4;
  double aug_ratio = 0.2;
  bool mean_readout = false;

  int probe_epochs = 200;
  double probe_lr = 0.01;
  double probe_l2 = 1e-4;

  int jobs = 1;
  int export_samples = 8;
  std::string out = "runs";

  // Applies one "key=value" assignment; throws UsageError on unknown keys or
  // unparsable values.
  void set(const std::string& key, const std::string& value);

  void validate() const;

  std::string serialize() const;
  std::string to_json() const;
};

// Flat text config: one `key = value` per line, `#` comments.
ExperimentConfig parse_config_file(const std::string& path);

// Splits "key=value" and applies it.
void apply_override(ExperimentConfig& cfg, const std::string& assignment);

}  // namespace gcl
