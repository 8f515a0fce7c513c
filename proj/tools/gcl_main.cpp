#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "gcl/export.hpp"
#include "gcl/selftest.hpp"
#include "gcl/train.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitSelftest = 3;

struct CommonOpts {
  std::string config;
  std::vector<std::string> overrides;
  std::optional<std::string> out, seed, folds, strategy, protocol, jobs;
};

void attach_common(CLI::App* sub, CommonOpts& o) {
  sub->add_option("--config", o.config, "config file (key = value lines)");
  sub->add_option("--set", o.overrides, "override a config key, key=value")
      ->take_all();
  sub->add_option("--out", o.out, "output directory");
  sub->add_option("--seed", o.seed, "base seed");
  sub->add_option("--folds", o.folds, "number of folds");
  sub->add_option("--strategy", o.strategy, "training strategy");
  sub->add_option("--protocol", o.protocol, "evaluation protocol");
  sub->add_option("--jobs", o.jobs, "parallel fold workers");
}

gcl::ExperimentConfig resolve_config(const CommonOpts& o) {
  gcl::ExperimentConfig cfg;
  if (!o.config.empty()) cfg = gcl::parse_config_file(o.config);
  for (const std::string& s : o.overrides) gcl::apply_override(cfg, s);
  if (o.out) cfg.set("out", *o.out);
  if (o.seed) cfg.set("seed", *o.seed);
  if (o.folds) cfg.set("folds", *o.folds);
  if (o.strategy) cfg.set("strategy", *o.strategy);
  if (o.protocol) cfg.set("protocol", *o.protocol);
  if (o.jobs) cfg.set("jobs", *o.jobs);
  cfg.validate();
  return cfg;
}

int cmd_train(const CommonOpts& o) {
  gcl::ExperimentConfig cfg = resolve_config(o);
  std::vector<gcl::Graph> gs = gcl::load_dataset(cfg);
  std::cout << "loaded " << gs.size() << " graphs from " << cfg.dataset_path
            << "\n";
  gcl::MetricsWriter metrics(cfg.out + "/metrics.jsonl", cfg);
  gcl::RunSummary s =
      gcl::run_experiment(gs, cfg, &metrics, cfg.out + "/model.ckpt");
  std::cout << "strategy " << gcl::strategy_name(cfg.strategy) << ", protocol "
            << gcl::protocol_name(cfg.protocol) << "\n";
  std::cout << "test accuracy " << s.mean_acc << " +- " << s.std_acc << " over "
            << s.folds.size() << " runs\n";
  std::cout << "metrics: " << metrics.path() << "\n";
  std::cout << "checkpoint: " << cfg.out << "/model.ckpt\n";
  return kExitOk;
}

int cmd_eval(const CommonOpts& o, const std::string& ckpt_path) {
  gcl::ExperimentConfig cfg = resolve_config(o);
  gcl::Checkpoint ckpt = gcl::load_checkpoint(ckpt_path);
  gcl::Model m = gcl::model_from_checkpoint(ckpt);
  std::vector<gcl::Graph> gs = gcl::load_dataset(cfg);

  gcl::Protocol proto =
      gcl::parse_protocol(ckpt.meta.value("protocol", std::string("semi")));
  std::uint64_t seed = ckpt.meta.value("seed", std::uint64_t{0});
  int folds = ckpt.meta.value("folds", 10);
  int fold = ckpt.meta.value("fold", 0);
  gcl::SplitPlan plan =
      gcl::make_split(static_cast<int>(gs.size()), proto, seed, folds);
  const gcl::FoldSplit& split = plan.folds.at(fold);

  double acc = gcl::evaluate_accuracy(m.enc, gs, split.test, cfg.batch_size);
  std::cout << "test accuracy on fold " << fold << ": " << acc << " ("
            << split.test.size() << " graphs)\n";
  return kExitOk;
}

int cmd_ablate(const CommonOpts& o) {
  gcl::ExperimentConfig cfg = resolve_config(o);
  std::vector<gcl::Graph> gs = gcl::load_dataset(cfg);
  gcl::MetricsWriter metrics(cfg.out + "/ablation.jsonl", cfg);
  std::vector<gcl::AblationRow> rows = gcl::run_ablation(gs, cfg, &metrics);
  std::string csv = gcl::ablation_csv(rows);
  std::ofstream f(cfg.out + "/ablation.csv", std::ios::trunc);
  f << csv;
  std::cout << csv;
  std::cout << "written to " << cfg.out << "/ablation.csv\n";
  return kExitOk;
}

gcl::Model model_for_export(const gcl::ExperimentConfig& cfg,
                            const std::string& ckpt_path,
                            const std::vector<gcl::Graph>& gs) {
  if (!ckpt_path.empty())
    return gcl::model_from_checkpoint(gcl::load_checkpoint(ckpt_path));
  int n_classes = 2;
  for (const gcl::Graph& g : gs) n_classes = std::max(n_classes, g.label + 1);
  gcl::RngStream rng(cfg.seed);
  return gcl::build_model(cfg, static_cast<int>(gs.front().features.cols()),
                          n_classes, rng);
}

int cmd_export_views(const CommonOpts& o, const std::string& ckpt_path) {
  gcl::ExperimentConfig cfg = resolve_config(o);
  std::vector<gcl::Graph> gs = gcl::load_dataset(cfg);
  gcl::Model m = model_for_export(cfg, ckpt_path, gs);
  std::string dir = cfg.out + "/views";
  gcl::export_views(gs, m, cfg, dir);
  std::cout << cfg.export_samples << " views written to " << dir << "\n";
  return kExitOk;
}

int cmd_export_embeddings(const CommonOpts& o, const std::string& ckpt_path) {
  gcl::ExperimentConfig cfg = resolve_config(o);
  std::vector<gcl::Graph> gs = gcl::load_dataset(cfg);
  gcl::Model m = model_for_export(cfg, ckpt_path, gs);
  std::string path = cfg.out + "/embeddings.csv";
  gcl::export_embeddings(gs, m.enc, cfg.batch_size, path);
  std::cout << gs.size() << " embeddings written to " << path << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"contrastive graph representation learning with learnable views"};
  app.require_subcommand(1);

  CommonOpts train_o, eval_o, ablate_o, views_o, emb_o;
  std::string eval_ckpt, views_ckpt, emb_ckpt;

  CLI::App* train = app.add_subcommand("train", "run the configured experiment");
  attach_common(train, train_o);

  CLI::App* eval = app.add_subcommand("eval", "score a saved checkpoint");
  attach_common(eval, eval_o);
  eval->add_option("--checkpoint", eval_ckpt, "checkpoint file")->required();

  CLI::App* ablate =
      app.add_subcommand("ablate", "sweep fixed augmentations and ratios");
  attach_common(ablate, ablate_o);

  CLI::App* views =
      app.add_subcommand("export-views", "write sampled views as JSON and DOT");
  attach_common(views, views_o);
  views->add_option("--checkpoint", views_ckpt, "checkpoint file");

  CLI::App* emb = app.add_subcommand("export-embeddings",
                                     "write graph embeddings as CSV");
  attach_common(emb, emb_o);
  emb->add_option("--checkpoint", emb_ckpt, "checkpoint file");

  CLI::App* selftest = app.add_subcommand("selftest", "run built-in checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (train->parsed()) return cmd_train(train_o);
    if (eval->parsed()) return cmd_eval(eval_o, eval_ckpt);
    if (ablate->parsed()) return cmd_ablate(ablate_o);
    if (views->parsed()) return cmd_export_views(views_o, views_ckpt);
    if (emb->parsed()) return cmd_export_embeddings(emb_o, emb_ckpt);
    if (selftest->parsed())
      return gcl::run_selftest(std::cout) ? kExitOk : kExitSelftest;
  } catch (const gcl::UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const gcl::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
