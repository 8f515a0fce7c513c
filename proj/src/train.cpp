#include "gcl/train.hpp"

#include <algorithm>
#include <atomic>
#include <sstream>
#include <thread>

#include "gcl/augment.hpp"
#include "gcl/checkpoint.hpp"

namespace gcl {

namespace {

constexpr std::uint64_t kInitTag = 0x696e6974ULL;
constexpr std::uint64_t kTrainTag = 0x747261696eULL;
constexpr std::uint64_t kViewTag = 0x76696577ULL;

void zero_all(ParamRegistry& reg) {
  for (auto& [name, t] : reg.items) t.zero_grad();
}

std::vector<std::vector<int>> epoch_batches(const std::vector<int>& pool,
                                            int batch_size, RngStream& rng) {
  std::vector<int> idx = pool;
  rng.shuffle(idx);
  std::vector<std::vector<int>> out;
  for (std::size_t at = 0; at < idx.size(); at += batch_size) {
    std::size_t end = std::min(idx.size(), at + batch_size);
    out.emplace_back(idx.begin() + at, idx.begin() + end);
  }
  return out;
}

int data_dim(const std::vector<Graph>& gs) {
  return static_cast<int>(gs.front().features.cols());
}

int count_classes(const std::vector<Graph>& gs) {
  int mx = -1;
  for (const Graph& g : gs) mx = std::max(mx, g.label);
  if (mx < 1) throw DataError("dataset needs at least two label values");
  return mx + 1;
}

struct LossMeter {
  double sum = 0.0;
  long count = 0;
  void add(double v, long n) {
    sum += v * static_cast<double>(n);
    count += n;
  }
  double mean() const { return count == 0 ? 0.0 : sum / static_cast<double>(count); }
};

// Plain cross-entropy epoch over the labeled set; used for the supervised
// strategy and every finetune stage.
double supervised_epoch(Model& m, const std::vector<Graph>& gs,
                        const std::vector<int>& labeled,
                        const ExperimentConfig& cfg, RngStream& rng, Adam& opt) {
  LossMeter meter;
  for (const auto& idxs : epoch_batches(labeled, cfg.batch_size, rng)) {
    GraphBatch b = batch_graphs(gs, idxs);
    Tensord logits = m.enc.classify(m.enc.embed(full_view(b)));
    Tensord loss = cross_entropy(logits, b.labels);
    zero_all(m.all_params);
    loss.backward();
    opt.step();
    meter.add(loss.value()(0, 0), b.num_graphs());
  }
  return meter.mean();
}

// Labeled phase: cross-entropy on the original plus both generated views,
// optionally plus the generator-similarity penalty. `gen_opt == nullptr`
// leaves the generators frozen.
std::pair<double, double> labeled_phase(Model& m, const std::vector<Graph>& gs,
                                        const std::vector<int>& labeled,
                                        const ExperimentConfig& cfg,
                                        RngStream& rng, Adam& enc_opt,
                                        Adam* gen_opt, bool with_sim) {
  LossMeter cls_meter, sim_meter;
  for (const auto& idxs : epoch_batches(labeled, cfg.batch_size, rng)) {
    GraphBatch b = batch_graphs(gs, idxs);
    auto [v1, c1] = generate_view(b, m.gen1, cfg.tau_g, rng);
    auto [v2, c2] = generate_view(b, m.gen2, cfg.tau_g, rng);
    Tensord lx = m.enc.classify(m.enc.embed(full_view(b)));
    Tensord lx1 = m.enc.classify(m.enc.embed(v1));
    Tensord lx2 = m.enc.classify(m.enc.embed(v2));
    Tensord cls = classification_loss(lx, lx1, lx2, b.labels);
    Tensord total = cls;
    double sim_val = 0.0;
    if (with_sim) {
      Tensord sim = similarity_loss(c1, c2);
      sim_val = sim.value()(0, 0);
      total = add(cls, mul_scalar(sim, cfg.lambda));
    }
    zero_all(m.all_params);
    total.backward();
    enc_opt.step();
    if (gen_opt != nullptr) gen_opt->step();
    cls_meter.add(cls.value()(0, 0), b.num_graphs());
    sim_meter.add(sim_val, b.num_graphs());
  }
  return {cls_meter.mean(), sim_meter.mean()};
}

// Contrastive epoch over fixed random augmentations (two independent draws per
// graph). Only the encoder side trains.
double contrastive_epoch_fixed(Model& m, const std::vector<Graph>& gs,
                               const std::vector<int>& pool,
                               const ExperimentConfig& cfg, RngStream& rng,
                               Adam& enc_opt) {
  LossMeter meter;
  for (const auto& idxs : epoch_batches(pool, cfg.batch_size, rng)) {
    std::vector<Graph> ga, gb;
    ga.reserve(idxs.size());
    gb.reserve(idxs.size());
    for (int i : idxs) {
      ga.push_back(apply_fixed_augmentation(cfg.aug_kind, gs[i], cfg.aug_ratio, rng));
      gb.push_back(apply_fixed_augmentation(cfg.aug_kind, gs[i], cfg.aug_ratio, rng));
    }
    Tensord z1 = m.enc.project(m.enc.embed(full_view(batch_graphs(ga))));
    Tensord z2 = m.enc.project(m.enc.embed(full_view(batch_graphs(gb))));
    Tensord loss = nt_xent(z1, z2, cfg.tau);
    zero_all(m.all_params);
    loss.backward();
    enc_opt.step();
    meter.add(loss.value()(0, 0), static_cast<long>(idxs.size()));
  }
  return meter.mean();
}

// Contrastive epoch over generated views. Both views are always generated so
// the stream advances identically whichever pair is picked; the pair is
// uniform over {(x, v1), (x, v2), (v1, v2)}. Every optimizer in `opts` steps.
double contrastive_epoch_learned(Model& m, const std::vector<Graph>& gs,
                                 const std::vector<int>& pool,
                                 const ExperimentConfig& cfg, RngStream& rng,
                                 const std::vector<Adam*>& opts) {
  LossMeter meter;
  for (const auto& idxs : epoch_batches(pool, cfg.batch_size, rng)) {
    GraphBatch b = batch_graphs(gs, idxs);
    auto [v1, c1] = generate_view(b, m.gen1, cfg.tau_g, rng);
    auto [v2, c2] = generate_view(b, m.gen2, cfg.tau_g, rng);
    int pick = static_cast<int>(rng.uniform_int(3));
    const BatchView x = full_view(b);
    const BatchView& a = pick == 2 ? v1 : x;
    const BatchView& c = pick == 0 ? v1 : v2;
    Tensord za = m.enc.project(m.enc.embed(a));
    Tensord zb = m.enc.project(m.enc.embed(c));
    Tensord loss = nt_xent(za, zb, cfg.tau);
    zero_all(m.all_params);
    loss.backward();
    for (Adam* o : opts) o->step();
    meter.add(loss.value()(0, 0), b.num_graphs());
  }
  return meter.mean();
}

struct ProbeResult {
  double train_acc = 0.0;
  double test_acc = 0.0;
};

Matd frozen_embeddings(const Encoder& enc, const std::vector<Graph>& gs,
                       const std::vector<int>& idx, int batch_size) {
  Matd out(idx.size(), enc.hidden());
  std::size_t row = 0;
  for (std::size_t at = 0; at < idx.size(); at += batch_size) {
    std::size_t end = std::min(idx.size(), at + batch_size);
    std::vector<int> chunk(idx.begin() + at, idx.begin() + end);
    GraphBatch b = batch_graphs(gs, chunk);
    Matd e = enc.embed(full_view(b)).value();
    out.middleRows(row, e.rows()) = e;
    row += e.rows();
  }
  return out;
}

double argmax_accuracy(const Matd& logits, const std::vector<int>& labels) {
  int hits = 0;
  for (int i = 0; i < logits.rows(); ++i) {
    Eigen::Index best;
    logits.row(i).maxCoeff(&best);
    if (static_cast<int>(best) == labels[i]) ++hits;
  }
  return labels.empty() ? 0.0 : static_cast<double>(hits) / labels.size();
}

std::vector<int> labels_of(const std::vector<Graph>& gs, const std::vector<int>& idx) {
  std::vector<int> out;
  out.reserve(idx.size());
  for (int i : idx) out.push_back(gs[i].label);
  return out;
}

// Full-batch logistic regression on frozen pre-projection embeddings with an
// L2 penalty on the weight matrix.
ProbeResult linear_probe(const Encoder& enc, const std::vector<Graph>& gs,
                         const std::vector<int>& train_idx,
                         const std::vector<int>& test_idx, int n_classes,
                         const ExperimentConfig& cfg) {
  Matd xtr = frozen_embeddings(enc, gs, train_idx, cfg.batch_size);
  Matd xte = frozen_embeddings(enc, gs, test_idx, cfg.batch_size);
  std::vector<int> ytr = labels_of(gs, train_idx);
  std::vector<int> yte = labels_of(gs, test_idx);

  Tensord W = Tensord::param(Matd::Zero(enc.hidden(), n_classes));
  Tensord bias = Tensord::param(Matd::Zero(1, n_classes));
  Tensord x = Tensord::constant(xtr);
  Adam opt(std::vector<Tensord>{W, bias}, {cfg.probe_lr});
  for (int e = 0; e < cfg.probe_epochs; ++e) {
    Tensord logits = add_rowvec(matmul(x, W), bias);
    Tensord loss = add(cross_entropy(logits, ytr),
                       mul_scalar(sum_all(mul(W, W)), cfg.probe_l2));
    W.zero_grad();
    bias.zero_grad();
    loss.backward();
    opt.step();
  }
  ProbeResult pr;
  Matd wl = W.value();
  Matd bl = bias.value();
  pr.train_acc = argmax_accuracy((xtr * wl).rowwise() + bl.row(0), ytr);
  pr.test_acc = argmax_accuracy((xte * wl).rowwise() + bl.row(0), yte);
  return pr;
}

}  // namespace

Model build_model(const ExperimentConfig& cfg, int in_dim, int n_classes,
                  RngStream& rng) {
  Model m;
  m.enc = Encoder(in_dim, cfg.hidden, cfg.layers, n_classes, rng, cfg.mean_readout);
  m.gen1 = ViewGenerator(in_dim, cfg.gen_hidden, cfg.gen_layers, rng);
  m.gen2 = ViewGenerator(in_dim, cfg.gen_hidden, cfg.gen_layers, rng);
  m.enc.collect("enc", m.enc_params);
  m.gen1.collect("gen1", m.gen_params);
  m.gen2.collect("gen2", m.gen_params);
  m.all_params.merge(m.enc_params);
  m.all_params.merge(m.gen_params);
  return m;
}

std::vector<Graph> load_dataset(const ExperimentConfig& cfg) {
  std::vector<Graph> gs = cfg.dataset_kind == DatasetKind::tu
                              ? load_tu_dataset(cfg.dataset_path)
                              : load_graph_json(cfg.dataset_path);
  ensure_features(gs, cfg.max_degree);
  return gs;
}

double evaluate_accuracy(const Encoder& enc, const std::vector<Graph>& gs,
                         const std::vector<int>& idx, int batch_size) {
  if (idx.empty()) return 0.0;
  int hits = 0;
  for (std::size_t at = 0; at < idx.size(); at += batch_size) {
    std::size_t end = std::min(idx.size(), at + batch_size);
    std::vector<int> chunk(idx.begin() + at, idx.begin() + end);
    GraphBatch b = batch_graphs(gs, chunk);
    Matd logits = enc.classify(enc.embed(full_view(b))).value();
    hits += static_cast<int>(argmax_accuracy(logits, b.labels) * b.num_graphs() + 0.5);
  }
  return static_cast<double>(hits) / static_cast<double>(idx.size());
}

double evaluate_view_accuracy(const Model& m, const std::vector<Graph>& gs,
                              const std::vector<int>& idx, double tau_g,
                              int batch_size, RngStream& rng) {
  if (idx.empty()) return 0.0;
  int hits = 0, total = 0;
  for (std::size_t at = 0; at < idx.size(); at += batch_size) {
    std::size_t end = std::min(idx.size(), at + batch_size);
    std::vector<int> chunk(idx.begin() + at, idx.begin() + end);
    GraphBatch b = batch_graphs(gs, chunk);
    for (const ViewGenerator* gen : {&m.gen1, &m.gen2}) {
      auto [view, choice] = generate_view(b, *gen, tau_g, rng);
      Matd logits = m.enc.classify(m.enc.embed(view)).value();
      hits += static_cast<int>(argmax_accuracy(logits, b.labels) * b.num_graphs() + 0.5);
      total += b.num_graphs();
    }
  }
  return static_cast<double>(hits) / static_cast<double>(total);
}

namespace {

FoldResult run_fold_impl(const std::vector<Graph>& graphs, const SplitPlan& plan,
                         int fold, int seed_index, const ExperimentConfig& cfg,
                         Model* keep_model) {
  const FoldSplit& split = plan.folds.at(fold);
  const std::uint64_t f = static_cast<std::uint64_t>(fold);
  const std::uint64_t s = static_cast<std::uint64_t>(seed_index);

  RngStream init_rng(derive_seed(cfg.seed, {kInitTag, f, s}));
  RngStream rng(derive_seed(cfg.seed, {kTrainTag, f, s}));

  int n_classes = count_classes(graphs);
  Model m = build_model(cfg, data_dim(graphs), n_classes, init_rng);

  std::vector<int> pool = split.unlabeled;
  pool.insert(pool.end(), split.labeled_train.begin(), split.labeled_train.end());
  std::sort(pool.begin(), pool.end());
  const std::vector<int>& labeled = split.labeled_train;

  FoldResult res;
  res.fold = fold;
  res.seed_index = seed_index;

  auto log_epoch = [&](int epoch, double cl, double cls, double sim) {
    EpochLog log;
    log.epoch = epoch;
    log.contrastive = cl;
    log.classification = cls;
    log.similarity = sim;
    if (cfg.protocol == Protocol::semi) {
      log.train_acc = evaluate_accuracy(m.enc, graphs, labeled, cfg.batch_size);
      log.test_acc = evaluate_accuracy(m.enc, graphs, split.test, cfg.batch_size);
    }
    res.epochs.push_back(log);
  };

  switch (cfg.strategy) {
    case Strategy::supervised: {
      Adam opt(m.enc_params, {cfg.lr});
      for (int e = 0; e < cfg.epochs; ++e) {
        double loss = supervised_epoch(m, graphs, labeled, cfg, rng, opt);
        log_epoch(e, 0.0, loss, 0.0);
      }
      break;
    }
    case Strategy::aug_only: {
      Adam opt(m.enc_params, {cfg.lr});
      for (int e = 0; e < cfg.epochs; ++e) {
        auto [cls, sim] = labeled_phase(m, graphs, labeled, cfg, rng, opt, nullptr, false);
        log_epoch(e, 0.0, cls, sim);
      }
      break;
    }
    case Strategy::graphcl: {
      Adam pre_opt(m.enc_params, {cfg.lr});
      for (int e = 0; e < cfg.epochs; ++e) {
        double cl = contrastive_epoch_fixed(m, graphs, pool, cfg, rng, pre_opt);
        log_epoch(e, cl, 0.0, 0.0);
      }
      Adam fine_opt(m.enc_params, {cfg.lr});
      for (int e = 0; e < cfg.finetune_epochs; ++e) {
        double loss = supervised_epoch(m, graphs, labeled, cfg, rng, fine_opt);
        log_epoch(cfg.epochs + e, 0.0, loss, 0.0);
      }
      break;
    }
    case Strategy::naive: {
      Adam pre_enc_opt(m.enc_params, {cfg.lr});
      Adam pre_gen_opt(m.gen_params, {cfg.gen_lr});
      for (int e = 0; e < cfg.epochs; ++e) {
        double cl = contrastive_epoch_learned(m, graphs, pool, cfg, rng,
                                              {&pre_enc_opt, &pre_gen_opt});
        log_epoch(e, cl, 0.0, 0.0);
      }
      Adam fine_opt(m.enc_params, {cfg.lr});
      for (int e = 0; e < cfg.finetune_epochs; ++e) {
        double loss = supervised_epoch(m, graphs, labeled, cfg, rng, fine_opt);
        log_epoch(cfg.epochs + e, 0.0, loss, 0.0);
      }
      break;
    }
    case Strategy::joint:
    case Strategy::joint_cls:
    case Strategy::joint_cls_sim:
    case Strategy::joint_cl_cls: {
      bool has_u = cfg.strategy == Strategy::joint || cfg.strategy == Strategy::joint_cl_cls;
      bool has_sim = cfg.strategy == Strategy::joint || cfg.strategy == Strategy::joint_cls_sim;
      Adam enc_opt(m.enc_params, {cfg.lr});
      Adam gen_opt(m.gen_params, {cfg.gen_lr});
      for (int e = 0; e < cfg.epochs; ++e) {
        double cl = 0.0;
        if (has_u) cl = contrastive_epoch_learned(m, graphs, pool, cfg, rng, {&enc_opt});
        auto [cls, sim] = labeled_phase(m, graphs, labeled, cfg, rng, enc_opt, &gen_opt, has_sim);
        log_epoch(e, cl, cls, sim);
      }
      break;
    }
  }

  if (cfg.protocol == Protocol::semi) {
    res.train_acc = evaluate_accuracy(m.enc, graphs, labeled, cfg.batch_size);
    res.test_acc = evaluate_accuracy(m.enc, graphs, split.test, cfg.batch_size);
  } else {
    ProbeResult pr = linear_probe(m.enc, graphs, pool, split.test, n_classes, cfg);
    res.train_acc = pr.train_acc;
    res.test_acc = pr.test_acc;
  }
  RngStream view_rng(derive_seed(cfg.seed, {kViewTag, f, s}));
  res.view_acc = evaluate_view_accuracy(m, graphs, split.test, cfg.tau_g,
                                        cfg.batch_size, view_rng);
  if (keep_model != nullptr) *keep_model = std::move(m);
  return res;
}

}  // namespace

FoldResult run_fold(const std::vector<Graph>& graphs, const SplitPlan& plan,
                    int fold, int seed_index, const ExperimentConfig& cfg) {
  return run_fold_impl(graphs, plan, fold, seed_index, cfg, nullptr);
}

RunSummary run_experiment(const std::vector<Graph>& graphs,
                          const ExperimentConfig& cfg, MetricsWriter* metrics,
                          const std::string& checkpoint_path) {
  if (graphs.empty()) throw DataError("dataset is empty");
  for (std::size_t i = 0; i < graphs.size(); ++i)
    if (graphs[i].label < 0)
      throw DataError("graph " + std::to_string(i) + " has no label");

  SplitPlan plan = make_split(static_cast<int>(graphs.size()), cfg.protocol,
                              cfg.seed, cfg.folds);
  const int n_items = cfg.folds * cfg.seeds;
  std::vector<FoldResult> results(n_items);
  Model first_model;
  bool want_model = !checkpoint_path.empty();

  auto run_item = [&](int item) {
    int fold = item / cfg.seeds;
    int seed_index = item % cfg.seeds;
    Model* keep = (want_model && item == 0) ? &first_model : nullptr;
    results[item] = run_fold_impl(graphs, plan, fold, seed_index, cfg, keep);
  };

  int workers = std::min(cfg.jobs, n_items);
  if (workers <= 1) {
    for (int i = 0; i < n_items; ++i) run_item(i);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (int w = 0; w < workers; ++w)
      threads.emplace_back([&] {
        for (int i = next.fetch_add(1); i < n_items; i = next.fetch_add(1))
          run_item(i);
      });
    for (auto& t : threads) t.join();
  }

  RunSummary summary;
  summary.folds = std::move(results);
  std::vector<double> accs;
  accs.reserve(n_items);
  for (const FoldResult& fr : summary.folds) accs.push_back(fr.test_acc);
  summary.mean_acc = mean_of(accs);
  summary.std_acc = stddev_of(accs);

  if (metrics != nullptr) {
    for (const FoldResult& fr : summary.folds) {
      for (const EpochLog& e : fr.epochs)
        metrics->event("epoch", {{"fold", fr.fold},
                                 {"seed_index", fr.seed_index},
                                 {"epoch", e.epoch},
                                 {"contrastive", e.contrastive},
                                 {"classification", e.classification},
                                 {"similarity", e.similarity},
                                 {"train_acc", e.train_acc},
                                 {"test_acc", e.test_acc}});
      metrics->event("fold", {{"fold", fr.fold},
                              {"seed_index", fr.seed_index},
                              {"test_acc", fr.test_acc},
                              {"train_acc", fr.train_acc},
                              {"view_acc", fr.view_acc}});
    }
    metrics->event("summary", {{"mean_acc", summary.mean_acc},
                               {"std_acc", summary.std_acc},
                               {"runs", n_items}});
  }

  if (want_model) {
    nlohmann::json meta;
    meta["in_dim"] = data_dim(graphs);
    meta["n_classes"] = count_classes(graphs);
    meta["hidden"] = cfg.hidden;
    meta["layers"] = cfg.layers;
    meta["gen_hidden"] = cfg.gen_hidden;
    meta["gen_layers"] = cfg.gen_layers;
    meta["readout"] = cfg.mean_readout ? "mean" : "sum";
    meta["strategy"] = strategy_name(cfg.strategy);
    meta["protocol"] = protocol_name(cfg.protocol);
    meta["fold"] = 0;
    meta["seed"] = cfg.seed;
    meta["folds"] = cfg.folds;
    save_checkpoint(checkpoint_path, meta, first_model.all_params);
  }
  return summary;
}

std::vector<AblationRow> run_ablation(const std::vector<Graph>& graphs,
                                      const ExperimentConfig& cfg,
                                      MetricsWriter* metrics) {
  ExperimentConfig base = cfg;
  base.strategy = Strategy::graphcl;

  auto cell = [&](AugKind kind, double ratio) {
    ExperimentConfig c = base;
    c.aug_kind = kind;
    c.aug_ratio = ratio;
    RunSummary s = run_experiment(graphs, c, nullptr);
    AblationRow row;
    row.kind = aug_kind_name(kind);
    row.ratio = ratio;
    row.mean = s.mean_acc;
    row.std = s.std_acc;
    row.runs = static_cast<int>(s.folds.size());
    if (metrics != nullptr)
      metrics->event("ablation", {{"kind", row.kind},
                                  {"ratio", row.ratio},
                                  {"mean", row.mean},
                                  {"std", row.std},
                                  {"runs", row.runs}});
    return row;
  };

  std::vector<AblationRow> rows;
  rows.push_back(cell(AugKind::none, 0.0));
  for (AugKind kind : {AugKind::node_drop, AugKind::edge_perturb, AugKind::subgraph,
                       AugKind::attr_mask})
    for (double ratio : {0.0, 0.1, 0.2}) rows.push_back(cell(kind, ratio));
  return rows;
}

std::string ablation_csv(const std::vector<AblationRow>& rows) {
  std::ostringstream os;
  os << "kind,ratio,mean,std,runs\n";
  for (const AblationRow& r : rows)
    os << r.kind << "," << r.ratio << "," << r.mean << "," << r.std << ","
       << r.runs << "\n";
  return os.str();
}

}  // namespace gcl
