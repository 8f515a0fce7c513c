#pragma once

#include <string>
#include <vector>

#include "gcl/graph.hpp"
#include "gcl/rng.hpp"
#include "gcl/tensor.hpp"

namespace gcl {

// Named trainable tensors. Tensor copies share storage, so optimizers and
// checkpoints constructed from a registry see every update.
struct ParamRegistry {
  std::vector<std::pair<std::string, Tensord>> items;

  void add(const std::string& name, const Tensord& t);
  void merge(const ParamRegistry& other);
  Tensord* find(const std::string& name);
  std::vector<Tensord> tensors() const;
  std::size_t size() const { return items.size(); }
};

// Glorot-uniform matrix in +-sqrt(6 / (fan_in + fan_out))
Matd glorot_uniform(int fan_in, int fan_out, RngStream& rng);

struct Linear {
  Tensord W;  // in x out
  Tensord b;  // 1 x out

  Linear() = default;
  Linear(int in, int out, RngStream& rng);
  Tensord forward(const Tensord& x) const { return add_rowvec(matmul(x, W), b); }
  void collect(const std::string& prefix, ParamRegistry& reg) const;
};

struct Mlp2 {
  Linear l1, l2;

  Mlp2() = default;
  Mlp2(int in, int hidden, int out, RngStream& rng);
  Tensord forward(const Tensord& x) const { return l2.forward(relu(l1.forward(x))); }
  void collect(const std::string& prefix, ParamRegistry& reg) const;
};

// Encoder input: features that may be constants (plain data) or live autodiff
// nodes (generated views), plus the arc list that survived augmentation.
struct BatchView {
  Tensord features;  // sum(N) x F
  std::vector<int> src, dst;
  std::vector<int> batch_vector;
  int n_graphs = 0;
};

BatchView full_view(const GraphBatch& b);

// out = MLP((1 + eps) * h + sum of neighbor rows); eps learnable, init 0
struct GinLayer {
  Mlp2 mlp;
  Tensord eps;  // 1x1

  GinLayer() = default;
  GinLayer(int in, int hidden, int out, RngStream& rng);
  Tensord forward(const Tensord& h, const std::vector<int>& src,
                  const std::vector<int>& dst) const;
  void collect(const std::string& prefix, ParamRegistry& reg) const;
};

// Stacked GIN layers, ReLU between layers, linear final output.
struct GinStack {
  std::vector<GinLayer> layers;

  GinStack() = default;
  GinStack(int in_dim, int hidden, int out_dim, int n_layers, RngStream& rng);
  Tensord forward(const BatchView& b) const;
  void collect(const std::string& prefix, ParamRegistry& reg) const;
};

// GIN encoder with sum (or mean) readout, a 2-layer projection head for the
// contrastive loss, and a linear classifier head.
struct Encoder {
  GinStack gnn;
  Mlp2 proj;         // H -> H -> H
  Linear classifier;  // H -> C
  bool mean_readout = false;

  Encoder() = default;
  Encoder(int in_dim, int hidden, int n_layers, int n_classes, RngStream& rng,
          bool mean_readout = false);

  Tensord node_embed(const BatchView& b) const { return gnn.forward(b); }
  Tensord readout(const Tensord& node_embs, const std::vector<int>& batch_vector,
                  int n_graphs) const;
  // graph embeddings, pre-head
  Tensord embed(const BatchView& b) const;
  Tensord project(const Tensord& graph_embs) const { return proj.forward(graph_embs); }
  Tensord classify(const Tensord& graph_embs) const { return classifier.forward(graph_embs); }

  int hidden() const;
  int n_classes() const;
  void collect(const std::string& prefix, ParamRegistry& reg) const;
};

}  // namespace gcl
