#pragma once

#include <utility>

#include "gcl/nn.hpp"

namespace gcl {

// Column order of every per-node choice matrix.
enum AugColumn : int { kDrop = 0, kKeep = 1, kMask = 2 };

// Per-node augmentation decision. `probs` is the noise-free softmax of the
// generator logits, `soft` the tempered softmax over noisy logits, `st` the
// straight-through sample (one-hot values, `soft` gradients), `hard` the
// plain sampled one-hot matrix.
struct AugChoice {
  Tensord probs;  // N x 3
  Tensord soft;   // N x 3
  Tensord st;     // N x 3
  Matd hard;      // N x 3
};

// y = softmax((logits + G) / tau_g) with i.i.d. standard Gumbel noise G;
// hard = one-hot(argmax y); st forwards hard and backprops through y.
AugChoice gumbel_softmax(const Tensord& logits, double tau_g, RngStream& rng);

// Same with caller-supplied noise (tests freeze it for gradient checks).
AugChoice gumbel_softmax_with_noise(const Tensord& logits, const Matd& noise, double tau_g);

// Features scaled by the straight-through KEEP column (MASK and DROP rows
// become zero); arcs incident to a hard-DROP node are removed. Dropped nodes
// stay as isolated zero rows so shapes and batch alignment never change.
BatchView apply_choice(const GraphBatch& b, const AugChoice& c);

// GIN stack over the original graph ending in 3 logits per node.
struct ViewGenerator {
  GinStack gnn;

  ViewGenerator() = default;
  ViewGenerator(int in_dim, int hidden, int n_layers, RngStream& rng);

  Tensord logits(const GraphBatch& b) const { return gnn.forward(full_view(b)); }
  void collect(const std::string& prefix, ParamRegistry& reg) const {
    gnn.collect(prefix, reg);
  }
};

std::pair<BatchView, AugChoice> generate_view(const GraphBatch& b, const ViewGenerator& gen,
                                              double tau_g, RngStream& rng);

}  // namespace gcl
