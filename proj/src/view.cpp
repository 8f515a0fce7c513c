#include "gcl/view.hpp"

#include <stdexcept>

namespace gcl {

AugChoice gumbel_softmax_with_noise(const Tensord& logits, const Matd& noise, double tau_g) {
  if (tau_g <= 0.0) throw std::invalid_argument("gumbel_softmax: temperature must be positive");
  if (logits.cols() != 3)
    throw std::invalid_argument("gumbel_softmax: logits must have 3 columns, got " +
                                std::to_string(logits.cols()));
  if (noise.rows() != logits.rows() || noise.cols() != logits.cols())
    throw std::invalid_argument("gumbel_softmax: noise shape mismatch");
  AugChoice c;
  c.probs = softmax_rows(logits);
  Tensord perturbed = add(logits, Tensord::constant(noise));
  c.soft = softmax_rows(mul_scalar(perturbed, 1.0 / tau_g));
  c.hard = Matd::Zero(c.soft.rows(), c.soft.cols());
  for (Eigen::Index i = 0; i < c.soft.rows(); ++i) {
    Eigen::Index arg = 0;
    c.soft.value().row(i).maxCoeff(&arg);
    c.hard(i, arg) = 1.0;
  }
  c.st = add(c.soft, Tensord::constant(c.hard - c.soft.value()));
  return c;
}

AugChoice gumbel_softmax(const Tensord& logits, double tau_g, RngStream& rng) {
  Matd noise(logits.rows(), logits.cols());
  for (Eigen::Index i = 0; i < noise.rows(); ++i)
    for (Eigen::Index j = 0; j < noise.cols(); ++j) noise(i, j) = rng.gumbel();
  return gumbel_softmax_with_noise(logits, noise, tau_g);
}

BatchView apply_choice(const GraphBatch& b, const AugChoice& c) {
  if (c.st.rows() != b.num_nodes())
    throw std::invalid_argument("apply_choice: " + std::to_string(c.st.rows()) +
                                " choice rows for " + std::to_string(b.num_nodes()) + " nodes");
  BatchView v;
  v.features = colwise_scale(Tensord::constant(b.features), col(c.st, kKeep));
  v.src.reserve(b.src.size());
  v.dst.reserve(b.dst.size());
  for (std::size_t e = 0; e < b.src.size(); ++e) {
    const int s = b.src[e], d = b.dst[e];
    if (c.hard(s, kDrop) == 1.0 || c.hard(d, kDrop) == 1.0) continue;
    v.src.push_back(s);
    v.dst.push_back(d);
  }
  v.batch_vector = b.batch_vector;
  v.n_graphs = b.num_graphs();
  return v;
}

ViewGenerator::ViewGenerator(int in_dim, int hidden, int n_layers, RngStream& rng)
    : gnn(in_dim, hidden, 3, n_layers, rng) {
  // Start with KEEP clearly ahead so fresh generators emit near-identity views;
  // training then has to earn every drop or mask instead of wandering into
  // feature-destroying decisions before the classifier can object. The head
  // weights are quieted so the bias dominates the initial per-node logits.
  gnn.layers.back().mlp.l2.W.value() *= 0.1;
  gnn.layers.back().mlp.l2.b.value()(0, kKeep) += 2.5;
}

std::pair<BatchView, AugChoice> generate_view(const GraphBatch& b, const ViewGenerator& gen,
                                              double tau_g, RngStream& rng) {
  AugChoice c = gumbel_softmax(gen.logits(b), tau_g, rng);
  return {apply_choice(b, c), c};
}

}  // namespace gcl
