#include "gcl/nn.hpp"

#include <cmath>
#include <stdexcept>

namespace gcl {

void ParamRegistry::add(const std::string& name, const Tensord& t) {
  for (const auto& [n, _] : items)
    if (n == name) throw std::invalid_argument("duplicate parameter name: " + name);
  items.emplace_back(name, t);
}

void ParamRegistry::merge(const ParamRegistry& other) {
  for (const auto& [n, t] : other.items) add(n, t);
}

Tensord* ParamRegistry::find(const std::string& name) {
  for (auto& [n, t] : items)
    if (n == name) return &t;
  return nullptr;
}

std::vector<Tensord> ParamRegistry::tensors() const {
  std::vector<Tensord> out;
  out.reserve(items.size());
  for (const auto& [n, t] : items) out.push_back(t);
  return out;
}

Matd glorot_uniform(int fan_in, int fan_out, RngStream& rng) {
  const double a = std::sqrt(6.0 / (fan_in + fan_out));
  Matd m(fan_in, fan_out);
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rng.uniform(-a, a);
  return m;
}

Linear::Linear(int in, int out, RngStream& rng)
    : W(Tensord::param(glorot_uniform(in, out, rng))),
      b(Tensord::param(Matd::Zero(1, out))) {}

void Linear::collect(const std::string& prefix, ParamRegistry& reg) const {
  reg.add(prefix + ".W", W);
  reg.add(prefix + ".b", b);
}

Mlp2::Mlp2(int in, int hidden, int out, RngStream& rng)
    : l1(in, hidden, rng), l2(hidden, out, rng) {}

void Mlp2::collect(const std::string& prefix, ParamRegistry& reg) const {
  l1.collect(prefix + ".l1", reg);
  l2.collect(prefix + ".l2", reg);
}

BatchView full_view(const GraphBatch& b) {
  BatchView v;
  v.features = Tensord::constant(b.features);
  v.src = b.src;
  v.dst = b.dst;
  v.batch_vector = b.batch_vector;
  v.n_graphs = b.num_graphs();
  return v;
}

GinLayer::GinLayer(int in, int hidden, int out, RngStream& rng)
    : mlp(in, hidden, out, rng), eps(Tensord::param(Matd::Zero(1, 1))) {}

Tensord GinLayer::forward(const Tensord& h, const std::vector<int>& src,
                          const std::vector<int>& dst) const {
  Tensord neigh = scatter_sum(gather_rows(h, src), dst, h.rows());
  Tensord self = scale(h, add_scalar(eps, 1.0));
  return mlp.forward(add(self, neigh));
}

void GinLayer::collect(const std::string& prefix, ParamRegistry& reg) const {
  mlp.collect(prefix + ".mlp", reg);
  reg.add(prefix + ".eps", eps);
}

GinStack::GinStack(int in_dim, int hidden, int out_dim, int n_layers, RngStream& rng) {
  if (n_layers < 1) throw std::invalid_argument("GinStack: need at least one layer");
  layers.reserve(static_cast<std::size_t>(n_layers));
  for (int k = 0; k < n_layers; ++k) {
    const int in = k == 0 ? in_dim : hidden;
    const int out = k == n_layers - 1 ? out_dim : hidden;
    layers.emplace_back(in, hidden, out, rng);
  }
}

Tensord GinStack::forward(const BatchView& b) const {
  Tensord h = b.features;
  for (std::size_t k = 0; k < layers.size(); ++k) {
    if (k > 0) h = relu(h);
    h = layers[k].forward(h, b.src, b.dst);
  }
  return h;
}

void GinStack::collect(const std::string& prefix, ParamRegistry& reg) const {
  for (std::size_t k = 0; k < layers.size(); ++k)
    layers[k].collect(prefix + ".layer" + std::to_string(k), reg);
}

Encoder::Encoder(int in_dim, int hidden, int n_layers, int n_classes, RngStream& rng,
                 bool mean_readout)
    : gnn(in_dim, hidden, hidden, n_layers, rng),
      proj(hidden, hidden, hidden, rng),
      classifier(hidden, n_classes, rng),
      mean_readout(mean_readout) {
  // Sum readout scales graph embeddings with node count, so a randomly
  // initialized head starts out confidently wrong. Zeroed head weights make
  // every initial prediction uniform; the logits then grow with the evidence.
  classifier.W.value().setZero();
}

Tensord Encoder::readout(const Tensord& node_embs, const std::vector<int>& batch_vector,
                         int n_graphs) const {
  if (mean_readout) return segment_mean(node_embs, batch_vector, n_graphs);
  return scatter_sum(node_embs, batch_vector, n_graphs);
}

Tensord Encoder::embed(const BatchView& b) const {
  return readout(node_embed(b), b.batch_vector, b.n_graphs);
}

int Encoder::hidden() const { return static_cast<int>(classifier.W.rows()); }
int Encoder::n_classes() const { return static_cast<int>(classifier.W.cols()); }

void Encoder::collect(const std::string& prefix, ParamRegistry& reg) const {
  gnn.collect(prefix + ".gnn", reg);
  proj.collect(prefix + ".proj", reg);
  classifier.collect(prefix + ".cls", reg);
}

}  // namespace gcl
