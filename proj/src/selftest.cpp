#include "gcl/selftest.hpp"

#include <cmath>
#include <functional>
#include <vector>

#include "gcl/augment.hpp"
#include "gcl/gradcheck.hpp"
#include "gcl/loss.hpp"
#include "gcl/optim.hpp"
#include "gcl/synthetic.hpp"
#include "gcl/view.hpp"

namespace gcl {

namespace {

Matd random_matrix(int r, int c, RngStream& rng) {
  Matd m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = rng.uniform(-1.0, 1.0);
  return m;
}

Graph relabel(const Graph& g, const std::vector<int>& perm) {
  Graph out;
  out.num_nodes = g.num_nodes;
  out.label = g.label;
  out.features.resize(g.features.rows(), g.features.cols());
  for (int i = 0; i < g.num_nodes; ++i) out.features.row(perm[i]) = g.features.row(i);
  for (const auto& [u, v] : g.edges) out.edges.emplace_back(perm[u], perm[v]);
  out.canonicalize();
  return out;
}

}  // namespace

bool run_selftest(std::ostream& out) {
  int failed = 0;
  auto check = [&](const char* name, const std::function<bool()>& fn) {
    bool ok = false;
    std::string err;
    try {
      ok = fn();
    } catch (const std::exception& e) {
      err = e.what();
    }
    out << (ok ? "[ok]     " : "[FAILED] ") << name;
    if (!err.empty()) out << " (" << err << ")";
    out << "\n";
    if (!ok) ++failed;
  };

  check("elementwise and matmul gradients", [] {
    RngStream rng(11);
    Tensord a = Tensord::param(random_matrix(3, 4, rng));
    Tensord b = Tensord::param(random_matrix(4, 2, rng));
    Tensord c = Tensord::param(random_matrix(3, 2, rng));
    auto f = [&] { return sum_all(mul(relu(matmul(a, b)), c)); };
    return grad_check(f, {a, b, c}).ok;
  });

  check("softmax cross-entropy gradients", [] {
    RngStream rng(12);
    Tensord logits = Tensord::param(random_matrix(5, 3, rng));
    auto f = [&] { return cross_entropy(logits, {0, 2, 1, 0, 2}); };
    return grad_check(f, {logits}).ok;
  });

  check("contrastive loss gradients", [] {
    RngStream rng(13);
    Tensord z = Tensord::param(random_matrix(6, 4, rng));
    auto f = [&] { return nt_xent(z, 0.5); };
    return grad_check(f, {z}).ok;
  });

  check("single-pair contrastive loss is exactly zero", [] {
    RngStream rng(14);
    Tensord z = Tensord::param(random_matrix(2, 3, rng));
    return nt_xent(z, 0.5).value()(0, 0) == 0.0;
  });

  check("straight-through sampler matches softmax frequencies", [] {
    RngStream rng(15);
    Matd logits(1, 3);
    logits << 0.5, -0.5, 0.25;
    Matd counts = Matd::Zero(1, 3);
    const int draws = 4000;
    for (int i = 0; i < draws; ++i) {
      Tensord l = Tensord::constant(logits);
      AugChoice c = gumbel_softmax(l, 1.0, rng);
      if (std::abs(c.hard.row(0).sum() - 1.0) > 1e-12) return false;
      counts += c.hard;
    }
    Matd probs = (logits.array() - logits(0, 0)).exp().matrix();
    probs /= probs.sum();
    double l1 = ((counts / draws) - probs).cwiseAbs().sum();
    return l1 < 0.1;
  });

  check("views keep arcs away from dropped nodes", [] {
    RngStream rng(16);
    for (int t = 0; t < 20; ++t) {
      Graph g = random_graph(rng, 6, 12, 4, 0.4);
      GraphBatch b = batch_graphs({g});
      ViewGenerator gen(4, 8, 2, rng);
      auto [view, choice] = generate_view(b, gen, 1.0, rng);
      for (std::size_t e = 0; e < view.src.size(); ++e)
        if (choice.hard(view.src[e], kDrop) == 1.0 ||
            choice.hard(view.dst[e], kDrop) == 1.0)
          return false;
    }
    return true;
  });

  check("augmentation node counts and zero-ratio identity", [] {
    RngStream rng(17);
    Graph g = random_graph(rng, 10, 10, 4, 0.5);
    Graph d = node_drop(g, 0.3, rng);
    if (d.num_nodes != 7) return false;
    RngStream a(99), b(99);
    Graph same = apply_fixed_augmentation(AugKind::random4, g, 0.0, a);
    if (!(same == g)) return false;
    return a.raw() == b.raw();
  });

  check("one optimizer step on x^2 from 1 with lr 0.1 gives 0.9", [] {
    Tensord x = Tensord::param(Matd::Ones(1, 1));
    Adam opt(std::vector<Tensord>{x}, {0.1});
    Tensord loss = mul(x, x);
    loss.backward();
    opt.step();
    return std::abs(x.value()(0, 0) - 0.9) < 1e-6;
  });

  check("encoder output is invariant to node relabeling", [] {
    RngStream rng(18);
    Graph g = random_graph(rng, 6, 6, 4, 0.5);
    g.label = 0;
    Encoder enc(4, 8, 2, 2, rng);
    Matd base = enc.embed(full_view(batch_graphs({g}))).value();
    for (int t = 0; t < 3; ++t) {
      std::vector<int> perm(g.num_nodes);
      for (int i = 0; i < g.num_nodes; ++i) perm[i] = i;
      rng.shuffle(perm);
      Graph h = relabel(g, perm);
      Matd other = enc.embed(full_view(batch_graphs({h}))).value();
      if ((base - other).cwiseAbs().maxCoeff() > 1e-9) return false;
    }
    return true;
  });

  out << (failed == 0 ? "selftest passed" : "selftest FAILED") << "\n";
  return failed == 0;
}

}  // namespace gcl
