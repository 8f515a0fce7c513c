#include "gcl/loss.hpp"

#include <stdexcept>

namespace gcl {

Tensord nt_xent(const Tensord& z_interleaved, double tau) {
  const Eigen::Index n2 = z_interleaved.rows();
  if (n2 % 2 != 0 || n2 == 0)
    throw std::invalid_argument("nt_xent: need a positive even row count, got " +
                                std::to_string(n2));
  if (tau <= 0.0) throw std::invalid_argument("nt_xent: temperature must be positive");

  // normalize_rows divides by (norm + eps), so an all-zero embedding (a view
  // that dropped or masked every node of a graph) contributes flat zero
  // similarities instead of aborting the step.
  Tensord nz = normalize_rows(z_interleaved);
  Tensord sims = matmul(nz, transpose(nz));
  Tensord e = exp(mul_scalar(sims, 1.0 / tau));

  Matd self_mask = Matd::Identity(n2, n2);
  Matd partner_mask = Matd::Zero(n2, n2);
  for (Eigen::Index i = 0; i < n2; ++i) partner_mask(i, i ^ 1) = 1.0;

  Tensord numer = row_sum(mul(e, Tensord::constant(partner_mask)));
  Tensord denom = row_sum(mul(e, Tensord::constant(Matd::Ones(n2, n2) - self_mask)));
  Tensord losses = neg(log(div(numer, denom)));
  return mul_scalar(sum_all(losses), 1.0 / static_cast<double>(n2));
}

Tensord nt_xent(const Tensord& z1, const Tensord& z2, double tau) {
  if (z1.rows() != z2.rows() || z1.cols() != z2.cols())
    throw std::invalid_argument("nt_xent: view shapes differ");
  const Eigen::Index n = z1.rows();
  Tensord stacked = vstack(z1, z2);
  std::vector<int> interleave(static_cast<std::size_t>(2 * n));
  for (Eigen::Index i = 0; i < n; ++i) {
    interleave[static_cast<std::size_t>(2 * i)] = static_cast<int>(i);
    interleave[static_cast<std::size_t>(2 * i + 1)] = static_cast<int>(n + i);
  }
  return nt_xent(gather_rows(stacked, interleave), tau);
}

Tensord similarity_loss(const Tensord& probs1, const Tensord& probs2) {
  return cosine_flat(probs1, probs2);
}

Tensord similarity_loss(const AugChoice& a1, const AugChoice& a2) {
  return similarity_loss(a1.st, a2.st);
}

Tensord classification_loss(const Tensord& logits_x, const Tensord& logits_x1,
                            const Tensord& logits_x2, const std::vector<int>& labels) {
  return add(add(cross_entropy(logits_x, labels), cross_entropy(logits_x1, labels)),
             cross_entropy(logits_x2, labels));
}

}  // namespace gcl
