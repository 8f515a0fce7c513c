#pragma once

#include <vector>

#include "gcl/tensor.hpp"
#include "gcl/view.hpp"

namespace gcl {

// Contrastive loss over 2N interleaved rows: rows (2k, 2k+1) are the positive
// pair. L = mean_i of -log( exp(sim(z_i, z_partner)/tau) /
// sum_{k != i} exp(sim(z_i, z_k)/tau) ), cosine similarity throughout.
// A single pair (N = 1) has denominator == numerator, so the loss is
// exactly zero.
Tensord nt_xent(const Tensord& z_interleaved, double tau);

// Convenience wrapper pairing row i of z1 with row i of z2.
Tensord nt_xent(const Tensord& z1, const Tensord& z2, double tau);

// Cosine similarity of the two flattened choice matrices. The AugChoice
// overload compares the sampled one-hot matrices through their straight-
// through surrogates, so the value reflects the decisions actually taken
// while gradients flow through the soft relaxation.
Tensord similarity_loss(const AugChoice& a1, const AugChoice& a2);
Tensord similarity_loss(const Tensord& probs1, const Tensord& probs2);

// Sum of three batch-mean cross-entropies: original and both views.
Tensord classification_loss(const Tensord& logits_x, const Tensord& logits_x1,
                            const Tensord& logits_x2, const std::vector<int>& labels);

}  // namespace gcl
