#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "gcl/gradcheck.hpp"
#include "gcl/rng.hpp"
#include "gcl/tensor.hpp"

using gcl::grad_check;
using gcl::Matd;
using gcl::RngStream;
using gcl::Tensord;

namespace {

Matd rand_mat(int r, int c, RngStream& rng, double lo = -1.0, double hi = 1.0) {
  Matd m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = rng.uniform(lo, hi);
  return m;
}

// keeps entries away from 0 so finite differences never straddle a relu kink
// or a division blow-up
Matd rand_mat_margin(int r, int c, RngStream& rng, double margin) {
  Matd m = rand_mat(r, c, rng);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j)
      if (std::abs(m(i, j)) < margin) m(i, j) = m(i, j) < 0 ? -margin : margin;
  return m;
}

// scalar-valued wrapper: weighted sum of the op output against fixed weights
Tensord against(const Tensord& y, const Matd& w) {
  return gcl::sum_all(gcl::mul(y, Tensord::constant(w)));
}

constexpr int kTrials = 20;

}  // namespace

TEST_CASE("gradients: elementwise binary ops") {
  RngStream rng(100);
  for (int t = 0; t < kTrials; ++t) {
    int r = 2 + t % 4, c = 1 + (t / 4) % 3;
    Tensord a = Tensord::param(rand_mat(r, c, rng));
    Tensord b = Tensord::param(rand_mat_margin(r, c, rng, 0.4));
    Matd w = rand_mat(r, c, rng);
    CHECK(grad_check([&] { return against(gcl::add(a, b), w); }, {a, b}).ok);
    CHECK(grad_check([&] { return against(gcl::sub(a, b), w); }, {a, b}).ok);
    CHECK(grad_check([&] { return against(gcl::mul(a, b), w); }, {a, b}).ok);
    CHECK(grad_check([&] { return against(gcl::div(a, b), w); }, {a, b}).ok);
  }
}

TEST_CASE("gradients: elementwise unary ops") {
  RngStream rng(101);
  for (int t = 0; t < kTrials; ++t) {
    int r = 2 + t % 3, c = 2 + (t / 3) % 3;
    Tensord a = Tensord::param(rand_mat_margin(r, c, rng, 0.05));
    Tensord pos = Tensord::param(rand_mat(r, c, rng, 0.3, 2.0));
    Matd w = rand_mat(r, c, rng);
    CHECK(grad_check([&] { return against(gcl::neg(a), w); }, {a}).ok);
    CHECK(grad_check([&] { return against(gcl::exp(a), w); }, {a}).ok);
    CHECK(grad_check([&] { return against(gcl::relu(a), w); }, {a}).ok);
    CHECK(grad_check([&] { return against(gcl::log(pos), w); }, {pos}).ok);
    CHECK(grad_check([&] { return against(gcl::sqrt(pos), w); }, {pos}).ok);
    CHECK(grad_check([&] { return against(gcl::pow(pos, 1.7), w); }, {pos}).ok);
    CHECK(grad_check([&] { return against(gcl::add_scalar(a, 0.37), w); }, {a}).ok);
    CHECK(grad_check([&] { return against(gcl::mul_scalar(a, -1.3), w); }, {a}).ok);
  }
}

TEST_CASE("gradients: matmul, transpose, stacking, slicing") {
  RngStream rng(102);
  for (int t = 0; t < kTrials; ++t) {
    int n = 2 + t % 3, k = 2 + (t / 3) % 3, m = 2 + (t / 9) % 2;
    Tensord a = Tensord::param(rand_mat(n, k, rng));
    Tensord b = Tensord::param(rand_mat(k, m, rng));
    Matd w = rand_mat(n, m, rng);
    CHECK(grad_check([&] { return against(gcl::matmul(a, b), w); }, {a, b}).ok);

    Matd wt = rand_mat(k, n, rng);
    CHECK(grad_check([&] { return against(gcl::transpose(a), wt); }, {a}).ok);

    Tensord c = Tensord::param(rand_mat(n, k, rng));
    Matd wv = rand_mat(2 * n, k, rng);
    CHECK(grad_check([&] { return against(gcl::vstack(a, c), wv); }, {a, c}).ok);

    int j = t % k;
    Matd wc = rand_mat(n, 1, rng);
    CHECK(grad_check([&] { return against(gcl::col(a, j), wc); }, {a}).ok);
  }
}

TEST_CASE("gradients: broadcast and scaling ops") {
  RngStream rng(103);
  for (int t = 0; t < kTrials; ++t) {
    int n = 2 + t % 4, m = 2 + (t / 4) % 3;
    Tensord x = Tensord::param(rand_mat(n, m, rng));
    Tensord bias = Tensord::param(rand_mat(1, m, rng));
    Matd w = rand_mat(n, m, rng);
    CHECK(grad_check([&] { return against(gcl::add_rowvec(x, bias), w); }, {x, bias}).ok);

    Tensord cvec = Tensord::param(rand_mat(n, 1, rng));
    CHECK(grad_check([&] { return against(gcl::colwise_scale(x, cvec), w); }, {x, cvec}).ok);

    Tensord s = Tensord::param(rand_mat(1, 1, rng));
    CHECK(grad_check([&] { return against(gcl::scale(x, s), w); }, {x, s}).ok);
  }
}

TEST_CASE("gradients: reductions") {
  RngStream rng(104);
  for (int t = 0; t < kTrials; ++t) {
    int n = 2 + t % 4, m = 2 + (t / 4) % 3;
    Tensord x = Tensord::param(rand_mat(n, m, rng));
    Matd wcol = rand_mat(n, 1, rng);
    CHECK(grad_check([&] { return gcl::sum_all(x); }, {x}).ok);
    CHECK(grad_check([&] { return gcl::mean_all(x); }, {x}).ok);
    CHECK(grad_check([&] { return against(gcl::row_sum(x), wcol); }, {x}).ok);
    CHECK(grad_check([&] { return against(gcl::row_mean(x), wcol); }, {x}).ok);
  }
}

TEST_CASE("gradients: gather, scatter, segment mean") {
  RngStream rng(105);
  for (int t = 0; t < kTrials; ++t) {
    int n = 3 + t % 4, m = 2 + t % 3;
    Tensord x = Tensord::param(rand_mat(n, m, rng));

    // repeats exercise gradient accumulation
    std::vector<int> gather_idx(static_cast<std::size_t>(n + 2));
    for (auto& i : gather_idx) i = static_cast<int>(rng.uniform_int(n));
    Matd wg = rand_mat(n + 2, m, rng);
    CHECK(grad_check([&] { return against(gcl::gather_rows(x, gather_idx), wg); }, {x}).ok);

    int segments = 2 + t % 2;
    std::vector<int> seg(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) seg[static_cast<std::size_t>(i)] = i % segments;
    rng.shuffle(seg);
    Matd ws = rand_mat(segments, m, rng);
    CHECK(grad_check([&] { return against(gcl::scatter_sum(x, seg, segments), ws); }, {x}).ok);
    CHECK(grad_check([&] { return against(gcl::segment_mean(x, seg, segments), ws); }, {x}).ok);
  }
}

TEST_CASE("gradients: softmax family and cross-entropy") {
  RngStream rng(106);
  for (int t = 0; t < kTrials; ++t) {
    int n = 2 + t % 4, m = 2 + (t / 4) % 3;
    Tensord x = Tensord::param(rand_mat(n, m, rng, -2.0, 2.0));
    Matd w = rand_mat(n, m, rng);
    CHECK(grad_check([&] { return against(gcl::softmax_rows(x), w); }, {x}).ok);
    CHECK(grad_check([&] { return against(gcl::log_softmax_rows(x), w); }, {x}).ok);

    std::vector<int> labels(static_cast<std::size_t>(n));
    for (auto& l : labels) l = static_cast<int>(rng.uniform_int(m));
    CHECK(grad_check([&] { return gcl::cross_entropy(x, labels); }, {x}).ok);
  }
}

TEST_CASE("gradients: row normalization and cosine ops") {
  RngStream rng(107);
  for (int t = 0; t < kTrials; ++t) {
    int n = 2 + t % 4, m = 2 + (t / 4) % 3;
    // keep rows clearly away from the zero-norm corner
    Matd ma = rand_mat(n, m, rng);
    Matd mb = rand_mat(n, m, rng);
    ma.col(0).array() += 1.5;
    mb.col(0).array() -= 1.5;
    Tensord a = Tensord::param(ma);
    Tensord b = Tensord::param(mb);
    Matd w = rand_mat(n, m, rng);
    Matd wcol = rand_mat(n, 1, rng);
    CHECK(grad_check([&] { return against(gcl::normalize_rows(a), w); }, {a}).ok);
    CHECK(grad_check([&] { return against(gcl::cosine_rows(a, b), wcol); }, {a, b}).ok);
    CHECK(grad_check([&] { return gcl::cosine_flat(a, b); }, {a, b}).ok);
  }
}

TEST_CASE("softmax rows sum to one and agree with log_softmax") {
  RngStream rng(108);
  Tensord x = Tensord::param(rand_mat(5, 4, rng, -3.0, 3.0));
  Matd sm = gcl::softmax_rows(x).value();
  Matd lsm = gcl::log_softmax_rows(x).value();
  for (int i = 0; i < 5; ++i) {
    CHECK(std::abs(sm.row(i).sum() - 1.0) < 1e-12);
    for (int j = 0; j < 4; ++j)
      CHECK(std::abs(std::exp(lsm(i, j)) - sm(i, j)) < 1e-12);
  }
}

TEST_CASE("cross-entropy of uniform logits is log(n_classes)") {
  Tensord logits = Tensord::param(Matd::Zero(1, 2));
  double v = gcl::cross_entropy(logits, {0}).value()(0, 0);
  CHECK(v == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("relu gradient at exactly zero is zero") {
  Matd m(1, 3);
  m << -1.0, 0.0, 2.0;
  Tensord x = Tensord::param(m);
  gcl::sum_all(gcl::relu(x)).backward();
  CHECK(x.grad()(0, 0) == 0.0);
  CHECK(x.grad()(0, 1) == 0.0);
  CHECK(x.grad()(0, 2) == 1.0);
}

TEST_CASE("log and sqrt reject non-positive values") {
  Matd m(1, 2);
  m << 1.0, -0.5;
  Tensord x = Tensord::param(m);
  CHECK_THROWS_AS((void)gcl::log(x), std::invalid_argument);
  CHECK_THROWS_AS((void)gcl::sqrt(x), std::invalid_argument);
  Matd z = Matd::Zero(1, 1);
  Tensord y = Tensord::param(z);
  CHECK_THROWS_AS((void)gcl::log(y), std::invalid_argument);
}

TEST_CASE("repeated backward accumulates until zero_grad") {
  Tensord x = Tensord::param(Matd::Ones(2, 2) * 3.0);
  Tensord loss = gcl::sum_all(gcl::mul(x, x));
  loss.backward();
  CHECK(x.grad()(0, 0) == doctest::Approx(6.0));
  loss.backward();
  CHECK(x.grad()(0, 0) == doctest::Approx(12.0));
  x.zero_grad();
  CHECK(x.grad()(0, 0) == 0.0);
  loss.backward();
  CHECK(x.grad()(0, 0) == doctest::Approx(6.0));
}

TEST_CASE("a value reused across branches gets both contributions") {
  Tensord x = Tensord::param(Matd::Ones(1, 1) * 2.0);
  Tensord y = gcl::mul(x, x);
  Tensord loss = gcl::sum_all(gcl::add(y, y));
  loss.backward();
  // d/dx 2x^2 = 4x = 8
  CHECK(x.grad()(0, 0) == doctest::Approx(8.0));
}

TEST_CASE("constants never accumulate gradients") {
  Tensord x = Tensord::param(Matd::Ones(2, 2));
  Tensord c = Tensord::constant(Matd::Ones(2, 2) * 5.0);
  Tensord loss = gcl::sum_all(gcl::mul(x, c));
  loss.backward();
  CHECK(!c.has_grad());
  CHECK(x.grad()(0, 0) == doctest::Approx(5.0));
}

TEST_CASE("backward requires a scalar") {
  Tensord x = Tensord::param(Matd::Ones(2, 2));
  Tensord y = gcl::mul(x, x);
  CHECK_THROWS(y.backward());
}

TEST_CASE("shape mismatches are rejected") {
  Tensord a = Tensord::param(Matd::Ones(2, 3));
  Tensord b = Tensord::param(Matd::Ones(3, 2));
  CHECK_THROWS((void)gcl::add(a, b));
  CHECK_THROWS((void)gcl::mul(a, b));
  CHECK_THROWS((void)gcl::matmul(a, a));
}

TEST_CASE("a ten-thousand-op chain backpropagates without recursion limits") {
  Tensord x = Tensord::param(Matd::Ones(1, 1));
  Tensord y = x;
  for (int i = 0; i < 10000; ++i) y = gcl::add_scalar(y, 1.0);
  gcl::sum_all(y).backward();
  CHECK(x.grad()(0, 0) == doctest::Approx(1.0));
  CHECK(y.value()(0, 0) == doctest::Approx(10001.0));
}

TEST_CASE("gather out-of-range and scatter bad index throw") {
  Tensord x = Tensord::param(Matd::Ones(3, 2));
  CHECK_THROWS((void)gcl::gather_rows(x, {0, 3}));
  CHECK_THROWS((void)gcl::gather_rows(x, {-1}));
  CHECK_THROWS((void)gcl::scatter_sum(x, {0, 1, 2}, 2));
}
