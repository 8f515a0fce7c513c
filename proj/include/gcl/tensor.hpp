#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace gcl {

template <class Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Matd = Mat<double>;

namespace detail {
inline std::string shape_str(Eigen::Index r, Eigen::Index c) {
  return std::to_string(r) + "x" + std::to_string(c);
}
inline std::uint64_t next_node_id() {
  static std::uint64_t counter = 0;
  return ++counter;
}
}  // namespace detail

// One node of the dynamic operation graph. `pending` is per-backward-pass
// scratch: contributions from consumers are summed there, folded into the
// persistent `grad` for parameters, and released at the end of the pass.
template <class Scalar>
struct TensorNode {
  Mat<Scalar> value;
  Mat<Scalar> grad;
  Mat<Scalar> pending;
  bool requires_grad = false;
  bool active = false;  // some ancestor requires a gradient
  std::uint64_t id = detail::next_node_id();
  std::vector<std::shared_ptr<TensorNode>> parents;
  std::function<void(TensorNode&)> backprop;
};

// Dense matrix participating in a reverse-mode gradient graph. Copies are
// shallow and share the node, so a Tensor held in a parameter registry sees
// every update.
template <class Scalar>
class Tensor {
 public:
  using MatT = Mat<Scalar>;

  Tensor() = default;
  explicit Tensor(std::shared_ptr<TensorNode<Scalar>> n) : n_(std::move(n)) {}

  static Tensor param(MatT m) {
    auto n = std::make_shared<TensorNode<Scalar>>();
    n->value = std::move(m);
    n->requires_grad = true;
    n->active = true;
    return Tensor(std::move(n));
  }

  static Tensor constant(MatT m) {
    auto n = std::make_shared<TensorNode<Scalar>>();
    n->value = std::move(m);
    return Tensor(std::move(n));
  }

  static Tensor scalar_const(Scalar v) {
    MatT m(1, 1);
    m(0, 0) = v;
    return constant(std::move(m));
  }

  bool defined() const { return static_cast<bool>(n_); }
  const MatT& value() const { return n_->value; }
  MatT& value() { return n_->value; }
  Eigen::Index rows() const { return n_->value.rows(); }
  Eigen::Index cols() const { return n_->value.cols(); }
  bool requires_grad() const { return n_->requires_grad; }
  std::uint64_t id() const { return n_->id; }

  bool has_grad() const { return n_->grad.size() > 0; }

  // Accumulated gradient; zeros if backward never reached this tensor.
  MatT grad() const {
    if (!has_grad()) return MatT::Zero(rows(), cols());
    return n_->grad;
  }

  void zero_grad() { n_->grad.resize(0, 0); }

  std::shared_ptr<TensorNode<Scalar>>& node() { return n_; }
  const std::shared_ptr<TensorNode<Scalar>>& node() const { return n_; }

  // Reverse pass from a scalar root. Gradients accumulate into every
  // requires_grad ancestor; repeated calls keep accumulating until
  // zero_grad().
  void backward() const {
    if (rows() != 1 || cols() != 1)
      throw std::invalid_argument("backward: root must be scalar, got " +
                                  detail::shape_str(rows(), cols()));
    // iterative post-order DFS: node appears after all of its parents
    std::vector<TensorNode<Scalar>*> order;
    std::unordered_set<TensorNode<Scalar>*> seen;
    std::vector<std::pair<TensorNode<Scalar>*, std::size_t>> stack;
    if (n_->active) {
      stack.emplace_back(n_.get(), 0);
      seen.insert(n_.get());
    }
    while (!stack.empty()) {
      auto& [node, next] = stack.back();
      if (next < node->parents.size()) {
        TensorNode<Scalar>* p = node->parents[next++].get();
        if (p->active && seen.insert(p).second) stack.emplace_back(p, 0);
      } else {
        order.push_back(node);
        stack.pop_back();
      }
    }
    if (order.empty()) return;  // root has no differentiable ancestry
    n_->pending = MatT::Ones(1, 1);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      TensorNode<Scalar>* node = *it;
      if (node->pending.size() == 0) continue;  // unreachable via active paths
      if (node->backprop) node->backprop(*node);
      if (node->requires_grad) {
        if (node->grad.size() == 0)
          node->grad = node->pending;
        else
          node->grad += node->pending;
      }
      node->pending.resize(0, 0);
    }
  }

 private:
  std::shared_ptr<TensorNode<Scalar>> n_;
};

using Tensord = Tensor<double>;

namespace detail {

template <class Scalar, class Delta>
inline void acc(TensorNode<Scalar>& p, const Delta& delta) {
  if (p.pending.size() == 0)
    p.pending = delta;
  else
    p.pending += delta;
}

// Build an op node; drops the tape when no input carries gradient.
template <class Scalar>
Tensor<Scalar> make_op(Mat<Scalar> value, std::vector<Tensor<Scalar>> inputs,
                       std::function<void(TensorNode<Scalar>&)> backprop) {
  auto n = std::make_shared<TensorNode<Scalar>>();
  n->value = std::move(value);
  bool active = false;
  for (const auto& t : inputs) active = active || t.node()->active;
  n->active = active;
  if (active) {
    n->parents.reserve(inputs.size());
    for (auto& t : inputs) n->parents.push_back(t.node());
    n->backprop = std::move(backprop);
  }
  return Tensor<Scalar>(std::move(n));
}

template <class Scalar>
void check_same_shape(const Tensor<Scalar>& a, const Tensor<Scalar>& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument(std::string(op) + ": shape mismatch " +
                                shape_str(a.rows(), a.cols()) + " vs " +
                                shape_str(b.rows(), b.cols()));
}

}  // namespace detail

// ---- elementwise ----

template <class Scalar>
Tensor<Scalar> add(const Tensor<Scalar>& a, const Tensor<Scalar>& b) {
  detail::check_same_shape(a, b, "add");
  return detail::make_op<Scalar>(a.value() + b.value(), {a, b}, [](TensorNode<Scalar>& n) {
    detail::acc(*n.parents[0], n.pending);
    detail::acc(*n.parents[1], n.pending);
  });
}

template <class Scalar>
Tensor<Scalar> sub(const Tensor<Scalar>& a, const Tensor<Scalar>& b) {
  detail::check_same_shape(a, b, "sub");
  return detail::make_op<Scalar>(a.value() - b.value(), {a, b}, [](TensorNode<Scalar>& n) {
    detail::acc(*n.parents[0], n.pending);
    detail::acc(*n.parents[1], -n.pending);
  });
}

template <class Scalar>
Tensor<Scalar> mul(const Tensor<Scalar>& a, const Tensor<Scalar>& b) {
  detail::check_same_shape(a, b, "mul");
  return detail::make_op<Scalar>(a.value().cwiseProduct(b.value()), {a, b},
                                 [](TensorNode<Scalar>& n) {
                                   detail::acc(*n.parents[0],
                                               n.pending.cwiseProduct(n.parents[1]->value));
                                   detail::acc(*n.parents[1],
                                               n.pending.cwiseProduct(n.parents[0]->value));
                                 });
}

template <class Scalar>
Tensor<Scalar> div(const Tensor<Scalar>& a, const Tensor<Scalar>& b) {
  detail::check_same_shape(a, b, "div");
  return detail::make_op<Scalar>(a.value().cwiseQuotient(b.value()), {a, b},
                                 [](TensorNode<Scalar>& n) {
                                   const auto& bv = n.parents[1]->value;
                                   detail::acc(*n.parents[0], n.pending.cwiseQuotient(bv));
                                   Mat<Scalar> db =
                                       -n.pending.cwiseProduct(n.value).cwiseQuotient(bv);
                                   detail::acc(*n.parents[1], db);
                                 });
}

template <class Scalar>
Tensor<Scalar> neg(const Tensor<Scalar>& a) {
  return detail::make_op<Scalar>(-a.value(), {a}, [](TensorNode<Scalar>& n) {
    detail::acc(*n.parents[0], -n.pending);
  });
}

template <class Scalar>
Tensor<Scalar> add_scalar(const Tensor<Scalar>& a, Scalar c) {
  return detail::make_op<Scalar>((a.value().array() + c).matrix(), {a}, [](TensorNode<Scalar>& n) {
    detail::acc(*n.parents[0], n.pending);
  });
}

template <class Scalar>
Tensor<Scalar> mul_scalar(const Tensor<Scalar>& a, Scalar c) {
  return detail::make_op<Scalar>(a.value() * c, {a}, [c](TensorNode<Scalar>& n) {
    detail::acc(*n.parents[0], n.pending * c);
  });
}

template <class Scalar>
Tensor<Scalar> exp(const Tensor<Scalar>& a) {
  Mat<Scalar> v = a.value().array().exp().matrix();
  return detail::make_op<Scalar>(std::move(v), {a}, [](TensorNode<Scalar>& n) {
    detail::acc(*n.parents[0], n.pending.cwiseProduct(n.value));
  });
}

template <class Scalar>
Tensor<Scalar> log(const Tensor<Scalar>& a) {
  if (a.value().minCoeff() <= Scalar(0))
    throw std::invalid_argument("log: non-positive input; clamp before taking log");
  Mat<Scalar> v = a.value().array().log().matrix();
  return detail::make_op<Scalar>(std::move(v), {a}, [](TensorNode<Scalar>& n) {
    detail::acc(*n.parents[0], n.pending.cwiseQuotient(n.parents[0]->value));
  });
}

template <class Scalar>
Tensor<Scalar> sqrt(const Tensor<Scalar>& a) {
  if (a.value().minCoeff() <= Scalar(0))
    throw std::invalid_argument("sqrt: requires strictly positive input");
  Mat<Scalar> v = a.value().array().sqrt().matrix();
  return detail::make_op<Scalar>(std::move(v), {a}, [](TensorNode<Scalar>& n) {
    Mat<Scalar> d = (n.pending.array() * Scalar(0.5) / n.value.array()).matrix();
    detail::acc(*n.parents[0], d);
  });
}

template <class Scalar>
Tensor<Scalar> pow(const Tensor<Scalar>& a, Scalar p) {
  Mat<Scalar> v = a.value().array().pow(p).matrix();
  return detail::make_op<Scalar>(std::move(v), {a}, [p](TensorNode<Scalar>& n) {
    Mat<Scalar> d =
        (n.pending.array() * p * n.parents[0]->value.array().pow(p - Scalar(1))).matrix();
    detail::acc(*n.parents[0], d);
  });
}

// relu'(0) = 0
template <class Scalar>
Tensor<Scalar> relu(const Tensor<Scalar>& a) {
  Mat<Scalar> v = a.value().cwiseMax(Scalar(0));
  return detail::make_op<Scalar>(std::move(v), {a}, [](TensorNode<Scalar>& n) {
    Mat<Scalar> mask =
        (n.parents[0]->value.array() > Scalar(0)).template cast<Scalar>().matrix();
    detail::acc(*n.parents[0], n.pending.cwiseProduct(mask));
  });
}

// ---- linear algebra ----

template <class Scalar>
Tensor<Scalar> matmul(const Tensor<Scalar>& a, const Tensor<Scalar>& b) {
  if (a.cols() != b.rows())
    throw std::invalid_argument("matmul: inner dimensions disagree, " +
                                detail::shape_str(a.rows(), a.cols()) + " * " +
                                detail::shape_str(b.rows(), b.cols()));
  return detail::make_op<Scalar>(a.value() * b.value(), {a, b}, [](TensorNode<Scalar>& n) {
    detail::acc(*n.parents[0], n.pending * n.parents[1]->value.transpose());
    detail::acc(*n.parents[1], n.parents[0]->value.transpose() * n.pending);
  });
}

template <class Scalar>
Tensor<Scalar> transpose(const Tensor<Scalar>& a) {
  return detail::make_op<Scalar>(a.value().transpose(), {a}, [](TensorNode<Scalar>& n) {
    detail::acc(*n.parents[0], n.pending.transpose());
  });
}

// x[n x m] + row vector b[1 x m], broadcast over rows
template <class Scalar>
Tensor<Scalar> add_rowvec(const Tensor<Scalar>& x, const Tensor<Scalar>& b) {
  if (b.rows() != 1 || b.cols() != x.cols())
    throw std::invalid_argument("add_rowvec: bias must be 1x" + std::to_string(x.cols()) +
                                ", got " + detail::shape_str(b.rows(), b.cols()));
  Mat<Scalar> v = x.value().rowwise() + b.value().row(0);
  return detail::make_op<Scalar>(std::move(v), {x, b}, [](TensorNode<Scalar>& n) {
    detail::acc(*n.parents[0], n.pending);
    detail::acc(*n.parents[1], n.pending.colwise().sum());
  });
}

// ---- reductions ----

template <class Scalar>
Tensor<Scalar> sum_all(const Tensor<Scalar>& a) {
  Mat<Scalar> v(1, 1);
  v(0, 0) = a.value().sum();
  return detail::make_op<Scalar>(std::move(v), {a}, [](TensorNode<Scalar>& n) {
    const Scalar g = n.pending(0, 0);
    detail::acc(*n.parents[0],
                Mat<Scalar>::Constant(n.parents[0]->value.rows(),
                                      n.parents[0]->value.cols(), g));
  });
}

template <class Scalar>
Tensor<Scalar> mean_all(const Tensor<Scalar>& a) {
  Mat<Scalar> v(1, 1);
  v(0, 0) = a.value().mean();
  return detail::make_op<Scalar>(std::move(v), {a}, [](TensorNode<Scalar>& n) {
    const auto& pv = n.parents[0]->value;
    const Scalar g = n.pending(0, 0) / static_cast<Scalar>(pv.size());
    detail::acc(*n.parents[0], Mat<Scalar>::Constant(pv.rows(), pv.cols(), g));
  });
}

template <class Scalar>
Tensor<Scalar> row_sum(const Tensor<Scalar>& a) {
  Mat<Scalar> v = a.value().rowwise().sum();
  return detail::make_op<Scalar>(std::move(v), {a}, [](TensorNode<Scalar>& n) {
    const auto& pv = n.parents[0]->value;
    detail::acc(*n.parents[0], n.pending * Mat<Scalar>::Ones(1, pv.cols()));
  });
}

template <class Scalar>
Tensor<Scalar> row_mean(const Tensor<Scalar>& a) {
  const Scalar inv = Scalar(1) / static_cast<Scalar>(a.cols());
  Mat<Scalar> v = a.value().rowwise().mean();
  return detail::make_op<Scalar>(std::move(v), {a}, [inv](TensorNode<Scalar>& n) {
    const auto& pv = n.parents[0]->value;
    detail::acc(*n.parents[0], n.pending * Mat<Scalar>::Constant(1, pv.cols(), inv));
  });
}

// ---- indexed row ops (graph aggregation) ----

template <class Scalar>
Tensor<Scalar> gather_rows(const Tensor<Scalar>& x, std::vector<int> index) {
  const auto n_in = x.rows();
  for (int i : index)
    if (i < 0 || i >= n_in)
      throw std::out_of_range("gather_rows: index " + std::to_string(i) +
                              " out of range for " + std::to_string(n_in) + " rows");
  Mat<Scalar> v(static_cast<Eigen::Index>(index.size()), x.cols());
  for (std::size_t i = 0; i < index.size(); ++i)
    v.row(static_cast<Eigen::Index>(i)) = x.value().row(index[i]);
  return detail::make_op<Scalar>(std::move(v), {x}, [index = std::move(index)](TensorNode<Scalar>& n) {
    Mat<Scalar> d = Mat<Scalar>::Zero(n.parents[0]->value.rows(), n.parents[0]->value.cols());
    for (std::size_t i = 0; i < index.size(); ++i)
      d.row(index[i]) += n.pending.row(static_cast<Eigen::Index>(i));
    detail::acc(*n.parents[0], d);
  });
}

// out[i] = sum of src rows j with index[j] == i; rows without contributors are zero
template <class Scalar>
Tensor<Scalar> scatter_sum(const Tensor<Scalar>& src, std::vector<int> index,
                           Eigen::Index out_size) {
  if (static_cast<Eigen::Index>(index.size()) != src.rows())
    throw std::invalid_argument("scatter_sum: index length " + std::to_string(index.size()) +
                                " != src rows " + std::to_string(src.rows()));
  for (int i : index)
    if (i < 0 || i >= out_size)
      throw std::out_of_range("scatter_sum: index " + std::to_string(i) +
                              " out of range for out_size " + std::to_string(out_size));
  Mat<Scalar> v = Mat<Scalar>::Zero(out_size, src.cols());
  for (std::size_t j = 0; j < index.size(); ++j)
    v.row(index[j]) += src.value().row(static_cast<Eigen::Index>(j));
  return detail::make_op<Scalar>(std::move(v), {src}, [index = std::move(index)](TensorNode<Scalar>& n) {
    Mat<Scalar> d(static_cast<Eigen::Index>(index.size()), n.pending.cols());
    for (std::size_t j = 0; j < index.size(); ++j)
      d.row(static_cast<Eigen::Index>(j)) = n.pending.row(index[j]);
    detail::acc(*n.parents[0], d);
  });
}

template <class Scalar>
Tensor<Scalar> segment_mean(const Tensor<Scalar>& src, std::vector<int> index,
                            Eigen::Index out_size) {
  std::vector<Scalar> count(static_cast<std::size_t>(out_size), Scalar(0));
  for (int i : index) {
    if (i < 0 || i >= out_size)
      throw std::out_of_range("segment_mean: index out of range");
    count[static_cast<std::size_t>(i)] += Scalar(1);
  }
  Mat<Scalar> v = Mat<Scalar>::Zero(out_size, src.cols());
  for (std::size_t j = 0; j < index.size(); ++j)
    v.row(index[j]) += src.value().row(static_cast<Eigen::Index>(j));
  for (Eigen::Index i = 0; i < out_size; ++i)
    if (count[static_cast<std::size_t>(i)] > Scalar(0)) v.row(i) /= count[static_cast<std::size_t>(i)];
  return detail::make_op<Scalar>(
      std::move(v), {src},
      [index = std::move(index), count = std::move(count)](TensorNode<Scalar>& n) {
        Mat<Scalar> d(static_cast<Eigen::Index>(index.size()), n.pending.cols());
        for (std::size_t j = 0; j < index.size(); ++j)
          d.row(static_cast<Eigen::Index>(j)) =
              n.pending.row(index[j]) / count[static_cast<std::size_t>(index[j])];
        detail::acc(*n.parents[0], d);
      });
}

// ---- structural ----

template <class Scalar>
Tensor<Scalar> vstack(const Tensor<Scalar>& a, const Tensor<Scalar>& b) {
  if (a.cols() != b.cols())
    throw std::invalid_argument("vstack: column mismatch " +
                                detail::shape_str(a.rows(), a.cols()) + " vs " +
                                detail::shape_str(b.rows(), b.cols()));
  Mat<Scalar> v(a.rows() + b.rows(), a.cols());
  v.topRows(a.rows()) = a.value();
  v.bottomRows(b.rows()) = b.value();
  return detail::make_op<Scalar>(std::move(v), {a, b}, [](TensorNode<Scalar>& n) {
    const auto ra = n.parents[0]->value.rows();
    const auto rb = n.parents[1]->value.rows();
    detail::acc(*n.parents[0], n.pending.topRows(ra));
    detail::acc(*n.parents[1], n.pending.bottomRows(rb));
  });
}

template <class Scalar>
Tensor<Scalar> col(const Tensor<Scalar>& x, Eigen::Index j) {
  if (j < 0 || j >= x.cols())
    throw std::out_of_range("col: index " + std::to_string(j) + " out of range");
  return detail::make_op<Scalar>(x.value().col(j), {x}, [j](TensorNode<Scalar>& n) {
    Mat<Scalar> d = Mat<Scalar>::Zero(n.parents[0]->value.rows(), n.parents[0]->value.cols());
    d.col(j) = n.pending;
    detail::acc(*n.parents[0], d);
  });
}

// out.row(i) = x.row(i) * c(i); c is a column vector
template <class Scalar>
Tensor<Scalar> colwise_scale(const Tensor<Scalar>& x, const Tensor<Scalar>& c) {
  if (c.cols() != 1 || c.rows() != x.rows())
    throw std::invalid_argument("colwise_scale: scale must be " + std::to_string(x.rows()) +
                                "x1, got " + detail::shape_str(c.rows(), c.cols()));
  Mat<Scalar> v = (x.value().array().colwise() * c.value().col(0).array()).matrix();
  return detail::make_op<Scalar>(std::move(v), {x, c}, [](TensorNode<Scalar>& n) {
    const auto& xv = n.parents[0]->value;
    const auto& cv = n.parents[1]->value;
    Mat<Scalar> dx = (n.pending.array().colwise() * cv.col(0).array()).matrix();
    detail::acc(*n.parents[0], dx);
    Mat<Scalar> dc = n.pending.cwiseProduct(xv).rowwise().sum();
    detail::acc(*n.parents[1], dc);
  });
}

// out = s * x with a learnable 1x1 scale
template <class Scalar>
Tensor<Scalar> scale(const Tensor<Scalar>& x, const Tensor<Scalar>& s) {
  if (s.rows() != 1 || s.cols() != 1)
    throw std::invalid_argument("scale: scale tensor must be 1x1");
  return detail::make_op<Scalar>(x.value() * s.value()(0, 0), {x, s},
                                 [](TensorNode<Scalar>& n) {
                                   const Scalar sv = n.parents[1]->value(0, 0);
                                   detail::acc(*n.parents[0], n.pending * sv);
                                   Mat<Scalar> ds(1, 1);
                                   ds(0, 0) = n.pending.cwiseProduct(n.parents[0]->value).sum();
                                   detail::acc(*n.parents[1], ds);
                                 });
}

// ---- row-wise softmax family ----

template <class Scalar>
Tensor<Scalar> softmax_rows(const Tensor<Scalar>& x) {
  Mat<Scalar> v = x.value();
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    auto row = v.row(i);
    const Scalar m = row.maxCoeff();
    row = (row.array() - m).exp().matrix();
    row /= row.sum();
  }
  return detail::make_op<Scalar>(std::move(v), {x}, [](TensorNode<Scalar>& n) {
    Mat<Scalar> dot = n.pending.cwiseProduct(n.value).rowwise().sum();
    Mat<Scalar> d =
        n.value.cwiseProduct(n.pending - dot * Mat<Scalar>::Ones(1, n.value.cols()));
    detail::acc(*n.parents[0], d);
  });
}

template <class Scalar>
Tensor<Scalar> log_softmax_rows(const Tensor<Scalar>& x) {
  Mat<Scalar> v = x.value();
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    auto row = v.row(i);
    const Scalar m = row.maxCoeff();
    const Scalar lse = std::log((row.array() - m).exp().sum()) + m;
    row = (row.array() - lse).matrix();
  }
  return detail::make_op<Scalar>(std::move(v), {x}, [](TensorNode<Scalar>& n) {
    Mat<Scalar> soft = n.value.array().exp().matrix();
    Mat<Scalar> rs = n.pending.rowwise().sum();
    Mat<Scalar> d = n.pending - soft.cwiseProduct(rs * Mat<Scalar>::Ones(1, n.value.cols()));
    detail::acc(*n.parents[0], d);
  });
}

// mean over rows of -log softmax(logits)[label]
template <class Scalar>
Tensor<Scalar> cross_entropy(const Tensor<Scalar>& logits, const std::vector<int>& labels) {
  if (static_cast<Eigen::Index>(labels.size()) != logits.rows())
    throw std::invalid_argument("cross_entropy: " + std::to_string(labels.size()) +
                                " labels for " + std::to_string(logits.rows()) + " rows");
  for (int y : labels)
    if (y < 0 || y >= logits.cols())
      throw std::out_of_range("cross_entropy: label " + std::to_string(y) +
                              " outside [0, " + std::to_string(logits.cols()) + ")");
  Mat<Scalar> ls = logits.value();
  for (Eigen::Index i = 0; i < ls.rows(); ++i) {
    auto row = ls.row(i);
    const Scalar m = row.maxCoeff();
    const Scalar lse = std::log((row.array() - m).exp().sum()) + m;
    row = (row.array() - lse).matrix();
  }
  Scalar total = 0;
  for (Eigen::Index i = 0; i < ls.rows(); ++i) total -= ls(i, labels[static_cast<std::size_t>(i)]);
  Mat<Scalar> v(1, 1);
  v(0, 0) = total / static_cast<Scalar>(ls.rows());
  return detail::make_op<Scalar>(
      std::move(v), {logits},
      [ls = std::move(ls), labels](TensorNode<Scalar>& n) {
        const Scalar g = n.pending(0, 0) / static_cast<Scalar>(ls.rows());
        Mat<Scalar> d = ls.array().exp().matrix();
        for (Eigen::Index i = 0; i < d.rows(); ++i)
          d(i, labels[static_cast<std::size_t>(i)]) -= Scalar(1);
        detail::acc(*n.parents[0], (d * g).eval());
      });
}

// ---- normalized similarity ----

inline constexpr double kCosineEps = 1e-12;

// rows scaled to unit norm; eps added to norms keeps zero rows finite
template <class Scalar>
Tensor<Scalar> normalize_rows(const Tensor<Scalar>& x, Scalar eps = Scalar(kCosineEps)) {
  Mat<Scalar> norms = x.value().rowwise().norm();
  Mat<Scalar> v = (x.value().array().colwise() / (norms.col(0).array() + eps)).matrix();
  return detail::make_op<Scalar>(
      std::move(v), {x}, [norms = std::move(norms), eps](TensorNode<Scalar>& n) {
        const auto& xv = n.parents[0]->value;
        Mat<Scalar> d(xv.rows(), xv.cols());
        for (Eigen::Index i = 0; i < xv.rows(); ++i) {
          const Scalar r = norms(i, 0);
          const Scalar re = r + eps;
          const Scalar coef =
              n.pending.row(i).dot(xv.row(i)) / ((r > Scalar(0) ? r : Scalar(1)) * re * re);
          d.row(i) = n.pending.row(i) / re - xv.row(i) * coef;
        }
        detail::acc(*n.parents[0], d);
      });
}

// per-row cosine similarity of two equally shaped matrices -> [n x 1]
template <class Scalar>
Tensor<Scalar> cosine_rows(const Tensor<Scalar>& a, const Tensor<Scalar>& b,
                           Scalar eps = Scalar(kCosineEps)) {
  detail::check_same_shape(a, b, "cosine_rows");
  const auto n_rows = a.rows();
  Mat<Scalar> v(n_rows, 1);
  for (Eigen::Index i = 0; i < n_rows; ++i) {
    const Scalar na = a.value().row(i).norm() + eps;
    const Scalar nb = b.value().row(i).norm() + eps;
    v(i, 0) = a.value().row(i).dot(b.value().row(i)) / (na * nb);
  }
  return detail::make_op<Scalar>(std::move(v), {a, b}, [eps](TensorNode<Scalar>& n) {
    const auto& av = n.parents[0]->value;
    const auto& bv = n.parents[1]->value;
    Mat<Scalar> da(av.rows(), av.cols()), db(av.rows(), av.cols());
    for (Eigen::Index i = 0; i < av.rows(); ++i) {
      const Scalar ra = av.row(i).norm();
      const Scalar rb = bv.row(i).norm();
      const Scalar na = ra + eps;
      const Scalar nb = rb + eps;
      const Scalar s = av.row(i).dot(bv.row(i));
      const Scalar g = n.pending(i, 0);
      da.row(i) = g * (bv.row(i) / (na * nb) -
                       av.row(i) * (s / ((ra > Scalar(0) ? ra : Scalar(1)) * na * na * nb)));
      db.row(i) = g * (av.row(i) / (na * nb) -
                       bv.row(i) * (s / ((rb > Scalar(0) ? rb : Scalar(1)) * na * nb * nb)));
    }
    detail::acc(*n.parents[0], da);
    detail::acc(*n.parents[1], db);
  });
}

// cosine of the two matrices flattened to vectors -> [1 x 1]
template <class Scalar>
Tensor<Scalar> cosine_flat(const Tensor<Scalar>& a, const Tensor<Scalar>& b,
                           Scalar eps = Scalar(kCosineEps)) {
  detail::check_same_shape(a, b, "cosine_flat");
  const Scalar ra = a.value().norm();
  const Scalar rb = b.value().norm();
  const Scalar na = ra + eps;
  const Scalar nb = rb + eps;
  const Scalar s = a.value().cwiseProduct(b.value()).sum();
  Mat<Scalar> v(1, 1);
  v(0, 0) = s / (na * nb);
  return detail::make_op<Scalar>(std::move(v), {a, b}, [eps](TensorNode<Scalar>& n) {
    const auto& av = n.parents[0]->value;
    const auto& bv = n.parents[1]->value;
    const Scalar ra = av.norm();
    const Scalar rb = bv.norm();
    const Scalar na = ra + eps;
    const Scalar nb = rb + eps;
    const Scalar s = av.cwiseProduct(bv).sum();
    const Scalar g = n.pending(0, 0);
    Mat<Scalar> da =
        g * (bv / (na * nb) - av * (s / ((ra > Scalar(0) ? ra : Scalar(1)) * na * na * nb)));
    Mat<Scalar> db =
        g * (av / (na * nb) - bv * (s / ((rb > Scalar(0) ? rb : Scalar(1)) * na * nb * nb)));
    detail::acc(*n.parents[0], da);
    detail::acc(*n.parents[1], db);
  });
}

}  // namespace gcl
