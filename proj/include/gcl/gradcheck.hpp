#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "gcl/tensor.hpp"

namespace gcl {

struct GradCheckResult {
  bool ok = true;
  double max_abs_diff = 0.0;   // worst |fd - analytic|
  double max_rel_diff = 0.0;   // worst |fd - analytic| / max(|fd|, |analytic|)
  std::string worst;           // "param#/row/col" of the worst element
};

// Central finite differences against backward(). `forward` must rebuild the
// graph from the current parameter values on every call and return a scalar.
// An element passes when |fd - analytic| <= atol + rtol * max(|fd|, |analytic|).
inline GradCheckResult grad_check(const std::function<Tensord()>& forward,
                                  std::vector<Tensord> params, double h = 1e-5,
                                  double rtol = 1e-4, double atol = 1e-7) {
  GradCheckResult res;
  for (auto& p : params) p.zero_grad();
  Tensord out = forward();
  out.backward();
  std::vector<Matd> analytic;
  analytic.reserve(params.size());
  for (auto& p : params) analytic.push_back(p.grad());

  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    Matd& v = params[pi].value();
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
      for (Eigen::Index j = 0; j < v.cols(); ++j) {
        const double orig = v(i, j);
        v(i, j) = orig + h;
        const double fp = forward().value()(0, 0);
        v(i, j) = orig - h;
        const double fm = forward().value()(0, 0);
        v(i, j) = orig;
        const double fd = (fp - fm) / (2.0 * h);
        const double an = analytic[pi](i, j);
        const double diff = std::abs(fd - an);
        const double scale = std::max(std::abs(fd), std::abs(an));
        const double rel = scale > 0 ? diff / scale : 0.0;
        if (diff > res.max_abs_diff) res.max_abs_diff = diff;
        if (rel > res.max_rel_diff && diff > atol) res.max_rel_diff = rel;
        if (diff > atol + rtol * scale) {
          res.ok = false;
          if (res.worst.empty())
            res.worst = "param" + std::to_string(pi) + "/" + std::to_string(i) + "/" +
                        std::to_string(j) + " fd=" + std::to_string(fd) +
                        " analytic=" + std::to_string(an);
        }
      }
    }
  }
  return res;
}

}  // namespace gcl
