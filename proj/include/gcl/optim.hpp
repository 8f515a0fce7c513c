#pragma once

#include <vector>

#include "gcl/nn.hpp"
#include "gcl/tensor.hpp"

namespace gcl {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Adam with bias correction. Parameters without a gradient are treated as
// having a zero gradient; moment state persists across steps.
class Adam {
 public:
  explicit Adam(std::vector<Tensord> params, AdamConfig cfg = {});
  Adam(const ParamRegistry& reg, AdamConfig cfg = {});

  void step();
  void zero_grad();
  long steps_taken() const { return t_; }

 private:
  std::vector<Tensord> params_;
  std::vector<Matd> m_, v_;
  AdamConfig cfg_;
  long t_ = 0;
};

}  // namespace gcl
