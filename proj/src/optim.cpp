#include "gcl/optim.hpp"

#include <cmath>

namespace gcl {

Adam::Adam(std::vector<Tensord> params, AdamConfig cfg) : params_(std::move(params)), cfg_(cfg) {
  m_.reserve(params_.size());
  v_.reserve(params_.size());
  for (const auto& p : params_) {
    m_.push_back(Matd::Zero(p.rows(), p.cols()));
    v_.push_back(Matd::Zero(p.rows(), p.cols()));
  }
}

Adam::Adam(const ParamRegistry& reg, AdamConfig cfg) : Adam(reg.tensors(), cfg) {}

void Adam::step() {
  ++t_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params_.size(); ++i) {
    const Matd g = params_[i].grad();
    m_[i] = cfg_.beta1 * m_[i] + (1.0 - cfg_.beta1) * g;
    v_[i] = cfg_.beta2 * v_[i] + (1.0 - cfg_.beta2) * g.cwiseProduct(g);
    const Matd mhat = m_[i] / bc1;
    const Matd vhat = v_[i] / bc2;
    params_[i].value().array() -=
        cfg_.lr * mhat.array() / (vhat.array().sqrt() + cfg_.eps);
  }
}

void Adam::zero_grad() {
  for (auto& p : params_) p.zero_grad();
}

}  // namespace gcl
