#include "casl/adam.hpp"

#include <cmath>

#include "casl/error.hpp"

namespace casl {

Adam::Adam(AdamConfig cfg) : cfg_(cfg) {
  if (cfg_.lr <= 0.0) throw ValidationError("adam: lr must be positive");
  if (cfg_.beta1 < 0.0 || cfg_.beta1 >= 1.0 || cfg_.beta2 < 0.0 || cfg_.beta2 >= 1.0)
    throw ValidationError("adam: betas must lie in [0, 1)");
  if (cfg_.eps <= 0.0) throw ValidationError("adam: eps must be positive");
}

void Adam::step(const std::vector<Mat*>& params, const std::vector<const Mat*>& grads) {
  if (params.size() != grads.size())
    throw ContractError("adam: params and grads differ in count");
  if (t_ == 0) {
    m_.reserve(params.size());
    v_.reserve(params.size());
    for (const Mat* p : params) {
      if (p == nullptr) throw ContractError("adam: null parameter");
      m_.emplace_back(p->rows(), p->cols());
      v_.emplace_back(p->rows(), p->cols());
    }
  }
  if (params.size() != m_.size())
    throw ContractError("adam: parameter count changed between steps");

  ++t_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));

  for (std::size_t k = 0; k < params.size(); ++k) {
    Mat& p = *params[k];
    if (grads[k] == nullptr) throw ContractError("adam: null gradient");
    const Mat& g = *grads[k];
    if (!g.same_shape(p) || !m_[k].same_shape(p))
      throw ContractError("adam: shape mismatch between parameter, gradient and state");
    double* pd = p.data();
    const double* gd = g.data();
    double* md = m_[k].data();
    double* vd = v_[k].data();
    for (std::size_t i = 0; i < p.size(); ++i) {
      md[i] = cfg_.beta1 * md[i] + (1.0 - cfg_.beta1) * gd[i];
      vd[i] = cfg_.beta2 * vd[i] + (1.0 - cfg_.beta2) * gd[i] * gd[i];
      const double mhat = md[i] / bc1;
      const double vhat = vd[i] / bc2;
      pd[i] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
    }
  }
}

}  // namespace casl
