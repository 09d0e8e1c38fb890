#pragma once

#include <vector>

#include "casl/mat.hpp"

namespace casl {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Adam with bias correction. State (first and second moment) is keyed by
// slot: slot i of every step() call must refer to the same parameter for the
// lifetime of the optimizer.
class Adam {
 public:
  explicit Adam(AdamConfig cfg);

  // Applies one update in place. Sizes and shapes are checked; moments are
  // allocated on the first call.
  void step(const std::vector<Mat*>& params, const std::vector<const Mat*>& grads);

  long steps_taken() const { return t_; }
  const AdamConfig& config() const { return cfg_; }

 private:
  AdamConfig cfg_;
  long t_ = 0;
  std::vector<Mat> m_;
  std::vector<Mat> v_;
};

}  // namespace casl
