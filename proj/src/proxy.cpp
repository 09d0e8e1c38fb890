#include "casl/proxy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "casl/adam.hpp"
#include "casl/error.hpp"
#include "casl/graph.hpp"

namespace casl {

void validate(const ProxyHyper& hyper) {
  if (hyper.lr <= 0.0) throw ValidationError("proxy: learning rate must be positive");
  if (hyper.epochs < 0) throw ValidationError("proxy: epochs must be >= 0");
  if (hyper.batch_size < 1) throw ValidationError("proxy: batch_size must be >= 1");
}

Mat extract_features(const EncoderParams& encoder, const Mat& batch) {
  if (batch.rows() == 0) return Mat(0, encoder.config.feature_dim);
  return encode(encoder, batch);
}

ProxyParams init_proxy(int feature_dim, Rng& rng) {
  if (feature_dim < 1) throw ValidationError("proxy: feature_dim must be >= 1");
  ProxyParams p{Mat(feature_dim, 1), Mat(1, 1)};
  const double limit = std::sqrt(6.0 / (feature_dim + 1));
  std::uniform_real_distribution<double> u(-limit, limit);
  for (int i = 0; i < feature_dim; ++i) p.W(i, 0) = u(rng);
  return p;
}

void train_proxy_epochs(ProxyParams& proxy, Adam& opt, const Mat& features,
                        const std::vector<int>& labels, const ProxyHyper& hyper,
                        int epochs, Rng& rng) {
  validate(hyper);
  const int n = features.rows();
  if (static_cast<std::size_t>(n) != labels.size())
    throw ContractError("proxy: one label per feature row required");
  if (n < 2) throw ValidationError("proxy: need at least 2 training samples");
  if (features.cols() != proxy.W.rows())
    throw ShapeError("proxy: feature width does not match weight height");
  const bool has_pos = std::any_of(labels.begin(), labels.end(), [](int l) { return l == 1; });
  const bool has_neg = std::any_of(labels.begin(), labels.end(), [](int l) { return l == 0; });
  if (!has_pos || !has_neg)
    throw ValidationError("proxy: training labels must contain both classes");

  const int dim = features.cols();
  std::vector<int> order(static_cast<std::size_t>(n));

  for (int epoch = 0; epoch < epochs; ++epoch) {
    // Each epoch's permutation is a function of the engine state alone, so
    // splitting a run across calls cannot change the batch sequence.
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += hyper.batch_size) {
      const int bsz = static_cast<int>(
          std::min<std::size_t>(hyper.batch_size, order.size() - start));
      Mat x(bsz, dim);
      Mat y(bsz, 1);
      for (int r = 0; r < bsz; ++r) {
        const int src = order[start + r];
        for (int k = 0; k < dim; ++k) x(r, k) = features(src, k);
        y(r, 0) = labels[static_cast<std::size_t>(src)];
      }
      Graph g;
      Value w = g.param(proxy.W);
      Value b = g.param(proxy.b);
      Value logits = g.add_rowvec(g.matmul(g.constant(x), w), b);
      GradMap grads = g.backward(g.bce_with_logits(logits, y));
      opt.step({&proxy.W, &proxy.b}, {&grads.at(w.id), &grads.at(b.id)});
    }
  }
}

ProxyParams train_proxy(const Mat& features, const std::vector<int>& labels,
                        const ProxyHyper& hyper, Rng& rng) {
  validate(hyper);
  ProxyParams p = init_proxy(features.cols(), rng);
  Adam opt({hyper.lr, 0.9, 0.999, 1e-8});
  train_proxy_epochs(p, opt, features, labels, hyper, hyper.epochs, rng);
  return p;
}

Mat predict_proba(const ProxyParams& proxy, const Mat& features) {
  if (features.cols() != proxy.W.rows())
    throw ShapeError("proxy: feature width does not match weight height");
  return mat_sigmoid(mat_add_rowvec(mat_mul(features, proxy.W), proxy.b));
}

double entropy(double p) {
  if (p < 0.0 || p > 1.0) throw ValidationError("entropy: probability outside [0, 1]");
  if (p == 0.0 || p == 1.0) return 0.0;
  return -(p * std::log(p) + (1.0 - p) * std::log(1.0 - p));
}

}  // namespace casl
