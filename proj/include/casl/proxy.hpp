#pragma once

#include <vector>

#include "casl/adam.hpp"
#include "casl/contrastive.hpp"
#include "casl/mat.hpp"
#include "casl/rng.hpp"

namespace casl {

struct ProxyHyper {
  double lr = 1e-3;
  int epochs = 40;
  // Plain SGD-style single-sample batches: with |S_L| around 200 the 40-epoch
  // budget otherwise supplies too few optimizer steps to move a fresh head.
  int batch_size = 1;
};

// One linear layer with a sigmoid output. Ephemeral: recreated from random
// weights at every active iteration.
struct ProxyParams {
  Mat W;  // feature_dim x 1
  Mat b;  // 1 x 1
};

void validate(const ProxyHyper& hyper);

// Frozen encoder features; exactly encode(), no projection head, no
// gradients flowing back into the encoder.
Mat extract_features(const EncoderParams& encoder, const Mat& batch);

ProxyParams init_proxy(int feature_dim, Rng& rng);

// Continues BCE training on minibatches for `epochs` more epochs; the
// optimizer carries moment state across calls. Both classes must be present:
// with one class BCE fixes no ranking among the absent class.
void train_proxy_epochs(ProxyParams& proxy, Adam& opt, const Mat& features,
                        const std::vector<int>& labels, const ProxyHyper& hyper,
                        int epochs, Rng& rng);

// Fresh Glorot init plus hyper.epochs of training: the per-iteration
// protocol, never warm-started.
ProxyParams train_proxy(const Mat& features, const std::vector<int>& labels,
                        const ProxyHyper& hyper, Rng& rng);

// sigmoid(features W + b), one probability per row, each in (0, 1).
Mat predict_proba(const ProxyParams& proxy, const Mat& features);

// Shannon entropy of a binary distribution {p, 1-p}, natural log,
// 0 log 0 == 0. Scores rank by uncertainty, maximal at p = 0.5.
double entropy(double p);

}  // namespace casl
