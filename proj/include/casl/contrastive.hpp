#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "casl/adam.hpp"
#include "casl/dataset.hpp"
#include "casl/graph.hpp"
#include "casl/mat.hpp"
#include "casl/rng.hpp"

namespace casl {

struct EncoderConfig {
  int input_dim = 64;                     // patch_side^2
  std::vector<int> hidden_dims = {128, 128};
  int feature_dim = 64;                   // h, what downstream consumers see
  std::vector<int> head_dims = {64, 64, 32};  // exactly three layers, last is z dim
};

struct ContrastiveHyper {
  double temperature = 0.1;
  int batch_size = 64;
  int epochs = 30;
  double lr = 1e-4;
};

struct DenseLayer {
  Mat W;  // in x out
  Mat b;  // 1 x out
};

// Encoder f (hidden layers + linear feature layer) and projection head g
// (two relu layers + linear output). The head exists only for the
// contrastive loss; downstream consumers read encode() output.
struct EncoderParams {
  EncoderConfig config;
  std::vector<DenseLayer> f_layers;
  std::vector<DenseLayer> g_layers;

  // Pointers in declaration order (W, b per layer, f before g); the order is
  // the optimizer-slot and checkpoint layout.
  std::vector<Mat*> trainable();
  std::vector<const Mat*> trainable() const;
};

void validate(const EncoderConfig& cfg);
void validate(const ContrastiveHyper& hyper);

// Glorot-uniform weights, zero biases.
EncoderParams init_encoder(const EncoderConfig& cfg, Rng& rng);

// Plain forward paths. Built from the same kernels as the tracked paths, so
// a tracked and an untracked evaluation are bit-identical.
Mat encode(const EncoderParams& params, const Mat& batch);
Mat project(const EncoderParams& params, const Mat& h);  // rows unit-norm

// Tracked forward: registers every parameter on the graph and exposes the
// handles so gradients can be routed back to the owning Mats.
struct TrackedEncoder {
  std::vector<Value> handles;  // same order as EncoderParams::trainable()
  Value features;              // h
  Value projections;           // z, unit rows
};
TrackedEncoder forward_tracked(Graph& g, EncoderParams& params, const Mat& batch);

// Mean NT-Xent over all 2N anchors. Rows of z must be unit-norm; row r < N
// pairs with row r + N. The positive similarity stays in the denominator;
// only the anchor itself is excluded.
Value nt_xent_loss(Graph& g, Value z, double temperature);

// One contrastive continuation on the subset: per epoch, shuffle, expand
// each minibatch into 2N augmented views, take an Adam step. Mutates params
// and optimizer state in place; returns the per-epoch mean loss.
std::vector<double> train_contrastive(EncoderParams& params, Adam& opt,
                                      const PixelPool& pool,
                                      const std::vector<int>& subset_ids,
                                      const ContrastiveHyper& hyper,
                                      const AugmentationConfig& aug,
                                      Rng& shuffle_rng, Rng& augment_rng);

// Flattens side x side pixels into encoder input rows.
Mat stack_rows(const PixelPool& pool, const std::vector<int>& ids);
Mat flatten(const Mat& pixels);

void save_encoder(const EncoderParams& params, const std::string& path);
EncoderParams load_encoder(const std::string& path);

}  // namespace casl
