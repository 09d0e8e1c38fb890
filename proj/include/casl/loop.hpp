#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "casl/contrastive.hpp"
#include "casl/dataset.hpp"
#include "casl/metrics.hpp"
#include "casl/proxy.hpp"
#include "casl/sampler.hpp"

namespace casl {

struct LoopConfig {
  int budget = 100;      // b, samples added per iteration
  int iterations = 10;   // T
  SamplerKind sampler = SamplerKind::kRandom;
  int candidate_cap = 10000;
  double eval_threshold = 0.5;
  EncoderConfig encoder;
  ContrastiveHyper contrastive;
  ProxyHyper proxy;
  AugmentationConfig augment;
  std::uint64_t seed = 0;  // per-run seed; streams are derived inside
};

struct BenchmarkConfig {
  int contrastive_epochs = 100;
  int proxy_epochs = 200;
  int eval_interval = 20;
};

struct LoopResult {
  std::vector<ExperimentRecord> records;
  std::vector<std::vector<int>> selected;      // ids added per iteration, in selection order
  std::vector<std::vector<double>> loss_traces;  // contrastive trace per iteration
  bool truncated = false;  // pool ran out before the full budget
  EncoderParams encoder;   // final weights
};

void validate(const LoopConfig& cfg, std::size_t unlabeled_size);

// The iterative protocol: a random seed subset, then per iteration a
// contrastive continuation on the cumulative subset, a fresh proxy fit on
// the labeled set, a test evaluation, and selection of the next batch from
// the shrinking pool by the configured strategy. Bookkeeping (disjointness,
// no re-selection, no labeled/test leakage, subset growth b(t+1)) is
// asserted on every iteration. on_iteration, when set, sees the encoder
// after each iteration's training (checkpoint hook).
LoopResult run_active_loop(
    const LoopConfig& cfg, const Dataset& ds, const Pools& pools,
    const std::function<void(int, const EncoderParams&)>& on_iteration = {});

// The full-pool reference: one contrastive run over all of U, then a single
// proxy fit with an evaluation every eval_interval epochs. Contrastive wall
// time is charged to the first record, so summing a prefix of records gives
// elapsed time to that point.
LoopResult run_benchmark(const LoopConfig& cfg, const BenchmarkConfig& bench,
                         const Dataset& ds, const Pools& pools);

}  // namespace casl
