#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "casl/dataset.hpp"
#include "casl/loop.hpp"
#include "casl/sampler.hpp"

namespace casl {

// Everything one experiment needs, filled by a named profile and overridden
// key by key. "desk" runs in minutes on a laptop; "paper" carries the
// original protocol's sizes.
struct RunConfig {
  std::string profile = "desk";
  std::uint64_t seed = 42;
  std::string output_dir = "out";
  std::vector<SamplerKind> strategies = {SamplerKind::kRandom,
                                         SamplerKind::kUncertainty,
                                         SamplerKind::kCoreset};
  int repetitions = 3;
  bool with_benchmark = true;
  bool checkpoints = false;

  std::string dataset_path;  // when set, load this file instead of generating
  DatasetSpec dataset;
  int labeled_size = 200;
  int test_size = 500;
  bool stratify_labeled = false;

  AugmentationConfig augment;
  EncoderConfig encoder;  // input_dim always patch_side^2, not a key
  ContrastiveHyper contrastive;
  ProxyHyper proxy;

  int budget = 100;
  int iterations = 10;
  int candidate_cap = 10000;
  double eval_threshold = 0.5;
  BenchmarkConfig benchmark;
};

RunConfig default_config(const std::string& profile);

// Text format: one `key = value` per line, '#' comments, unknown keys are
// errors that name the key. parse(emit(c)) reproduces c exactly.
RunConfig parse_config_text(const std::string& text, const std::string& profile);
RunConfig parse_config_file(const std::string& path, const std::string& profile);
void apply_override(RunConfig& cfg, const std::string& key, const std::string& value);
std::string emit_config(const RunConfig& cfg);

void validate(const RunConfig& cfg);

// The per-run LoopConfig for one strategy and repetition seed.
LoopConfig loop_config(const RunConfig& cfg, SamplerKind kind, std::uint64_t run_seed);

}  // namespace casl
