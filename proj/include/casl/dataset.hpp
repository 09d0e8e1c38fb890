#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "casl/mat.hpp"
#include "casl/rng.hpp"

namespace casl {

// One synthetic patch. label 1 is the minority (positive) class.
struct Patch {
  int id = 0;
  int label = 0;
  Mat pixels;  // side x side, values in [0, 1]
};

struct DatasetSpec {
  int pool_size = 2000;
  double positive_fraction = 0.14317;
  int negative_subclusters = 8;
  int patch_side = 8;
  double cluster_separation = 1.2;
  double noise_scale = 0.03;
  std::uint64_t seed = 0;
};

struct Dataset {
  DatasetSpec spec;
  std::vector<Patch> patches;  // patches[i].id == i
};

struct AugmentationConfig {
  double noise_sigma = 0.05;
  int max_shift = 1;
  bool flip_horizontal = true;
  bool flip_vertical = true;
  bool rotate_90 = true;
  double intensity_jitter = 0.1;
};

// ids plus labels for the sets that are allowed to see labels.
struct LabeledSet {
  std::vector<int> ids;
  std::vector<int> labels;
};

struct Pools {
  std::vector<int> unlabeled_ids;  // U: ids only, no labels
  LabeledSet labeled;              // S_L
  LabeledSet test;                 // S_test
};

// Label-free view handed to everything that works on U, so label access
// stays confined to proxy training and evaluation.
class PixelPool {
 public:
  explicit PixelPool(const Dataset& ds) : ds_(&ds) {}
  const Mat& pixels(int id) const;
  int patch_side() const { return ds_->spec.patch_side; }
  int size() const { return static_cast<int>(ds_->patches.size()); }

 private:
  const Dataset* ds_;
};

// Minority/majority cluster structure: one positive prototype and
// `negative_subclusters` negative prototypes, each a radial pattern plus
// per-patch Gaussian texture noise. Deterministic per spec.seed.
Dataset generate_dataset(const DatasetSpec& spec);

int expected_positive_count(const DatasetSpec& spec);

void validate(const AugmentationConfig& cfg, int patch_side);

// One stochastic draw t ~ T applied to the pixels. Stage order: flips,
// 90-degree rotation, circular shift, intensity jitter, additive noise,
// clip to [0, 1]. Disabled stages draw nothing, so the all-off config is an
// exact identity.
Mat augment_view(const Mat& pixels, const AugmentationConfig& cfg, Rng& rng);

// Two independent draws t, t' from the same stream over one source patch.
std::pair<Mat, Mat> augment_pair(const Mat& pixels, const AugmentationConfig& cfg,
                                 Rng& rng);

// Disjoint partition of the dataset into U, S_L and S_test. The test split
// is stratified to the pool's class ratio; S_L is a plain random draw unless
// stratify_labeled is set.
Pools split_pools(const Dataset& ds, int labeled_size, int test_size,
                  std::uint64_t seed, bool stratify_labeled = false);

// Binary round-trip plus a CSV export for inspection. Layout is documented
// at the top of dataset.cpp.
void save_dataset(const Dataset& ds, const std::string& path);
Dataset load_dataset(const std::string& path);
void export_dataset_csv(const Dataset& ds, const std::string& path);

}  // namespace casl
