#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "casl/dataset.hpp"
#include "casl/error.hpp"
#include "doctest.h"

using namespace casl;

namespace {

DatasetSpec small_spec(std::uint64_t seed) {
  DatasetSpec spec;
  spec.pool_size = 300;
  spec.patch_side = 8;
  spec.seed = seed;
  return spec;
}

bool mats_equal(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a.values()[i] != b.values()[i]) return false;
  return true;
}

}  // namespace

TEST_CASE("generate_dataset is deterministic per seed") {
  const Dataset a = generate_dataset(small_spec(11));
  const Dataset b = generate_dataset(small_spec(11));
  const Dataset c = generate_dataset(small_spec(12));
  REQUIRE(a.patches.size() == 300);
  bool all_equal = true;
  bool any_diff_c = false;
  for (std::size_t i = 0; i < a.patches.size(); ++i) {
    all_equal = all_equal && a.patches[i].label == b.patches[i].label &&
                mats_equal(a.patches[i].pixels, b.patches[i].pixels);
    any_diff_c = any_diff_c || !mats_equal(a.patches[i].pixels, c.patches[i].pixels);
  }
  CHECK(all_equal);
  CHECK(any_diff_c);
}

TEST_CASE("positive count follows the configured fraction") {
  DatasetSpec spec = small_spec(3);

  SUBCASE("rounded, not truncated") {
    spec.pool_size = 1000;
    spec.positive_fraction = 0.14317;
    CHECK(expected_positive_count(spec) == 143);
    spec.pool_size = 100;
    CHECK(expected_positive_count(spec) == 14);
    spec.pool_size = 2000;
    CHECK(expected_positive_count(spec) == 286);
  }

  SUBCASE("dataset matches the count exactly") {
    spec.pool_size = 500;
    const Dataset ds = generate_dataset(spec);
    int positives = 0;
    for (const Patch& p : ds.patches) positives += p.label;
    CHECK(positives == expected_positive_count(spec));
  }

  SUBCASE("ids are the position and labels are shuffled") {
    const Dataset ds = generate_dataset(spec);
    for (int i = 0; i < static_cast<int>(ds.patches.size()); ++i)
      REQUIRE(ds.patches[i].id == i);
    // A sorted label vector would put all positives at one end; the shuffle
    // makes a run of 50 identical labels at the front astronomically
    // unlikely.
    int front_run = 1;
    for (int i = 1; i < 50; ++i)
      front_run += (ds.patches[i].label == ds.patches[0].label) ? 1 : 0;
    CHECK(front_run < 50);
  }
}

TEST_CASE("pixels stay inside the unit interval") {
  DatasetSpec spec = small_spec(4);
  spec.noise_scale = 0.8;  // force heavy clipping
  const Dataset ds = generate_dataset(spec);
  double lo = 1.0, hi = 0.0;
  for (const Patch& p : ds.patches)
    for (double v : p.pixels.values()) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  CHECK(lo >= 0.0);
  CHECK(hi <= 1.0);
}

TEST_CASE("class prototypes actually separate") {
  // Mean pixel distance between a positive and a negative patch should beat
  // the within-class distance, otherwise downstream learning is hopeless.
  const Dataset ds = generate_dataset(small_spec(5));
  Mat pos_mean(8, 8), neg_mean(8, 8);
  int npos = 0, nneg = 0;
  for (const Patch& p : ds.patches) {
    Mat& acc = p.label == 1 ? pos_mean : neg_mean;
    (p.label == 1 ? npos : nneg) += 1;
    for (std::size_t i = 0; i < acc.size(); ++i) acc.data()[i] += p.pixels.values()[i];
  }
  REQUIRE(npos > 0);
  REQUIRE(nneg > 0);
  double gap = 0.0;
  for (std::size_t i = 0; i < pos_mean.size(); ++i) {
    const double d = pos_mean.values()[i] / npos - neg_mean.values()[i] / nneg;
    gap += d * d;
  }
  CHECK(std::sqrt(gap) > 0.05);
}

TEST_CASE("augment_view with everything disabled is the identity") {
  AugmentationConfig cfg;
  cfg.noise_sigma = 0.0;
  cfg.max_shift = 0;
  cfg.flip_horizontal = false;
  cfg.flip_vertical = false;
  cfg.rotate_90 = false;
  cfg.intensity_jitter = 0.0;

  const Dataset ds = generate_dataset(small_spec(6));
  Rng rng = make_rng(6, "augment", 0);
  const Mat out = augment_view(ds.patches[0].pixels, cfg, rng);
  CHECK(mats_equal(out, ds.patches[0].pixels));
}

TEST_CASE("augment_view is deterministic given the stream state") {
  const Dataset ds = generate_dataset(small_spec(7));
  AugmentationConfig cfg;
  Rng r1 = make_rng(7, "augment", 3);
  Rng r2 = make_rng(7, "augment", 3);
  const Mat a = augment_view(ds.patches[5].pixels, cfg, r1);
  const Mat b = augment_view(ds.patches[5].pixels, cfg, r2);
  CHECK(mats_equal(a, b));
}

TEST_CASE("augment_view output stays clipped") {
  AugmentationConfig cfg;
  cfg.noise_sigma = 0.9;
  cfg.intensity_jitter = 0.9;
  const Dataset ds = generate_dataset(small_spec(8));
  Rng rng = make_rng(8, "augment", 0);
  double lo = 1.0, hi = 0.0;
  for (int k = 0; k < 40; ++k) {
    const Mat v = augment_view(ds.patches[k].pixels, cfg, rng);
    for (double x : v.values()) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
  }
  CHECK(lo >= 0.0);
  CHECK(hi <= 1.0);
}

TEST_CASE("augment_pair draws two distinct views") {
  const Dataset ds = generate_dataset(small_spec(9));
  AugmentationConfig cfg;
  Rng rng = make_rng(9, "augment", 0);
  int distinct = 0;
  for (int k = 0; k < 20; ++k) {
    const auto [v1, v2] = augment_pair(ds.patches[k].pixels, cfg, rng);
    if (!mats_equal(v1, v2)) ++distinct;
  }
  // Identical draws are possible but should be rare with noise enabled.
  CHECK(distinct >= 19);
}

TEST_CASE("augmentation validation rejects bad ranges") {
  AugmentationConfig cfg;
  cfg.max_shift = 9;
  CHECK_THROWS_AS(validate(cfg, 8), ValidationError);
  cfg = AugmentationConfig{};
  cfg.noise_sigma = -0.1;
  CHECK_THROWS_AS(validate(cfg, 8), ValidationError);
  cfg = AugmentationConfig{};
  cfg.intensity_jitter = 1.5;
  CHECK_THROWS_AS(validate(cfg, 8), ValidationError);
}

TEST_CASE("split_pools partitions without overlap or loss") {
  const Dataset ds = generate_dataset(small_spec(10));
  const Pools pools = split_pools(ds, 40, 60, 10);
  CHECK(pools.labeled.ids.size() == 40);
  CHECK(pools.test.ids.size() == 60);
  CHECK(pools.unlabeled_ids.size() == 200);

  std::set<int> seen;
  for (int id : pools.unlabeled_ids) seen.insert(id);
  for (int id : pools.labeled.ids) seen.insert(id);
  for (int id : pools.test.ids) seen.insert(id);
  CHECK(seen.size() == 300);
  CHECK(*seen.begin() == 0);
  CHECK(*seen.rbegin() == 299);

  CHECK(std::is_sorted(pools.unlabeled_ids.begin(), pools.unlabeled_ids.end()));
  CHECK(std::is_sorted(pools.labeled.ids.begin(), pools.labeled.ids.end()));
  CHECK(std::is_sorted(pools.test.ids.begin(), pools.test.ids.end()));

  for (std::size_t i = 0; i < pools.labeled.ids.size(); ++i)
    REQUIRE(pools.labeled.labels[i] == ds.patches[pools.labeled.ids[i]].label);
  for (std::size_t i = 0; i < pools.test.ids.size(); ++i)
    REQUIRE(pools.test.labels[i] == ds.patches[pools.test.ids[i]].label);
}

TEST_CASE("test split is stratified to the pool ratio") {
  DatasetSpec spec = small_spec(11);
  spec.pool_size = 1000;
  spec.positive_fraction = 0.2;
  const Dataset ds = generate_dataset(spec);
  const Pools pools = split_pools(ds, 100, 200, 11);
  int pos = 0;
  for (int l : pools.test.labels) pos += l;
  const double ratio = static_cast<double>(pos) / 200.0;
  CHECK(ratio == doctest::Approx(0.2).epsilon(0.15));  // exact up to rounding
}

TEST_CASE("stratified labeled split carries both classes at small sizes") {
  DatasetSpec spec = small_spec(12);
  spec.pool_size = 1000;
  spec.positive_fraction = 0.05;
  const Dataset ds = generate_dataset(spec);
  const Pools pools = split_pools(ds, 20, 100, 12, true);
  int pos = 0;
  for (int l : pools.labeled.labels) pos += l;
  CHECK(pos >= 1);
  CHECK(pos <= 19);
}

TEST_CASE("split is deterministic per seed and independent draws differ") {
  const Dataset ds = generate_dataset(small_spec(13));
  const Pools a = split_pools(ds, 30, 50, 13);
  const Pools b = split_pools(ds, 30, 50, 13);
  const Pools c = split_pools(ds, 30, 50, 14);
  CHECK(a.unlabeled_ids == b.unlabeled_ids);
  CHECK(a.labeled.ids == b.labeled.ids);
  CHECK(a.test.ids == b.test.ids);
  CHECK(a.test.ids != c.test.ids);
}

TEST_CASE("split_pools validates sizes") {
  const Dataset ds = generate_dataset(small_spec(14));
  CHECK_THROWS_AS(split_pools(ds, 200, 100, 1), ValidationError);  // nothing left
  CHECK_THROWS_AS(split_pools(ds, 0, 50, 1), ValidationError);
  CHECK_THROWS_AS(split_pools(ds, 50, 0, 1), ValidationError);
}

TEST_CASE("dataset round-trips through the binary format") {
  const Dataset ds = generate_dataset(small_spec(15));
  const std::string path = "/tmp/casl_test_dataset.bin";
  save_dataset(ds, path);
  const Dataset back = load_dataset(path);
  std::remove(path.c_str());

  REQUIRE(back.patches.size() == ds.patches.size());
  CHECK(back.spec.pool_size == ds.spec.pool_size);
  CHECK(back.spec.positive_fraction == ds.spec.positive_fraction);
  CHECK(back.spec.seed == ds.spec.seed);
  CHECK(back.spec.patch_side == ds.spec.patch_side);
  bool identical = true;
  for (std::size_t i = 0; i < ds.patches.size(); ++i)
    identical = identical && back.patches[i].id == ds.patches[i].id &&
                back.patches[i].label == ds.patches[i].label &&
                mats_equal(back.patches[i].pixels, ds.patches[i].pixels);
  CHECK(identical);
}

TEST_CASE("load_dataset rejects garbage") {
  const std::string path = "/tmp/casl_test_garbage.bin";
  std::FILE* f = std::fopen(path.c_str(), "wb");
  REQUIRE(f);
  std::fputs("not a dataset", f);
  std::fclose(f);
  CHECK_THROWS_AS(load_dataset(path), IoError);
  std::remove(path.c_str());
  CHECK_THROWS_AS(load_dataset("/tmp/casl_definitely_missing.bin"), IoError);
}
