// Dataset file layout (version 1, little-endian):
//   magic   8 bytes  "CASLDS1\0"
//   u32     version (1)
//   u32     patch_side
//   u64     patch count
//   u64     positive count
//   u64     generator seed
//   f64     positive_fraction
//   u32     negative_subclusters
//   f64     cluster_separation
//   f64     noise_scale
// then per patch: u64 id, u8 label, patch_side^2 f64 pixels row-major.

#include "casl/dataset.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>

#include "casl/error.hpp"

namespace casl {

namespace {

constexpr std::array<char, 8> kMagic = {'C', 'A', 'S', 'L', 'D', 'S', '1', '\0'};
constexpr std::uint32_t kVersion = 1;

void validate(const DatasetSpec& spec) {
  if (spec.pool_size < 10) throw ValidationError("dataset: pool_size must be >= 10");
  if (spec.positive_fraction <= 0.0 || spec.positive_fraction >= 1.0)
    throw ValidationError("dataset: positive_fraction must lie in (0, 1)");
  if (spec.negative_subclusters < 1)
    throw ValidationError("dataset: need at least one negative subcluster");
  if (spec.patch_side < 2) throw ValidationError("dataset: patch_side must be >= 2");
  if (spec.cluster_separation <= 0.0)
    throw ValidationError("dataset: cluster_separation must be positive");
  if (spec.noise_scale < 0.0)
    throw ValidationError("dataset: noise_scale must be non-negative");
}

// Radial prototype: one amplitude per integer radius bucket, unit Frobenius
// norm. Flips and 90-degree rotations fix the distance to the patch center,
// so every prototype is exactly invariant under those augmentations and the
// cluster structure survives them.
Mat radial_prototype(int side, double separation, Rng& rng) {
  const double c = (side - 1) / 2.0;
  const int max_bucket = static_cast<int>(std::lround(std::sqrt(2.0) * c)) + 1;
  std::uniform_real_distribution<double> amp(-1.0, 1.0);
  std::vector<double> bucket_amp(static_cast<std::size_t>(max_bucket) + 1);
  for (double& a : bucket_amp) a = amp(rng);

  Mat g(side, side);
  double sq = 0.0;
  for (int i = 0; i < side; ++i)
    for (int j = 0; j < side; ++j) {
      const double r = std::sqrt((i - c) * (i - c) + (j - c) * (j - c));
      const double v = bucket_amp[static_cast<std::size_t>(std::lround(r))];
      g(i, j) = v;
      sq += v * v;
    }
  const double norm = std::sqrt(sq);
  Mat proto(side, side);
  for (int i = 0; i < side; ++i)
    for (int j = 0; j < side; ++j) proto(i, j) = 0.5 + separation * g(i, j) / norm;
  return proto;
}

double clip01(double v) { return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v); }

void write_bytes(std::ofstream& out, const void* p, std::size_t n) {
  out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

template <typename T>
void write_le(std::ofstream& out, T v) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char buf[sizeof(T)];
  std::uint64_t bits = 0;
  std::memcpy(&bits, &v, sizeof(T));
  for (std::size_t i = 0; i < sizeof(T); ++i)
    buf[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xff);
  write_bytes(out, buf, sizeof(T));
}

template <typename T>
T read_le(std::ifstream& in) {
  unsigned char buf[sizeof(T)];
  in.read(reinterpret_cast<char*>(buf), sizeof(T));
  if (!in) throw IoError("dataset: truncated file");
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i)
    bits |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  T v;
  std::memcpy(&v, &bits, sizeof(T));
  return v;
}

}  // namespace

const Mat& PixelPool::pixels(int id) const {
  if (id < 0 || id >= size()) throw ContractError("pool: patch id out of range");
  return ds_->patches[static_cast<std::size_t>(id)].pixels;
}

int expected_positive_count(const DatasetSpec& spec) {
  return static_cast<int>(std::lround(spec.pool_size * spec.positive_fraction));
}

Dataset generate_dataset(const DatasetSpec& spec) {
  validate(spec);
  const int n_pos = expected_positive_count(spec);
  if (n_pos < 1 || n_pos >= spec.pool_size)
    throw ValidationError("dataset: positive_fraction leaves no room for one of the classes");

  Rng rng = make_rng(spec.seed, "data");
  Mat positive_proto = radial_prototype(spec.patch_side, spec.cluster_separation, rng);
  std::vector<Mat> negative_protos;
  negative_protos.reserve(static_cast<std::size_t>(spec.negative_subclusters));
  for (int k = 0; k < spec.negative_subclusters; ++k)
    negative_protos.push_back(
        radial_prototype(spec.patch_side, spec.cluster_separation, rng));

  // Shuffle the label sequence so ids carry no class information.
  std::vector<int> labels(static_cast<std::size_t>(spec.pool_size), 0);
  std::fill(labels.begin(), labels.begin() + n_pos, 1);
  std::shuffle(labels.begin(), labels.end(), rng);

  std::normal_distribution<double> noise(0.0, 1.0);
  std::uniform_int_distribution<int> sub(0, spec.negative_subclusters - 1);

  Dataset ds;
  ds.spec = spec;
  ds.patches.reserve(labels.size());
  for (int id = 0; id < spec.pool_size; ++id) {
    const int label = labels[static_cast<std::size_t>(id)];
    const Mat& proto = label == 1 ? positive_proto
                                  : negative_protos[static_cast<std::size_t>(sub(rng))];
    Mat px(spec.patch_side, spec.patch_side);
    for (int i = 0; i < spec.patch_side; ++i)
      for (int j = 0; j < spec.patch_side; ++j)
        px(i, j) = clip01(proto(i, j) + spec.noise_scale * noise(rng));
    ds.patches.push_back(Patch{id, label, std::move(px)});
  }
  return ds;
}

void validate(const AugmentationConfig& cfg, int patch_side) {
  if (cfg.noise_sigma < 0.0 || cfg.intensity_jitter < 0.0 || cfg.max_shift < 0)
    throw ValidationError("augment: magnitudes must be non-negative");
  if (cfg.intensity_jitter > 1.0)
    throw ValidationError("augment: intensity_jitter above 1 flips intensities");
  if (cfg.max_shift >= patch_side)
    throw ValidationError("augment: max_shift must be smaller than patch_side");
}

Mat augment_view(const Mat& pixels, const AugmentationConfig& cfg, Rng& rng) {
  const int side = pixels.rows();
  Mat out = pixels;

  std::bernoulli_distribution coin(0.5);
  if (cfg.flip_horizontal && coin(rng)) {
    for (int i = 0; i < side; ++i)
      for (int j = 0; j < side / 2; ++j) std::swap(out(i, j), out(i, side - 1 - j));
  }
  if (cfg.flip_vertical && coin(rng)) {
    for (int i = 0; i < side / 2; ++i)
      for (int j = 0; j < side; ++j) std::swap(out(i, j), out(side - 1 - i, j));
  }
  if (cfg.rotate_90) {
    std::uniform_int_distribution<int> rot(0, 2);  // none, +90, -90
    const int r = rot(rng);
    if (r != 0) {
      Mat rotated(side, side);
      for (int i = 0; i < side; ++i)
        for (int j = 0; j < side; ++j) {
          if (r == 1)
            rotated(j, side - 1 - i) = out(i, j);
          else
            rotated(side - 1 - j, i) = out(i, j);
        }
      out = std::move(rotated);
    }
  }
  if (cfg.max_shift > 0) {
    std::uniform_int_distribution<int> shift(-cfg.max_shift, cfg.max_shift);
    const int di = shift(rng);
    const int dj = shift(rng);
    if (di != 0 || dj != 0) {
      Mat shifted(side, side);
      for (int i = 0; i < side; ++i)
        for (int j = 0; j < side; ++j)
          shifted(((i + di) % side + side) % side, ((j + dj) % side + side) % side) =
              out(i, j);
      out = std::move(shifted);
    }
  }
  if (cfg.intensity_jitter > 0.0) {
    std::uniform_real_distribution<double> jit(-cfg.intensity_jitter,
                                               cfg.intensity_jitter);
    const double f = 1.0 + jit(rng);
    for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] *= f;
  }
  if (cfg.noise_sigma > 0.0) {
    std::normal_distribution<double> noise(0.0, cfg.noise_sigma);
    for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] += noise(rng);
  }
  if (cfg.intensity_jitter > 0.0 || cfg.noise_sigma > 0.0) {
    for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] = clip01(out.data()[i]);
  }
  return out;
}

std::pair<Mat, Mat> augment_pair(const Mat& pixels, const AugmentationConfig& cfg,
                                 Rng& rng) {
  Mat a = augment_view(pixels, cfg, rng);
  Mat b = augment_view(pixels, cfg, rng);
  return {std::move(a), std::move(b)};
}

Pools split_pools(const Dataset& ds, int labeled_size, int test_size,
                  std::uint64_t seed, bool stratify_labeled) {
  const int n = static_cast<int>(ds.patches.size());
  if (labeled_size < 1) throw ValidationError("split: labeled_size must be >= 1");
  if (test_size < 1) throw ValidationError("split: test_size must be >= 1");
  if (labeled_size + test_size >= n)
    throw ValidationError("split: labeled_size + test_size must leave a non-empty pool");

  std::vector<int> pos_ids, neg_ids;
  for (const Patch& p : ds.patches)
    (p.label == 1 ? pos_ids : neg_ids).push_back(p.id);

  Rng rng = make_rng(seed, "split");
  std::shuffle(pos_ids.begin(), pos_ids.end(), rng);
  std::shuffle(neg_ids.begin(), neg_ids.end(), rng);

  const double pool_ratio = static_cast<double>(pos_ids.size()) / n;
  auto take_stratified = [&](int count, std::size_t& pos_used, std::size_t& neg_used) {
    const int want_pos = static_cast<int>(std::lround(count * pool_ratio));
    if (pos_used + want_pos > pos_ids.size() ||
        neg_used + (count - want_pos) > neg_ids.size())
      throw ValidationError("split: not enough samples of one class for a stratified draw");
    std::vector<int> ids;
    ids.reserve(static_cast<std::size_t>(count));
    for (int k = 0; k < want_pos; ++k) ids.push_back(pos_ids[pos_used++]);
    for (int k = 0; k < count - want_pos; ++k) ids.push_back(neg_ids[neg_used++]);
    std::shuffle(ids.begin(), ids.end(), rng);
    return ids;
  };

  std::size_t pos_used = 0, neg_used = 0;
  std::vector<int> test_ids = take_stratified(test_size, pos_used, neg_used);

  std::vector<int> rest;
  rest.reserve(static_cast<std::size_t>(n - test_size));
  for (std::size_t k = pos_used; k < pos_ids.size(); ++k) rest.push_back(pos_ids[k]);
  for (std::size_t k = neg_used; k < neg_ids.size(); ++k) rest.push_back(neg_ids[k]);
  std::shuffle(rest.begin(), rest.end(), rng);

  std::vector<int> labeled_ids;
  if (stratify_labeled) {
    labeled_ids = take_stratified(labeled_size, pos_used, neg_used);
    // Rebuild the remainder, since take_stratified consumed from the class lists.
    rest.clear();
    for (std::size_t k = pos_used; k < pos_ids.size(); ++k) rest.push_back(pos_ids[k]);
    for (std::size_t k = neg_used; k < neg_ids.size(); ++k) rest.push_back(neg_ids[k]);
    std::shuffle(rest.begin(), rest.end(), rng);
  } else {
    labeled_ids.assign(rest.begin(), rest.begin() + labeled_size);
    rest.erase(rest.begin(), rest.begin() + labeled_size);
  }

  Pools pools;
  pools.unlabeled_ids = std::move(rest);
  std::sort(pools.unlabeled_ids.begin(), pools.unlabeled_ids.end());
  auto fill_labeled = [&ds](const std::vector<int>& ids) {
    LabeledSet s;
    s.ids = ids;
    std::sort(s.ids.begin(), s.ids.end());
    s.labels.reserve(s.ids.size());
    for (int id : s.ids) s.labels.push_back(ds.patches[static_cast<std::size_t>(id)].label);
    return s;
  };
  pools.labeled = fill_labeled(labeled_ids);
  pools.test = fill_labeled(test_ids);
  return pools;
}

void save_dataset(const Dataset& ds, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("dataset: cannot open for writing: " + path);
  write_bytes(out, kMagic.data(), kMagic.size());
  write_le<std::uint32_t>(out, kVersion);
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(ds.spec.patch_side));
  write_le<std::uint64_t>(out, ds.patches.size());
  std::uint64_t n_pos = 0;
  for (const Patch& p : ds.patches) n_pos += p.label == 1 ? 1 : 0;
  write_le<std::uint64_t>(out, n_pos);
  write_le<std::uint64_t>(out, ds.spec.seed);
  write_le<double>(out, ds.spec.positive_fraction);
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(ds.spec.negative_subclusters));
  write_le<double>(out, ds.spec.cluster_separation);
  write_le<double>(out, ds.spec.noise_scale);
  for (const Patch& p : ds.patches) {
    write_le<std::uint64_t>(out, static_cast<std::uint64_t>(p.id));
    const unsigned char label = static_cast<unsigned char>(p.label);
    write_bytes(out, &label, 1);
    for (double v : p.pixels.values()) write_le<double>(out, v);
  }
  if (!out) throw IoError("dataset: write failed: " + path);
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("dataset: cannot open: " + path);
  std::array<char, 8> magic;
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw IoError("dataset: bad magic in " + path);
  if (read_le<std::uint32_t>(in) != kVersion)
    throw IoError("dataset: unsupported version in " + path);

  Dataset ds;
  ds.spec.patch_side = static_cast<int>(read_le<std::uint32_t>(in));
  const std::uint64_t count = read_le<std::uint64_t>(in);
  read_le<std::uint64_t>(in);  // positive count, re-derived from patches
  ds.spec.seed = read_le<std::uint64_t>(in);
  ds.spec.positive_fraction = read_le<double>(in);
  ds.spec.negative_subclusters = static_cast<int>(read_le<std::uint32_t>(in));
  ds.spec.cluster_separation = read_le<double>(in);
  ds.spec.noise_scale = read_le<double>(in);
  ds.spec.pool_size = static_cast<int>(count);

  const int side = ds.spec.patch_side;
  ds.patches.reserve(count);
  for (std::uint64_t k = 0; k < count; ++k) {
    Patch p;
    p.id = static_cast<int>(read_le<std::uint64_t>(in));
    unsigned char label;
    in.read(reinterpret_cast<char*>(&label), 1);
    if (!in) throw IoError("dataset: truncated file");
    p.label = label;
    std::vector<double> px(static_cast<std::size_t>(side) * side);
    for (double& v : px) v = read_le<double>(in);
    p.pixels = Mat(side, side, std::move(px));
    ds.patches.push_back(std::move(p));
  }
  return ds;
}

void export_dataset_csv(const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("dataset: cannot open for writing: " + path);
  const int side = ds.spec.patch_side;
  out << "id,label";
  for (int k = 0; k < side * side; ++k) out << ",px" << k;
  out << "\n";
  out.precision(17);
  for (const Patch& p : ds.patches) {
    out << p.id << "," << p.label;
    for (double v : p.pixels.values()) out << "," << v;
    out << "\n";
  }
  if (!out) throw IoError("dataset: write failed: " + path);
}

}  // namespace casl
