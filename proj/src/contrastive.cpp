#include "casl/contrastive.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>

#include "casl/error.hpp"

namespace casl {

namespace {

constexpr std::array<char, 8> kMagic = {'C', 'A', 'S', 'L', 'N', 'N', '1', '\0'};
constexpr std::uint32_t kVersion = 1;

DenseLayer glorot_layer(int in, int out, Rng& rng) {
  const double limit = std::sqrt(6.0 / (in + out));
  std::uniform_real_distribution<double> u(-limit, limit);
  DenseLayer layer{Mat(in, out), Mat(1, out)};
  for (std::size_t i = 0; i < layer.W.size(); ++i) layer.W.data()[i] = u(rng);
  return layer;
}

std::vector<int> layer_inputs(const EncoderConfig& cfg) {
  std::vector<int> dims;
  dims.push_back(cfg.input_dim);
  for (int w : cfg.hidden_dims) dims.push_back(w);
  dims.push_back(cfg.feature_dim);
  return dims;  // f layer k maps dims[k] -> dims[k+1]
}

}  // namespace

void validate(const EncoderConfig& cfg) {
  if (cfg.input_dim < 1 || cfg.feature_dim < 1)
    throw ValidationError("encoder: input_dim and feature_dim must be >= 1");
  if (cfg.hidden_dims.empty())
    throw ValidationError("encoder: at least one hidden layer required");
  for (int w : cfg.hidden_dims)
    if (w < 1) throw ValidationError("encoder: hidden widths must be >= 1");
  if (cfg.head_dims.size() != 3)
    throw ValidationError("encoder: projection head must have exactly 3 layers");
  for (int w : cfg.head_dims)
    if (w < 1) throw ValidationError("encoder: head widths must be >= 1");
}

void validate(const ContrastiveHyper& hyper) {
  if (hyper.temperature <= 0.0)
    throw ValidationError("contrastive: temperature must be positive");
  if (hyper.batch_size < 2)
    throw ValidationError("contrastive: batch_size must be >= 2");
  if (hyper.epochs < 0) throw ValidationError("contrastive: epochs must be >= 0");
  if (hyper.lr <= 0.0) throw ValidationError("contrastive: learning rate must be positive");
}

std::vector<Mat*> EncoderParams::trainable() {
  std::vector<Mat*> out;
  for (DenseLayer& l : f_layers) {
    out.push_back(&l.W);
    out.push_back(&l.b);
  }
  for (DenseLayer& l : g_layers) {
    out.push_back(&l.W);
    out.push_back(&l.b);
  }
  return out;
}

std::vector<const Mat*> EncoderParams::trainable() const {
  std::vector<const Mat*> out;
  for (const DenseLayer& l : f_layers) {
    out.push_back(&l.W);
    out.push_back(&l.b);
  }
  for (const DenseLayer& l : g_layers) {
    out.push_back(&l.W);
    out.push_back(&l.b);
  }
  return out;
}

EncoderParams init_encoder(const EncoderConfig& cfg, Rng& rng) {
  validate(cfg);
  EncoderParams p;
  p.config = cfg;
  const std::vector<int> f_dims = layer_inputs(cfg);
  for (std::size_t k = 0; k + 1 < f_dims.size(); ++k)
    p.f_layers.push_back(glorot_layer(f_dims[k], f_dims[k + 1], rng));
  int in = cfg.feature_dim;
  for (int out : cfg.head_dims) {
    p.g_layers.push_back(glorot_layer(in, out, rng));
    in = out;
  }
  return p;
}

Mat encode(const EncoderParams& params, const Mat& batch) {
  if (batch.cols() != params.config.input_dim)
    throw ShapeError("encode: batch width does not match input_dim");
  Mat x = batch;
  for (std::size_t k = 0; k < params.f_layers.size(); ++k) {
    x = mat_add_rowvec(mat_mul(x, params.f_layers[k].W), params.f_layers[k].b);
    if (k + 1 < params.f_layers.size()) x = mat_relu(x);
  }
  return x;
}

Mat project(const EncoderParams& params, const Mat& h) {
  if (h.cols() != params.config.feature_dim)
    throw ShapeError("project: input width does not match feature_dim");
  Mat x = h;
  for (std::size_t k = 0; k < params.g_layers.size(); ++k) {
    x = mat_add_rowvec(mat_mul(x, params.g_layers[k].W), params.g_layers[k].b);
    if (k + 1 < params.g_layers.size()) x = mat_relu(x);
  }
  return mat_l2_normalize_rows(x, kNormEps);
}

TrackedEncoder forward_tracked(Graph& g, EncoderParams& params, const Mat& batch) {
  if (batch.cols() != params.config.input_dim)
    throw ShapeError("encode: batch width does not match input_dim");
  TrackedEncoder t;
  std::vector<std::pair<Value, Value>> f_handles, g_handles;
  for (DenseLayer& l : params.f_layers) {
    Value w = g.param(l.W);
    Value b = g.param(l.b);
    f_handles.emplace_back(w, b);
    t.handles.push_back(w);
    t.handles.push_back(b);
  }
  for (DenseLayer& l : params.g_layers) {
    Value w = g.param(l.W);
    Value b = g.param(l.b);
    g_handles.emplace_back(w, b);
    t.handles.push_back(w);
    t.handles.push_back(b);
  }

  Value x = g.constant(batch);
  for (std::size_t k = 0; k < f_handles.size(); ++k) {
    x = g.add_rowvec(g.matmul(x, f_handles[k].first), f_handles[k].second);
    if (k + 1 < f_handles.size()) x = g.relu(x);
  }
  t.features = x;
  for (std::size_t k = 0; k < g_handles.size(); ++k) {
    x = g.add_rowvec(g.matmul(x, g_handles[k].first), g_handles[k].second);
    if (k + 1 < g_handles.size()) x = g.relu(x);
  }
  t.projections = g.l2_normalize_rows(x);
  return t;
}

Value nt_xent_loss(Graph& g, Value z, double temperature) {
  if (temperature <= 0.0)
    throw ValidationError("nt_xent: temperature must be positive");
  const Mat& zv = g.value(z);
  const int rows = zv.rows();
  if (rows < 2 || rows % 2 != 0)
    throw ContractError("nt_xent: need an even number of rows (two views per sample)");
  for (int i = 0; i < rows; ++i) {
    double sq = 0.0;
    for (int j = 0; j < zv.cols(); ++j) sq += zv(i, j) * zv(i, j);
    if (std::abs(sq - 1.0) > 2e-9)
      throw ContractError("nt_xent: rows must be unit-norm");
  }
  const int n = rows / 2;

  // Cosine similarities of unit rows, scaled by 1/tau. The diagonal is
  // masked out of the denominator; the positive partner stays in. Loss per
  // anchor is log(denominator) - log(numerator); with one sample the two
  // terms are the same expression, so the loss is exactly zero.
  Value sims = g.scale(g.matmul(z, g.transpose(z)), 1.0 / temperature);
  Value expd = g.exp_op(sims);
  Mat mask(rows, rows);
  mask.fill(1.0);
  for (int i = 0; i < rows; ++i) mask(i, i) = 0.0;
  Value denom = g.row_sum(g.cmul(expd, mask));

  std::vector<int> partner(static_cast<std::size_t>(rows));
  for (int r = 0; r < n; ++r) {
    partner[static_cast<std::size_t>(r)] = r + n;
    partner[static_cast<std::size_t>(r + n)] = r;
  }
  Value numer = g.gather_per_row(expd, partner);
  return g.mean_all(g.sub(g.log_op(denom), g.log_op(numer)));
}

Mat flatten(const Mat& pixels) {
  return Mat(1, static_cast<int>(pixels.size()), pixels.values());
}

Mat stack_rows(const PixelPool& pool, const std::vector<int>& ids) {
  if (ids.empty()) throw ContractError("stack_rows: empty id list");
  const int dim = pool.patch_side() * pool.patch_side();
  Mat out(static_cast<int>(ids.size()), dim);
  for (std::size_t r = 0; r < ids.size(); ++r) {
    const Mat& px = pool.pixels(ids[r]);
    for (int k = 0; k < dim; ++k) out(static_cast<int>(r), k) = px.data()[k];
  }
  return out;
}

std::vector<double> train_contrastive(EncoderParams& params, Adam& opt,
                                      const PixelPool& pool,
                                      const std::vector<int>& subset_ids,
                                      const ContrastiveHyper& hyper,
                                      const AugmentationConfig& aug,
                                      Rng& shuffle_rng, Rng& augment_rng) {
  validate(hyper);
  validate(aug, pool.patch_side());
  if (subset_ids.size() < 2)
    throw ValidationError("contrastive: need at least 2 samples to form a batch");

  const int input_dim = pool.patch_side() * pool.patch_side();
  std::vector<int> order = subset_ids;
  std::vector<double> trace;
  trace.reserve(static_cast<std::size_t>(hyper.epochs));

  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double epoch_loss = 0.0;
    int batches = 0;
    for (std::size_t start = 0; start < order.size(); start += hyper.batch_size) {
      const int n = static_cast<int>(
          std::min<std::size_t>(hyper.batch_size, order.size() - start));
      if (n < 2) break;  // a single leftover sample has no in-batch negative

      Mat views(2 * n, input_dim);
      for (int r = 0; r < n; ++r) {
        auto [vi, vj] = augment_pair(pool.pixels(order[start + r]), aug, augment_rng);
        for (int k = 0; k < input_dim; ++k) {
          views(r, k) = vi.data()[k];
          views(r + n, k) = vj.data()[k];
        }
      }

      Graph g;
      TrackedEncoder t = forward_tracked(g, params, views);
      Value loss = nt_xent_loss(g, t.projections, hyper.temperature);
      epoch_loss += g.value(loss)(0, 0);
      ++batches;

      GradMap grads = g.backward(loss);
      std::vector<Mat*> slots = params.trainable();
      std::vector<const Mat*> gptrs;
      gptrs.reserve(slots.size());
      for (Value h : t.handles) gptrs.push_back(&grads.at(h.id));
      opt.step(slots, gptrs);
    }
    trace.push_back(epoch_loss / batches);
  }
  return trace;
}

void save_encoder(const EncoderParams& params, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("encoder: cannot open for writing: " + path);
  auto put_u32 = [&out](std::uint32_t v) {
    unsigned char buf[4];
    for (int i = 0; i < 4; ++i) buf[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<char*>(buf), 4);
  };
  auto put_f64 = [&out](double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    unsigned char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<char*>(buf), 8);
  };

  out.write(kMagic.data(), kMagic.size());
  put_u32(kVersion);
  put_u32(static_cast<std::uint32_t>(params.config.input_dim));
  put_u32(static_cast<std::uint32_t>(params.config.hidden_dims.size()));
  for (int w : params.config.hidden_dims) put_u32(static_cast<std::uint32_t>(w));
  put_u32(static_cast<std::uint32_t>(params.config.feature_dim));
  put_u32(static_cast<std::uint32_t>(params.config.head_dims.size()));
  for (int w : params.config.head_dims) put_u32(static_cast<std::uint32_t>(w));
  for (const Mat* m : params.trainable())
    for (double v : m->values()) put_f64(v);
  if (!out) throw IoError("encoder: write failed: " + path);
}

EncoderParams load_encoder(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("encoder: cannot open: " + path);
  auto get_u32 = [&in, &path]() {
    unsigned char buf[4];
    in.read(reinterpret_cast<char*>(buf), 4);
    if (!in) throw IoError("encoder: truncated file: " + path);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(buf[i]) << (8 * i);
    return v;
  };
  auto get_f64 = [&in, &path]() {
    unsigned char buf[8];
    in.read(reinterpret_cast<char*>(buf), 8);
    if (!in) throw IoError("encoder: truncated file: " + path);
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
  };

  std::array<char, 8> magic;
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw IoError("encoder: bad magic in " + path);
  if (get_u32() != kVersion) throw IoError("encoder: unsupported version in " + path);

  EncoderConfig cfg;
  cfg.input_dim = static_cast<int>(get_u32());
  cfg.hidden_dims.resize(get_u32());
  for (int& w : cfg.hidden_dims) w = static_cast<int>(get_u32());
  cfg.feature_dim = static_cast<int>(get_u32());
  cfg.head_dims.resize(get_u32());
  for (int& w : cfg.head_dims) w = static_cast<int>(get_u32());
  validate(cfg);

  // Rebuild the layer shapes, then overwrite every value from the file.
  Rng scratch(0);
  EncoderParams params = init_encoder(cfg, scratch);
  for (Mat* m : params.trainable())
    for (std::size_t i = 0; i < m->size(); ++i) m->data()[i] = get_f64();
  return params;
}

}  // namespace casl
