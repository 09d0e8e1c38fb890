#include "casl/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_set>

#include "casl/error.hpp"

namespace casl {

SamplerKind sampler_from_name(const std::string& name) {
  if (name == "random") return SamplerKind::kRandom;
  if (name == "uncertainty") return SamplerKind::kUncertainty;
  if (name == "coreset") return SamplerKind::kCoreset;
  throw ValidationError("sampler: unknown strategy '" + name +
                        "' (expected random, uncertainty or coreset)");
}

std::string sampler_name(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::kRandom: return "random";
    case SamplerKind::kUncertainty: return "uncertainty";
    case SamplerKind::kCoreset: return "coreset";
  }
  throw ContractError("sampler: invalid kind");
}

std::vector<int> subsample_candidates(const std::vector<int>& pool_ids, int cap,
                                      Rng& rng) {
  if (cap < 1) throw ValidationError("sampler: candidate cap must be >= 1");
  std::vector<int> ids = pool_ids;
  if (static_cast<std::size_t>(cap) < ids.size()) {
    std::shuffle(ids.begin(), ids.end(), rng);
    ids.resize(static_cast<std::size_t>(cap));
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::vector<int> sample_random(const std::vector<int>& candidate_ids, int b, Rng& rng) {
  if (b < 1) throw ValidationError("sampler: budget must be >= 1");
  std::vector<int> ids = candidate_ids;
  if (static_cast<std::size_t>(b) < ids.size()) {
    std::shuffle(ids.begin(), ids.end(), rng);
    ids.resize(static_cast<std::size_t>(b));
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::vector<int> sample_uncertainty(const std::vector<int>& candidate_ids,
                                    const std::vector<double>& scores, int b) {
  if (b < 1) throw ValidationError("sampler: budget must be >= 1");
  if (scores.size() != candidate_ids.size())
    throw ContractError("sampler: one score per candidate required");
  for (double s : scores)
    if (!std::isfinite(s)) throw ContractError("sampler: scores must be finite");

  std::vector<std::size_t> idx(candidate_ids.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t c) {
    if (scores[a] != scores[c]) return scores[a] > scores[c];
    return candidate_ids[a] < candidate_ids[c];
  });
  const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(b), idx.size());
  std::vector<int> out;
  out.reserve(take);
  for (std::size_t k = 0; k < take; ++k) out.push_back(candidate_ids[idx[k]]);
  return out;
}

namespace {

double euclidean(const Mat& a, int ra, const Mat& b, int rb) {
  double sq = 0.0;
  for (int j = 0; j < a.cols(); ++j) {
    const double d = a(ra, j) - b(rb, j);
    sq += d * d;
  }
  return std::sqrt(sq);
}

}  // namespace

std::vector<int> k_center_greedy(const std::vector<int>& candidate_ids,
                                 const Mat& candidate_features,
                                 const Mat& base_features, int b) {
  if (b < 1) throw ValidationError("sampler: budget must be >= 1");
  if (candidate_ids.empty()) return {};
  if (static_cast<std::size_t>(candidate_features.rows()) != candidate_ids.size())
    throw ContractError("sampler: one feature row per candidate required");
  if (base_features.rows() == 0)
    throw ContractError("sampler: coreset needs a non-empty selected set");
  if (base_features.cols() != candidate_features.cols())
    throw ShapeError("sampler: candidate and base feature widths differ");
  {
    std::unordered_set<int> seen(candidate_ids.begin(), candidate_ids.end());
    if (seen.size() != candidate_ids.size())
      throw ContractError("sampler: candidate ids must be unique");
  }

  const std::size_t n = candidate_ids.size();
  std::vector<double> min_dist(n);
  for (std::size_t i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (int r = 0; r < base_features.rows(); ++r)
      best = std::min(best,
                      euclidean(candidate_features, static_cast<int>(i), base_features, r));
    min_dist[i] = best;
  }

  std::vector<bool> taken(n, false);
  std::vector<int> out;
  const std::size_t picks = std::min<std::size_t>(static_cast<std::size_t>(b), n);
  out.reserve(picks);
  for (std::size_t step = 0; step < picks; ++step) {
    std::size_t u = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (taken[i]) continue;
      if (u == n || min_dist[i] > min_dist[u] ||
          (min_dist[i] == min_dist[u] && candidate_ids[i] < candidate_ids[u]))
        u = i;
    }
    taken[u] = true;
    out.push_back(candidate_ids[u]);
    for (std::size_t i = 0; i < n; ++i) {
      if (taken[i]) continue;
      min_dist[i] = std::min(
          min_dist[i], euclidean(candidate_features, static_cast<int>(i),
                                 candidate_features, static_cast<int>(u)));
    }
  }
  return out;
}

}  // namespace casl
