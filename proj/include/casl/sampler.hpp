#pragma once

#include <string>
#include <vector>

#include "casl/mat.hpp"
#include "casl/rng.hpp"

namespace casl {

enum class SamplerKind { kRandom, kUncertainty, kCoreset };

SamplerKind sampler_from_name(const std::string& name);
std::string sampler_name(SamplerKind kind);

// min(cap, |pool|) ids drawn uniformly without replacement.
std::vector<int> subsample_candidates(const std::vector<int>& pool_ids, int cap,
                                      Rng& rng);

// min(b, |candidates|) ids uniform without replacement.
std::vector<int> sample_random(const std::vector<int>& candidate_ids, int b, Rng& rng);

// ids of the b largest scores, ties broken by ascending id.
std::vector<int> sample_uncertainty(const std::vector<int>& candidate_ids,
                                    const std::vector<double>& scores, int b);

// Algorithm: repeat b times, pick the candidate with the largest minimum
// Euclidean distance to the selected set (seeded with the base set), ties by
// ascending id; returns the new picks in selection order. Maintains one
// min-distance per candidate, refreshed against only the newest pick.
std::vector<int> k_center_greedy(const std::vector<int>& candidate_ids,
                                 const Mat& candidate_features,
                                 const Mat& base_features, int b);

}  // namespace casl
