#include "casl/loop.hpp"

#include <algorithm>
#include <chrono>
#include <unordered_set>

#include "casl/error.hpp"

namespace casl {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

Prf evaluate(const EncoderParams& encoder, const ProxyParams& proxy,
             const Mat& test_inputs, const std::vector<int>& test_labels,
             double threshold) {
  const Mat probs = predict_proba(proxy, extract_features(encoder, test_inputs));
  return f1_score(confusion(probs, test_labels, threshold));
}

// Criterion checks that must hold on every iteration, independent of build
// flags; violations are bugs in the loop, not user errors.
void check_bookkeeping(const std::vector<int>& fresh,
                       const std::unordered_set<int>& already_selected,
                       const std::unordered_set<int>& remaining,
                       const std::unordered_set<int>& off_limits) {
  std::unordered_set<int> batch;
  for (int id : fresh) {
    if (!batch.insert(id).second)
      throw ContractError("loop: duplicate id within a selection batch");
    if (already_selected.count(id))
      throw ContractError("loop: id selected twice across iterations");
    if (!remaining.count(id))
      throw ContractError("loop: selected id not in the remaining pool");
    if (off_limits.count(id))
      throw ContractError("loop: labeled/test id leaked into the training subset");
  }
}

}  // namespace

void validate(const LoopConfig& cfg, std::size_t unlabeled_size) {
  if (cfg.budget < 1) throw ValidationError("loop: budget must be >= 1");
  if (cfg.iterations < 1) throw ValidationError("loop: iterations must be >= 1");
  if (static_cast<std::size_t>(cfg.budget) * cfg.iterations > unlabeled_size)
    throw ValidationError("loop: budget * iterations exceeds the unlabeled pool");
  if (cfg.candidate_cap < cfg.budget)
    throw ValidationError("loop: candidate_cap must be >= budget");
  if (cfg.eval_threshold < 0.0 || cfg.eval_threshold > 1.0)
    throw ValidationError("loop: eval_threshold must lie in [0, 1]");
  validate(cfg.encoder);
  validate(cfg.contrastive);
  validate(cfg.proxy);
}

LoopResult run_active_loop(
    const LoopConfig& cfg, const Dataset& ds, const Pools& pools,
    const std::function<void(int, const EncoderParams&)>& on_iteration) {
  validate(cfg, pools.unlabeled_ids.size());
  const PixelPool pool(ds);
  validate(cfg.augment, pool.patch_side());
  if (cfg.encoder.input_dim != pool.patch_side() * pool.patch_side())
    throw ValidationError("loop: encoder input_dim must equal patch_side^2");

  Rng init_rng = make_rng(cfg.seed, "init");
  Rng shuffle_rng = make_rng(cfg.seed, "shuffle");
  Rng augment_rng = make_rng(cfg.seed, "augment");
  Rng sample_rng = make_rng(cfg.seed, "sample");
  Rng proxy_rng = make_rng(cfg.seed, "proxy");

  LoopResult res;
  res.encoder = init_encoder(cfg.encoder, init_rng);
  Adam contrastive_opt({cfg.contrastive.lr, 0.9, 0.999, 1e-8});

  const Mat labeled_inputs = stack_rows(pool, pools.labeled.ids);
  const Mat test_inputs = stack_rows(pool, pools.test.ids);
  std::unordered_set<int> off_limits(pools.labeled.ids.begin(), pools.labeled.ids.end());
  off_limits.insert(pools.test.ids.begin(), pools.test.ids.end());

  std::vector<int> remaining = pools.unlabeled_ids;
  std::unordered_set<int> remaining_set(remaining.begin(), remaining.end());
  std::unordered_set<int> selected_set;
  std::vector<int> subset;  // S^t, cumulative, in selection order

  // S^0: plain random draw over the whole pool, before any strategy applies.
  std::vector<int> fresh = sample_random(remaining, cfg.budget, sample_rng);
  check_bookkeeping(fresh, selected_set, remaining_set, off_limits);
  subset.insert(subset.end(), fresh.begin(), fresh.end());
  selected_set.insert(fresh.begin(), fresh.end());
  res.selected.push_back(fresh);

  for (int t = 0; t < cfg.iterations; ++t) {
    if (subset.size() != static_cast<std::size_t>(cfg.budget) * (t + 1)) {
      if (res.truncated) break;  // pool exhausted on the previous selection
      throw ContractError("loop: cumulative subset size is not b*(t+1)");
    }

    auto t0 = Clock::now();
    std::vector<double> trace =
        train_contrastive(res.encoder, contrastive_opt, pool, subset,
                          cfg.contrastive, cfg.augment, shuffle_rng, augment_rng);
    const double contrastive_s = seconds_since(t0);
    res.loss_traces.push_back(std::move(trace));

    t0 = Clock::now();
    const Mat labeled_features = extract_features(res.encoder, labeled_inputs);
    ProxyParams proxy =
        train_proxy(labeled_features, pools.labeled.labels, cfg.proxy, proxy_rng);
    Prf prf = evaluate(res.encoder, proxy, test_inputs, pools.test.labels,
                       cfg.eval_threshold);
    const double proxy_s = seconds_since(t0);

    // Selection of S^{t+1}: remove S^t from the pool, subsample candidates,
    // apply the strategy. Runs on the last iteration too (its output is
    // simply never trained on), matching the loop structure it implements.
    t0 = Clock::now();
    remaining.erase(std::remove_if(remaining.begin(), remaining.end(),
                                   [&](int id) { return selected_set.count(id) > 0; }),
                    remaining.end());
    for (int id : subset) remaining_set.erase(id);

    std::vector<int> candidates =
        subsample_candidates(remaining, cfg.candidate_cap, sample_rng);
    switch (cfg.sampler) {
      case SamplerKind::kRandom:
        fresh = sample_random(candidates, cfg.budget, sample_rng);
        break;
      case SamplerKind::kUncertainty: {
        if (candidates.empty()) {
          fresh.clear();
          break;
        }
        const Mat cand_features =
            extract_features(res.encoder, stack_rows(pool, candidates));
        const Mat probs = predict_proba(proxy, cand_features);
        std::vector<double> scores(candidates.size());
        for (std::size_t i = 0; i < candidates.size(); ++i)
          scores[i] = entropy(probs(static_cast<int>(i), 0));
        fresh = sample_uncertainty(candidates, scores, cfg.budget);
        break;
      }
      case SamplerKind::kCoreset: {
        if (candidates.empty()) {
          fresh.clear();
          break;
        }
        const Mat cand_features =
            extract_features(res.encoder, stack_rows(pool, candidates));
        const Mat base_features =
            extract_features(res.encoder, stack_rows(pool, subset));
        fresh = k_center_greedy(candidates, cand_features, base_features, cfg.budget);
        break;
      }
    }
    check_bookkeeping(fresh, selected_set, remaining_set, off_limits);
    subset.insert(subset.end(), fresh.begin(), fresh.end());
    selected_set.insert(fresh.begin(), fresh.end());
    res.selected.push_back(fresh);
    if (t + 1 < cfg.iterations && fresh.size() < static_cast<std::size_t>(cfg.budget))
      res.truncated = true;  // next iteration cannot train on a full batch
    const double sampling_s = seconds_since(t0);

    ExperimentRecord rec;
    rec.iteration = t;
    rec.cumulative_samples = static_cast<long>(cfg.budget) * (t + 1);
    rec.metrics = prf;
    rec.t_contrastive_s = contrastive_s;
    rec.t_proxy_s = proxy_s;
    rec.t_sampling_s = sampling_s;
    res.records.push_back(rec);
    if (on_iteration) on_iteration(t, res.encoder);
  }
  return res;
}

LoopResult run_benchmark(const LoopConfig& cfg, const BenchmarkConfig& bench,
                         const Dataset& ds, const Pools& pools) {
  validate(cfg, pools.unlabeled_ids.size());
  if (bench.contrastive_epochs < 0)
    throw ValidationError("benchmark: contrastive_epochs must be >= 0");
  if (bench.eval_interval < 1)
    throw ValidationError("benchmark: eval_interval must be >= 1");
  if (bench.proxy_epochs < bench.eval_interval ||
      bench.proxy_epochs % bench.eval_interval != 0)
    throw ValidationError("benchmark: proxy_epochs must be a positive multiple of eval_interval");

  const PixelPool pool(ds);
  validate(cfg.augment, pool.patch_side());
  if (cfg.encoder.input_dim != pool.patch_side() * pool.patch_side())
    throw ValidationError("benchmark: encoder input_dim must equal patch_side^2");

  Rng init_rng = make_rng(cfg.seed, "init");
  Rng shuffle_rng = make_rng(cfg.seed, "shuffle");
  Rng augment_rng = make_rng(cfg.seed, "augment");
  Rng proxy_rng = make_rng(cfg.seed, "proxy");

  LoopResult res;
  res.encoder = init_encoder(cfg.encoder, init_rng);
  Adam contrastive_opt({cfg.contrastive.lr, 0.9, 0.999, 1e-8});
  ContrastiveHyper hyper = cfg.contrastive;
  hyper.epochs = bench.contrastive_epochs;

  auto t0 = Clock::now();
  std::vector<double> trace =
      train_contrastive(res.encoder, contrastive_opt, pool, pools.unlabeled_ids,
                        hyper, cfg.augment, shuffle_rng, augment_rng);
  double contrastive_s = seconds_since(t0);
  res.loss_traces.push_back(std::move(trace));

  const Mat labeled_features =
      extract_features(res.encoder, stack_rows(pool, pools.labeled.ids));
  const Mat test_inputs = stack_rows(pool, pools.test.ids);

  ProxyParams proxy = init_proxy(cfg.encoder.feature_dim, proxy_rng);
  Adam proxy_opt({cfg.proxy.lr, 0.9, 0.999, 1e-8});
  for (int epoch = bench.eval_interval; epoch <= bench.proxy_epochs;
       epoch += bench.eval_interval) {
    t0 = Clock::now();
    train_proxy_epochs(proxy, proxy_opt, labeled_features, pools.labeled.labels,
                       cfg.proxy, bench.eval_interval, proxy_rng);
    Prf prf = evaluate(res.encoder, proxy, test_inputs, pools.test.labels,
                       cfg.eval_threshold);
    const double proxy_s = seconds_since(t0);

    ExperimentRecord rec;
    rec.iteration = epoch;  // proxy epoch index, not an active iteration
    rec.cumulative_samples = static_cast<long>(pools.unlabeled_ids.size());
    rec.metrics = prf;
    rec.t_contrastive_s = contrastive_s;
    rec.t_proxy_s = proxy_s;
    rec.t_sampling_s = 0.0;
    res.records.push_back(rec);
    contrastive_s = 0.0;  // charged once, to the first record
  }
  return res;
}

}  // namespace casl
