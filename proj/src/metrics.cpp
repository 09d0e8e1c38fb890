#include "casl/metrics.hpp"

#include <algorithm>

#include "casl/error.hpp"

namespace casl {

Confusion confusion(const Mat& probabilities, const std::vector<int>& labels,
                    double threshold) {
  if (probabilities.cols() != 1)
    throw ContractError("confusion: probabilities must be Nx1");
  if (static_cast<std::size_t>(probabilities.rows()) != labels.size())
    throw ContractError("confusion: one label per probability required");
  if (threshold < 0.0 || threshold > 1.0)
    throw ValidationError("confusion: threshold outside [0, 1]");
  Confusion c;
  for (int i = 0; i < probabilities.rows(); ++i) {
    const int label = labels[static_cast<std::size_t>(i)];
    if (label != 0 && label != 1)
      throw ContractError("confusion: labels must be binary");
    const bool predicted = probabilities(i, 0) >= threshold;
    if (predicted && label == 1) ++c.tp;
    else if (predicted && label == 0) ++c.fp;
    else if (!predicted && label == 1) ++c.fn;
    else ++c.tn;
  }
  return c;
}

Prf f1_score(const Confusion& c) {
  Prf out;
  out.precision = c.tp + c.fp > 0 ? static_cast<double>(c.tp) / (c.tp + c.fp) : 0.0;
  out.recall = c.tp + c.fn > 0 ? static_cast<double>(c.tp) / (c.tp + c.fn) : 0.0;
  const double pr = out.precision + out.recall;
  out.f1 = pr > 0.0 ? 2.0 * out.precision * out.recall / pr : 0.0;
  return out;
}

std::optional<long> samples_to_reach(const std::vector<ExperimentRecord>& records,
                                     double target_f1) {
  if (records.empty()) throw ContractError("samples_to_reach: no records");
  for (const ExperimentRecord& r : records)
    if (r.metrics.f1 >= target_f1) return r.cumulative_samples;
  return std::nullopt;
}

ReductionReport reduction_report(const std::vector<ExperimentRecord>& benchmark,
                                 const std::vector<ExperimentRecord>& strategy,
                                 long pool_size) {
  if (benchmark.empty() || strategy.empty())
    throw ContractError("reduction_report: both record lists must be non-empty");
  if (pool_size <= 0) throw ContractError("reduction_report: pool_size must be positive");

  ReductionReport rep;
  for (const ExperimentRecord& r : benchmark) {
    rep.target_f1 = std::max(rep.target_f1, r.metrics.f1);
    rep.benchmark_time_s += r.t_contrastive_s + r.t_proxy_s + r.t_sampling_s;
  }
  for (const ExperimentRecord& r : strategy)
    rep.closest_f1 = std::max(rep.closest_f1, r.metrics.f1);

  double elapsed = 0.0;
  for (const ExperimentRecord& r : strategy) {
    elapsed += r.t_contrastive_s + r.t_proxy_s + r.t_sampling_s;
    if (r.metrics.f1 >= rep.target_f1) {
      rep.reached = true;
      rep.samples_used = r.cumulative_samples;
      rep.time_to_reach_s = elapsed;
      break;
    }
  }
  if (rep.reached) {
    rep.sample_reduction = 1.0 - static_cast<double>(rep.samples_used) / pool_size;
    rep.time_reduction = rep.benchmark_time_s > 0.0
                             ? 1.0 - rep.time_to_reach_s / rep.benchmark_time_s
                             : 0.0;
  }
  return rep;
}

}  // namespace casl
