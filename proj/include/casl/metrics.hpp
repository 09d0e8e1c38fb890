#pragma once

#include <optional>
#include <string>
#include <vector>

#include "casl/mat.hpp"

namespace casl {

struct Confusion {
  long tp = 0;
  long fp = 0;
  long fn = 0;
  long tn = 0;
};

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// One evaluated point of a run: an active iteration or a benchmark proxy
// checkpoint. cumulative_samples is |S^t| for active runs and |U| for the
// benchmark; the iteration field carries the proxy epoch there.
struct ExperimentRecord {
  int iteration = 0;
  long cumulative_samples = 0;
  Prf metrics;
  double t_contrastive_s = 0.0;
  double t_proxy_s = 0.0;
  double t_sampling_s = 0.0;
};

// prediction = probability >= threshold.
Confusion confusion(const Mat& probabilities, const std::vector<int>& labels,
                    double threshold = 0.5);

// Zero-denominator conventions: P=0 when TP+FP=0, R=0 when TP+FN=0, F1=0
// when P+R=0, so degenerate early iterations stay representable.
Prf f1_score(const Confusion& c);

// Smallest cumulative sample count whose F1 meets the target; nullopt when
// never reached.
std::optional<long> samples_to_reach(const std::vector<ExperimentRecord>& records,
                                     double target_f1);

struct ReductionReport {
  double target_f1 = 0.0;        // benchmark best F1
  bool reached = false;
  double closest_f1 = 0.0;       // best strategy F1, informative when not reached
  long samples_used = 0;
  double sample_reduction = 0.0;  // 1 - samples_used / pool_size
  double time_to_reach_s = 0.0;   // strategy wall-time up to the reaching record
  double benchmark_time_s = 0.0;
  double time_reduction = 0.0;    // 1 - time_to_reach / benchmark_time
};

// Sample- and time-reduction relative to the full-pool benchmark, target
// F1* = the benchmark's best recorded F1.
ReductionReport reduction_report(const std::vector<ExperimentRecord>& benchmark,
                                 const std::vector<ExperimentRecord>& strategy,
                                 long pool_size);

}  // namespace casl
