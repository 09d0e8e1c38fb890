#include <cmath>

#include "casl/error.hpp"
#include "casl/metrics.hpp"
#include "casl/rng.hpp"
#include "doctest.h"

using namespace casl;

namespace {

ExperimentRecord rec(int it, long cum, double f1, double t = 1.0) {
  ExperimentRecord r;
  r.iteration = it;
  r.cumulative_samples = cum;
  r.metrics.f1 = f1;
  r.t_contrastive_s = t;
  return r;
}

}  // namespace

TEST_CASE("confusion counts with threshold semantics") {
  Mat p(6, 1);
  p(0, 0) = 0.9;   // label 1 -> tp
  p(1, 0) = 0.5;   // label 0 -> fp (>= threshold predicts 1)
  p(2, 0) = 0.49;  // label 1 -> fn
  p(3, 0) = 0.1;   // label 0 -> tn
  p(4, 0) = 0.7;   // label 1 -> tp
  p(5, 0) = 0.2;   // label 1 -> fn
  const std::vector<int> labels = {1, 0, 1, 0, 1, 1};
  const Confusion c = confusion(p, labels, 0.5);
  CHECK(c.tp == 2);
  CHECK(c.fp == 1);
  CHECK(c.fn == 2);
  CHECK(c.tn == 1);

  CHECK_THROWS_AS(confusion(p, {1, 0}, 0.5), ContractError);
  CHECK_THROWS_AS(confusion(p, labels, 1.5), ValidationError);
  CHECK_THROWS_AS(confusion(p, {1, 0, 2, 0, 1, 1}, 0.5), ContractError);
}

TEST_CASE("f1 hand value") {
  // 80 tp, 20 fp, 40 fn: P = 0.8, R = 2/3, F1 = 0.727272...
  const Prf prf = f1_score(Confusion{80, 20, 40, 0});
  CHECK(prf.precision == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(prf.recall == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(prf.f1 == doctest::Approx(0.7272727272727273).epsilon(1e-9));
}

TEST_CASE("f1 zero conventions") {
  CHECK(f1_score(Confusion{0, 0, 0, 10}).precision == 0.0);
  CHECK(f1_score(Confusion{0, 0, 0, 10}).recall == 0.0);
  CHECK(f1_score(Confusion{0, 0, 0, 10}).f1 == 0.0);
  CHECK(f1_score(Confusion{0, 0, 5, 10}).f1 == 0.0);   // no positive predictions
  CHECK(f1_score(Confusion{0, 5, 0, 10}).recall == 0.0);
  CHECK(f1_score(Confusion{10, 0, 0, 0}).f1 == 1.0);
}

TEST_CASE("f1 is the harmonic mean: bounded by min and max of P and R") {
  Rng rng = make_rng(41, "sample", 0);
  std::uniform_int_distribution<long> u(0, 500);
  for (int k = 0; k < 1000; ++k) {
    const Confusion c{u(rng), u(rng), u(rng), u(rng)};
    const Prf prf = f1_score(c);
    const double lo = std::min(prf.precision, prf.recall);
    const double hi = std::max(prf.precision, prf.recall);
    REQUIRE(prf.f1 >= 0.0);
    REQUIRE(prf.f1 <= 1.0);
    REQUIRE(prf.f1 <= hi + 1e-12);
    if (prf.precision + prf.recall > 0.0) {
      REQUIRE(prf.f1 >= lo * lo / (lo + hi) - 1e-12);  // harmonic below min only at 0
      const double expect = 2.0 * prf.precision * prf.recall /
                            (prf.precision + prf.recall);
      REQUIRE(prf.f1 == doctest::Approx(expect).epsilon(1e-12));
    }
  }
}

TEST_CASE("f1 ignores uniform count scaling") {
  const Prf a = f1_score(Confusion{8, 2, 4, 6});
  const Prf b = f1_score(Confusion{800, 200, 400, 600});
  CHECK(a.f1 == doctest::Approx(b.f1).epsilon(1e-15));
}

TEST_CASE("samples_to_reach picks the first qualifying record") {
  std::vector<ExperimentRecord> records = {rec(0, 100, 0.3), rec(1, 200, 0.62),
                                           rec(2, 300, 0.55), rec(3, 400, 0.9)};
  CHECK(samples_to_reach(records, 0.6).value() == 200);
  CHECK(samples_to_reach(records, 0.62).value() == 200);
  CHECK(samples_to_reach(records, 0.8).value() == 400);
  CHECK(!samples_to_reach(records, 0.95).has_value());
  CHECK_THROWS_AS(samples_to_reach({}, 0.5), ContractError);
}

TEST_CASE("reduction arithmetic on the published numbers") {
  // Benchmark uses the full pool of 100000; the strategy reaches the
  // benchmark's best F1 at 7000 samples: a 93% sample reduction.
  std::vector<ExperimentRecord> bench;
  ExperimentRecord b0 = rec(0, 100000, 0.86, 538.70);
  bench.push_back(b0);
  std::vector<ExperimentRecord> strategy;
  strategy.push_back(rec(0, 3000, 0.5, 100.0));
  ExperimentRecord s1 = rec(1, 7000, 0.87, 104.4);
  strategy.push_back(s1);
  strategy.push_back(rec(2, 9000, 0.88, 50.0));

  const ReductionReport rep = reduction_report(bench, strategy, 100000);
  CHECK(rep.reached);
  CHECK(rep.target_f1 == doctest::Approx(0.86).epsilon(1e-12));
  CHECK(rep.samples_used == 7000);
  CHECK(rep.sample_reduction == doctest::Approx(0.93).epsilon(1e-12));
  CHECK(rep.time_to_reach_s == doctest::Approx(204.4).epsilon(1e-9));
  CHECK(rep.benchmark_time_s == doctest::Approx(538.70).epsilon(1e-9));
  CHECK(rep.time_reduction == doctest::Approx(1.0 - 204.4 / 538.70).epsilon(1e-9));
  CHECK(rep.time_reduction == doctest::Approx(0.620568).epsilon(1e-5));
}

TEST_CASE("reduction_report when the target is never reached") {
  std::vector<ExperimentRecord> bench = {rec(0, 1000, 0.9, 10.0)};
  std::vector<ExperimentRecord> strategy = {rec(0, 100, 0.5, 1.0),
                                            rec(1, 200, 0.7, 1.0)};
  const ReductionReport rep = reduction_report(bench, strategy, 1000);
  CHECK(!rep.reached);
  CHECK(rep.closest_f1 == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(rep.target_f1 == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(rep.sample_reduction == 0.0);

  CHECK_THROWS_AS(reduction_report({}, strategy, 1000), ContractError);
  CHECK_THROWS_AS(reduction_report(bench, {}, 1000), ContractError);
  CHECK_THROWS_AS(reduction_report(bench, strategy, 0), ContractError);
}

TEST_CASE("benchmark time sums every phase across records") {
  std::vector<ExperimentRecord> bench;
  ExperimentRecord b0 = rec(0, 500, 0.4, 7.0);
  b0.t_proxy_s = 2.0;
  b0.t_sampling_s = 1.0;
  ExperimentRecord b1 = rec(1, 500, 0.8, 0.0);
  b1.t_proxy_s = 3.0;
  bench = {b0, b1};
  std::vector<ExperimentRecord> strategy = {rec(0, 50, 0.85, 4.0)};
  const ReductionReport rep = reduction_report(bench, strategy, 500);
  CHECK(rep.benchmark_time_s == doctest::Approx(13.0).epsilon(1e-12));
  CHECK(rep.sample_reduction == doctest::Approx(0.9).epsilon(1e-12));
}
