#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "casl/graph.hpp"
#include "casl/mat.hpp"

namespace casl::testing {

struct GradCheck {
  int entries = 0;
  int failures = 0;
  double max_abs = 0.0;
  double max_rel = 0.0;
};

// Central-difference oracle. `build` maps (graph, param handles) to a scalar
// loss and is re-invoked for every probe, so any op composition works. An
// entry passes when |fd - analytic| <= atol or the relative error (against
// the larger magnitude) is <= rtol.
template <typename BuildFn>
GradCheck check_gradients(std::vector<Mat> params, BuildFn build,
                          double h = 1e-4, double rtol = 1e-5,
                          double atol = 1e-7) {
  Graph g;
  std::vector<Value> handles;
  handles.reserve(params.size());
  for (const Mat& p : params) handles.push_back(g.param(p));
  GradMap grads = g.backward(build(g, handles));

  auto eval = [&]() {
    Graph fg;
    std::vector<Value> hs;
    hs.reserve(params.size());
    for (const Mat& p : params) hs.push_back(fg.param(p));
    return fg.value(build(fg, hs))(0, 0);
  };

  GradCheck res;
  for (std::size_t k = 0; k < params.size(); ++k) {
    const Mat& analytic = grads.at(handles[k].id);
    for (std::size_t i = 0; i < params[k].size(); ++i) {
      double& slot = params[k].data()[i];
      const double orig = slot;
      slot = orig + h;
      const double up = eval();
      slot = orig - h;
      const double down = eval();
      slot = orig;

      const double fd = (up - down) / (2.0 * h);
      const double an = analytic.data()[i];
      const double abs_err = std::abs(fd - an);
      const double denom = std::max(std::abs(fd), std::abs(an));
      const double rel_err = denom > 0.0 ? abs_err / denom : 0.0;

      ++res.entries;
      res.max_abs = std::max(res.max_abs, abs_err);
      res.max_rel = std::max(res.max_rel, rel_err);
      if (abs_err > atol && rel_err > rtol) ++res.failures;
    }
  }
  return res;
}

}  // namespace casl::testing
