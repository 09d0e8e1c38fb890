#include "casl/graph.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "casl/error.hpp"

namespace casl {

Value Graph::push(Mat val, bool requires_grad,
                  std::function<void(Graph&, const Mat&)> backprop) {
  Node n;
  n.val = std::move(val);
  n.requires_grad = requires_grad;
  n.backprop = std::move(backprop);
  nodes_.push_back(std::move(n));
  return Value{static_cast<NodeId>(nodes_.size() - 1)};
}

void Graph::accumulate(NodeId id, const Mat& g) {
  Node& n = nodes_[id];
  if (!n.requires_grad) return;
  if (!g.same_shape(n.val)) {
    throw ContractError("backward: gradient shape does not match node shape");
  }
  if (n.grad.empty()) {
    n.grad = g;
    return;
  }
  for (std::size_t i = 0; i < g.size(); ++i) n.grad.data()[i] += g.data()[i];
}

Value Graph::constant(Mat v) { return push(std::move(v), false, nullptr); }

Value Graph::param(Mat v) {
  Value out = push(std::move(v), true, nullptr);
  nodes_[out.id].trainable = true;
  return out;
}

Value Graph::matmul(Value a, Value b) {
  Mat out = mat_mul(nodes_[a.id].val, nodes_[b.id].val);
  const bool rg = needs_grad(a) || needs_grad(b);
  return push(std::move(out), rg, [a, b](Graph& g, const Mat& gout) {
    if (g.needs_grad(a))
      g.accumulate(a.id, mat_mul(gout, mat_transpose(g.nodes_[b.id].val)));
    if (g.needs_grad(b))
      g.accumulate(b.id, mat_mul(mat_transpose(g.nodes_[a.id].val), gout));
  });
}

Value Graph::transpose(Value a) {
  Mat out = mat_transpose(nodes_[a.id].val);
  return push(std::move(out), needs_grad(a), [a](Graph& g, const Mat& gout) {
    g.accumulate(a.id, mat_transpose(gout));
  });
}

Value Graph::add(Value a, Value b) {
  Mat out = mat_add(nodes_[a.id].val, nodes_[b.id].val);
  const bool rg = needs_grad(a) || needs_grad(b);
  return push(std::move(out), rg, [a, b](Graph& g, const Mat& gout) {
    g.accumulate(a.id, gout);
    g.accumulate(b.id, gout);
  });
}

Value Graph::sub(Value a, Value b) {
  Mat out = mat_sub(nodes_[a.id].val, nodes_[b.id].val);
  const bool rg = needs_grad(a) || needs_grad(b);
  return push(std::move(out), rg, [a, b](Graph& g, const Mat& gout) {
    g.accumulate(a.id, gout);
    if (g.needs_grad(b)) g.accumulate(b.id, mat_scale(gout, -1.0));
  });
}

Value Graph::mul(Value a, Value b) {
  Mat out = mat_hadamard(nodes_[a.id].val, nodes_[b.id].val);
  const bool rg = needs_grad(a) || needs_grad(b);
  return push(std::move(out), rg, [a, b](Graph& g, const Mat& gout) {
    if (g.needs_grad(a)) g.accumulate(a.id, mat_hadamard(gout, g.nodes_[b.id].val));
    if (g.needs_grad(b)) g.accumulate(b.id, mat_hadamard(gout, g.nodes_[a.id].val));
  });
}

Value Graph::cmul(Value a, const Mat& mask) {
  Mat out = mat_hadamard(nodes_[a.id].val, mask);
  return push(std::move(out), needs_grad(a),
              [a, mask](Graph& g, const Mat& gout) {
                g.accumulate(a.id, mat_hadamard(gout, mask));
              });
}

Value Graph::scale(Value a, double s) {
  Mat out = mat_scale(nodes_[a.id].val, s);
  return push(std::move(out), needs_grad(a), [a, s](Graph& g, const Mat& gout) {
    g.accumulate(a.id, mat_scale(gout, s));
  });
}

Value Graph::add_rowvec(Value a, Value v) {
  Mat out = mat_add_rowvec(nodes_[a.id].val, nodes_[v.id].val);
  const bool rg = needs_grad(a) || needs_grad(v);
  return push(std::move(out), rg, [a, v](Graph& g, const Mat& gout) {
    g.accumulate(a.id, gout);
    if (g.needs_grad(v)) {
      Mat gv(1, gout.cols());
      for (int i = 0; i < gout.rows(); ++i)
        for (int j = 0; j < gout.cols(); ++j) gv(0, j) += gout(i, j);
      g.accumulate(v.id, gv);
    }
  });
}

Value Graph::relu(Value a) {
  Mat out = mat_relu(nodes_[a.id].val);
  return push(std::move(out), needs_grad(a), [a](Graph& g, const Mat& gout) {
    const Mat& x = g.nodes_[a.id].val;
    Mat gx(gout.rows(), gout.cols());
    for (std::size_t i = 0; i < gout.size(); ++i)
      gx.data()[i] = x.data()[i] > 0.0 ? gout.data()[i] : 0.0;
    g.accumulate(a.id, gx);
  });
}

Value Graph::sigmoid_op(Value a) {
  Mat out = mat_sigmoid(nodes_[a.id].val);
  Value r = push(std::move(out), needs_grad(a), nullptr);
  nodes_[r.id].backprop = [a, r](Graph& g, const Mat& gout) {
    const Mat& s = g.nodes_[r.id].val;
    Mat gx(gout.rows(), gout.cols());
    for (std::size_t i = 0; i < gout.size(); ++i) {
      const double si = s.data()[i];
      gx.data()[i] = gout.data()[i] * si * (1.0 - si);
    }
    g.accumulate(a.id, gx);
  };
  return r;
}

Value Graph::exp_op(Value a) {
  Mat out = mat_exp(nodes_[a.id].val);
  Value r = push(std::move(out), needs_grad(a), nullptr);
  nodes_[r.id].backprop = [a, r](Graph& g, const Mat& gout) {
    g.accumulate(a.id, mat_hadamard(gout, g.nodes_[r.id].val));
  };
  return r;
}

Value Graph::log_op(Value a) {
  Mat out = mat_log(nodes_[a.id].val);
  return push(std::move(out), needs_grad(a), [a](Graph& g, const Mat& gout) {
    const Mat& x = g.nodes_[a.id].val;
    Mat gx(gout.rows(), gout.cols());
    for (std::size_t i = 0; i < gout.size(); ++i)
      gx.data()[i] = gout.data()[i] / x.data()[i];
    g.accumulate(a.id, gx);
  });
}

Value Graph::row_sum(Value a) {
  Mat out = mat_row_sum(nodes_[a.id].val);
  return push(std::move(out), needs_grad(a), [a](Graph& g, const Mat& gout) {
    const Mat& x = g.nodes_[a.id].val;
    Mat gx(x.rows(), x.cols());
    for (int i = 0; i < x.rows(); ++i)
      for (int j = 0; j < x.cols(); ++j) gx(i, j) = gout(i, 0);
    g.accumulate(a.id, gx);
  });
}

Value Graph::sum_all(Value a) {
  double s = 0.0;
  const Mat& x = nodes_[a.id].val;
  for (std::size_t i = 0; i < x.size(); ++i) s += x.data()[i];
  return push(Mat(1, 1, {s}), needs_grad(a), [a](Graph& g, const Mat& gout) {
    const Mat& xa = g.nodes_[a.id].val;
    Mat gx(xa.rows(), xa.cols());
    gx.fill(gout(0, 0));
    g.accumulate(a.id, gx);
  });
}

Value Graph::mean_all(Value a) {
  const Mat& x = nodes_[a.id].val;
  if (x.size() == 0) throw ContractError("mean_all: empty tensor");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x.data()[i];
  const double inv_n = 1.0 / static_cast<double>(x.size());
  return push(Mat(1, 1, {s * inv_n}), needs_grad(a),
              [a, inv_n](Graph& g, const Mat& gout) {
                const Mat& xa = g.nodes_[a.id].val;
                Mat gx(xa.rows(), xa.cols());
                gx.fill(gout(0, 0) * inv_n);
                g.accumulate(a.id, gx);
              });
}

Value Graph::gather_per_row(Value a, std::vector<int> cols) {
  const Mat& x = nodes_[a.id].val;
  if (static_cast<int>(cols.size()) != x.rows()) {
    throw ContractError("gather_per_row: one column index per row required");
  }
  Mat out(x.rows(), 1);
  for (int i = 0; i < x.rows(); ++i) {
    const int c = cols[static_cast<std::size_t>(i)];
    if (c < 0 || c >= x.cols()) throw ContractError("gather_per_row: index out of range");
    out(i, 0) = x(i, c);
  }
  return push(std::move(out), needs_grad(a),
              [a, cols = std::move(cols)](Graph& g, const Mat& gout) {
                const Mat& xa = g.nodes_[a.id].val;
                Mat gx(xa.rows(), xa.cols());
                for (int i = 0; i < xa.rows(); ++i)
                  gx(i, cols[static_cast<std::size_t>(i)]) = gout(i, 0);
                g.accumulate(a.id, gx);
              });
}

Value Graph::l2_normalize_rows(Value a) {
  Mat out = mat_l2_normalize_rows(nodes_[a.id].val, kNormEps);
  Value r = push(std::move(out), needs_grad(a), nullptr);
  nodes_[r.id].backprop = [a, r](Graph& g, const Mat& gout) {
    const Mat& x = g.nodes_[a.id].val;
    const Mat& y = g.nodes_[r.id].val;
    Mat gx(x.rows(), x.cols());
    for (int i = 0; i < x.rows(); ++i) {
      double sq = 0.0;
      for (int j = 0; j < x.cols(); ++j) sq += x(i, j) * x(i, j);
      const double norm = std::sqrt(sq);
      // d/dx (x / |x|) applied to g: (g - (g . y) y) / |x|
      double dot = 0.0;
      for (int j = 0; j < x.cols(); ++j) dot += gout(i, j) * y(i, j);
      for (int j = 0; j < x.cols(); ++j)
        gx(i, j) = (gout(i, j) - dot * y(i, j)) / norm;
    }
    g.accumulate(a.id, gx);
  };
  return r;
}

Value Graph::bce_with_logits(Value logits, const Mat& labels) {
  const Mat& x = nodes_[logits.id].val;
  if (x.cols() != 1) throw ContractError("bce_with_logits: logits must be Nx1");
  if (!labels.same_shape(x)) {
    throw ShapeError("bce_with_logits: labels shape must match logits");
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double y = labels.data()[i];
    if (y != 0.0 && y != 1.0)
      throw ContractError("bce_with_logits: labels must be 0 or 1");
  }
  const int n = x.rows();
  double loss = 0.0;
  for (int i = 0; i < n; ++i) {
    const double xi = x(i, 0);
    const double yi = labels(i, 0);
    // max(x,0) - x*y + log1p(exp(-|x|))
    loss += (xi > 0.0 ? xi : 0.0) - xi * yi + std::log1p(std::exp(-std::abs(xi)));
  }
  loss /= static_cast<double>(n);
  return push(Mat(1, 1, {loss}), needs_grad(logits),
              [logits, labels, n](Graph& g, const Mat& gout) {
                const Mat& xl = g.nodes_[logits.id].val;
                Mat gx(n, 1);
                const double s = gout(0, 0) / static_cast<double>(n);
                for (int i = 0; i < n; ++i)
                  gx(i, 0) = s * (sigmoid(xl(i, 0)) - labels(i, 0));
                g.accumulate(logits.id, gx);
              });
}

GradMap Graph::backward(Value loss) {
  const Node& ln = nodes_[loss.id];
  if (ln.val.rows() != 1 || ln.val.cols() != 1) {
    throw ContractError("backward: loss must be a 1x1 tensor");
  }
  for (Node& n : nodes_) n.grad = Mat();
  accumulate(loss.id, Mat(1, 1, {1.0}));

  for (NodeId id = loss.id; id >= 0; --id) {
    Node& n = nodes_[id];
    if (n.requires_grad && n.backprop && !n.grad.empty()) {
      n.backprop(*this, n.grad);
    }
  }

  GradMap grads;
  for (NodeId id = 0; id < static_cast<NodeId>(nodes_.size()); ++id) {
    Node& n = nodes_[id];
    if (!n.trainable) continue;
    if (n.grad.empty()) n.grad = Mat(n.val.rows(), n.val.cols());
    grads.emplace(id, std::move(n.grad));
    n.grad = Mat();
  }
  return grads;
}

}  // namespace casl
