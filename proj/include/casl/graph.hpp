#pragma once

#include <functional>
#include <unordered_map>
#include <vector>

#include "casl/mat.hpp"

namespace casl {

using NodeId = int;

// Handle into the graph that produced it.
struct Value {
  NodeId id = -1;
};

// Gradients keyed by node id, one entry per trainable leaf.
using GradMap = std::unordered_map<NodeId, Mat>;

// Reverse-mode tape. A graph is built fresh for every forward pass and
// discarded after backward(); parameters live outside the graph and are
// registered per pass with param().
//
// Forward values are computed eagerly through the same mat_* kernels used by
// the untracked forward paths, so a tracked and an untracked evaluation of
// the same network are bit-identical.
class Graph {
 public:
  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  // Leaves.
  Value constant(Mat v);
  Value param(Mat v);  // trainable; receives a GradMap entry from backward()

  // Ops. Gradient rules are the standard ones; every rule is covered by the
  // finite-difference suite.
  Value matmul(Value a, Value b);
  Value transpose(Value a);
  Value add(Value a, Value b);
  Value sub(Value a, Value b);
  Value mul(Value a, Value b);                 // elementwise
  Value cmul(Value a, const Mat& mask);        // elementwise by a constant
  Value scale(Value a, double s);
  Value add_rowvec(Value a, Value v);          // broadcast bias row
  Value relu(Value a);
  Value sigmoid_op(Value a);
  Value exp_op(Value a);
  Value log_op(Value a);
  Value row_sum(Value a);
  Value sum_all(Value a);
  Value mean_all(Value a);
  // out(r, 0) = a(r, cols[r])
  Value gather_per_row(Value a, std::vector<int> cols);
  Value l2_normalize_rows(Value a);
  // Mean binary cross-entropy over rows; labels in {0, 1}, one per row.
  // Computed from logits in the numerically stable form.
  Value bce_with_logits(Value logits, const Mat& labels);

  const Mat& value(Value v) const { return nodes_[v.id].val; }
  int num_nodes() const { return static_cast<int>(nodes_.size()); }

  // Reverse pass from a scalar (1x1) loss. Returns gradients for every
  // trainable leaf registered before the call.
  GradMap backward(Value loss);

 private:
  struct Node {
    Mat val;
    Mat grad;
    bool requires_grad = false;
    bool trainable = false;
    // Adds this node's contribution to its parents' grad buffers.
    std::function<void(Graph&, const Mat& g)> backprop;
  };

  Value push(Mat val, bool requires_grad,
             std::function<void(Graph&, const Mat&)> backprop);
  void accumulate(NodeId id, const Mat& g);
  Mat& grad(NodeId id) { return nodes_[id].grad; }
  bool needs_grad(Value v) const { return nodes_[v.id].requires_grad; }

  std::vector<Node> nodes_;
};

}  // namespace casl
