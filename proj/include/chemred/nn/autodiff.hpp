#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <string>
#include <vector>

// Reverse-mode automatic differentiation over dense Eigen matrices.
// A Var is a shared node in an implicit DAG; backward() runs the tape in
// reverse creation order.  Small and double-precision throughout, which is
// what the finite-difference gradient tests demand.

namespace chemred::nn {

using Mat = Eigen::MatrixXd;

struct Node;
using Var = std::shared_ptr<Node>;

struct Node {
  Mat val;
  Mat grad;  // allocated lazily by backward()
  bool requires_grad = false;
  long order = 0;  // creation sequence, defines the topological order
  std::vector<Var> parents;
  std::function<void(Node&)> backfn;  // scatter this->grad into parents

  void ensure_grad() {
    if (grad.size() == 0) grad = Mat::Zero(val.rows(), val.cols());
  }
};

Var constant(Mat v);
Var param(Mat v);  // leaf with requires_grad

// ---- elementwise / scalar
Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);  // componentwise
Var scale(const Var& a, double s);
Var elu(const Var& a);
Var sigmoid(const Var& a);
Var abs(const Var& a);
Var square(const Var& a);

// ---- linear algebra / shape
Var matmul(const Var& a, const Var& b);
Var add_rowvec(const Var& a, const Var& b);       // b is 1 x cols, broadcast
Var gather_rows(const Var& a, std::vector<int> idx);
Var row_dot(const Var& a, const Var& b);          // (n x d, n x d) -> n x 1
Var row_scale(const Var& a, const Var& s);        // rows of a scaled by s (n x 1)

// ---- reductions
Var sum_all(const Var& a);   // 1 x 1
Var mean_all(const Var& a);  // 1 x 1
Var sum_rows_l2(const Var& a);  // 1 x 1: sum over rows of squared L2 norms

// ---- graph segment ops (edges grouped by destination node)
// softmax of logits (E x 1) within each segment; seg[e] in [0, n_seg)
Var segment_softmax(const Var& logits, std::vector<int> seg, int n_seg);
// out(u) = sum_{e: seg[e]=u} w[e] * vals.row(e); vals E x d, w E x 1
Var segment_weighted_sum(const Var& vals, const Var& w, std::vector<int> seg,
                         int n_out);

/// Accumulate d(loss)/d(x) into every reachable node's grad.
/// loss must be 1x1.  Grads of all reachable nodes are reset first.
void backward(const Var& loss);

inline double scalar(const Var& v) { return v->val(0, 0); }

}  // namespace chemred::nn
