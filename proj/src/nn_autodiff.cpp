#include "chemred/nn/autodiff.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <unordered_set>

namespace chemred::nn {
namespace {

std::atomic<long> g_order{0};

Var make(Mat v, std::vector<Var> parents, std::function<void(Node&)> back) {
  auto n = std::make_shared<Node>();
  n->val = std::move(v);
  n->order = ++g_order;
  bool rg = false;
  for (auto& p : parents) rg = rg || p->requires_grad;
  n->requires_grad = rg;
  if (rg) {
    n->parents = std::move(parents);
    n->backfn = std::move(back);
  }
  return n;
}

}  // namespace

Var constant(Mat v) {
  auto n = std::make_shared<Node>();
  n->val = std::move(v);
  n->order = ++g_order;
  return n;
}

Var param(Mat v) {
  auto n = std::make_shared<Node>();
  n->val = std::move(v);
  n->order = ++g_order;
  n->requires_grad = true;
  return n;
}

Var add(const Var& a, const Var& b) {
  return make(a->val + b->val, {a, b}, [](Node& n) {
    for (auto& p : n.parents)
      if (p->requires_grad) {
        p->ensure_grad();
        p->grad += n.grad;
      }
  });
}

Var sub(const Var& a, const Var& b) {
  return make(a->val - b->val, {a, b}, [](Node& n) {
    if (n.parents[0]->requires_grad) {
      n.parents[0]->ensure_grad();
      n.parents[0]->grad += n.grad;
    }
    if (n.parents[1]->requires_grad) {
      n.parents[1]->ensure_grad();
      n.parents[1]->grad -= n.grad;
    }
  });
}

Var mul(const Var& a, const Var& b) {
  return make(a->val.cwiseProduct(b->val), {a, b}, [](Node& n) {
    auto& a = n.parents[0];
    auto& b = n.parents[1];
    if (a->requires_grad) {
      a->ensure_grad();
      a->grad += n.grad.cwiseProduct(b->val);
    }
    if (b->requires_grad) {
      b->ensure_grad();
      b->grad += n.grad.cwiseProduct(a->val);
    }
  });
}

Var scale(const Var& a, double s) {
  return make(a->val * s, {a}, [s](Node& n) {
    n.parents[0]->ensure_grad();
    n.parents[0]->grad += n.grad * s;
  });
}

Var elu(const Var& a) {
  Mat y = a->val.unaryExpr(
      [](double x) { return x > 0 ? x : std::expm1(x); });
  return make(std::move(y), {a}, [](Node& n) {
    auto& p = n.parents[0];
    p->ensure_grad();
    p->grad.array() +=
        n.grad.array() * n.val.array().unaryExpr([](double y) {
          return y > 0 ? 1.0 : y + 1.0;  // d elu = 1 or exp(x) = y+1
        });
  });
}

Var sigmoid(const Var& a) {
  Mat y = a->val.unaryExpr(
      [](double x) { return 1.0 / (1.0 + std::exp(-x)); });
  return make(std::move(y), {a}, [](Node& n) {
    auto& p = n.parents[0];
    p->ensure_grad();
    p->grad.array() +=
        n.grad.array() * n.val.array() * (1.0 - n.val.array());
  });
}

Var abs(const Var& a) {
  return make(a->val.cwiseAbs(), {a}, [](Node& n) {
    auto& p = n.parents[0];
    p->ensure_grad();
    p->grad.array() += n.grad.array() * p->val.array().sign();
  });
}

Var square(const Var& a) {
  return make(a->val.array().square().matrix(), {a}, [](Node& n) {
    auto& p = n.parents[0];
    p->ensure_grad();
    p->grad.array() += 2.0 * n.grad.array() * p->val.array();
  });
}

Var matmul(const Var& a, const Var& b) {
  return make(a->val * b->val, {a, b}, [](Node& n) {
    auto& a = n.parents[0];
    auto& b = n.parents[1];
    if (a->requires_grad) {
      a->ensure_grad();
      a->grad += n.grad * b->val.transpose();
    }
    if (b->requires_grad) {
      b->ensure_grad();
      b->grad += a->val.transpose() * n.grad;
    }
  });
}

Var add_rowvec(const Var& a, const Var& b) {
  Mat y = a->val;
  y.rowwise() += b->val.row(0);
  return make(std::move(y), {a, b}, [](Node& n) {
    auto& a = n.parents[0];
    auto& b = n.parents[1];
    if (a->requires_grad) {
      a->ensure_grad();
      a->grad += n.grad;
    }
    if (b->requires_grad) {
      b->ensure_grad();
      b->grad.row(0) += n.grad.colwise().sum();
    }
  });
}

Var gather_rows(const Var& a, std::vector<int> idx) {
  Mat y(static_cast<int>(idx.size()), a->val.cols());
  for (size_t i = 0; i < idx.size(); ++i) y.row(static_cast<int>(i)) = a->val.row(idx[i]);
  return make(std::move(y), {a}, [idx = std::move(idx)](Node& n) {
    auto& p = n.parents[0];
    p->ensure_grad();
    for (size_t i = 0; i < idx.size(); ++i)
      p->grad.row(idx[i]) += n.grad.row(static_cast<int>(i));
  });
}

Var row_dot(const Var& a, const Var& b) {
  Mat y = (a->val.array() * b->val.array()).rowwise().sum().matrix();
  return make(std::move(y), {a, b}, [](Node& n) {
    auto& a = n.parents[0];
    auto& b = n.parents[1];
    if (a->requires_grad) {
      a->ensure_grad();
      a->grad.array() +=
          b->val.array().colwise() * n.grad.col(0).array();
    }
    if (b->requires_grad) {
      b->ensure_grad();
      b->grad.array() +=
          a->val.array().colwise() * n.grad.col(0).array();
    }
  });
}

Var row_scale(const Var& a, const Var& s) {
  Mat y = a->val.array().colwise() * s->val.col(0).array();
  return make(std::move(y), {a, s}, [](Node& n) {
    auto& a = n.parents[0];
    auto& s = n.parents[1];
    if (a->requires_grad) {
      a->ensure_grad();
      a->grad.array() += n.grad.array().colwise() * s->val.col(0).array();
    }
    if (s->requires_grad) {
      s->ensure_grad();
      s->grad.col(0).array() +=
          (n.grad.array() * a->val.array()).rowwise().sum();
    }
  });
}

Var sum_all(const Var& a) {
  Mat y(1, 1);
  y(0, 0) = a->val.sum();
  return make(std::move(y), {a}, [](Node& n) {
    auto& p = n.parents[0];
    p->ensure_grad();
    p->grad.array() += n.grad(0, 0);
  });
}

Var mean_all(const Var& a) {
  double inv = 1.0 / static_cast<double>(a->val.size());
  Mat y(1, 1);
  y(0, 0) = a->val.sum() * inv;
  return make(std::move(y), {a}, [inv](Node& n) {
    auto& p = n.parents[0];
    p->ensure_grad();
    p->grad.array() += n.grad(0, 0) * inv;
  });
}

Var sum_rows_l2(const Var& a) {
  Mat y(1, 1);
  y(0, 0) = a->val.squaredNorm();
  return make(std::move(y), {a}, [](Node& n) {
    auto& p = n.parents[0];
    p->ensure_grad();
    p->grad += 2.0 * n.grad(0, 0) * p->val;
  });
}

Var segment_softmax(const Var& logits, std::vector<int> seg, int n_seg) {
  int E = static_cast<int>(logits->val.rows());
  Eigen::VectorXd mx = Eigen::VectorXd::Constant(n_seg, -1e300);
  for (int e = 0; e < E; ++e)
    mx[seg[e]] = std::max(mx[seg[e]], logits->val(e, 0));
  Eigen::VectorXd den = Eigen::VectorXd::Zero(n_seg);
  Mat y(E, 1);
  for (int e = 0; e < E; ++e) {
    y(e, 0) = std::exp(logits->val(e, 0) - mx[seg[e]]);
    den[seg[e]] += y(e, 0);
  }
  for (int e = 0; e < E; ++e) y(e, 0) /= den[seg[e]];
  return make(std::move(y), {logits},
              [seg = std::move(seg), n_seg](Node& n) {
                auto& p = n.parents[0];
                p->ensure_grad();
                // dL/dl_e = y_e (g_e - sum_{f in seg} g_f y_f)
                Eigen::VectorXd dot = Eigen::VectorXd::Zero(n_seg);
                int E = static_cast<int>(n.val.rows());
                for (int e = 0; e < E; ++e)
                  dot[seg[e]] += n.grad(e, 0) * n.val(e, 0);
                for (int e = 0; e < E; ++e)
                  p->grad(e, 0) +=
                      n.val(e, 0) * (n.grad(e, 0) - dot[seg[e]]);
              });
}

Var segment_weighted_sum(const Var& vals, const Var& w, std::vector<int> seg,
                         int n_out) {
  Mat y = Mat::Zero(n_out, vals->val.cols());
  int E = static_cast<int>(vals->val.rows());
  for (int e = 0; e < E; ++e) y.row(seg[e]) += w->val(e, 0) * vals->val.row(e);
  return make(std::move(y), {vals, w}, [seg = std::move(seg)](Node& n) {
    auto& vals = n.parents[0];
    auto& w = n.parents[1];
    int E = static_cast<int>(vals->val.rows());
    if (vals->requires_grad) {
      vals->ensure_grad();
      for (int e = 0; e < E; ++e)
        vals->grad.row(e) += w->val(e, 0) * n.grad.row(seg[e]);
    }
    if (w->requires_grad) {
      w->ensure_grad();
      for (int e = 0; e < E; ++e)
        w->grad(e, 0) += n.grad.row(seg[e]).dot(vals->val.row(e));
    }
  });
}

void backward(const Var& loss) {
  if (loss->val.size() != 1)
    throw std::runtime_error("backward: loss must be scalar");
  // collect reachable subgraph
  std::vector<Node*> order;
  std::unordered_set<Node*> seen;
  std::vector<Var> stack = {loss};
  std::vector<Var> hold;  // keep shared ownership during traversal
  while (!stack.empty()) {
    Var v = stack.back();
    stack.pop_back();
    if (!seen.insert(v.get()).second) continue;
    hold.push_back(v);
    order.push_back(v.get());
    for (auto& p : v->parents) stack.push_back(p);
  }
  for (Node* n : order) n->grad = Mat::Zero(n->val.rows(), n->val.cols());
  std::sort(order.begin(), order.end(),
            [](Node* a, Node* b) { return a->order > b->order; });
  loss->grad(0, 0) = 1.0;
  for (Node* n : order)
    if (n->backfn && n->requires_grad) n->backfn(*n);
}

}  // namespace chemred::nn
