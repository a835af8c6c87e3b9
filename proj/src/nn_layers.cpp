#include "chemred/nn/layers.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace chemred::nn {

Var& ParamStore::make(const std::string& name, int rows, int cols, int fan_in,
                      std::mt19937_64& rng) {
  auto it = params.find(name);
  if (it != params.end()) return it->second;
  double bound = 1.0 / std::sqrt(static_cast<double>(std::max(fan_in, 1)));
  std::uniform_real_distribution<double> u(-bound, bound);
  Mat m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = u(rng);
  return params.emplace(name, param(std::move(m))).first->second;
}

Var& ParamStore::make_zero(const std::string& name, int rows, int cols) {
  auto it = params.find(name);
  if (it != params.end()) return it->second;
  return params.emplace(name, param(Mat::Zero(rows, cols))).first->second;
}

void ParamStore::zero_grad() {
  for (auto& [k, v] : params) v->grad.setZero();
}

void ParamStore::adam_step(double lr, double beta1, double beta2, double eps) {
  ++adam_t;
  double bc1 = 1.0 - std::pow(beta1, adam_t);
  double bc2 = 1.0 - std::pow(beta2, adam_t);
  for (auto& [name, v] : params) {
    if (v->grad.size() == 0) continue;
    Mat& m = adam_m.try_emplace(name, Mat::Zero(v->val.rows(), v->val.cols()))
                 .first->second;
    Mat& s = adam_v.try_emplace(name, Mat::Zero(v->val.rows(), v->val.cols()))
                 .first->second;
    m = beta1 * m + (1.0 - beta1) * v->grad;
    s = beta2 * s.array().matrix() +
        (1.0 - beta2) * v->grad.array().square().matrix();
    Mat mh = m / bc1;
    Mat sh = s / bc2;
    v->val.array() -= lr * mh.array() / (sh.array().sqrt() + eps);
  }
}

bool ParamStore::all_finite() const {
  for (auto& [k, v] : params)
    if (!v->val.allFinite()) return false;
  return true;
}

void ParamStore::save(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write checkpoint " + path);
  f << "chemred-checkpoint v1\n" << params.size() << "\n";
  f.precision(17);
  f.setf(std::ios::scientific);
  for (auto& [name, v] : params) {
    f << name << " " << v->val.rows() << " " << v->val.cols() << "\n";
    for (int i = 0; i < v->val.rows(); ++i) {
      for (int j = 0; j < v->val.cols(); ++j)
        f << v->val(i, j) << (j + 1 < v->val.cols() ? " " : "");
      f << "\n";
    }
  }
}

void ParamStore::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read checkpoint " + path);
  std::string magic, ver;
  f >> magic >> ver;
  if (magic != "chemred-checkpoint" || ver != "v1")
    throw std::runtime_error("bad checkpoint header in " + path);
  size_t n;
  f >> n;
  for (size_t i = 0; i < n; ++i) {
    std::string name;
    int rows, cols;
    f >> name >> rows >> cols;
    if (!f) throw std::runtime_error("truncated checkpoint " + path);
    auto it = params.find(name);
    if (it != params.end()) {
      // shape manifest validation against the existing model definition
      if (it->second->val.rows() != rows || it->second->val.cols() != cols)
        throw std::runtime_error("checkpoint shape mismatch for " + name);
    } else {
      params.emplace(name, param(Mat::Zero(rows, cols)));
      it = params.find(name);
    }
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) f >> it->second->val(r, c);
  }
  if (!f) throw std::runtime_error("truncated checkpoint " + path);
}

Var& linear_init(ParamStore& ps, const std::string& name, int in, int out,
                 std::mt19937_64& rng) {
  Var& w = ps.make(name + ".W", in, out, in, rng);
  ps.make_zero(name + ".b", 1, out);
  return w;
}

Var linear(const Var& x, ParamStore& ps, const std::string& name) {
  return add_rowvec(matmul(x, ps.at(name + ".W")), ps.at(name + ".b"));
}

void mlp_init(ParamStore& ps, const std::string& name,
              const std::vector<int>& sizes, std::mt19937_64& rng) {
  for (size_t i = 0; i + 1 < sizes.size(); ++i)
    linear_init(ps, name + ".l" + std::to_string(i), sizes[i], sizes[i + 1],
                rng);
}

Var mlp_forward(const Var& x, ParamStore& ps, const std::string& name,
                int n_layers, bool sigmoid_out) {
  Var h = x;
  for (int i = 0; i < n_layers; ++i) {
    h = linear(h, ps, name + ".l" + std::to_string(i));
    if (i + 1 < n_layers) h = elu(h);
  }
  return sigmoid_out ? sigmoid(h) : h;
}

void transformer_init(ParamStore& ps, const std::string& prefix, int d,
                      std::mt19937_64& rng) {
  for (int i = 1; i <= 5; ++i)
    ps.make(prefix + ".W" + std::to_string(i), d, d, d, rng);
}

Var transformer_layer(const Var& h, const Var& e,
                      const std::vector<int>& edge_src,
                      const std::vector<int>& edge_dst, ParamStore& ps,
                      const std::string& prefix) {
  int n = static_cast<int>(h->val.rows());
  int d = static_cast<int>(h->val.cols());
  Var self = matmul(h, ps.at(prefix + ".W1"));
  if (edge_src.empty()) return self;
  Var key = gather_rows(matmul(h, ps.at(prefix + ".W3")), edge_dst);
  Var qry = add(gather_rows(matmul(h, ps.at(prefix + ".W4")), edge_src),
                matmul(e, ps.at(prefix + ".W5")));
  Var logits = scale(row_dot(key, qry), 1.0 / std::sqrt(double(d)));
  Var alpha = segment_softmax(logits, edge_dst, n);
  Var msg = gather_rows(matmul(h, ps.at(prefix + ".W2")), edge_src);
  Var agg = segment_weighted_sum(msg, alpha, edge_dst, n);
  return add(self, agg);
}

Var sparsity_loss(const Var& node_scores, const Var& edge_scores) {
  return add(mean_all(node_scores), mean_all(edge_scores));
}

std::vector<int> topk_select(const Eigen::VectorXd& scores, double ratio,
                             const std::set<int>& protected_) {
  int n = static_cast<int>(scores.size());
  int k = static_cast<int>(std::ceil(ratio * n));
  k = std::clamp(k, 1, n);
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;  // tie: lower species index wins
  });
  std::set<int> out(idx.begin(), idx.begin() + k);
  out.insert(protected_.begin(), protected_.end());
  return {out.begin(), out.end()};
}

}  // namespace chemred::nn
