#pragma once

#include <map>
#include <optional>
#include <random>
#include <set>

#include "chemred/nn/autodiff.hpp"

namespace chemred::nn {

/// Named trainable parameters with Adam moment buffers.
struct ParamStore {
  std::map<std::string, Var> params;
  std::map<std::string, Mat> adam_m, adam_v;
  long adam_t = 0;

  Var& at(const std::string& name) { return params.at(name); }
  const Var& at(const std::string& name) const { return params.at(name); }

  /// Create (or fetch) a parameter initialized uniform in
  /// [-1/sqrt(fan_in), 1/sqrt(fan_in)].
  Var& make(const std::string& name, int rows, int cols, int fan_in,
            std::mt19937_64& rng);
  Var& make_zero(const std::string& name, int rows, int cols);

  void zero_grad();
  /// Standard Adam with bias correction over all parameters that received
  /// gradients in the last backward pass.
  void adam_step(double lr, double beta1 = 0.9, double beta2 = 0.999,
                 double eps = 1e-8);

  bool all_finite() const;

  /// Versioned text checkpoint with a shape manifest; load() validates it.
  void save(const std::string& path) const;
  void load(const std::string& path);
};

/// y = x W + b with W named `name.W` ((in) x (out)) and b `name.b` (1 x out).
Var linear(const Var& x, ParamStore& ps, const std::string& name);
Var& linear_init(ParamStore& ps, const std::string& name, int in, int out,
                 std::mt19937_64& rng);

/// MLP with ELU hidden activations; `sizes` includes input and output dims.
/// Optional logistic squashing on the output (score heads).
void mlp_init(ParamStore& ps, const std::string& name,
              const std::vector<int>& sizes, std::mt19937_64& rng);
Var mlp_forward(const Var& x, ParamStore& ps, const std::string& name,
                int n_layers, bool sigmoid_out = false);

/// Graph transformer layer, Eqs. (5)-(6) form:
///   alpha_{u,v,e} = softmax over incoming edges of u of
///                   (W3 h_u) . (W4 h_v + W5 e_uv) / sqrt(d)
///   h'_u = W1 h_u + sum alpha W2 h_v
/// h: n x d node embeddings, e: E x d edge embeddings, directed src -> dst.
struct TransformerWeights {
  std::string prefix;  // expects prefix+".W1" .. ".W5" in the store
};
void transformer_init(ParamStore& ps, const std::string& prefix, int d,
                      std::mt19937_64& rng);
Var transformer_layer(const Var& h, const Var& e,
                      const std::vector<int>& edge_src,
                      const std::vector<int>& edge_dst, ParamStore& ps,
                      const std::string& prefix);

/// Eq. (1) sparsity term: mean node score + mean edge score.
Var sparsity_loss(const Var& node_scores, const Var& edge_scores);

/// k = ceil(ratio * N); highest scores win, ties to the lower index;
/// protected indices always included (within k when they qualify, appended
/// otherwise).  Returns sorted indices.
std::vector<int> topk_select(const Eigen::VectorXd& scores, double ratio,
                             const std::set<int>& protected_ = {});

}  // namespace chemred::nn
