#pragma once

#include <cstdint>

#include "chemred/drgep.hpp"
#include "chemred/nn/layers.hpp"

namespace chemred {

/// MLP mapping scaled (T0, P0) to log10 ignition delay, trained once on the
/// detailed mechanism and frozen afterwards.
struct SurrogateModel {
  nn::ParamStore ps;
  double T_min = 0, T_max = 0, P_min = 0, P_max = 0;  // training bounds
  int n_layers = 0;
  double holdout_rmse = 0.0;  // log10 units

  double predict(double T0, double P0, bool* extrapolated = nullptr) const;
};

struct SurrogateConfig {
  double T_lo = 1300.0, T_hi = 1700.0;
  int n_points = 33;
  double P0 = kPatm;
  double phi = 1.0;
  std::string fuel = "CH4";
  std::vector<int> hidden = {64, 64, 64};
  int n_epochs = 4000;
  double lr = 3e-3;
  std::uint64_t seed = 1;
  ReactorOptions reactor;
};

SurrogateModel train_surrogate(const Mechanism& m, const SurrogateConfig& cfg,
                               std::function<void(const std::string&)> log = {});

/// Train a surrogate on synthetic (T, log10 tau) pairs — used by tests.
SurrogateModel fit_surrogate_data(const std::vector<double>& T,
                                  const std::vector<double>& log10_tau,
                                  double P0, const SurrogateConfig& cfg);

struct SmConfig {
  int d = 128;
  int n_epochs = 400;
  double lr = 1e-3;
  double lambda_sp = 0.1;
  double ratio = 0.85;            // per-pass retention
  std::vector<double> ratios;     // optional per-pass schedule; overrides
                                  // `ratio` for the passes it covers
  int max_passes = 6;
  std::uint64_t seed = 0;
  double phi = 1.0;
  std::string fuel = "CH4";
  // training conditions: trajectories whose states feed the GNN
  std::vector<double> train_T = {1300.0, 1400.0, 1500.0, 1600.0, 1700.0};
  double P0 = kPatm;
  int states_per_traj = 4;
  double budget = 0.05;           // avg IDT error over the validation grid
  std::vector<double> grid_T;     // default 11 points over 1000-2000 K
  std::vector<std::string> protected_ = {};
  ReactorOptions reactor;
};

/// One training sample: a state graph plus its trajectory's labels.
struct SmSample {
  MechGraph graph;
  double T0 = 0, P0 = 0;
  double log10_tau = 0;
};

struct SmModel {
  nn::ParamStore ps;
  SmConfig cfg;
  Eigen::RowVectorXd node_mu, node_sig, edge_mu, edge_sig;
};

SmModel make_sm_model(const SmConfig& cfg);

struct SmForward {
  nn::Var node_scores, edge_scores;
  std::vector<int> retained;
  nn::Var T_hat;  // 1x2: scaled (T_hat, P_hat)
};

/// Two transformer layers, score heads, top-k, score-gated mean pooling,
/// (T,P) regression head.
SmForward gnn_sm_forward(const MechGraph& g, SmModel& model, double ratio,
                         const std::set<int>& protected_);

struct SmLoss {
  double l_ig = 0, l_sparsity = 0, l_total = 0;
};

/// Minimize L_ig + lambda_sp * L_sparsity through the frozen surrogate.
/// L_ig is |log10 tau_hat - log10 tau| averaged over samples.
std::vector<SmLoss> train_gnn_sm(const std::vector<SmSample>& samples,
                                 const SurrogateModel& surrogate,
                                 SmModel& model,
                                 std::function<void(int, const SmLoss&)> cb = {});

/// Mean node scores over samples -> top-k -> submechanism (with closure).
Mechanism reduce_pass(const Mechanism& m, const std::vector<SmSample>& samples,
                      SmModel& model, double ratio,
                      const std::vector<int>& protected_);

struct SmPass {
  int n_species = 0, n_reactions = 0;
  double avg_idt_error = 0.0;  // fraction, over the validation grid
  bool accepted = false;
};

struct SmReducerState {
  Mechanism mech;              // last accepted
  std::vector<SmPass> passes;
  std::vector<double> tau_detailed;  // on the validation grid
};

/// Iterative reduction: rebuild graphs, retrain, reduce, validate; stops on
/// the first pass that exceeds the budget and returns the last accepted.
SmReducerState iterate_passes(const Mechanism& m, const SurrogateModel& sur,
                              const SmConfig& cfg,
                              std::function<void(const std::string&)> log = {});

}  // namespace chemred
