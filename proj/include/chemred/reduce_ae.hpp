#pragma once

#include <cstdint>

#include "chemred/drgep.hpp"
#include "chemred/nn/layers.hpp"

namespace chemred {

struct AeConfig {
  int d = 128;              // hidden width (paper-fixed)
  int n_epochs = 2000;
  double lr = 1e-3;
  double lambda_rec = 1.0;
  double lambda_sp = 0.05;
  double theta = 0.1;
  std::uint64_t seed = 0;
  // training condition (single-point, condition-targeted formulation)
  double target_T = 1500.0;
  double target_P = kPatm;
  double phi = 1.0;
  std::string fuel = "CH4";
  int n_states = 16;        // graphs sampled along the target trajectory
  double budget = 0.05;     // IDT error budget at the target condition
  std::vector<std::string> protected_ = {};  // default fuel, O2, N2
  ReactorOptions reactor;
};

/// Graph autoencoder: encode features to 128-d, one message-passing layer,
/// logistic 1-d latent scores; decode scores back to the feature dims.
struct AeModel {
  nn::ParamStore ps;
  AeConfig cfg;
  // per-feature standardization fitted on the training graphs
  Eigen::RowVectorXd node_mu, node_sig, edge_mu, edge_sig;
};

struct AeForward {
  nn::Var node_scores, edge_scores;  // (n x 1), (E x 1) in (0,1)
  nn::Var node_recon, edge_recon;    // standardized-feature reconstructions
  nn::Var l_n, l_e;                  // reconstruction losses (1x1)
};

AeModel make_ae_model(const AeConfig& cfg);
void fit_feature_scaling(AeModel& model, const std::vector<MechGraph>& graphs);
AeForward gnn_ae_forward(const MechGraph& g, AeModel& model);

struct AeLoss {
  double l_n = 0, l_e = 0, l_sparsity = 0, l_total = 0;
};

/// Full-batch Adam training; returns the per-epoch loss trace.
std::vector<AeLoss> train_gnn_ae(const std::vector<MechGraph>& graphs,
                                 AeModel& model,
                                 std::function<void(int, const AeLoss&)> cb = {});

/// Mean node score per species over a set of graphs (frozen model).
Eigen::VectorXd ae_species_scores(const std::vector<MechGraph>& graphs,
                                  AeModel& model);

/// Keep species with S_X >= theta plus the protected set (closure applied).
Mechanism prune_by_threshold(const Mechanism& m, const Eigen::VectorXd& scores,
                             double theta, const std::vector<int>& protected_);

struct AeReduction {
  Mechanism mech;
  Eigen::VectorXd scores;      // over the *parent* mechanism species
  std::vector<int> kept;
  double idt_err_target = 0.0;  // fraction at the target condition
  int iterations = 0;
};

/// Train -> prune -> validate at the target condition, iterated to a fixed
/// point or until the budget is exceeded (last accepted returned).
AeReduction iterate_prune(const Mechanism& m, const AeConfig& cfg,
                          std::function<void(const std::string&)> log = {});

/// Greedy essential-species search: visit non-protected species by ascending
/// score, remove if both IDT and peak-HRR errors vs the starting mechanism
/// stay inside tolerance at every condition; sweep until stable.  The output
/// therefore always satisfies both tolerances relative to `start`.
Mechanism greedy_refine(const Mechanism& start,
                        const Eigen::VectorXd& start_scores,
                        const std::vector<std::string>& start_names,
                        const std::vector<std::pair<double, double>>& conditions,
                        const std::string& fuel, double phi, double tol_idt,
                        double tol_hrr,
                        const std::vector<std::string>& protected_names,
                        std::function<void(const std::string&)> log = {});

}  // namespace chemred
