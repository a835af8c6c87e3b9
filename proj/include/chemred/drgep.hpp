#pragma once

#include <functional>

#include "chemred/graph.hpp"
#include "chemred/reactor.hpp"

namespace chemred {

/// Direct interaction coefficients at one state:
/// r_AB = |sum_j nu_Aj q_j delta_Bj| / max(P_A, C_A), clipped to [0,1],
/// with r_AA = 1 by convention and 0/0 -> 0.
Eigen::MatrixXd direct_interaction(Kinetics& kin, const ThermoState& s);

/// Max-product path propagation from every target: R_A = max over targets T
/// of the best product of coefficients along a directed path T -> A.
Eigen::VectorXd propagate(const Eigen::MatrixXd& r,
                          const std::vector<int>& targets);

struct DrgepOptions {
  std::vector<std::pair<double, double>> conditions;  // (T0 K, P0 Pa)
  double phi = 1.0;
  std::string fuel = "CH4";
  std::vector<std::string> targets = {};    // default {fuel, O2}
  std::vector<std::string> protected_ = {};  // default {fuel, O2, N2}
  int samples_per_condition = 25;
  ReactorOptions reactor;
};

/// Overall importance R_A: max over sampled states of all conditions and
/// over all targets.
Eigen::VectorXd overall_importance(const Mechanism& m, Kinetics& kin,
                                   const DrgepOptions& opts);

struct DrgepReduction {
  Mechanism mech;
  std::vector<int> kept;      // indices into the parent mechanism
  Eigen::VectorXd importance;  // R_A over the parent species
  double epsilon = 0.0;
};

DrgepReduction reduce_drgep(const Mechanism& m, const DrgepOptions& opts,
                            double epsilon);

/// Step epsilon upward through the distinct R_A values and return the
/// smallest mechanism whose average IDT error over `grid_T` stays within
/// `error_budget` (fraction, e.g. 0.05).  The detailed-mechanism IDTs are
/// computed once and reused.
struct SweepResult {
  DrgepReduction reduction;
  double avg_idt_error = 0.0;  // fraction
  std::vector<double> grid_T;
  std::vector<double> tau_detailed, tau_reduced;
};

SweepResult threshold_sweep(const Mechanism& m, const DrgepOptions& opts,
                            const std::vector<double>& grid_T,
                            double error_budget,
                            std::function<void(const std::string&)> log = {});

}  // namespace chemred
