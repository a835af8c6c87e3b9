#pragma once

#include <Eigen/Dense>

#include "chemred/mechanism.hpp"

namespace chemred {

/// Rate-of-progress and production-rate evaluator for one Mechanism.
/// All quantities SI: concentrations kmol/m3, rates kmol/(m3 s),
/// enthalpies J/kmol, heat release W/m3.  The evaluator owns scratch
/// buffers so repeated calls do not allocate.
class Kinetics {
 public:
  explicit Kinetics(const Mechanism& mech);

  const Mechanism& mech() const { return *mech_; }
  int n_species() const { return ns_; }
  int n_reactions() const { return nr_; }

  const Eigen::VectorXd& molecular_weights() const { return mw_; }

  double mean_molecular_weight(const Eigen::VectorXd& Y) const;
  void mole_fractions(const Eigen::VectorXd& Y, Eigen::VectorXd& X) const;
  void mass_fractions(const Eigen::VectorXd& X, Eigen::VectorXd& Y) const;
  double density(double T, double P, const Eigen::VectorXd& Y) const;

  /// cp/R, h/(RT), s0/R for every species at T (clamped to valid range).
  void thermo(double T, Eigen::VectorXd& cp_R, Eigen::VectorXd& h_RT,
              Eigen::VectorXd& s_R) const;
  double cp_mass(double T, const Eigen::VectorXd& Y) const;  // J/(kg K)
  double enthalpy_mass(double T, const Eigen::VectorXd& Y) const;  // J/kg

  /// Net species production rates wdot [kmol/(m3 s)].
  void production_rates(double T, double P, const Eigen::VectorXd& Y,
                        Eigen::VectorXd& wdot);

  /// Per-reaction net rate of progress q_j = rop_f - rop_r, after the last
  /// production_rates() call (same buffers).
  const Eigen::VectorXd& rop_net() const { return q_; }
  const Eigen::VectorXd& rop_forward() const { return rop_f_; }
  const Eigen::VectorXd& rop_reverse() const { return rop_r_; }

  /// Creation and destruction rates per species (both >= 0), from the
  /// forward/reverse split of the last production_rates() call.
  void creation_destruction(Eigen::VectorXd& cdot, Eigen::VectorXd& ddot) const;

  /// Volumetric heat release rate -sum_k h_k wdot_k [W/m3].
  double heat_release_rate(double T, double P, const Eigen::VectorXd& Y);

 private:
  void rate_constants(double T, const Eigen::VectorXd& conc);

  const Mechanism* mech_;
  int ns_, nr_;
  Eigen::VectorXd mw_;

  // scratch, sized at construction
  Eigen::VectorXd conc_, kf_, kr_, q_, rop_f_, rop_r_;
  mutable Eigen::VectorXd cp_R_, h_RT_, s_R_;
};

/// Stoichiometric fuel/O2/N2 mass fractions for fuel + air (79/21 N2/O2 by
/// mole) at equivalence ratio phi.  Throws if the fuel contains elements
/// other than C/H/O/N.
Eigen::VectorXd mixture_from_phi(const Mechanism& m, const std::string& fuel,
                                 double phi);

}  // namespace chemred
