#include "chemred/kinetics.hpp"

#include <cmath>

namespace chemred {

Kinetics::Kinetics(const Mechanism& mech)
    : mech_(&mech), ns_(mech.n_species()), nr_(mech.n_reactions()) {
  mw_.resize(ns_);
  for (int k = 0; k < ns_; ++k) mw_[k] = mech.species[k].molecular_weight;
  conc_.resize(ns_);
  kf_.resize(nr_);
  kr_.resize(nr_);
  q_.resize(nr_);
  rop_f_.resize(nr_);
  rop_r_.resize(nr_);
  cp_R_.resize(ns_);
  h_RT_.resize(ns_);
  s_R_.resize(ns_);
}

double Kinetics::mean_molecular_weight(const Eigen::VectorXd& Y) const {
  double inv = 0.0;
  for (int k = 0; k < ns_; ++k) inv += Y[k] / mw_[k];
  return 1.0 / inv;
}

void Kinetics::mole_fractions(const Eigen::VectorXd& Y,
                              Eigen::VectorXd& X) const {
  double wbar = mean_molecular_weight(Y);
  X = (Y.array() / mw_.array()) * wbar;
}

void Kinetics::mass_fractions(const Eigen::VectorXd& X,
                              Eigen::VectorXd& Y) const {
  double wbar = X.dot(mw_);
  Y = (X.array() * mw_.array()) / wbar;
}

double Kinetics::density(double T, double P, const Eigen::VectorXd& Y) const {
  return P * mean_molecular_weight(Y) / (kGasConstant * T);
}

void Kinetics::thermo(double T, Eigen::VectorXd& cp_R, Eigen::VectorXd& h_RT,
                      Eigen::VectorXd& s_R) const {
  for (int k = 0; k < ns_; ++k) {
    ThermoEval e = thermo_eval(mech_->species[k], T);
    cp_R[k] = e.cp_R;
    h_RT[k] = e.h_RT;
    s_R[k] = e.s_R;
  }
}

double Kinetics::cp_mass(double T, const Eigen::VectorXd& Y) const {
  thermo(T, cp_R_, h_RT_, s_R_);
  double cp = 0.0;
  for (int k = 0; k < ns_; ++k)
    cp += Y[k] * cp_R_[k] * kGasConstant / mw_[k];
  return cp;
}

double Kinetics::enthalpy_mass(double T, const Eigen::VectorXd& Y) const {
  thermo(T, cp_R_, h_RT_, s_R_);
  double h = 0.0;
  for (int k = 0; k < ns_; ++k)
    h += Y[k] * h_RT_[k] * kGasConstant * T / mw_[k];
  return h;
}

void Kinetics::rate_constants(double T, const Eigen::VectorXd& conc) {
  const double RT = kGasConstant * T;
  thermo(T, cp_R_, h_RT_, s_R_);
  const double logT = std::log(T);

  for (int j = 0; j < nr_; ++j) {
    const Reaction& r = mech_->reactions[j];
    double kf =
        r.rate.A * std::exp(r.rate.b * logT - r.rate.Ea / RT);

    // falloff blending
    if (r.kind == RateKind::FalloffLindemann ||
        r.kind == RateKind::FalloffTroe) {
      double cm;
      if (r.bath_species) {
        cm = conc[*r.bath_species];
      } else {
        cm = conc.sum();
        for (auto& [k, eff] : r.efficiencies) cm += (eff - 1.0) * conc[k];
      }
      double k0 = r.low->A * std::exp(r.low->b * logT - r.low->Ea / RT);
      double pr = k0 * cm / std::max(kf, 1e-300);
      double F = 1.0;
      if (r.kind == RateKind::FalloffTroe) {
        const TroeParams& t = *r.troe;
        double fcent = (1.0 - t.a) * std::exp(-T / t.T3) +
                       t.a * std::exp(-T / t.T1);
        if (t.T2) fcent += std::exp(-*t.T2 / T);
        fcent = std::max(fcent, 1e-300);
        double lfc = std::log10(fcent);
        double c = -0.4 - 0.67 * lfc;
        double n = 0.75 - 1.27 * lfc;
        double lpr = std::log10(std::max(pr, 1e-300));
        double f1 = (lpr + c) / (n - 0.14 * (lpr + c));
        F = std::pow(10.0, lfc / (1.0 + f1 * f1));
      }
      kf *= pr / (1.0 + pr) * F;
    }

    kf_[j] = kf;

    if (r.reversible) {
      // Kc from standard-state Gibbs energies
      double ds = 0.0, dh = 0.0, dnu = 0.0;
      for (auto& [k, nu] : r.products) {
        ds += nu * s_R_[k];
        dh += nu * h_RT_[k];
        dnu += nu;
      }
      for (auto& [k, nu] : r.reactants) {
        ds -= nu * s_R_[k];
        dh -= nu * h_RT_[k];
        dnu -= nu;
      }
      double kp = std::exp(ds - dh);  // exp(-dG/RT)
      double kc = kp * std::pow(kPatm / RT, dnu);
      kr_[j] = kf / std::max(kc, 1e-300);
    } else {
      kr_[j] = 0.0;
    }
  }
}

void Kinetics::production_rates(double T, double P, const Eigen::VectorXd& Y,
                                Eigen::VectorXd& wdot) {
  double rho = density(T, P, Y);
  for (int k = 0; k < ns_; ++k)
    conc_[k] = std::max(rho * Y[k] / mw_[k], 0.0);

  rate_constants(T, conc_);

  wdot.setZero(ns_);
  for (int j = 0; j < nr_; ++j) {
    const Reaction& r = mech_->reactions[j];
    double fwd = kf_[j], rev = kr_[j];
    for (auto& [k, nu] : r.reactants) fwd *= std::pow(conc_[k], nu);
    for (auto& [k, nu] : r.products) rev *= std::pow(conc_[k], nu);
    if (r.kind == RateKind::ThreeBody) {
      double cm = conc_.sum();
      for (auto& [k, eff] : r.efficiencies) cm += (eff - 1.0) * conc_[k];
      fwd *= cm;
      rev *= cm;
    }
    rop_f_[j] = fwd;
    rop_r_[j] = rev;
    double q = fwd - rev;
    q_[j] = q;
    for (auto& [k, nu] : r.reactants) wdot[k] -= nu * q;
    for (auto& [k, nu] : r.products) wdot[k] += nu * q;
  }
}

void Kinetics::creation_destruction(Eigen::VectorXd& cdot,
                                    Eigen::VectorXd& ddot) const {
  cdot.setZero();
  ddot.setZero();
  for (int j = 0; j < nr_; ++j) {
    const Reaction& r = mech_->reactions[j];
    for (auto& [k, nu] : r.reactants) {
      ddot[k] += nu * rop_f_[j];
      cdot[k] += nu * rop_r_[j];
    }
    for (auto& [k, nu] : r.products) {
      cdot[k] += nu * rop_f_[j];
      ddot[k] += nu * rop_r_[j];
    }
  }
}

double Kinetics::heat_release_rate(double T, double P,
                                   const Eigen::VectorXd& Y) {
  static thread_local Eigen::VectorXd wdot;
  wdot.resize(ns_);
  production_rates(T, P, Y, wdot);
  thermo(T, cp_R_, h_RT_, s_R_);
  double hrr = 0.0;
  for (int k = 0; k < ns_; ++k)
    hrr -= wdot[k] * h_RT_[k] * kGasConstant * T;
  return hrr;
}

Eigen::VectorXd mixture_from_phi(const Mechanism& m, const std::string& fuel,
                                 double phi) {
  int fi = m.require_species(fuel);
  int o2 = m.require_species("O2");
  int n2 = m.require_species("N2");
  const auto& comp = m.species[fi].composition;
  double nc = 0, nh = 0, no = 0;
  for (auto& [el, n] : comp) {
    if (el == "C")
      nc = n;
    else if (el == "H")
      nh = n;
    else if (el == "O")
      no = n;
    else if (el != "N")
      throw MechError("mixture_from_phi: fuel element " + el +
                      " not supported");
  }
  double o2_stoich = nc + nh / 4.0 - no / 2.0;
  // moles per mole fuel
  double n_o2 = o2_stoich / phi;
  double n_n2 = n_o2 * 79.0 / 21.0;
  Eigen::VectorXd X = Eigen::VectorXd::Zero(m.n_species());
  double tot = 1.0 + n_o2 + n_n2;
  X[fi] = 1.0 / tot;
  X[o2] = n_o2 / tot;
  X[n2] = n_n2 / tot;
  Eigen::VectorXd Y(m.n_species());
  Kinetics(m).mass_fractions(X, Y);
  return Y;
}

}  // namespace chemred
