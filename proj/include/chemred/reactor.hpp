#pragma once

#include <optional>
#include <string>
#include <vector>

#include "chemred/kinetics.hpp"

namespace chemred {

struct ReactorOptions {
  double t_end = 10.0;   // s
  double rtol = 1e-8;
  double atol = 1e-14;
  double dt_init = 1e-9;
  int max_steps = 2000000;
  /// Stop once ignition has clearly completed (temperature well above T0
  /// and dT/dt collapsed past its peak).  Cuts the expensive equilibrium
  /// tail when only tau and peak HRR are wanted.
  bool stop_after_ignition = false;
};

/// Constant-pressure adiabatic homogeneous reactor trajectory.
/// One row per accepted integrator step.
struct Trajectory {
  double P = 0.0;
  std::vector<double> t;
  std::vector<double> T;
  std::vector<double> hrr;     // W/m3
  std::vector<double> dTdt;    // K/s, from the RHS at each state
  Eigen::MatrixXd Y;           // steps x n_species

  int n_steps() const { return static_cast<int>(t.size()); }
};

Trajectory integrate_constant_pressure(Kinetics& kin, double T0, double P0,
                                       const Eigen::VectorXd& Y0,
                                       const ReactorOptions& opts = {});

/// Ignition delay: time of the maximum dT/dt, refined with a quadratic fit
/// through the three points bracketing the discrete maximum.  Empty when the
/// mixture never ignites (max dT/dt below 1 K/s).
std::optional<double> ignition_delay(const Trajectory& traj);

double peak_heat_release(const Trajectory& traj);

/// Indices of `n` trajectory rows log-spaced in time between the first
/// positive time and the end, always including the ignition region.
std::vector<int> sample_indices(const Trajectory& traj, int n);

/// CSV schema: t,T,P,hrr,Y_<species>...
void write_trajectory_csv(const Trajectory& traj, const Mechanism& m,
                          const std::string& path);

}  // namespace chemred
