#include "chemred/reactor.hpp"

#include <boost/numeric/odeint.hpp>
#include <boost/numeric/ublas/matrix.hpp>
#include <boost/numeric/ublas/vector.hpp>
#include <cmath>
#include <fstream>

namespace odeint = boost::numeric::odeint;
using ubvec = boost::numeric::ublas::vector<double>;
using ubmat = boost::numeric::ublas::matrix<double>;

namespace chemred {
namespace {

// RHS for the state [T, Y...] at constant pressure.  The same guard rails
// as the reference solver: T clamped, Y clipped, non-finite squashed.
struct Rhs {
  Kinetics* kin;
  double P;
  mutable Eigen::VectorXd Y, wdot;

  void eval(const ubvec& y, ubvec& dydt) const {
    int ns = kin->n_species();
    double T = y[0];
    if (!std::isfinite(T)) T = 6000.0;
    T = std::clamp(T, 250.0, 6000.0);
    Y.resize(ns);
    for (int k = 0; k < ns; ++k) {
      double v = y[k + 1];
      if (!std::isfinite(v)) v = 0.0;
      Y[k] = std::clamp(v, -1.0, 2.0);
    }
    wdot.resize(ns);
    kin->production_rates(T, P, Y, wdot);

    Eigen::VectorXd Yc = Y.cwiseMax(0.0);
    double rho = kin->density(T, P, Yc);
    double cp = kin->cp_mass(T, Yc);
    double hrr = 0.0;
    {
      // reuse species enthalpies computed inside heat release
      static thread_local Eigen::VectorXd cpR, hRT, sR;
      cpR.resize(ns);
      hRT.resize(ns);
      sR.resize(ns);
      kin->thermo(T, cpR, hRT, sR);
      for (int k = 0; k < ns; ++k)
        hrr -= wdot[k] * hRT[k] * kGasConstant * T;
    }
    dydt[0] = hrr / (rho * cp);
    for (int k = 0; k < ns; ++k)
      dydt[k + 1] = wdot[k] * kin->molecular_weights()[k] / rho;
  }

  void operator()(const ubvec& y, ubvec& dydt, double /*t*/) const {
    eval(y, dydt);
  }
};

// forward-difference Jacobian; rosenbrock4 wants it analytic, a numerical
// one is accurate enough at these tolerances
struct Jac {
  const Rhs* rhs;
  mutable ubvec f0, f1, yp;

  void operator()(const ubvec& y, ubmat& J, double /*t*/, ubvec& dfdt) const {
    size_t n = y.size();
    if (f0.size() != n) {
      f0.resize(n);
      f1.resize(n);
      yp.resize(n);
    }
    rhs->eval(y, f0);
    yp = y;
    for (size_t j = 0; j < n; ++j) {
      double h = 1e-7 * std::max(std::abs(y[j]), 1e-8);
      yp[j] = y[j] + h;
      rhs->eval(yp, f1);
      for (size_t i = 0; i < n; ++i) J(i, j) = (f1[i] - f0[i]) / h;
      yp[j] = y[j];
    }
    for (size_t i = 0; i < n; ++i) dfdt[i] = 0.0;
  }
};

}  // namespace

Trajectory integrate_constant_pressure(Kinetics& kin, double T0, double P0,
                                       const Eigen::VectorXd& Y0,
                                       const ReactorOptions& opts) {
  int ns = kin.n_species();
  Rhs rhs{&kin, P0, {}, {}};
  Jac jac{&rhs, {}, {}, {}};

  ubvec y(ns + 1);
  y[0] = T0;
  for (int k = 0; k < ns; ++k) y[k + 1] = Y0[k];

  auto stepper = odeint::make_controlled<
      odeint::rosenbrock4<double>>(opts.atol, opts.rtol);

  Trajectory traj;
  traj.P = P0;
  std::vector<Eigen::VectorXd> rows;
  ubvec dydt(ns + 1);

  auto record = [&](const ubvec& s, double t) {
    rhs.eval(s, dydt);
    traj.t.push_back(t);
    traj.T.push_back(s[0]);
    traj.dTdt.push_back(dydt[0]);
    Eigen::VectorXd Yk(ns);
    for (int k = 0; k < ns; ++k) Yk[k] = s[k + 1];
    rows.push_back(std::move(Yk));
    double rho = kin.density(std::clamp(s[0], 250.0, 6000.0), P0,
                             rows.back().cwiseMax(0.0));
    double cp = kin.cp_mass(std::clamp(s[0], 250.0, 6000.0),
                            rows.back().cwiseMax(0.0));
    traj.hrr.push_back(dydt[0] * rho * cp);
  };

  double t = 0.0, dt = opts.dt_init;
  record(y, t);
  int steps = 0;
  double peak_dTdt = 0.0;
  while (t < opts.t_end && steps < opts.max_steps) {
    if (t + dt > opts.t_end) dt = opts.t_end - t;
    odeint::controlled_step_result res =
        stepper.try_step(std::make_pair(rhs, jac), y, t, dt);
    if (res == odeint::success) {
      record(y, t);
      ++steps;
      peak_dTdt = std::max(peak_dTdt, traj.dTdt.back());
      if (opts.stop_after_ignition && traj.T.back() > T0 + 500.0 &&
          peak_dTdt > 1.0 && traj.dTdt.back() < 0.01 * peak_dTdt)
        break;
    }
    if (dt <= 0.0 || !std::isfinite(dt))
      throw MechError("reactor: step size collapsed at t=" + std::to_string(t));
  }
  if (steps >= opts.max_steps)
    throw MechError("reactor: step limit reached before t_end");

  traj.Y.resize(static_cast<int>(rows.size()), ns);
  for (size_t i = 0; i < rows.size(); ++i) traj.Y.row(i) = rows[i];
  return traj;
}

std::optional<double> ignition_delay(const Trajectory& traj) {
  int n = traj.n_steps();
  if (n < 3) return std::nullopt;
  int k = 0;
  for (int i = 1; i < n; ++i)
    if (traj.dTdt[i] > traj.dTdt[k]) k = i;
  if (traj.dTdt[k] < 1.0) return std::nullopt;
  if (k == 0 || k == n - 1) return traj.t[k];
  // vertex of the parabola through the three bracketing samples
  double t0 = traj.t[k - 1], t1 = traj.t[k], t2 = traj.t[k + 1];
  double v0 = traj.dTdt[k - 1], v1 = traj.dTdt[k], v2 = traj.dTdt[k + 1];
  double d01 = (v1 - v0) / (t1 - t0);
  double d12 = (v2 - v1) / (t2 - t1);
  double a = (d12 - d01) / (t2 - t0);
  if (a >= 0.0) return t1;
  double b = d01 - a * (t0 + t1);
  return -b / (2.0 * a);
}

double peak_heat_release(const Trajectory& traj) {
  double m = 0.0;
  for (double v : traj.hrr) m = std::max(m, v);
  return m;
}

std::vector<int> sample_indices(const Trajectory& traj, int n) {
  int N = traj.n_steps();
  std::vector<int> out;
  if (N == 0 || n <= 0) return out;
  if (n >= N) {
    out.resize(N);
    for (int i = 0; i < N; ++i) out[i] = i;
    return out;
  }
  // log-spaced in time from the first positive-time sample
  double t0 = traj.t[1] > 0 ? traj.t[1] : 1e-12;
  double t1 = traj.t[N - 1];
  double l0 = std::log10(t0), l1 = std::log10(std::max(t1, t0 * 10));
  int last = -1;
  for (int i = 0; i < n; ++i) {
    double tt = std::pow(10.0, l0 + (l1 - l0) * i / (n - 1.0));
    int j = static_cast<int>(
        std::lower_bound(traj.t.begin(), traj.t.end(), tt) - traj.t.begin());
    j = std::min(j, N - 1);
    if (j != last) out.push_back(j);
    last = j;
  }
  return out;
}

void write_trajectory_csv(const Trajectory& traj, const Mechanism& m,
                          const std::string& path) {
  std::ofstream f(path);
  if (!f) throw MechError("cannot write " + path);
  f << "t,T,P,hrr";
  for (const auto& sp : m.species) f << ",Y_" << sp.name;
  f << "\n";
  f.setf(std::ios::scientific);
  f.precision(9);
  for (int i = 0; i < traj.n_steps(); ++i) {
    f << traj.t[i] << "," << traj.T[i] << "," << traj.P << "," << traj.hrr[i];
    for (int k = 0; k < m.n_species(); ++k) f << "," << traj.Y(i, k);
    f << "\n";
  }
}

}  // namespace chemred
