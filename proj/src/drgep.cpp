#include "chemred/drgep.hpp"

#include <algorithm>
#include <queue>
#include <set>

namespace chemred {

Eigen::MatrixXd direct_interaction(Kinetics& kin, const ThermoState& s) {
  const Mechanism& m = kin.mech();
  int ns = m.n_species();
  Eigen::VectorXd wdot(ns);
  kin.production_rates(s.T, s.P, s.Y, wdot);
  const Eigen::VectorXd& q = kin.rop_net();

  Eigen::VectorXd prod = Eigen::VectorXd::Zero(ns);
  Eigen::VectorXd cons = Eigen::VectorXd::Zero(ns);
  // numerator accumulated per (A,B) sparse via reaction participant lists
  Eigen::MatrixXd num = Eigen::MatrixXd::Zero(ns, ns);
  for (int j = 0; j < m.n_reactions(); ++j) {
    auto parts = m.participants(j);
    for (int a : parts) {
      double nuq = m.reactions[j].net_stoich(a) * q[j];
      prod[a] += std::max(0.0, nuq);
      cons[a] += std::max(0.0, -nuq);
      for (int b : parts)
        if (b != a) num(a, b) += nuq;
    }
  }
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(ns, ns);
  for (int a = 0; a < ns; ++a) {
    double den = std::max(prod[a], cons[a]);
    if (den > 0.0)
      for (int b = 0; b < ns; ++b)
        if (b != a) r(a, b) = std::min(std::abs(num(a, b)) / den, 1.0);
    r(a, a) = 1.0;
  }
  return r;
}

Eigen::VectorXd propagate(const Eigen::MatrixXd& r,
                          const std::vector<int>& targets) {
  int ns = static_cast<int>(r.rows());
  Eigen::VectorXd R = Eigen::VectorXd::Zero(ns);
  for (int t : targets) {
    // max-product Dijkstra: largest path product first
    Eigen::VectorXd best = Eigen::VectorXd::Zero(ns);
    best[t] = 1.0;
    using Item = std::pair<double, int>;
    std::priority_queue<Item> pq;
    pq.emplace(1.0, t);
    while (!pq.empty()) {
      auto [p, u] = pq.top();
      pq.pop();
      if (p < best[u]) continue;
      for (int v = 0; v < ns; ++v) {
        if (v == u) continue;
        double np = p * r(u, v);
        if (np > best[v]) {
          best[v] = np;
          pq.emplace(np, v);
        }
      }
    }
    R = R.cwiseMax(best);
  }
  return R;
}

namespace {

std::vector<int> resolve(const Mechanism& m,
                         const std::vector<std::string>& names,
                         std::initializer_list<const char*> defaults,
                         const std::string& fuel) {
  std::vector<int> out;
  if (names.empty()) {
    for (const char* n : defaults) {
      std::string nm = std::string(n) == "$FUEL" ? fuel : n;
      out.push_back(m.require_species(nm));
    }
  } else {
    for (auto& n : names) out.push_back(m.require_species(n));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

Eigen::VectorXd overall_importance(const Mechanism& m, Kinetics& kin,
                                   const DrgepOptions& opts) {
  std::vector<int> targets =
      resolve(m, opts.targets, {"$FUEL", "O2"}, opts.fuel);
  Eigen::VectorXd R = Eigen::VectorXd::Zero(m.n_species());
  for (auto& [T0, P0] : opts.conditions) {
    Eigen::VectorXd Y0 = mixture_from_phi(m, opts.fuel, opts.phi);
    ReactorOptions ro = opts.reactor;
    ro.stop_after_ignition = true;
    Trajectory traj = integrate_constant_pressure(kin, T0, P0, Y0, ro);
    for (int i : sample_indices(traj, opts.samples_per_condition)) {
      ThermoState s{traj.T[i], P0, traj.Y.row(i).transpose()};
      Eigen::MatrixXd r = direct_interaction(kin, s);
      R = R.cwiseMax(propagate(r, targets));
    }
  }
  return R;
}

DrgepReduction reduce_drgep(const Mechanism& m, const DrgepOptions& opts,
                            double epsilon) {
  Kinetics kin(m);
  Eigen::VectorXd R = overall_importance(m, kin, opts);
  DrgepReduction red;
  red.importance = R;
  red.epsilon = epsilon;
  std::vector<int> prot = resolve(m, opts.protected_, {"$FUEL", "O2", "N2"},
                                  opts.fuel);
  std::set<int> keep(prot.begin(), prot.end());
  for (int k = 0; k < m.n_species(); ++k)
    if (R[k] >= epsilon) keep.insert(k);
  red.kept.assign(keep.begin(), keep.end());
  red.mech = extract_submechanism(m, keep);
  return red;
}

namespace {

std::optional<double> idt(const Mechanism& m, double T0, double P0,
                          const std::string& fuel, double phi,
                          const ReactorOptions& base) {
  Kinetics kin(m);
  Eigen::VectorXd Y0 = mixture_from_phi(m, fuel, phi);
  ReactorOptions ro = base;
  ro.stop_after_ignition = true;
  Trajectory traj = integrate_constant_pressure(kin, T0, P0, Y0, ro);
  return ignition_delay(traj);
}

}  // namespace

SweepResult threshold_sweep(const Mechanism& m, const DrgepOptions& opts,
                            const std::vector<double>& grid_T,
                            double error_budget,
                            std::function<void(const std::string&)> log) {
  auto say = [&](const std::string& s) {
    if (log) log(s);
  };
  Kinetics kin(m);
  Eigen::VectorXd R = overall_importance(m, kin, opts);
  std::vector<int> prot =
      resolve(m, opts.protected_, {"$FUEL", "O2", "N2"}, opts.fuel);
  double P0 = opts.conditions.empty() ? kPatm : opts.conditions[0].second;

  SweepResult out;
  out.grid_T = grid_T;
  for (double T0 : grid_T) {
    auto tau = idt(m, T0, P0, opts.fuel, opts.phi, opts.reactor);
    if (!tau) throw MechError("threshold_sweep: detailed mechanism fails to "
                              "ignite at T0=" + std::to_string(T0));
    out.tau_detailed.push_back(*tau);
  }

  // distinct importance levels define the candidate thresholds; walk from
  // the most aggressive (fewest species) downward and stop at the first
  // mechanism inside the budget
  std::vector<double> levels(R.data(), R.data() + R.size());
  std::sort(levels.begin(), levels.end(), std::greater<>());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

  std::set<std::vector<int>> seen;
  for (double eps : levels) {
    std::set<int> keep(prot.begin(), prot.end());
    for (int k = 0; k < m.n_species(); ++k)
      if (R[k] >= eps) keep.insert(k);
    std::vector<int> kv(keep.begin(), keep.end());
    if (!seen.insert(kv).second) continue;
    Mechanism cand = extract_submechanism(m, keep);
    say("epsilon=" + std::to_string(eps) + " species=" +
        std::to_string(cand.n_species()) + " reactions=" +
        std::to_string(cand.n_reactions()));

    std::vector<double> taus;
    double err_sum = 0.0;
    bool ok = true;
    for (size_t i = 0; i < grid_T.size(); ++i) {
      auto tau = idt(cand, grid_T[i], P0, opts.fuel, opts.phi, opts.reactor);
      if (!tau) {
        ok = false;
        break;
      }
      taus.push_back(*tau);
      err_sum += std::abs(*tau - out.tau_detailed[i]) / out.tau_detailed[i];
      if (err_sum > error_budget * grid_T.size()) {  // cannot recover
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    double avg = err_sum / grid_T.size();
    say("  avg IDT error = " + std::to_string(avg * 100) + "%");
    if (avg <= error_budget) {
      out.reduction.mech = std::move(cand);
      out.reduction.kept = kv;
      out.reduction.importance = R;
      out.reduction.epsilon = eps;
      out.avg_idt_error = avg;
      out.tau_reduced = taus;
      return out;
    }
  }
  throw MechError("threshold_sweep: error budget unreachable");
}

}  // namespace chemred
