#include "chemred/reduce_ae.hpp"

#include <algorithm>

namespace chemred {

using namespace nn;

AeModel make_ae_model(const AeConfig& cfg) {
  AeModel mdl;
  mdl.cfg = cfg;
  std::mt19937_64 rng(cfg.seed);
  int d = cfg.d;
  mlp_init(mdl.ps, "ne", {kNodeFeatures, d}, rng);  // node embed
  mlp_init(mdl.ps, "ee", {kEdgeFeatures, d}, rng);  // edge embed
  transformer_init(mdl.ps, "mp", d, rng);
  mlp_init(mdl.ps, "ns", {d, 1}, rng);  // node score head
  mlp_init(mdl.ps, "es", {d, 1}, rng);  // edge score head
  mlp_init(mdl.ps, "nd", {1, d, kNodeFeatures}, rng);  // node decoder
  mlp_init(mdl.ps, "ed", {1, d, kEdgeFeatures}, rng);  // edge decoder
  mdl.node_mu = Eigen::RowVectorXd::Zero(kNodeFeatures);
  mdl.node_sig = Eigen::RowVectorXd::Ones(kNodeFeatures);
  mdl.edge_mu = Eigen::RowVectorXd::Zero(kEdgeFeatures);
  mdl.edge_sig = Eigen::RowVectorXd::Ones(kEdgeFeatures);
  return mdl;
}

void fit_feature_scaling(AeModel& model, const std::vector<MechGraph>& graphs) {
  long nn = 0, ne = 0;
  Eigen::RowVectorXd nmu = Eigen::RowVectorXd::Zero(kNodeFeatures);
  Eigen::RowVectorXd emu = Eigen::RowVectorXd::Zero(kEdgeFeatures);
  for (auto& g : graphs) {
    nmu += g.node_feat.colwise().sum();
    emu += g.edge_feat.colwise().sum();
    nn += g.node_feat.rows();
    ne += g.edge_feat.rows();
  }
  nmu /= double(nn);
  emu /= double(ne);
  Eigen::RowVectorXd nv = Eigen::RowVectorXd::Zero(kNodeFeatures);
  Eigen::RowVectorXd ev = Eigen::RowVectorXd::Zero(kEdgeFeatures);
  for (auto& g : graphs) {
    nv += (g.node_feat.rowwise() - nmu).array().square().colwise().sum().matrix();
    ev += (g.edge_feat.rowwise() - emu).array().square().colwise().sum().matrix();
  }
  model.node_mu = nmu;
  model.edge_mu = emu;
  model.node_sig = (nv / double(nn)).array().sqrt().max(1e-6).matrix();
  model.edge_sig = (ev / double(ne)).array().sqrt().max(1e-6).matrix();
}

namespace {

Mat standardize(const Mat& x, const Eigen::RowVectorXd& mu,
                const Eigen::RowVectorXd& sig) {
  return ((x.rowwise() - mu).array().rowwise() / sig.array()).matrix();
}

}  // namespace

AeForward gnn_ae_forward(const MechGraph& g, AeModel& model) {
  Var h0 = constant(standardize(g.node_feat, model.node_mu, model.node_sig));
  Var e0 = constant(standardize(g.edge_feat, model.edge_mu, model.edge_sig));
  Var hemb = elu(linear(h0, model.ps, "ne.l0"));
  Var eemb = elu(linear(e0, model.ps, "ee.l0"));
  Var h1 = transformer_layer(hemb, eemb, g.edge_src, g.edge_dst, model.ps, "mp");
  AeForward out;
  out.node_scores = sigmoid(linear(h1, model.ps, "ns.l0"));
  out.edge_scores = sigmoid(linear(eemb, model.ps, "es.l0"));
  out.node_recon = mlp_forward(out.node_scores, model.ps, "nd", 2);
  out.edge_recon = mlp_forward(out.edge_scores, model.ps, "ed", 2);
  out.l_n = sum_rows_l2(sub(out.node_recon, h0));
  out.l_e = sum_rows_l2(sub(out.edge_recon, e0));
  return out;
}

std::vector<AeLoss> train_gnn_ae(const std::vector<MechGraph>& graphs,
                                 AeModel& model,
                                 std::function<void(int, const AeLoss&)> cb) {
  if (graphs.empty()) throw MechError("train_gnn_ae: no graphs");
  std::vector<AeLoss> trace;
  const AeConfig& cfg = model.cfg;
  double invG = 1.0 / double(graphs.size());
  for (int epoch = 0; epoch < cfg.n_epochs; ++epoch) {
    model.ps.zero_grad();
    Var total = constant(Mat::Zero(1, 1));
    AeLoss rec;
    for (auto& g : graphs) {
      AeForward f = gnn_ae_forward(g, model);
      Var sp = sparsity_loss(f.node_scores, f.edge_scores);
      Var l = add(scale(add(f.l_n, f.l_e), cfg.lambda_rec * invG),
                  scale(sp, cfg.lambda_sp * invG));
      total = add(total, l);
      rec.l_n += scalar(f.l_n) * invG;
      rec.l_e += scalar(f.l_e) * invG;
      rec.l_sparsity += scalar(sp) * invG;
    }
    rec.l_total = scalar(total);
    backward(total);
    model.ps.adam_step(cfg.lr);
    if (!model.ps.all_finite())
      throw MechError("train_gnn_ae: divergence (non-finite parameters) at "
                      "epoch " + std::to_string(epoch));
    trace.push_back(rec);
    if (cb) cb(epoch, rec);
  }
  return trace;
}

Eigen::VectorXd ae_species_scores(const std::vector<MechGraph>& graphs,
                                  AeModel& model) {
  Eigen::VectorXd s = Eigen::VectorXd::Zero(graphs.front().n_nodes());
  for (auto& g : graphs) {
    AeForward f = gnn_ae_forward(g, model);
    s += f.node_scores->val.col(0);
  }
  return s / double(graphs.size());
}

Mechanism prune_by_threshold(const Mechanism& m, const Eigen::VectorXd& scores,
                             double theta, const std::vector<int>& protected_) {
  std::set<int> keep(protected_.begin(), protected_.end());
  for (int k = 0; k < m.n_species(); ++k)
    if (scores[k] >= theta) keep.insert(k);
  if (keep.empty()) throw MechError("prune_by_threshold: empty retained set");
  return extract_submechanism(m, keep);
}

namespace {

std::vector<MechGraph> sample_graphs(const Mechanism& m, const AeConfig& cfg) {
  Kinetics kin(m);
  Eigen::VectorXd Y0 = mixture_from_phi(m, cfg.fuel, cfg.phi);
  ReactorOptions ro = cfg.reactor;
  ro.stop_after_ignition = true;
  Trajectory traj =
      integrate_constant_pressure(kin, cfg.target_T, cfg.target_P, Y0, ro);
  std::vector<MechGraph> graphs;
  for (int i : sample_indices(traj, cfg.n_states)) {
    ThermoState s{traj.T[i], cfg.target_P, traj.Y.row(i).transpose()};
    graphs.push_back(build_graph(m, kin, s));
  }
  return graphs;
}

std::optional<double> idt_at(const Mechanism& m, double T0, double P0,
                             const std::string& fuel, double phi,
                             const ReactorOptions& base, double* hrr = nullptr) {
  Kinetics kin(m);
  Eigen::VectorXd Y0 = mixture_from_phi(m, fuel, phi);
  ReactorOptions ro = base;
  ro.stop_after_ignition = true;
  Trajectory traj = integrate_constant_pressure(kin, T0, P0, Y0, ro);
  if (hrr) *hrr = peak_heat_release(traj);
  return ignition_delay(traj);
}

std::vector<int> resolve_protected(const Mechanism& m,
                                   const std::vector<std::string>& names,
                                   const std::string& fuel) {
  std::vector<int> out;
  if (names.empty()) {
    out = {m.require_species(fuel), m.require_species("O2"),
           m.require_species("N2")};
  } else {
    for (auto& n : names) out.push_back(m.require_species(n));
  }
  return out;
}

}  // namespace

AeReduction iterate_prune(const Mechanism& m, const AeConfig& cfg,
                          std::function<void(const std::string&)> log) {
  auto say = [&](const std::string& s) {
    if (log) log(s);
  };
  auto tau_det = idt_at(m, cfg.target_T, cfg.target_P, cfg.fuel, cfg.phi,
                        cfg.reactor);
  if (!tau_det) throw MechError("iterate_prune: detailed mechanism does not "
                                "ignite at the target condition");
  AeReduction accepted;
  accepted.mech = m;
  Mechanism cur = m;
  for (int iter = 0; iter < 10; ++iter) {
    auto graphs = sample_graphs(cur, cfg);
    AeModel mdl = make_ae_model(cfg);
    fit_feature_scaling(mdl, graphs);
    train_gnn_ae(graphs, mdl);
    Eigen::VectorXd s = ae_species_scores(graphs, mdl);
    Mechanism pruned = prune_by_threshold(
        cur, s, cfg.theta, resolve_protected(cur, cfg.protected_, cfg.fuel));
    say("iter " + std::to_string(iter) + ": " +
        std::to_string(cur.n_species()) + " -> " +
        std::to_string(pruned.n_species()) + " species");
    if (pruned.n_species() == cur.n_species()) {  // fixed point
      accepted.iterations = iter;
      return accepted;
    }
    auto tau = idt_at(pruned, cfg.target_T, cfg.target_P, cfg.fuel, cfg.phi,
                      cfg.reactor);
    double err = tau ? std::abs(*tau - *tau_det) / *tau_det : 1e9;
    say("  IDT error at target = " + std::to_string(err * 100) + "%");
    if (err > cfg.budget) {
      if (iter == 0)
        throw MechError("iterate_prune: first iteration exceeds the budget");
      accepted.iterations = iter;
      return accepted;
    }
    // map scores back to parent-mechanism order for reporting
    accepted.mech = pruned;
    accepted.idt_err_target = err;
    accepted.iterations = iter + 1;
    if (cur.n_species() == m.n_species()) {
      accepted.scores = s;
      accepted.kept.clear();
      for (auto& sp : pruned.species)
        accepted.kept.push_back(m.require_species(sp.name));
    }
    cur = pruned;
  }
  return accepted;
}

Mechanism greedy_refine(const Mechanism& start,
                        const Eigen::VectorXd& start_scores,
                        const std::vector<std::string>& start_names,
                        const std::vector<std::pair<double, double>>& conditions,
                        const std::string& fuel, double phi, double tol_idt,
                        double tol_hrr,
                        const std::vector<std::string>& protected_names,
                        std::function<void(const std::string&)> log) {
  auto say = [&](const std::string& s) {
    if (log) log(s);
  };
  ReactorOptions ro;
  // reference metrics from the mechanism being refined: the output is
  // guaranteed to stay within tolerance of its own starting point
  std::vector<double> tau_ref, hrr_ref;
  for (auto& [T0, P0] : conditions) {
    double hp = 0.0;
    auto tau = idt_at(start, T0, P0, fuel, phi, ro, &hp);
    if (!tau)
      throw MechError("greedy_refine: starting mechanism does not ignite");
    tau_ref.push_back(*tau);
    hrr_ref.push_back(hp);
  }
  auto within = [&](const Mechanism& cand) {
    for (size_t c = 0; c < conditions.size(); ++c) {
      double hp = 0.0;
      auto tau = idt_at(cand, conditions[c].first, conditions[c].second, fuel,
                        phi, ro, &hp);
      if (!tau) return false;
      if (std::abs(*tau - tau_ref[c]) / tau_ref[c] > tol_idt) return false;
      if (std::abs(hp - hrr_ref[c]) / hrr_ref[c] > tol_hrr) return false;
    }
    return true;
  };

  std::set<std::string> prot(protected_names.begin(), protected_names.end());
  if (prot.empty()) prot = {fuel, "O2", "N2"};
  // score per name from the supplied ranking
  std::map<std::string, double> score;
  for (size_t i = 0; i < start_names.size(); ++i)
    score[start_names[i]] =
        i < static_cast<size_t>(start_scores.size()) ? start_scores[i] : 0.5;

  Mechanism cur = start;
  bool changed = true;
  while (changed) {
    changed = false;
    // one full sweep in ascending score, ties by current species index
    std::vector<std::string> order;
    {
      std::vector<int> idx(cur.n_species());
      for (int i = 0; i < cur.n_species(); ++i) idx[i] = i;
      auto sc = [&](int a) {
        auto it = score.find(cur.species[a].name);
        return it != score.end() ? it->second : 0.5;
      };
      std::stable_sort(idx.begin(), idx.end(),
                       [&](int a, int b) { return sc(a) < sc(b); });
      for (int i : idx) order.push_back(cur.species[i].name);
    }
    for (const auto& name : order) {
      if (prot.count(name)) continue;
      if (cur.species_index(name) < 0) continue;  // gone via closure
      std::set<std::string> keep;
      for (auto& sp : cur.species)
        if (sp.name != name) keep.insert(sp.name);
      Mechanism cand = extract_submechanism(cur, keep);
      if (within(cand)) {
        say("removed " + name + " -> " + std::to_string(cand.n_species()) +
            " species");
        cur = std::move(cand);
        changed = true;
      }
    }
  }
  return cur;
}

}  // namespace chemred
