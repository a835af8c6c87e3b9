#include "chemred/reduce_sm.hpp"

#include <algorithm>
#include <cmath>

namespace chemred {

using namespace nn;

namespace {

double scale01(double v, double lo, double hi) { return (v - lo) / (hi - lo); }

Var surrogate_eval(const SurrogateModel& s, const Var& tp_scaled) {
  // frozen weights enter the tape as constants: gradients flow to the input
  // but never into the surrogate parameters
  Var h = tp_scaled;
  for (int i = 0; i < s.n_layers; ++i) {
    std::string name = "sur.l" + std::to_string(i);
    h = add_rowvec(matmul(h, constant(s.ps.at(name + ".W")->val)),
                   constant(s.ps.at(name + ".b")->val));
    if (i + 1 < s.n_layers) h = elu(h);
  }
  return h;  // 1 x 1, log10 tau
}

}  // namespace

double SurrogateModel::predict(double T0, double P0, bool* extrapolated) const {
  if (extrapolated)
    *extrapolated = T0 < T_min || T0 > T_max || P0 < P_min || P0 > P_max;
  Mat tp(1, 2);
  tp << scale01(T0, T_min, T_max), scale01(P0, P_min, P_max);
  Var v = surrogate_eval(*this, constant(tp));
  return scalar(v);
}

SurrogateModel fit_surrogate_data(const std::vector<double>& T,
                                  const std::vector<double>& log10_tau,
                                  double P0, const SurrogateConfig& cfg) {
  if (T.size() < 5) throw MechError("fit_surrogate_data: too few points");
  SurrogateModel sm;
  sm.T_min = *std::min_element(T.begin(), T.end());
  sm.T_max = *std::max_element(T.begin(), T.end());
  sm.P_min = 0.5 * P0;
  sm.P_max = 1.5 * P0;
  sm.n_layers = static_cast<int>(cfg.hidden.size()) + 1;

  std::mt19937_64 rng(cfg.seed);
  std::vector<int> sizes = {2};
  sizes.insert(sizes.end(), cfg.hidden.begin(), cfg.hidden.end());
  sizes.push_back(1);
  mlp_init(sm.ps, "sur", sizes, rng);

  // every 5th point held out
  std::vector<int> train_idx, test_idx;
  for (size_t i = 0; i < T.size(); ++i)
    (i % 5 == 2 ? test_idx : train_idx).push_back(static_cast<int>(i));

  auto dataset = [&](const std::vector<int>& idx) {
    Mat x(static_cast<int>(idx.size()), 2), y(static_cast<int>(idx.size()), 1);
    for (size_t i = 0; i < idx.size(); ++i) {
      x(static_cast<int>(i), 0) = scale01(T[idx[i]], sm.T_min, sm.T_max);
      x(static_cast<int>(i), 1) = scale01(P0, sm.P_min, sm.P_max);
      y(static_cast<int>(i), 0) = log10_tau[idx[i]];
    }
    return std::make_pair(x, y);
  };
  auto [xtr, ytr] = dataset(train_idx);
  auto [xte, yte] = dataset(test_idx);

  for (int epoch = 0; epoch < cfg.n_epochs; ++epoch) {
    sm.ps.zero_grad();
    Var pred = mlp_forward(constant(xtr), sm.ps, "sur", sm.n_layers);
    Var loss = mean_all(square(sub(pred, constant(ytr))));
    backward(loss);
    sm.ps.adam_step(cfg.lr);
    if (!sm.ps.all_finite())
      throw MechError("train_surrogate: divergence at epoch " +
                      std::to_string(epoch));
  }
  Var pte = mlp_forward(constant(xte), sm.ps, "sur", sm.n_layers);
  sm.holdout_rmse =
      std::sqrt((pte->val - yte).array().square().mean());
  return sm;
}

SurrogateModel train_surrogate(const Mechanism& m, const SurrogateConfig& cfg,
                               std::function<void(const std::string&)> log) {
  Kinetics kin(m);
  Eigen::VectorXd Y0 = mixture_from_phi(m, cfg.fuel, cfg.phi);
  std::vector<double> T, lt;
  for (int i = 0; i < cfg.n_points; ++i) {
    double T0 = cfg.T_lo + (cfg.T_hi - cfg.T_lo) * i / (cfg.n_points - 1.0);
    ReactorOptions ro = cfg.reactor;
    ro.stop_after_ignition = true;
    Trajectory tr = integrate_constant_pressure(kin, T0, cfg.P0, Y0, ro);
    auto tau = ignition_delay(tr);
    if (!tau) {
      if (log) log("warning: non-igniting grid point T0=" + std::to_string(T0) +
                   " excluded");
      continue;
    }
    T.push_back(T0);
    lt.push_back(std::log10(*tau));
  }
  SurrogateModel sm = fit_surrogate_data(T, lt, cfg.P0, cfg);
  if (log)
    log("surrogate holdout RMSE = " + std::to_string(sm.holdout_rmse) +
        " log10 units over " + std::to_string(T.size()) + " points");
  return sm;
}

SmModel make_sm_model(const SmConfig& cfg) {
  SmModel mdl;
  mdl.cfg = cfg;
  std::mt19937_64 rng(cfg.seed);
  int d = cfg.d;
  mlp_init(mdl.ps, "ne", {kNodeFeatures, d}, rng);
  mlp_init(mdl.ps, "ee", {kEdgeFeatures, d}, rng);
  transformer_init(mdl.ps, "t1", d, rng);
  transformer_init(mdl.ps, "t2", d, rng);
  mlp_init(mdl.ps, "ns", {d, 1}, rng);
  mlp_init(mdl.ps, "es", {d, 1}, rng);
  // pooled gated input features -> (T_hat, P_hat)
  mlp_init(mdl.ps, "head", {kNodeFeatures, 64, 2}, rng);
  mdl.node_mu = Eigen::RowVectorXd::Zero(kNodeFeatures);
  mdl.node_sig = Eigen::RowVectorXd::Ones(kNodeFeatures);
  mdl.edge_mu = Eigen::RowVectorXd::Zero(kEdgeFeatures);
  mdl.edge_sig = Eigen::RowVectorXd::Ones(kEdgeFeatures);
  return mdl;
}

namespace {

Mat standardize(const Mat& x, const Eigen::RowVectorXd& mu,
                const Eigen::RowVectorXd& sig) {
  return ((x.rowwise() - mu).array().rowwise() / sig.array()).matrix();
}

void fit_scaling(SmModel& mdl, const std::vector<SmSample>& samples) {
  long nn = 0, ne = 0;
  Eigen::RowVectorXd nmu = Eigen::RowVectorXd::Zero(kNodeFeatures);
  Eigen::RowVectorXd emu = Eigen::RowVectorXd::Zero(kEdgeFeatures);
  for (auto& s : samples) {
    nmu += s.graph.node_feat.colwise().sum();
    emu += s.graph.edge_feat.colwise().sum();
    nn += s.graph.node_feat.rows();
    ne += s.graph.edge_feat.rows();
  }
  nmu /= double(nn);
  emu /= double(ne);
  Eigen::RowVectorXd nv = Eigen::RowVectorXd::Zero(kNodeFeatures);
  Eigen::RowVectorXd ev = Eigen::RowVectorXd::Zero(kEdgeFeatures);
  for (auto& s : samples) {
    nv += (s.graph.node_feat.rowwise() - nmu)
              .array().square().colwise().sum().matrix();
    ev += (s.graph.edge_feat.rowwise() - emu)
              .array().square().colwise().sum().matrix();
  }
  mdl.node_mu = nmu;
  mdl.edge_mu = emu;
  mdl.node_sig = (nv / double(nn)).array().sqrt().max(1e-6).matrix();
  mdl.edge_sig = (ev / double(ne)).array().sqrt().max(1e-6).matrix();
}

}  // namespace

SmForward gnn_sm_forward(const MechGraph& g, SmModel& model, double ratio,
                         const std::set<int>& protected_) {
  Var h0 = constant(standardize(g.node_feat, model.node_mu, model.node_sig));
  Var e0 = constant(standardize(g.edge_feat, model.edge_mu, model.edge_sig));
  Var h = elu(linear(h0, model.ps, "ne.l0"));
  Var e = elu(linear(e0, model.ps, "ee.l0"));
  h = transformer_layer(h, e, g.edge_src, g.edge_dst, model.ps, "t1");
  h = elu(h);
  h = transformer_layer(h, e, g.edge_src, g.edge_dst, model.ps, "t2");

  SmForward out;
  out.node_scores = sigmoid(linear(h, model.ps, "ns.l0"));
  out.edge_scores = sigmoid(linear(e, model.ps, "es.l0"));
  out.retained =
      topk_select(out.node_scores->val.col(0), ratio, protected_);

  // score-gated mean pooling of the retained nodes' *input* features: the
  // transformer embeddings mix information across the whole graph, so pooling
  // them would let the head read global state from any retained subset and
  // the scores would carry no signal.  Pooling the raw (standardized)
  // features makes dropping a species actually remove its information, which
  // is what forces kinetically informative species to score high.  Gradients
  // reach the score head through the gate even though top-k itself is hard.
  Var gated = row_scale(h0, out.node_scores);
  Var sel = gather_rows(gated, out.retained);
  // mean over retained rows: ones^T sel / k
  Mat onesr = Mat::Constant(1, static_cast<int>(out.retained.size()),
                            1.0 / double(out.retained.size()));
  Var pooled = matmul(constant(onesr), sel);  // 1 x d
  Var tp = mlp_forward(pooled, model.ps, "head", 2);
  out.T_hat = tp;  // 1 x 2: column 0 = T_hat, column 1 = P_hat
  return out;
}

std::vector<SmLoss> train_gnn_sm(const std::vector<SmSample>& samples,
                                 const SurrogateModel& surrogate,
                                 SmModel& model,
                                 std::function<void(int, const SmLoss&)> cb) {
  if (samples.empty()) throw MechError("train_gnn_sm: no samples");
  const SmConfig& cfg = model.cfg;
  std::set<int> prot;  // no protection during training; only at reduction
  double invN = 1.0 / double(samples.size());
  std::vector<SmLoss> trace;
  for (int epoch = 0; epoch < cfg.n_epochs; ++epoch) {
    model.ps.zero_grad();
    Var total = constant(Mat::Zero(1, 1));
    SmLoss rec;
    for (auto& s : samples) {
      // train with the reduction-time retention ratio so the score head is
      // optimized for the pruned-pooling task it is used for at reduce_pass
      SmForward f = gnn_sm_forward(s.graph, model, cfg.ratio, prot);
      Var tau_hat = surrogate_eval(surrogate, f.T_hat);  // log10 seconds
      Mat lbl(1, 1);
      lbl(0, 0) = s.log10_tau;
      Var lig = abs(sub(tau_hat, constant(lbl)));
      Var sp = sparsity_loss(f.node_scores, f.edge_scores);
      total = add(total, scale(add(lig, scale(sp, cfg.lambda_sp)), invN));
      rec.l_ig += scalar(lig) * invN;
      rec.l_sparsity += scalar(sp) * invN;
    }
    rec.l_total = scalar(total);
    backward(total);
    model.ps.adam_step(cfg.lr);
    if (!model.ps.all_finite())
      throw MechError("train_gnn_sm: divergence at epoch " +
                      std::to_string(epoch));
    trace.push_back(rec);
    if (cb) cb(epoch, rec);
  }
  return trace;
}

Mechanism reduce_pass(const Mechanism& m, const std::vector<SmSample>& samples,
                      SmModel& model, double ratio,
                      const std::vector<int>& protected_) {
  Eigen::VectorXd s = Eigen::VectorXd::Zero(m.n_species());
  std::set<int> none;
  for (auto& smp : samples) {
    SmForward f = gnn_sm_forward(smp.graph, model, 1.0, none);
    s += f.node_scores->val.col(0);
  }
  s /= double(samples.size());
  std::set<int> prot(protected_.begin(), protected_.end());
  std::vector<int> keep = topk_select(s, ratio, prot);
  return extract_submechanism(m, std::set<int>(keep.begin(), keep.end()));
}

namespace {

std::vector<SmSample> make_samples(const Mechanism& m, const SmConfig& cfg) {
  Kinetics kin(m);
  Eigen::VectorXd Y0 = mixture_from_phi(m, cfg.fuel, cfg.phi);
  std::vector<SmSample> out;
  for (double T0 : cfg.train_T) {
    ReactorOptions ro = cfg.reactor;
    ro.stop_after_ignition = true;
    Trajectory tr = integrate_constant_pressure(kin, T0, cfg.P0, Y0, ro);
    auto tau = ignition_delay(tr);
    if (!tau) continue;
    // pre-ignition induction states only: that is where backtracking to
    // (T0, P0) is well posed
    std::vector<int> cand;
    for (int i = 1; i < tr.n_steps(); ++i)
      if (tr.t[i] < *tau && tr.T[i] < T0 + 300.0) cand.push_back(i);
    if (cand.empty()) continue;
    for (int k = 0; k < cfg.states_per_traj; ++k) {
      int i = cand[(cand.size() - 1) * (k + 1) / (cfg.states_per_traj + 1)];
      SmSample smp;
      ThermoState st{tr.T[i], cfg.P0, tr.Y.row(i).transpose()};
      smp.graph = build_graph(m, kin, st);
      smp.T0 = T0;
      smp.P0 = cfg.P0;
      smp.log10_tau = std::log10(*tau);
      out.push_back(std::move(smp));
    }
  }
  return out;
}

std::optional<double> idt_of(const Mechanism& m, double T0, double P0,
                             const std::string& fuel, double phi,
                             const ReactorOptions& base) {
  Kinetics kin(m);
  Eigen::VectorXd Y0 = mixture_from_phi(m, fuel, phi);
  ReactorOptions ro = base;
  ro.stop_after_ignition = true;
  Trajectory tr = integrate_constant_pressure(kin, T0, P0, Y0, ro);
  return ignition_delay(tr);
}

}  // namespace

SmReducerState iterate_passes(const Mechanism& m, const SurrogateModel& sur,
                              const SmConfig& cfg_in,
                              std::function<void(const std::string&)> log) {
  auto say = [&](const std::string& s) {
    if (log) log(s);
  };
  SmConfig cfg = cfg_in;
  if (cfg.grid_T.empty())
    for (int i = 0; i <= 10; ++i) cfg.grid_T.push_back(1000.0 + 100.0 * i);

  SmReducerState st;
  st.mech = m;
  for (double T0 : cfg.grid_T) {
    auto tau = idt_of(m, T0, cfg.P0, cfg.fuel, cfg.phi, cfg.reactor);
    if (!tau)
      throw MechError("iterate_passes: detailed mechanism fails at T0=" +
                      std::to_string(T0));
    st.tau_detailed.push_back(*tau);
  }

  std::vector<int> prot;
  if (cfg.protected_.empty())
    prot = {m.require_species(cfg.fuel), m.require_species("O2"),
            m.require_species("N2")};
  else
    for (auto& n : cfg.protected_) prot.push_back(m.require_species(n));

  Mechanism cur = m;
  for (int pass = 0; pass < cfg.max_passes; ++pass) {
    say("pass " + std::to_string(pass + 1) + ": training on " +
        std::to_string(cur.n_species()) + " species");
    auto samples = make_samples(cur, cfg);
    if (samples.empty()) throw MechError("iterate_passes: no training states");
    double ratio = pass < static_cast<int>(cfg.ratios.size())
                       ? cfg.ratios[pass]
                       : cfg.ratio;
    SmConfig pcfg = cfg;
    pcfg.seed = cfg.seed + static_cast<std::uint64_t>(pass) * 1000003ull;
    pcfg.ratio = ratio;
    SmModel mdl = make_sm_model(pcfg);
    fit_scaling(mdl, samples);
    train_gnn_sm(samples, sur, mdl);

    // protected indices in the *current* mechanism
    std::vector<int> prot_cur;
    for (int p : prot) prot_cur.push_back(cur.require_species(m.species[p].name));
    Mechanism cand = reduce_pass(cur, samples, mdl, ratio, prot_cur);
    if (cand.n_species() >= cur.n_species()) {
      say("pass made no progress; stopping");
      break;
    }

    double err_sum = 0.0;
    bool ok = true;
    for (size_t i = 0; i < cfg.grid_T.size(); ++i) {
      auto tau = idt_of(cand, cfg.grid_T[i], cfg.P0, cfg.fuel, cfg.phi,
                        cfg.reactor);
      if (!tau) {
        ok = false;
        break;
      }
      err_sum += std::abs(*tau - st.tau_detailed[i]) / st.tau_detailed[i];
    }
    double avg = ok ? err_sum / cfg.grid_T.size() : 1e9;
    SmPass rec;
    rec.n_species = cand.n_species();
    rec.n_reactions = cand.n_reactions();
    rec.avg_idt_error = avg;
    rec.accepted = ok && avg <= cfg.budget;
    st.passes.push_back(rec);
    say("pass " + std::to_string(pass + 1) + ": " +
        std::to_string(cand.n_species()) + " species / " +
        std::to_string(cand.n_reactions()) + " reactions, avg IDT error " +
        (ok ? std::to_string(avg * 100) + "%" : "n/a (no ignition)") +
        (rec.accepted ? " [accepted]" : " [rejected]"));
    if (!rec.accepted) break;
    st.mech = cand;
    cur = std::move(cand);
  }
  return st;
}

}  // namespace chemred
