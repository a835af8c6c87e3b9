#include "chemred/graph.hpp"

#include <fstream>

namespace chemred {

MechGraph build_graph(const Mechanism& m, Kinetics& kin,
                      const ThermoState& s) {
  if (s.Y.size() != m.n_species())
    throw MechError("build_graph: state species count mismatch");
  int ns = m.n_species();
  int nr = m.n_reactions();

  Eigen::VectorXd wdot(ns), X(ns), cdot(ns), ddot(ns);
  kin.production_rates(s.T, s.P, s.Y, wdot);
  kin.creation_destruction(cdot, ddot);
  kin.mole_fractions(s.Y.cwiseMax(0.0), X);
  const Eigen::VectorXd& q = kin.rop_net();

  MechGraph g;
  g.state_T = s.T;
  g.state_P = s.P;
  g.node_feat.resize(ns, kNodeFeatures);
  for (int k = 0; k < ns; ++k) {
    g.node_feat(k, 0) = X[k];
    g.node_feat(k, 1) = slog(cdot[k]);
    g.node_feat(k, 2) = slog(ddot[k]);
  }

  g.rxn_participants.resize(nr);
  int ne = 0;
  for (int j = 0; j < nr; ++j) {
    g.rxn_participants[j] = m.participants(j);
    int p = static_cast<int>(g.rxn_participants[j].size());
    ne += p * (p - 1);
  }
  g.edge_feat.resize(ne, kEdgeFeatures);
  g.edge_src.reserve(ne);
  g.edge_dst.reserve(ne);
  g.edge_rxn.reserve(ne);
  g.in_edges.resize(ns);

  int e = 0;
  for (int j = 0; j < nr; ++j) {
    const Reaction& r = m.reactions[j];
    double logA = std::log10(r.rate.A);
    double ea = r.rate.Ea / (kGasConstant * 1000.0);
    double sq = slog(q[j]);
    const auto& parts = g.rxn_participants[j];
    for (int a : parts)
      for (int b : parts) {
        if (a == b) continue;
        g.edge_src.push_back(a);
        g.edge_dst.push_back(b);
        g.edge_rxn.push_back(j);
        g.in_edges[b].push_back(e);
        g.edge_feat(e, 0) = r.net_stoich(a);
        g.edge_feat(e, 1) = r.net_stoich(b);
        g.edge_feat(e, 2) = logA;
        g.edge_feat(e, 3) = r.rate.b;
        g.edge_feat(e, 4) = ea;
        g.edge_feat(e, 5) = sq;
        ++e;
      }
  }
  if (!g.node_feat.allFinite() || !g.edge_feat.allFinite())
    throw MechError("build_graph: non-finite feature");
  return g;
}

MechGraph subgraph(const MechGraph& g, const std::vector<int>& keep_nodes) {
  if (keep_nodes.empty()) throw MechError("subgraph: empty keep set");
  int ns = g.n_nodes();
  std::vector<int> remap(ns, -1);
  for (size_t i = 0; i < keep_nodes.size(); ++i) {
    if (keep_nodes[i] < 0 || keep_nodes[i] >= ns)
      throw MechError("subgraph: node index out of range");
    remap[keep_nodes[i]] = static_cast<int>(i);
  }
  std::vector<char> rxn_kept(g.rxn_participants.size(), 1);
  for (size_t j = 0; j < g.rxn_participants.size(); ++j)
    for (int p : g.rxn_participants[j])
      if (remap[p] < 0) rxn_kept[j] = 0;

  MechGraph out;
  out.state_T = g.state_T;
  out.state_P = g.state_P;
  int nk = static_cast<int>(keep_nodes.size());
  out.node_feat.resize(nk, g.node_feat.cols());
  for (int i = 0; i < nk; ++i) out.node_feat.row(i) = g.node_feat.row(keep_nodes[i]);

  std::vector<int> edges;
  for (int e = 0; e < g.n_edges(); ++e)
    if (rxn_kept[g.edge_rxn[e]]) edges.push_back(e);
  out.edge_feat.resize(static_cast<int>(edges.size()), g.edge_feat.cols());
  out.in_edges.resize(nk);
  for (size_t i = 0; i < edges.size(); ++i) {
    int e = edges[i];
    out.edge_feat.row(static_cast<int>(i)) = g.edge_feat.row(e);
    out.edge_src.push_back(remap[g.edge_src[e]]);
    out.edge_dst.push_back(remap[g.edge_dst[e]]);
    out.edge_rxn.push_back(g.edge_rxn[e]);
    out.in_edges[remap[g.edge_dst[e]]].push_back(static_cast<int>(i));
  }
  out.rxn_participants.resize(g.rxn_participants.size());
  for (size_t j = 0; j < g.rxn_participants.size(); ++j)
    if (rxn_kept[j])
      for (int p : g.rxn_participants[j])
        out.rxn_participants[j].push_back(remap[p]);
  return out;
}

void write_edge_list(const MechGraph& g, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw MechError("cannot write " + path);
  f << "src,dst,reaction";
  for (int k = 0; k < kEdgeFeatures; ++k) f << ",feat" << k;
  f << "\n";
  for (int e = 0; e < g.n_edges(); ++e) {
    f << g.edge_src[e] << "," << g.edge_dst[e] << "," << g.edge_rxn[e];
    for (int k = 0; k < kEdgeFeatures; ++k) f << "," << g.edge_feat(e, k);
    f << "\n";
  }
}

}  // namespace chemred
