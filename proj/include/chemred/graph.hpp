#pragma once

#include <vector>

#include "chemred/kinetics.hpp"

namespace chemred {

/// A thermochemical state: temperature, pressure, mass fractions.
struct ThermoState {
  double T = 300.0;
  double P = kPatm;
  Eigen::VectorXd Y;
};

/// signed log feature scaling: sign(x) * log10(1 + |x|/x_ref)
inline double slog(double x, double x_ref = 1e-12) {
  double s = x < 0 ? -1.0 : 1.0;
  return s * std::log10(1.0 + std::abs(x) / x_ref);
}

/// Directed multigraph of the mechanism at one state.  One node per
/// species; for every reaction, an edge for each ordered pair of distinct
/// participants, keyed by the reaction index.
struct MechGraph {
  Eigen::MatrixXd node_feat;             // n_nodes x 3
  Eigen::MatrixXd edge_feat;             // n_edges x 6
  std::vector<int> edge_src, edge_dst, edge_rxn;
  std::vector<std::vector<int>> in_edges;  // incoming edge ids per node
  std::vector<std::vector<int>> rxn_participants;
  double state_T = 0.0, state_P = 0.0;

  int n_nodes() const { return static_cast<int>(node_feat.rows()); }
  int n_edges() const { return static_cast<int>(edge_src.size()); }
};

static constexpr int kNodeFeatures = 3;
static constexpr int kEdgeFeatures = 6;

MechGraph build_graph(const Mechanism& m, Kinetics& kin,
                      const ThermoState& s);

/// Induced subgraph: node order preserved; an edge survives iff every
/// participant of its reaction is kept (closure rule, same as
/// extract_submechanism).  Node indices are remapped to the kept order.
MechGraph subgraph(const MechGraph& g, const std::vector<int>& keep_nodes);

/// Debug dump: "src,dst,reaction,feat0,..,feat5" per line.
void write_edge_list(const MechGraph& g, const std::string& path);

}  // namespace chemred
