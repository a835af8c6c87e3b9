#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "chemred/chemkin.hpp"
#include "chemred/drgep.hpp"

using namespace chemred;

namespace {

// exhaustive max-product over all simple paths, for small graphs
double brute_force_R(const Eigen::MatrixXd& r, int target, int node) {
  int n = static_cast<int>(r.rows());
  if (node == target) return 1.0;
  double best = 0.0;
  std::vector<int> path = {target};
  std::vector<char> used(n, 0);
  used[target] = 1;
  std::function<void(int, double)> dfs = [&](int u, double p) {
    if (u == node) {
      best = std::max(best, p);
      return;
    }
    for (int v = 0; v < n; ++v) {
      if (used[v] || v == u) continue;
      double np = p * r(u, v);
      if (np <= best) continue;  // prune, products only shrink
      used[v] = 1;
      dfs(v, np);
      used[v] = 0;
    }
  };
  dfs(target, 1.0);
  return best;
}

Eigen::MatrixXd random_interaction(int n, std::mt19937_64& rng, double density) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j)
      if (i != j && u(rng) < density) r(i, j) = u(rng);
    r(i, i) = 1.0;
  }
  return r;
}

}  // namespace

TEST_CASE("chain propagation: T->B->C gives product") {
  Eigen::MatrixXd r = Eigen::MatrixXd::Identity(3, 3);
  r(0, 1) = 0.5;
  r(1, 2) = 0.4;
  Eigen::VectorXd R = propagate(r, {0});
  CHECK(R[0] == doctest::Approx(1.0));
  CHECK(R[1] == doctest::Approx(0.5));
  CHECK(R[2] == doctest::Approx(0.2));
}

TEST_CASE("isolated species gets zero importance") {
  Eigen::MatrixXd r = Eigen::MatrixXd::Identity(4, 4);
  r(0, 1) = 0.9;
  Eigen::VectorXd R = propagate(r, {0});
  CHECK(R[2] == 0.0);
  CHECK(R[3] == 0.0);
  CHECK(R[0] == 1.0);
}

TEST_CASE("max-product dijkstra equals brute force on random graphs") {
  std::mt19937_64 rng(12345);
  for (int trial = 0; trial < 40; ++trial) {
    int n = 4 + static_cast<int>(rng() % 5);  // 4..8 nodes
    Eigen::MatrixXd r = random_interaction(n, rng, 0.5);
    int target = static_cast<int>(rng() % n);
    Eigen::VectorXd R = propagate(r, {target});
    for (int k = 0; k < n; ++k)
      CHECK(R[k] == doctest::Approx(brute_force_R(r, target, k)).epsilon(1e-12));
  }
}

TEST_CASE("adding an edge never decreases importance") {
  std::mt19937_64 rng(999);
  Eigen::MatrixXd r = random_interaction(7, rng, 0.3);
  Eigen::VectorXd R0 = propagate(r, {0});
  // raise one absent edge
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 7; ++j)
      if (i != j && r(i, j) == 0.0) {
        Eigen::MatrixXd r2 = r;
        r2(i, j) = 0.8;
        Eigen::VectorXd R1 = propagate(r2, {0});
        for (int k = 0; k < 7; ++k) CHECK(R1[k] >= R0[k] - 1e-15);
      }
}

TEST_CASE("direct interaction on a hand-computed 4-species system") {
  // Two reactions with prescribed rates:
  //   r0: A + B -> C   q0 = 2
  //   r1: A + D -> C   q1 = 1  (collider-free, same form)
  // For A: P_A = 0, C_A = 3;  r_AB = |(-1)(2)|/3, r_AD = 1/3,
  // r_AC = |(-2)+(-1)|... C participates in both: |(-1)(2)+(-1)(1)|/3 = 1.
  std::string th;
  {
    std::ostringstream out;
    out << "THERMO ALL\n   300.000  1000.000  5000.000\n";
    for (auto n : {"A", "B", "C", "D"}) {
      char buf[128];
      std::string comp = std::string(n) == "C" ? "H   2" : "H   1";
      std::snprintf(buf, sizeof buf,
                    "%-18s%-6s%-20sG%10.3f%10.3f%8.2f%6s1\n", n, "",
                    comp.c_str(), 300.0, 3500.0, 1000.0, "");
      out << buf;
      for (int row = 0; row < 3; ++row) {
        int nc = row < 2 ? 5 : 4;
        std::string line;
        for (int j = 0; j < nc; ++j) {
          double v = (row == 0 && j == 0) || (row == 1 && j == 2) ? 3.5 : 0.0;
          std::snprintf(buf, sizeof buf, "%15.8E", v);
          line += buf;
        }
        line.resize(79, ' ');
        out << line << (row + 2) << "\n";
      }
    }
    out << "END\n";
    th = out.str();
  }
  // irreversible, zero Ea and b so q = k [X][Y]; mass fractions chosen so
  // [B] = 2[D] and therefore q0 = 2 q1
  Mechanism m = parse_mechanism(
      "ELEMENTS H END\nSPECIES A B C D END\nREACTIONS\n"
      "A+B=>C  1.0E10 0.0 0.0\n"
      "A+D=>C  1.0E10 0.0 0.0\nEND\n",
      th);
  Kinetics kin(m);
  ThermoState s;
  s.T = 1000.0;
  s.P = kPatm;
  s.Y = Eigen::VectorXd(4);
  s.Y << 0.4, 0.3, 0.15, 0.15;
  Eigen::MatrixXd r = direct_interaction(kin, s);
  int A = 0, B = 1, C = 2, D = 3;
  // A consumed by both: C_A = q0+q1 = 3u
  CHECK(r(A, B) == doctest::Approx(2.0 / 3.0));
  CHECK(r(A, D) == doctest::Approx(1.0 / 3.0));
  CHECK(r(A, C) == doctest::Approx(1.0));
  // C produced by both
  CHECK(r(C, A) == doctest::Approx(1.0));
  CHECK(r(C, B) == doctest::Approx(2.0 / 3.0));
  CHECK(r(C, D) == doctest::Approx(1.0 / 3.0));
  // B only reacts in r0; D only in r1; they never co-participate
  CHECK(r(B, A) == doctest::Approx(1.0));
  CHECK(r(B, C) == doctest::Approx(1.0));
  CHECK(r(B, D) == 0.0);
  CHECK(r(D, B) == 0.0);
  for (int i = 0; i < 4; ++i) CHECK(r(i, i) == 1.0);
}

TEST_CASE("gri drgep: importance ranks chemistry sensibly") {
  static Mechanism m =
      load_mechanism(std::string(CHEMRED_DATA_DIR) + "/gri30.inp",
                     std::string(CHEMRED_DATA_DIR) + "/gri30_thermo.dat");
  Kinetics kin(m);
  DrgepOptions opts;
  opts.conditions = {{1500.0, kPatm}};
  opts.samples_per_condition = 10;
  Eigen::VectorXd R = overall_importance(m, kin, opts);
  // targets pinned at 1
  CHECK(R[m.require_species("CH4")] == doctest::Approx(1.0));
  CHECK(R[m.require_species("O2")] == doctest::Approx(1.0));
  // core radicals must rank far above exotic nitrogen species
  double r_oh = R[m.require_species("OH")];
  double r_h = R[m.require_species("H")];
  double r_hcnn = R[m.require_species("HCNN")];
  CHECK(r_oh > 0.1);
  CHECK(r_h > 0.1);
  CHECK(r_hcnn < r_oh);
  // reduction at epsilon=0 keeps everything
  DrgepReduction red0 = reduce_drgep(m, opts, 0.0);
  CHECK(red0.mech.n_species() == m.n_species());
  // epsilon just above 1 keeps only the protected set
  DrgepReduction red1 = reduce_drgep(m, opts, 1.0 + 1e-12);
  CHECK(red1.mech.n_species() == 3);
  // monotone in epsilon
  DrgepReduction redA = reduce_drgep(m, opts, 1e-3);
  DrgepReduction redB = reduce_drgep(m, opts, 1e-2);
  CHECK(redB.mech.n_species() <= redA.mech.n_species());
}
