#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <sstream>

#include "chemred/chemkin.hpp"
#include "chemred/kinetics.hpp"

using namespace chemred;

namespace {

Mechanism& gri() {
  static Mechanism m =
      load_mechanism(std::string(CHEMRED_DATA_DIR) + "/gri30.inp",
                     std::string(CHEMRED_DATA_DIR) + "/gri30_thermo.dat");
  return m;
}

std::vector<std::vector<std::string>> read_csv(const std::string& path,
                                               std::string* header_comment) {
  std::ifstream f(path);
  REQUIRE(f.good());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (header_comment) *header_comment = line;
      continue;
    }
    std::vector<std::string> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(cell);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST_CASE("NASA-7 evaluation matches fixture: O2 at 1000 K") {
  auto rows =
      read_csv(std::string(CHEMRED_TEST_DATA_DIR) + "/oracle_thermo_o2.csv",
               nullptr);
  REQUIRE(rows.size() == 2);  // header + one data row
  double T = std::stod(rows[1][0]);
  ThermoEval e = thermo_eval(gri().species[gri().require_species("O2")], T);
  CHECK(e.cp_R == doctest::Approx(std::stod(rows[1][1])).epsilon(1e-10));
  CHECK(e.h_RT == doctest::Approx(std::stod(rows[1][2])).epsilon(1e-10));
  CHECK(e.s_R == doctest::Approx(std::stod(rows[1][3])).epsilon(1e-10));
}

TEST_CASE("production rates match fixture state") {
  std::string comment;
  auto rows = read_csv(
      std::string(CHEMRED_TEST_DATA_DIR) + "/oracle_wdot_gri.csv", &comment);
  // "# state: T=...e+03 K, P=101325.0 Pa, hrr=... W/m3"
  double T, P, hrr_ref;
  REQUIRE(std::sscanf(comment.c_str(), "# state: T=%lf K, P=%lf Pa, hrr=%lf",
                      &T, &P, &hrr_ref) == 3);

  Mechanism& m = gri();
  Kinetics kin(m);
  Eigen::VectorXd Y(m.n_species());
  std::vector<double> wref(m.n_species());
  REQUIRE(static_cast<int>(rows.size()) == m.n_species() + 1);
  for (size_t i = 1; i < rows.size(); ++i) {
    int k = m.require_species(rows[i][0]);
    Y[k] = std::stod(rows[i][1]);
    wref[k] = std::stod(rows[i][2]);
  }

  Eigen::VectorXd wdot(m.n_species());
  kin.production_rates(T, P, Y, wdot);
  double wmax = 0.0;
  for (double w : wref) wmax = std::max(wmax, std::abs(w));
  for (int k = 0; k < m.n_species(); ++k) {
    // mixed tolerance: relative for large rates, absolute for tiny ones
    CHECK(std::abs(wdot[k] - wref[k]) <=
          1e-6 * std::max(std::abs(wref[k]), 1e-9 * wmax));
  }
  double hrr = kin.heat_release_rate(T, P, Y);
  CHECK(hrr == doctest::Approx(hrr_ref).epsilon(1e-6));
}

TEST_CASE("mass and element conservation of wdot") {
  Mechanism& m = gri();
  Kinetics kin(m);
  Eigen::VectorXd Y = mixture_from_phi(m, "CH4", 1.0);
  // perturb to a partially-burnt composition so rates are nontrivial
  Y[m.require_species("OH")] = 1e-3;
  Y[m.require_species("H")] = 1e-4;
  Y[m.require_species("CO")] = 5e-3;
  Y /= Y.sum();
  Eigen::VectorXd wdot(m.n_species());
  kin.production_rates(1600.0, kPatm, Y, wdot);

  // mass: sum_k wdot_k W_k = 0
  double mdot = 0.0, scale = 0.0;
  for (int k = 0; k < m.n_species(); ++k) {
    mdot += wdot[k] * kin.molecular_weights()[k];
    scale += std::abs(wdot[k] * kin.molecular_weights()[k]);
  }
  CHECK(std::abs(mdot) <= 1e-8 * std::max(scale, 1.0));

  // elements: sum_k n_{e,k} wdot_k = 0 for each element
  for (const auto& el : m.elements) {
    double edot = 0.0, escale = 0.0;
    for (int k = 0; k < m.n_species(); ++k) {
      auto it = m.species[k].composition.find(el);
      if (it == m.species[k].composition.end()) continue;
      edot += it->second * wdot[k];
      escale += std::abs(it->second * wdot[k]);
    }
    CHECK(std::abs(edot) <= 1e-7 * std::max(escale, 1.0));
  }
}

TEST_CASE("equilibrium consistency: kr from Kc reverses kf") {
  // at equilibrium composition the net rate must vanish; check the weaker
  // invariant that a reversible reaction run with products only produces
  // reactants (detailed balance direction)
  Mechanism& m = gri();
  Kinetics kin(m);
  int h2 = m.require_species("H2"), o2 = m.require_species("O2");
  int h2o = m.require_species("H2O"), n2 = m.require_species("N2");
  Eigen::VectorXd Y = Eigen::VectorXd::Zero(m.n_species());
  Y[h2o] = 0.2;
  Y[n2] = 0.8;
  Eigen::VectorXd wdot(m.n_species());
  kin.production_rates(2500.0, kPatm, Y, wdot);
  CHECK(wdot[h2o] < 0.0);  // dissociating
  // with no radicals present yet, only the direct dissociation channels run
  CHECK(wdot[m.require_species("H")] > 0.0);
  CHECK(wdot[m.require_species("OH")] > 0.0);
  (void)h2;
  (void)o2;
}

TEST_CASE("stoichiometric methane-air mixture") {
  Mechanism& m = gri();
  Kinetics kin(m);
  Eigen::VectorXd Y = mixture_from_phi(m, "CH4", 1.0);
  CHECK(Y.sum() == doctest::Approx(1.0).epsilon(1e-12));
  Eigen::VectorXd X(m.n_species());
  kin.mole_fractions(Y, X);
  // X_CH4 = 1/(1 + 2 + 2*79/21) = 0.09502
  CHECK(X[m.require_species("CH4")] == doctest::Approx(0.09502).epsilon(1e-3));
  CHECK(X[m.require_species("O2")] ==
        doctest::Approx(2.0 * 0.09502).epsilon(1e-3));
}
