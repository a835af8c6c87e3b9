#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace chemred {

/// Universal gas constant, J/(kmol K).
inline constexpr double kGasConstant = 8314.462618;
/// Standard-state pressure, Pa.
inline constexpr double kPatm = 101325.0;
/// cal/mol -> J/mol.
inline constexpr double kCalToJoule = 4.184;

double atomic_weight(const std::string& element);

struct MechError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// NASA-7 two-range polynomial record for one species.
struct SpeciesThermo {
  std::string name;
  std::map<std::string, int> composition;  // element -> atom count
  double molecular_weight = 0.0;           // kg/kmol
  double nasa7_low[7] = {};                // T in [T_low, T_mid]
  double nasa7_high[7] = {};               // T in [T_mid, T_high]
  double T_low = 300.0, T_mid = 1000.0, T_high = 3500.0;
};

enum class RateKind { Elementary, ThreeBody, FalloffLindemann, FalloffTroe };

struct Arrhenius {
  double A = 0.0;   // SI (kmol, m3, s) after parsing
  double b = 0.0;
  double Ea = 0.0;  // J/kmol
};

struct TroeParams {
  double a = 0.0, T3 = 0.0, T1 = 0.0;
  std::optional<double> T2;
};

struct Reaction {
  std::vector<std::pair<int, double>> reactants;  // (species index, nu')
  std::vector<std::pair<int, double>> products;   // (species index, nu'')
  Arrhenius rate;
  bool reversible = true;
  RateKind kind = RateKind::Elementary;
  std::optional<Arrhenius> low;             // falloff low-pressure limit
  std::optional<TroeParams> troe;
  std::map<int, double> efficiencies;       // collider overrides, default 1
  std::optional<int> bath_species;          // falloff with a named collider
  bool duplicate = false;
  std::string equation;                     // original text, for reporting

  double net_stoich(int species) const {
    double nu = 0.0;
    for (auto& [i, v] : reactants)
      if (i == species) nu -= v;
    for (auto& [i, v] : products)
      if (i == species) nu += v;
    return nu;
  }
  bool involves(int species) const {
    for (auto& [i, v] : reactants)
      if (i == species) return true;
    for (auto& [i, v] : products)
      if (i == species) return true;
    return false;
  }
};

struct Mechanism {
  std::vector<std::string> elements;
  std::vector<SpeciesThermo> species;
  std::vector<Reaction> reactions;

  int n_species() const { return static_cast<int>(species.size()); }
  int n_reactions() const { return static_cast<int>(reactions.size()); }
  int species_index(const std::string& name) const;      // -1 if absent
  int require_species(const std::string& name) const;    // throws if absent

  /// Distinct species appearing in a reaction (reactant or product side).
  std::vector<int> participants(int reaction) const;

  /// Throws MechError on any violated structural invariant.
  void validate() const;
};

/// NASA-7 evaluation: cp/R, h/(RT), s0/R at temperature T.
/// Outside [T_low, T_high] the temperature is clamped; *clamped reports it.
struct ThermoEval {
  double cp_R, h_RT, s_R;
};
ThermoEval thermo_eval(const SpeciesThermo& s, double T, bool* clamped = nullptr);

/// Keep only `keep` species; a reaction survives iff every participant is
/// kept.  Collider efficiencies of removed species are dropped and the
/// element list is pruned to the elements still present.
Mechanism extract_submechanism(const Mechanism& m, const std::set<int>& keep);
Mechanism extract_submechanism(const Mechanism& m,
                               const std::set<std::string>& keep_names);

}  // namespace chemred
