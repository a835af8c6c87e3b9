#include "chemred/mechanism.hpp"

#include <algorithm>
#include <cmath>

namespace chemred {

double atomic_weight(const std::string& element) {
  static const std::map<std::string, double> table = {
      {"H", 1.008},   {"D", 2.014},  {"C", 12.011}, {"O", 15.999},
      {"N", 14.007},  {"AR", 39.95}, {"HE", 4.0026}, {"NE", 20.180},
      {"S", 32.06},   {"CL", 35.45}, {"F", 18.998}, {"SI", 28.085},
      {"BR", 79.904}, {"I", 126.90}, {"B", 10.81},  {"E", 5.4858e-4}};
  auto it = table.find(element);
  if (it == table.end()) throw MechError("unknown element: " + element);
  return it->second;
}

int Mechanism::species_index(const std::string& name) const {
  for (int i = 0; i < n_species(); ++i)
    if (species[i].name == name) return i;
  return -1;
}

int Mechanism::require_species(const std::string& name) const {
  int i = species_index(name);
  if (i < 0) throw MechError("species not in mechanism: " + name);
  return i;
}

std::vector<int> Mechanism::participants(int reaction) const {
  const Reaction& r = reactions.at(reaction);
  std::vector<int> out;
  auto push = [&](int i) {
    if (std::find(out.begin(), out.end(), i) == out.end()) out.push_back(i);
  };
  for (auto& [i, v] : r.reactants) push(i);
  for (auto& [i, v] : r.products) push(i);
  return out;
}

ThermoEval thermo_eval(const SpeciesThermo& s, double T, bool* clamped) {
  if (clamped) *clamped = (T < s.T_low || T > s.T_high);
  T = std::clamp(T, s.T_low, s.T_high);
  const double* a = (T < s.T_mid) ? s.nasa7_low : s.nasa7_high;
  const double t2 = T * T, t3 = t2 * T, t4 = t3 * T;
  ThermoEval e;
  e.cp_R = a[0] + a[1] * T + a[2] * t2 + a[3] * t3 + a[4] * t4;
  e.h_RT = a[0] + a[1] * T / 2 + a[2] * t2 / 3 + a[3] * t3 / 4 + a[4] * t4 / 5 +
           a[5] / T;
  e.s_R = a[0] * std::log(T) + a[1] * T + a[2] * t2 / 2 + a[3] * t3 / 3 +
          a[4] * t4 / 4 + a[6];
  return e;
}

void Mechanism::validate() const {
  std::set<std::string> seen;
  for (const auto& sp : species) {
    if (!seen.insert(sp.name).second)
      throw MechError("duplicate species name: " + sp.name);
    if (sp.molecular_weight <= 0.0)
      throw MechError("nonpositive molecular weight: " + sp.name);
    if (!(sp.T_low < sp.T_mid && sp.T_mid < sp.T_high))
      throw MechError("bad thermo temperature ranges: " + sp.name);
    // seam continuity of cp at T_mid
    SpeciesThermo lo = sp, hi = sp;
    lo.T_mid = sp.T_high;  // force low branch
    hi.T_mid = sp.T_low;   // force high branch
    double c1 = thermo_eval(lo, sp.T_mid).cp_R;
    double c2 = thermo_eval(hi, sp.T_mid).cp_R;
    if (std::abs(c1 - c2) > 1e-2 * std::abs(c1))
      throw MechError("cp discontinuity at T_mid for " + sp.name);
  }
  for (int j = 0; j < n_reactions(); ++j) {
    const Reaction& r = reactions[j];
    auto check_range = [&](const std::vector<std::pair<int, double>>& side) {
      for (auto& [i, nu] : side) {
        if (i < 0 || i >= n_species())
          throw MechError("reaction " + std::to_string(j) +
                          ": species index out of range");
        if (nu < 0)
          throw MechError("reaction " + std::to_string(j) +
                          ": negative stoichiometric coefficient");
      }
    };
    check_range(r.reactants);
    check_range(r.products);
    std::map<std::string, double> balance;
    for (auto& [i, nu] : r.reactants)
      for (auto& [el, n] : species[i].composition) balance[el] += nu * n;
    for (auto& [i, nu] : r.products)
      for (auto& [el, n] : species[i].composition) balance[el] -= nu * n;
    for (auto& [el, v] : balance)
      if (std::abs(v) > 1e-9)
        throw MechError("reaction " + std::to_string(j) + " (" + r.equation +
                        "): element " + el + " unbalanced");
    if ((r.kind == RateKind::FalloffLindemann ||
         r.kind == RateKind::FalloffTroe) &&
        !r.low)
      throw MechError("falloff reaction without LOW parameters: " + r.equation);
  }
}

Mechanism extract_submechanism(const Mechanism& m, const std::set<int>& keep) {
  if (keep.empty()) throw MechError("extract_submechanism: empty keep set");
  std::vector<int> remap(m.n_species(), -1);
  Mechanism out;
  for (int i = 0; i < m.n_species(); ++i) {
    if (keep.count(i)) {
      remap[i] = out.n_species();
      out.species.push_back(m.species[i]);
    }
  }
  for (int j = 0; j < m.n_reactions(); ++j) {
    bool all_kept = true;
    for (int p : m.participants(j))
      if (remap[p] < 0) all_kept = false;
    if (!all_kept) continue;
    Reaction r = m.reactions[j];
    for (auto& [i, nu] : r.reactants) i = remap[i];
    for (auto& [i, nu] : r.products) i = remap[i];
    std::map<int, double> eff;
    for (auto& [i, e] : r.efficiencies)
      if (remap[i] >= 0) eff[remap[i]] = e;
    r.efficiencies = std::move(eff);
    if (r.bath_species) {
      if (remap[*r.bath_species] < 0) continue;  // bath gas gone
      r.bath_species = remap[*r.bath_species];
    }
    out.reactions.push_back(std::move(r));
  }
  std::set<std::string> present;
  for (const auto& sp : out.species)
    for (auto& [el, n] : sp.composition) present.insert(el);
  for (const auto& el : m.elements)
    if (present.count(el)) out.elements.push_back(el);
  return out;
}

Mechanism extract_submechanism(const Mechanism& m,
                               const std::set<std::string>& keep_names) {
  std::set<int> keep;
  for (const auto& n : keep_names) keep.insert(m.require_species(n));
  return extract_submechanism(m, keep);
}

}  // namespace chemred
