#include "chemred/chemkin.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace chemred {
namespace {

std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::toupper(c); });
  return s;
}

std::string strip(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::string strip_comment(const std::string& line) {
  size_t i = line.find('!');
  return (i == std::string::npos) ? line : line.substr(0, i);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string t;
  while (is >> t) out.push_back(t);
  return out;
}

double to_double(const std::string& s, int line) {
  try {
    size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError("not a number: '" + s + "'", line);
  }
}

struct ThermoRecord {
  SpeciesThermo st;
};

// Fixed-column NASA-7 card reader.  Card 1 carries name, composition,
// phase and temperature ranges; cards 2-4 carry 5/5/4 E15.8 coefficients.
std::map<std::string, SpeciesThermo> parse_thermo(const std::string& text,
                                                  double* default_ts) {
  std::map<std::string, SpeciesThermo> out;
  std::vector<std::string> lines;
  {
    std::istringstream is(text);
    std::string l;
    while (std::getline(is, l)) lines.push_back(l);
  }
  size_t i = 0;
  while (i < lines.size()) {
    std::string raw = lines[i];
    std::string l = strip_comment(raw);
    std::string u = upper(strip(l));
    if (u.rfind("THERMO", 0) == 0) {
      ++i;
      // optional global temperature line
      if (i < lines.size()) {
        auto toks = split_ws(strip_comment(lines[i]));
        if (toks.size() == 3) {
          bool numeric = true;
          for (auto& t : toks)
            if (t.find_first_not_of("0123456789.+-eE") != std::string::npos)
              numeric = false;
          if (numeric) {
            if (default_ts)
              for (int k = 0; k < 3; ++k) default_ts[k] = std::stod(toks[k]);
            ++i;
          }
        }
      }
      continue;
    }
    if (u == "END" || u.empty()) {
      ++i;
      continue;
    }
    if (l.size() >= 80 && l[79] == '1') {
      int ln = static_cast<int>(i) + 1;
      SpeciesThermo st;
      st.name = strip(l.substr(0, 18));
      if (auto sp = st.name.find(' '); sp != std::string::npos)
        st.name = st.name.substr(0, sp);
      for (int k = 0; k < 4; ++k) {
        std::string f = l.substr(24 + 5 * k, 5);
        std::string el = strip(f.substr(0, 2));
        std::string cnt = strip(f.substr(2, 3));
        if (!el.empty() && !cnt.empty()) {
          int n = static_cast<int>(std::lround(std::stod(cnt)));
          if (n > 0) st.composition[upper(el)] += n;
        }
      }
      try {
        st.T_low = std::stod(l.substr(45, 10));
        st.T_high = std::stod(l.substr(55, 10));
        std::string tm = strip(l.substr(65, 8));
        st.T_mid = tm.empty() ? 1000.0 : std::stod(tm);
      } catch (const std::exception&) {
        throw ParseError("malformed thermo card 1 for " + st.name, ln);
      }
      if (i + 3 >= lines.size())
        throw ParseError("truncated thermo entry for " + st.name, ln);
      double co[14];
      int c = 0;
      for (int k = 1; k <= 3; ++k) {
        const std::string& row = lines[i + k];
        int nc = (k < 3) ? 5 : 4;
        if (row.size() < static_cast<size_t>(15 * nc))
          throw ParseError("malformed thermo card for " + st.name,
                           ln + k);
        for (int j = 0; j < nc; ++j) {
          try {
            co[c++] = std::stod(row.substr(15 * j, 15));
          } catch (const std::exception&) {
            throw ParseError("malformed coefficient in thermo card for " +
                                 st.name,
                             ln + k);
          }
        }
      }
      for (int k = 0; k < 7; ++k) st.nasa7_high[k] = co[k];
      for (int k = 0; k < 7; ++k) st.nasa7_low[k] = co[7 + k];
      for (auto& [el, n] : st.composition)
        st.molecular_weight += atomic_weight(el) * n;
      out.emplace(st.name, std::move(st));
      i += 4;
    } else {
      ++i;
    }
  }
  return out;
}

struct SideResult {
  std::vector<std::pair<int, double>> stoich;
  bool third_body = false;
  bool falloff = false;
  std::string bath;  // named falloff collider, empty for (+M)
};

SideResult parse_side(std::string s, const Mechanism& m, int line) {
  SideResult out;
  std::string u = upper(s);
  if (auto k = u.find("(+M)"); k != std::string::npos) {
    out.falloff = true;
    s = s.substr(0, k) + s.substr(k + 4);
  } else if (!s.empty() && s.back() == ')') {
    // possible named falloff collider "(+SPECIES)"
    auto k = s.rfind("(+");
    if (k != std::string::npos) {
      std::string name = s.substr(k + 2, s.size() - k - 3);
      if (m.species_index(name) >= 0) {
        out.falloff = true;
        out.bath = name;
        s = s.substr(0, k);
      }
    }
  }
  size_t pos = 0;
  while (pos < s.size()) {
    size_t plus = s.find('+', pos);
    // '+' inside a species name (e.g. an ion) is not expected; split plainly
    std::string tok =
        (plus == std::string::npos) ? s.substr(pos) : s.substr(pos, plus - pos);
    pos = (plus == std::string::npos) ? s.size() : plus + 1;
    tok = strip(tok);
    if (tok.empty()) continue;
    if (upper(tok) == "M") {
      out.third_body = true;
      continue;
    }
    size_t j = 0;
    while (j < tok.size() &&
           (std::isdigit(static_cast<unsigned char>(tok[j])) || tok[j] == '.'))
      ++j;
    double nu = 1.0;
    std::string name = tok;
    if (j > 0 && m.species_index(tok) < 0) {
      nu = std::stod(tok.substr(0, j));
      name = tok.substr(j);
    }
    int idx = m.species_index(name);
    if (idx < 0) throw ParseError("unknown species '" + name + "'", line);
    bool merged = false;
    for (auto& [i, v] : out.stoich)
      if (i == idx) {
        v += nu;
        merged = true;
      }
    if (!merged) out.stoich.emplace_back(idx, nu);
  }
  return out;
}

struct Units {
  double ea_to_jmol = kCalToJoule;  // default CAL/MOLE
  double mole_factor = 1.0;         // MOLECULES -> divide A by N_A per order
};

}  // namespace

Mechanism parse_mechanism(const std::string& mech_text,
                          const std::string& thermo_text) {
  Mechanism m;
  auto thermo = parse_thermo(thermo_text, nullptr);
  // also allow THERMO embedded in the mechanism file
  if (mech_text.find("THERMO") != std::string::npos ||
      upper(mech_text).find("THERMO") != std::string::npos) {
    auto extra = parse_thermo(mech_text, nullptr);
    for (auto& [k, v] : extra) thermo.emplace(k, v);
  }

  std::vector<std::string> lines;
  {
    std::istringstream is(mech_text);
    std::string l;
    while (std::getline(is, l)) lines.push_back(strip_comment(l));
  }

  enum Block { None, Elements, Species, Reactions, Thermo } block = None;
  Units units;
  std::vector<std::pair<std::string, int>> rxn_lines;  // text, line number

  for (size_t li = 0; li < lines.size(); ++li) {
    std::string l = strip(lines[li]);
    if (l.empty()) continue;
    auto toks = split_ws(l);
    std::string key = upper(toks[0]);
    if (key == "ELEMENTS" || key == "ELEM") {
      block = Elements;
      toks.erase(toks.begin());
    } else if (key == "SPECIES" || key == "SPEC") {
      block = Species;
      toks.erase(toks.begin());
    } else if (key == "REACTIONS" || key == "REAC") {
      block = Reactions;
      for (size_t k = 1; k < toks.size(); ++k) {
        std::string u = upper(toks[k]);
        if (u == "CAL/MOLE")
          units.ea_to_jmol = kCalToJoule;
        else if (u == "KCAL/MOLE")
          units.ea_to_jmol = kCalToJoule * 1000.0;
        else if (u == "JOULES/MOLE")
          units.ea_to_jmol = 1.0;
        else if (u == "KJOULES/MOLE")
          units.ea_to_jmol = 1000.0;
        else if (u == "KELVINS")
          units.ea_to_jmol = kGasConstant / 1000.0;
        else if (u == "MOLES")
          units.mole_factor = 1.0;
        else if (u == "MOLECULES")
          units.mole_factor = 6.02214076e23;
      }
      continue;
    } else if (key == "THERMO") {
      block = Thermo;
      continue;
    } else if (key == "END") {
      block = None;
      continue;
    }
    switch (block) {
      case Elements:
        for (auto& t : toks)
          if (upper(t) != "END") m.elements.push_back(upper(t));
        break;
      case Species:
        for (auto& t : toks)
          if (upper(t) != "END") {
            SpeciesThermo st;
            st.name = t;
            m.species.push_back(st);
          }
        break;
      case Reactions:
        rxn_lines.emplace_back(l, static_cast<int>(li) + 1);
        break;
      default:
        break;
    }
  }

  // attach thermo records
  for (auto& sp : m.species) {
    auto it = thermo.find(sp.name);
    if (it == thermo.end())
      throw MechError("missing thermo entry for species " + sp.name);
    std::string name = sp.name;
    sp = it->second;
    sp.name = name;
  }

  // reaction lines: an auxiliary line contains '/' data or DUPLICATE and no
  // rate triple; anything with '=' is a new reaction
  for (auto& [text, ln] : rxn_lines) {
    std::string u = upper(text);
    bool is_rxn = text.find('=') != std::string::npos;
    if (!is_rxn) {
      if (m.reactions.empty())
        throw ParseError("auxiliary data before any reaction", ln);
      Reaction& r = m.reactions.back();
      if (u.rfind("DUP", 0) == 0) {
        r.duplicate = true;
        continue;
      }
      if (u.rfind("LOW", 0) == 0 || u.rfind("TROE", 0) == 0) {
        auto a = text.find('/'), b = text.rfind('/');
        if (a == std::string::npos || b <= a)
          throw ParseError("malformed auxiliary line", ln);
        auto vals = split_ws(text.substr(a + 1, b - a - 1));
        if (u.rfind("LOW", 0) == 0) {
          if (vals.size() != 3) throw ParseError("LOW needs 3 numbers", ln);
          r.low = Arrhenius{to_double(vals[0], ln), to_double(vals[1], ln),
                            to_double(vals[2], ln)};
          if (r.kind == RateKind::Elementary || r.kind == RateKind::ThreeBody)
            r.kind = RateKind::FalloffLindemann;
        } else {
          if (vals.size() != 3 && vals.size() != 4)
            throw ParseError("TROE needs 3 or 4 numbers", ln);
          TroeParams t;
          t.a = to_double(vals[0], ln);
          t.T3 = to_double(vals[1], ln);
          t.T1 = to_double(vals[2], ln);
          if (vals.size() == 4) t.T2 = to_double(vals[3], ln);
          r.troe = t;
          r.kind = RateKind::FalloffTroe;
        }
        continue;
      }
      // efficiency list:  SP/val/ SP/val/ ...
      std::string flat = text;
      std::replace(flat.begin(), flat.end(), '/', ' ');
      auto toks = split_ws(flat);
      if (toks.size() % 2 != 0)
        throw ParseError("malformed efficiency list", ln);
      for (size_t k = 0; k + 1 < toks.size(); k += 2) {
        int idx = m.species_index(toks[k]);
        if (idx < 0)
          throw ParseError("unknown collider species '" + toks[k] + "'", ln);
        r.efficiencies[idx] = to_double(toks[k + 1], ln);
      }
      continue;
    }

    auto toks = split_ws(text);
    if (toks.size() < 4) throw ParseError("reaction line too short", ln);
    double A = to_double(toks[toks.size() - 3], ln);
    double b = to_double(toks[toks.size() - 2], ln);
    double Ea = to_double(toks[toks.size() - 1], ln);
    std::string eq;
    for (size_t k = 0; k + 3 < toks.size(); ++k) eq += toks[k];

    Reaction r;
    r.equation = eq;
    std::string lhs, rhs;
    size_t sep;
    if ((sep = eq.find("<=>")) != std::string::npos) {
      lhs = eq.substr(0, sep);
      rhs = eq.substr(sep + 3);
      r.reversible = true;
    } else if ((sep = eq.find("=>")) != std::string::npos) {
      lhs = eq.substr(0, sep);
      rhs = eq.substr(sep + 2);
      r.reversible = false;
    } else if ((sep = eq.find('=')) != std::string::npos) {
      lhs = eq.substr(0, sep);
      rhs = eq.substr(sep + 1);
      r.reversible = true;
    } else {
      throw ParseError("no '=' in reaction equation", ln);
    }
    SideResult L = parse_side(lhs, m, ln);
    SideResult R = parse_side(rhs, m, ln);
    r.reactants = L.stoich;
    r.products = R.stoich;
    if (L.falloff || R.falloff) {
      r.kind = RateKind::FalloffLindemann;  // upgraded to Troe if TROE found
      std::string bath = !L.bath.empty() ? L.bath : R.bath;
      if (!bath.empty()) r.bath_species = m.species_index(bath);
    } else if (L.third_body || R.third_body) {
      r.kind = RateKind::ThreeBody;
    }

    double order = 0.0;
    for (auto& [i, nu] : r.reactants) order += nu;
    if (r.kind == RateKind::ThreeBody) order += 1.0;
    // cm3/mol -> m3/kmol is a factor 1e-3 per reaction order beyond first
    double conv = std::pow(1e-3, order - 1.0);
    r.rate.A = A * conv * std::pow(units.mole_factor, order - 1.0);
    r.rate.b = b;
    r.rate.Ea = Ea * units.ea_to_jmol * 1000.0;  // J/kmol
    m.reactions.push_back(std::move(r));
  }

  // convert LOW parameters now that stoichiometry is known
  for (auto& r : m.reactions) {
    if (r.low) {
      double order = 0.0;
      for (auto& [i, nu] : r.reactants) order += nu;
      r.low->A *= std::pow(1e-3, order);  // one order higher than k_inf
      r.low->Ea *= units.ea_to_jmol * 1000.0;
    }
  }

  // element list inferred from thermo if the file omitted it
  if (m.elements.empty()) {
    std::set<std::string> els;
    for (auto& sp : m.species)
      for (auto& [el, n] : sp.composition) els.insert(el);
    m.elements.assign(els.begin(), els.end());
  }
  m.validate();
  return m;
}

Mechanism load_mechanism(const std::string& mech_path,
                         const std::string& thermo_path) {
  auto slurp = [](const std::string& p) {
    std::ifstream f(p);
    if (!f) throw MechError("cannot open file: " + p);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
  };
  return parse_mechanism(slurp(mech_path),
                         thermo_path.empty() ? "" : slurp(thermo_path));
}

namespace {

std::string fmt_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string equation_text(const Mechanism& m, const Reaction& r) {
  auto side = [&](const std::vector<std::pair<int, double>>& st) {
    std::string s;
    for (size_t k = 0; k < st.size(); ++k) {
      if (k) s += "+";
      double nu = st[k].second;
      if (nu != 1.0) {
        if (nu == std::floor(nu))
          s += std::to_string(static_cast<long>(nu));
        else
          s += fmt_g(nu);
      }
      s += m.species[st[k].first].name;
    }
    return s;
  };
  std::string lhs = side(r.reactants), rhs = side(r.products);
  std::string suffix;
  if (r.kind == RateKind::FalloffLindemann || r.kind == RateKind::FalloffTroe)
    suffix = r.bath_species ? "(+" + m.species[*r.bath_species].name + ")"
                            : "(+M)";
  else if (r.kind == RateKind::ThreeBody)
    suffix = "+M";
  std::string arrow = r.reversible ? "<=>" : "=>";
  return lhs + suffix + arrow + rhs + suffix;
}

}  // namespace

std::pair<std::string, std::string> write_mechanism(const Mechanism& m) {
  std::ostringstream mech;
  mech << "ELEMENTS\n";
  for (auto& el : m.elements) mech << el << " ";
  mech << "\nEND\nSPECIES\n";
  for (int i = 0; i < m.n_species(); ++i) {
    mech << m.species[i].name << ((i + 1) % 8 == 0 ? "\n" : " ");
  }
  mech << "\nEND\nREACTIONS CAL/MOLE\n";
  char buf[256];
  for (const auto& r : m.reactions) {
    double order = 0.0;
    for (auto& [i, nu] : r.reactants) order += nu;
    if (r.kind == RateKind::ThreeBody) order += 1.0;
    double A_ck = r.rate.A / std::pow(1e-3, order - 1.0);
    double Ea_ck = r.rate.Ea / (kCalToJoule * 1000.0);
    std::snprintf(buf, sizeof buf, "%-44s %.10E %12.7f %.10E\n",
                  equation_text(m, r).c_str(), A_ck, r.rate.b, Ea_ck);
    mech << buf;
    if (r.low) {
      std::snprintf(buf, sizeof buf, "LOW /%.10E %.7f %.10E/\n",
                    r.low->A / std::pow(1e-3, order),
                    r.low->b, r.low->Ea / (kCalToJoule * 1000.0));
      mech << buf;
    }
    if (r.troe) {
      if (r.troe->T2)
        std::snprintf(buf, sizeof buf, "TROE /%.7g %.7g %.7g %.7g/\n",
                      r.troe->a, r.troe->T3, r.troe->T1, *r.troe->T2);
      else
        std::snprintf(buf, sizeof buf, "TROE /%.7g %.7g %.7g/\n", r.troe->a,
                      r.troe->T3, r.troe->T1);
      mech << buf;
    }
    if (!r.efficiencies.empty()) {
      for (auto& [i, e] : r.efficiencies)
        mech << m.species[i].name << "/" << fmt_g(e) << "/ ";
      mech << "\n";
    }
    if (r.duplicate) mech << "DUPLICATE\n";
  }
  mech << "END\n";

  std::ostringstream th;
  th << "THERMO ALL\n   300.000  1000.000  5000.000\n";
  for (const auto& sp : m.species) {
    std::string comp;
    int k = 0;
    for (auto& [el, n] : sp.composition) {
      if (k++ >= 4) break;
      std::snprintf(buf, sizeof buf, "%-2s%3d", el.c_str(), n);
      comp += buf;
    }
    comp.resize(20, ' ');
    std::snprintf(buf, sizeof buf, "%-18s%-6s%sG%10.3f%10.3f%8.2f%6s1\n",
                  sp.name.c_str(), "", comp.c_str(), sp.T_low, sp.T_high,
                  sp.T_mid, "");
    th << buf;
    const double* hi = sp.nasa7_high;
    const double* lo = sp.nasa7_low;
    double co[14];
    for (int j = 0; j < 7; ++j) co[j] = hi[j];
    for (int j = 0; j < 7; ++j) co[7 + j] = lo[j];
    for (int row = 0; row < 3; ++row) {
      int nc = row < 2 ? 5 : 4;
      std::string line;
      for (int j = 0; j < nc; ++j) {
        std::snprintf(buf, sizeof buf, "%15.8E", co[5 * row + j]);
        line += buf;
      }
      line.resize(79, ' ');
      th << line << (row + 2) << "\n";
    }
  }
  th << "END\n";
  return {mech.str(), th.str()};
}

std::string mechanism_content_hash(const Mechanism& m) {
  auto [a, b] = write_mechanism(m);
  uint64_t h = 1469598103934665603ull;
  for (char c : a + b) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace chemred
