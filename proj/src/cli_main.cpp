// chemred: mechanism reduction driver.
//
// Subcommands: parse, simulate, reduce (drgep | gnn-sm | gnn-ae),
// refine greedy, validate, report.  Exit codes: 0 success, 2 config or
// input error, 3 integration failure, 4 training divergence.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "chemred/chemkin.hpp"
#include "chemred/report.hpp"
#include "chemred/reduce_ae.hpp"
#include "chemred/reduce_sm.hpp"

using json = nlohmann::json;
using namespace chemred;
namespace fs = std::filesystem;

namespace {

struct CliError : std::runtime_error {
  int code;
  CliError(int c, const std::string& m) : std::runtime_error(m), code(c) {}
};

[[noreturn]] void fail(int code, const std::string& category,
                       const std::string& msg) {
  throw CliError(code, category + ": " + msg);
}

// every artifact carries the config hash; FNV-1a over the canonical dump
std::string hash_string(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)h);
  return buf;
}

void require_keys(const json& j, const std::set<std::string>& allowed,
                  const std::string& where) {
  if (!j.is_object()) fail(2, "config", where + " must be an object");
  for (auto& [k, v] : j.items())
    if (!allowed.count(k))
      fail(2, "config", "unknown key '" + k + "' in " + where);
}

json load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) fail(2, "config", "cannot open " + path);
  try {
    return json::parse(is);
  } catch (const json::exception& e) {
    fail(2, "config", std::string("bad json: ") + e.what());
  }
}

Mechanism load_mech_checked(const std::string& mech, const std::string& thermo) {
  if (!fs::exists(mech)) fail(2, "config", "missing mechanism file " + mech);
  if (!thermo.empty() && !fs::exists(thermo))
    fail(2, "config", "missing thermo file " + thermo);
  try {
    return load_mechanism(mech, thermo);
  } catch (const MechError& e) {
    fail(2, "parse", e.what());
  }
}

int worker_default() {
  if (const char* env = std::getenv("CHEMRED_WORKERS")) return std::atoi(env);
  return std::max(1u, std::thread::hardware_concurrency());
}

struct Common {
  std::string out_dir = "out";
  bool dry_run = false;
  int workers = worker_default();
  std::uint64_t seed = 0;
  std::string config_hash;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--out-dir", c.out_dir, "output directory");
  app->add_flag("--dry-run", c.dry_run, "validate inputs and exit");
  app->add_option("--workers", c.workers, "parallel sweep bound");
  app->add_option("--seed", c.seed, "RNG seed");
}

std::ofstream open_artifact(const Common& c, const std::string& name,
                            const char* comment = "#") {
  fs::create_directories(c.out_dir);
  std::ofstream os(fs::path(c.out_dir) / name);
  os << comment << " config=" << c.config_hash << " seed=" << c.seed << "\n";
  return os;
}

void write_mech_artifact(const Common& c, const Mechanism& m,
                         const std::string& stem) {
  fs::create_directories(c.out_dir);
  auto [mech_txt, thermo_txt] = write_mechanism(m);
  std::string hdr = "! config=" + c.config_hash + " seed=" +
                    std::to_string(c.seed) + " mech_hash=" +
                    mechanism_content_hash(m) + "\n";
  std::ofstream(fs::path(c.out_dir) / (stem + ".inp")) << hdr << mech_txt;
  std::ofstream(fs::path(c.out_dir) / (stem + "_thermo.dat")) << hdr << thermo_txt;
}

std::vector<GridPoint> grid_from_json(const json& j) {
  if (j.is_null()) return default_grid();
  std::vector<GridPoint> g;
  for (const auto& row : j) {
    GridPoint p;
    p.T0 = row.at(0).get<double>();
    p.P0 = row.size() > 1 ? row.at(1).get<double>() : kPatm;
    p.phi = row.size() > 2 ? row.at(2).get<double>() : 1.0;
    g.push_back(p);
  }
  return g;
}

// ------------------------------------------------------------- subcommands

int cmd_parse(const std::string& mech, const std::string& thermo,
              const Common& c) {
  Mechanism m = load_mech_checked(mech, thermo);
  if (c.dry_run) return 0;
  auto [mech_txt, thermo_txt] = write_mechanism(m);
  // idempotence: canonical form must re-parse to the same canonical form
  Mechanism m2 = parse_mechanism(mech_txt, thermo_txt);
  auto [mech_txt2, thermo_txt2] = write_mechanism(m2);
  if (mech_txt != mech_txt2 || thermo_txt != thermo_txt2)
    fail(2, "parse", "round trip is not idempotent");
  fs::create_directories(c.out_dir);
  std::ofstream(fs::path(c.out_dir) / "canonical.inp") << mech_txt;
  std::ofstream(fs::path(c.out_dir) / "canonical_thermo.dat") << thermo_txt;
  std::cout << "species=" << m.n_species() << " reactions=" << m.n_reactions()
            << " hash=" << mechanism_content_hash(m) << "\n";
  return 0;
}

int cmd_simulate(const std::string& mech, const std::string& thermo,
                 const std::string& fuel, double T0, double P0, double phi,
                 double t_end, const Common& c) {
  Mechanism m = load_mech_checked(mech, thermo);
  if (m.species_index(fuel) < 0) fail(2, "config", "fuel not in mechanism");
  if (c.dry_run) return 0;
  Kinetics kin(m);
  Eigen::VectorXd Y0 = mixture_from_phi(m, fuel, phi);
  ReactorOptions ro;
  ro.t_end = t_end;
  Trajectory tr = integrate_constant_pressure(kin, T0, P0, Y0, ro);
  fs::create_directories(c.out_dir);
  std::string path = (fs::path(c.out_dir) / "trajectory.csv").string();
  write_trajectory_csv(tr, m, path);
  auto tau = ignition_delay(tr);
  std::ofstream os(path, std::ios::app);
  os << "# tau_ig," << (tau ? *tau : 0.0) << "\n";
  os << "# ignited," << (tau ? 1 : 0) << "\n";
  os << "# config=" << c.config_hash << " seed=" << c.seed << "\n";
  if (tau)
    std::cout << "tau_ig=" << *tau << " s\n";
  else
    std::cout << "no ignition before t_end\n";
  return 0;
}

DrgepOptions drgep_opts_from_json(const json& j) {
  require_keys(j, {"fuel", "phi", "conditions", "targets", "protected",
                   "samples_per_condition"}, "drgep");
  DrgepOptions o;
  o.fuel = j.value("fuel", o.fuel);
  o.phi = j.value("phi", o.phi);
  if (j.contains("conditions"))
    for (const auto& row : j["conditions"])
      o.conditions.push_back({row.at(0).get<double>(),
                              row.size() > 1 ? row.at(1).get<double>() : kPatm});
  if (j.contains("targets"))
    o.targets = j["targets"].get<std::vector<std::string>>();
  if (j.contains("protected"))
    o.protected_ = j["protected"].get<std::vector<std::string>>();
  o.samples_per_condition = j.value("samples_per_condition", o.samples_per_condition);
  return o;
}

int cmd_reduce(const std::string& method, const std::string& mech,
               const std::string& thermo, const json& cfg, const Common& c) {
  Mechanism m = load_mech_checked(mech, thermo);
  if (c.dry_run) return 0;
  std::ofstream log = open_artifact(c, "reduce_" + method + ".log");
  auto logger = [&](const std::string& s) {
    log << s << "\n";
    log.flush();
    std::cout << s << "\n";
  };

  if (method == "drgep") {
    require_keys(cfg, {"drgep", "grid_T", "error_budget", "epsilon"}, "config");
    DrgepOptions o = drgep_opts_from_json(cfg.value("drgep", json::object()));
    if (o.conditions.empty())
      for (double T : {1000.0, 1250.0, 1500.0, 1750.0, 2000.0})
        o.conditions.push_back({T, kPatm});
    if (cfg.contains("epsilon")) {
      DrgepReduction red = reduce_drgep(m, o, cfg["epsilon"].get<double>());
      logger("epsilon=" + std::to_string(red.epsilon) + " species=" +
             std::to_string(red.mech.n_species()));
      write_mech_artifact(c, red.mech, "reduced_drgep");
      return 0;
    }
    std::vector<double> grid_T;
    if (cfg.contains("grid_T"))
      grid_T = cfg["grid_T"].get<std::vector<double>>();
    else
      for (const GridPoint& p : default_grid()) grid_T.push_back(p.T0);
    SweepResult sr = threshold_sweep(m, o, grid_T,
                                     cfg.value("error_budget", 0.05), logger);
    logger("final species=" + std::to_string(sr.reduction.mech.n_species()) +
           " reactions=" + std::to_string(sr.reduction.mech.n_reactions()) +
           " avg_idt_error=" + std::to_string(sr.avg_idt_error * 100) + "%");
    write_mech_artifact(c, sr.reduction.mech, "reduced_drgep");
    return 0;
  }

  if (method == "gnn-ae") {
    require_keys(cfg, {"gnn_ae"}, "config");
    json a = cfg.value("gnn_ae", json::object());
    require_keys(a, {"d", "n_epochs", "lr", "lambda_rec", "lambda_sp", "theta",
                     "target_T", "target_P", "phi", "fuel", "n_states",
                     "budget", "protected"}, "gnn_ae");
    AeConfig ac;
    ac.d = a.value("d", ac.d);
    ac.n_epochs = a.value("n_epochs", ac.n_epochs);
    ac.lr = a.value("lr", ac.lr);
    ac.lambda_rec = a.value("lambda_rec", ac.lambda_rec);
    ac.lambda_sp = a.value("lambda_sp", ac.lambda_sp);
    ac.theta = a.value("theta", ac.theta);
    ac.target_T = a.value("target_T", ac.target_T);
    ac.target_P = a.value("target_P", ac.target_P);
    ac.phi = a.value("phi", ac.phi);
    ac.fuel = a.value("fuel", ac.fuel);
    ac.n_states = a.value("n_states", ac.n_states);
    ac.budget = a.value("budget", ac.budget);
    if (a.contains("protected"))
      ac.protected_ = a["protected"].get<std::vector<std::string>>();
    ac.seed = c.seed;
    AeReduction red = iterate_prune(m, ac, logger);
    write_mech_artifact(c, red.mech, "reduced_gnn_ae");
    std::ofstream sc = open_artifact(c, "species_scores.csv");
    sc << "species,score\n";
    for (int k = 0; k < m.n_species(); ++k)
      sc << m.species[k].name << "," << red.scores[k] << "\n";
    logger("final species=" + std::to_string(red.mech.n_species()) +
           " idt_err_target=" + std::to_string(red.idt_err_target * 100) + "%");
    return 0;
  }

  if (method == "gnn-sm") {
    require_keys(cfg, {"gnn_sm", "surrogate"}, "config");
    json s = cfg.value("surrogate", json::object());
    require_keys(s, {"T_lo", "T_hi", "n_points", "P0", "phi", "fuel",
                     "n_epochs", "lr"}, "surrogate");
    SurrogateConfig sc;
    sc.T_lo = s.value("T_lo", sc.T_lo);
    sc.T_hi = s.value("T_hi", sc.T_hi);
    sc.n_points = s.value("n_points", sc.n_points);
    sc.P0 = s.value("P0", sc.P0);
    sc.phi = s.value("phi", sc.phi);
    sc.fuel = s.value("fuel", sc.fuel);
    sc.n_epochs = s.value("n_epochs", sc.n_epochs);
    sc.lr = s.value("lr", sc.lr);
    json g = cfg.value("gnn_sm", json::object());
    require_keys(g, {"d", "n_epochs", "lr", "lambda_sp", "ratio", "ratios",
                     "max_passes", "phi", "fuel", "train_T", "P0",
                     "states_per_traj", "budget", "grid_T", "protected"},
                 "gnn_sm");
    SmConfig mc;
    mc.d = g.value("d", mc.d);
    mc.n_epochs = g.value("n_epochs", mc.n_epochs);
    mc.lr = g.value("lr", mc.lr);
    mc.lambda_sp = g.value("lambda_sp", mc.lambda_sp);
    mc.ratio = g.value("ratio", mc.ratio);
    if (g.contains("ratios"))
      mc.ratios = g["ratios"].get<std::vector<double>>();
    mc.max_passes = g.value("max_passes", mc.max_passes);
    mc.phi = g.value("phi", mc.phi);
    mc.fuel = g.value("fuel", mc.fuel);
    if (g.contains("train_T"))
      mc.train_T = g["train_T"].get<std::vector<double>>();
    mc.P0 = g.value("P0", mc.P0);
    mc.states_per_traj = g.value("states_per_traj", mc.states_per_traj);
    mc.budget = g.value("budget", mc.budget);
    if (g.contains("grid_T"))
      mc.grid_T = g["grid_T"].get<std::vector<double>>();
    if (g.contains("protected"))
      mc.protected_ = g["protected"].get<std::vector<std::string>>();
    mc.seed = c.seed;
    SurrogateModel sur = train_surrogate(m, sc, logger);
    logger("surrogate holdout_rmse=" + std::to_string(sur.holdout_rmse));
    sur.ps.save((fs::path(c.out_dir) / "surrogate.ckpt").string());
    SmReducerState st = iterate_passes(m, sur, mc, logger);
    write_mech_artifact(c, st.mech, "reduced_gnn_sm");
    logger("final species=" + std::to_string(st.mech.n_species()) +
           " reactions=" + std::to_string(st.mech.n_reactions()));
    return 0;
  }

  fail(2, "config", "unknown reduction method " + method);
}

int cmd_refine(const std::string& start_mech, const std::string& start_thermo,
               const std::string& scores_csv, const json& cfg, const Common& c) {
  require_keys(cfg, {"fuel", "phi", "tol_idt", "tol_hrr", "conditions",
                     "protected"}, "config");
  Mechanism start = load_mech_checked(start_mech, start_thermo);
  std::string fuel = cfg.value("fuel", "CH4");
  std::vector<std::pair<double, double>> conds;
  if (cfg.contains("conditions"))
    for (const auto& row : cfg["conditions"])
      conds.push_back({row.at(0).get<double>(),
                       row.size() > 1 ? row.at(1).get<double>() : kPatm});
  else
    conds.push_back({1500.0, kPatm});
  std::vector<std::string> prot = {fuel, "O2", "N2"};
  if (cfg.contains("protected"))
    prot = cfg["protected"].get<std::vector<std::string>>();

  // scores over the start mechanism, from the gnn-ae run
  Eigen::VectorXd scores = Eigen::VectorXd::Zero(start.n_species());
  std::vector<std::string> names(start.n_species());
  for (int k = 0; k < start.n_species(); ++k) names[k] = start.species[k].name;
  if (!scores_csv.empty()) {
    std::ifstream is(scores_csv);
    if (!is) fail(2, "config", "cannot open " + scores_csv);
    std::string line;
    while (std::getline(is, line)) {
      if (line.empty() || line[0] == '#' || line.rfind("species,", 0) == 0)
        continue;
      auto pos = line.find(',');
      int k = start.species_index(line.substr(0, pos));
      if (k >= 0) scores[k] = std::stod(line.substr(pos + 1));
    }
  }
  if (c.dry_run) return 0;
  std::ofstream log = open_artifact(c, "refine_greedy.log");
  auto logger = [&](const std::string& s) {
    log << s << "\n";
    log.flush();
    std::cout << s << "\n";
  };
  Mechanism refined = greedy_refine(start, scores, names, conds, fuel,
                                    cfg.value("phi", 1.0),
                                    cfg.value("tol_idt", 0.05),
                                    cfg.value("tol_hrr", 0.10), prot, logger);
  write_mech_artifact(c, refined, "refined_greedy");
  logger("final species=" + std::to_string(refined.n_species()) +
         " reactions=" + std::to_string(refined.n_reactions()));
  return 0;
}

int cmd_validate(const std::string& det_mech, const std::string& det_thermo,
                 const std::string& red_mech, const std::string& red_thermo,
                 const std::string& fuel, const json& grid_json, bool geometric,
                 const Common& c) {
  Mechanism det = load_mech_checked(det_mech, det_thermo);
  Mechanism red = load_mech_checked(red_mech, red_thermo);
  if (c.dry_run) return 0;
  ValidateOptions opt;
  opt.fuel = fuel;
  opt.geometric_mean = geometric;
  opt.n_workers = c.workers;
  ValidationReport r = validate_sweep(det, red, grid_from_json(grid_json), opt);
  r.config_hash = c.config_hash;
  r.seed = c.seed;
  fs::create_directories(c.out_dir);
  write_report_csv(r, (fs::path(c.out_dir) / "report.csv").string());
  std::cout << "avg_idt_error=" << r.avg_idt_error << "%\n";
  return 0;
}

int cmd_report(const std::vector<std::string>& report_csvs,
               const std::vector<std::string>& labels, const Common& c) {
  if (c.dry_run) return 0;
  std::vector<std::pair<std::string, ValidationReport>> rows;
  for (size_t i = 0; i < report_csvs.size(); ++i) {
    std::string label = i < labels.size() ? labels[i]
                                          : fs::path(report_csvs[i]).stem().string();
    rows.push_back({label, read_report_csv(report_csvs[i])});
  }
  emit_figures(c.out_dir, rows, {});
  std::string tbl = summary_table(rows);
  std::ofstream os = open_artifact(c, "summary.txt");
  os << tbl;
  std::cout << tbl;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"chemred: GNN and DRGEP mechanism reduction"};
  app.require_subcommand(1);

  Common c;
  std::string mech, thermo, red_mech, red_thermo, fuel = "CH4";
  std::string config_path, scores_csv, method;
  double T0 = 1500, P0 = kPatm, phi = 1.0, t_end = 10.0;
  bool geometric = false;
  std::vector<std::string> report_csvs, labels;

  auto* p_parse = app.add_subcommand("parse", "round-trip check, canonical form");
  p_parse->add_option("--mech", mech)->required();
  p_parse->add_option("--thermo", thermo);
  add_common(p_parse, c);

  auto* p_sim = app.add_subcommand("simulate", "one autoignition run");
  p_sim->add_option("--mech", mech)->required();
  p_sim->add_option("--thermo", thermo);
  p_sim->add_option("--fuel", fuel);
  p_sim->add_option("--T0", T0);
  p_sim->add_option("--P0", P0);
  p_sim->add_option("--phi", phi);
  p_sim->add_option("--t-end", t_end);
  add_common(p_sim, c);

  auto* p_red = app.add_subcommand("reduce", "run one reduction method");
  p_red->add_option("method", method, "drgep | gnn-sm | gnn-ae")->required();
  p_red->add_option("--mech", mech)->required();
  p_red->add_option("--thermo", thermo);
  p_red->add_option("--config", config_path);
  add_common(p_red, c);

  auto* p_ref = app.add_subcommand("refine", "greedy species removal");
  std::string submode;
  p_ref->add_option("mode", submode, "greedy")->required();
  p_ref->add_option("--start", red_mech)->required();
  p_ref->add_option("--start-thermo", red_thermo);
  p_ref->add_option("--scores", scores_csv);
  p_ref->add_option("--config", config_path);
  add_common(p_ref, c);

  auto* p_val = app.add_subcommand("validate", "detailed vs reduced sweep");
  p_val->add_option("--detailed", mech)->required();
  p_val->add_option("--detailed-thermo", thermo);
  p_val->add_option("--reduced", red_mech)->required();
  p_val->add_option("--reduced-thermo", red_thermo);
  p_val->add_option("--fuel", fuel);
  p_val->add_option("--config", config_path);
  p_val->add_flag("--geometric-mean", geometric);
  add_common(p_val, c);

  auto* p_rep = app.add_subcommand("report", "figures and summary table");
  p_rep->add_option("--report", report_csvs)->required();
  p_rep->add_option("--label", labels);
  add_common(p_rep, c);

  CLI11_PARSE(app, argc, argv);

  try {
    json cfg = json::object();
    if (!config_path.empty()) cfg = load_config(config_path);
    c.config_hash = hash_string(cfg.dump() + "|seed=" + std::to_string(c.seed));

    if (p_parse->parsed()) return cmd_parse(mech, thermo, c);
    if (p_sim->parsed())
      return cmd_simulate(mech, thermo, fuel, T0, P0, phi, t_end, c);
    if (p_red->parsed()) return cmd_reduce(method, mech, thermo, cfg, c);
    if (p_ref->parsed()) {
      if (submode != "greedy") fail(2, "config", "unknown refine mode " + submode);
      return cmd_refine(red_mech, red_thermo, scores_csv, cfg, c);
    }
    if (p_val->parsed()) {
      json grid = cfg.contains("grid") ? cfg["grid"] : json();
      if (!cfg.is_null() && !cfg.empty())
        require_keys(cfg, {"grid"}, "validate config");
      return cmd_validate(mech, thermo, red_mech, red_thermo, fuel, grid,
                          geometric, c);
    }
    if (p_rep->parsed()) return cmd_report(report_csvs, labels, c);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code;
  } catch (const MechError& e) {
    std::string m = e.what();
    int code = m.find("divergence") != std::string::npos ? 4
             : (m.find("reactor:") != std::string::npos ||
                m.find("ignite") != std::string::npos)  ? 3
                                                        : 2;
    const char* cat = code == 4 ? "divergence" : code == 3 ? "integration" : "config";
    std::cerr << "error: " << cat << ": " << m << "\n";
    return code;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
