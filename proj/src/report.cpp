#include "chemred/report.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "chemred/chemkin.hpp"

namespace chemred {

std::vector<GridPoint> default_grid() {
  std::vector<GridPoint> g;
  for (int i = 0; i <= 10; ++i) g.push_back({1000.0 + 100.0 * i, kPatm, 1.0});
  return g;
}

namespace {

// tau and peak HRR for one mechanism at one condition
void run_point(const Mechanism& m, const GridPoint& gp, const std::string& fuel,
               const ReactorOptions& ro, double* tau, bool* ignited, double* hrr) {
  Kinetics kin(m);
  Eigen::VectorXd Y0 = mixture_from_phi(m, fuel, gp.phi);
  Trajectory tr = integrate_constant_pressure(kin, gp.T0, gp.P0, Y0, ro);
  auto t = ignition_delay(tr);
  *ignited = t.has_value();
  *tau = t.value_or(0.0);
  *hrr = peak_heat_release(tr);
}

}  // namespace

ValidationReport validate_sweep(const Mechanism& detailed,
                                const Mechanism& reduced,
                                const std::vector<GridPoint>& grid,
                                const ValidateOptions& opt) {
  ValidationReport r;
  r.geometric_mean = opt.geometric_mean;
  r.n_species_det = detailed.n_species();
  r.n_reactions_det = detailed.n_reactions();
  r.n_species_red = reduced.n_species();
  r.n_reactions_red = reduced.n_reactions();
  r.mech_hash_det = mechanism_content_hash(detailed);
  r.mech_hash_red = mechanism_content_hash(reduced);
  r.points.resize(grid.size());

  ReactorOptions ro = opt.reactor;
  ro.stop_after_ignition = true;
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (size_t i; (i = next.fetch_add(1)) < grid.size();) {
      PointResult& p = r.points[i];
      p.at = grid[i];
      run_point(detailed, grid[i], opt.fuel, ro, &p.tau_det, &p.det_ignited,
                &p.peak_hrr_det);
      run_point(reduced, grid[i], opt.fuel, ro, &p.tau_red, &p.red_ignited,
                &p.peak_hrr_red);
      if (p.det_ignited && p.red_ignited)
        p.rel_err_pct = std::abs(p.tau_red - p.tau_det) / p.tau_det * 100.0;
    }
  };
  int nw = std::max(1, opt.n_workers);
  if (nw == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < nw; ++k) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  double acc = 0;
  int n = 0;
  for (const PointResult& p : r.points) {
    if (!p.det_ignited)
      throw MechError("validate_sweep: detailed mechanism does not ignite at T0=" +
                      std::to_string(p.at.T0));
    if (!p.red_ignited) continue;
    acc += opt.geometric_mean ? std::log(std::max(p.rel_err_pct, 1e-12)) : p.rel_err_pct;
    ++n;
  }
  if (n > 0) r.avg_idt_error = opt.geometric_mean ? std::exp(acc / n) : acc / n;
  return r;
}

void write_report_csv(const ValidationReport& r, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw MechError("cannot write " + path);
  os << "T0,P0,phi,tau_det,tau_red,rel_err_pct,peak_hrr_det,peak_hrr_red\n";
  char buf[256];
  for (const PointResult& p : r.points) {
    std::snprintf(buf, sizeof buf, "%.6g,%.6g,%.6g,%.10e,%.10e,%.10e,%.10e,%.10e\n",
                  p.at.T0, p.at.P0, p.at.phi, p.tau_det,
                  p.red_ignited ? p.tau_red : 0.0, p.rel_err_pct, p.peak_hrr_det,
                  p.peak_hrr_red);
    os << buf;
  }
  // provenance trailer as comments so the table stays machine-readable
  std::snprintf(buf, sizeof buf, "# avg_idt_error_pct,%.12e\n", r.avg_idt_error);
  os << buf;
  os << "# sizes," << r.n_species_det << "," << r.n_reactions_det << ","
     << r.n_species_red << "," << r.n_reactions_red << "\n";
  os << "# mech_hash_det," << r.mech_hash_det << "\n";
  os << "# mech_hash_red," << r.mech_hash_red << "\n";
  os << "# config_hash," << r.config_hash << "\n";
  os << "# seed," << r.seed << "\n";
  for (const std::string& d : r.decisions) os << "# decision," << d << "\n";
}

ValidationReport read_report_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw MechError("cannot read " + path);
  ValidationReport r;
  r.decisions.clear();
  std::string line;
  std::getline(is, line);  // header
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      auto pos = line.find(',');
      std::string key = line.substr(2, pos - 2);
      std::string val = pos == std::string::npos ? "" : line.substr(pos + 1);
      if (key == "avg_idt_error_pct") r.avg_idt_error = std::stod(val);
      else if (key == "sizes") {
        std::sscanf(val.c_str(), "%d,%d,%d,%d", &r.n_species_det,
                    &r.n_reactions_det, &r.n_species_red, &r.n_reactions_red);
      } else if (key == "mech_hash_det") r.mech_hash_det = val;
      else if (key == "mech_hash_red") r.mech_hash_red = val;
      else if (key == "config_hash") r.config_hash = val;
      else if (key == "seed") r.seed = std::stoull(val);
      else if (key == "decision") r.decisions.push_back(val);
      continue;
    }
    PointResult p;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf", &p.at.T0,
                    &p.at.P0, &p.at.phi, &p.tau_det, &p.tau_red, &p.rel_err_pct,
                    &p.peak_hrr_det, &p.peak_hrr_red) != 8)
      throw MechError("malformed report row: " + line);
    p.det_ignited = p.tau_det > 0;
    p.red_ignited = p.tau_red > 0;
    r.points.push_back(p);
  }
  return r;
}

std::string summary_table(
    const std::vector<std::pair<std::string, ValidationReport>>& rows) {
  std::ostringstream os;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-24s %10s %10s %18s\n", "Mechanism", "Species",
                "Reactions", "Avg. IDT Error (%)");
  os << buf;
  os << std::string(66, '-') << "\n";
  if (!rows.empty()) {
    const ValidationReport& d = rows.front().second;
    std::snprintf(buf, sizeof buf, "%-24s %10d %10d %18s\n", "detailed",
                  d.n_species_det, d.n_reactions_det, "-");
    os << buf;
  }
  for (const auto& [name, r] : rows) {
    std::snprintf(buf, sizeof buf, "%-24s %10d %10d %18.2f\n", name.c_str(),
                  r.n_species_red, r.n_reactions_red, r.avg_idt_error);
    os << buf;
  }
  return os.str();
}

// ---------------------------------------------------------------- figures

namespace {

struct Series {
  std::string label;
  std::vector<double> x, y;
  bool dashed = false;
};

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                          "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};

double nice_step(double span) {
  double raw = span / 5.0;
  double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double f = raw / mag;
  double nf = f < 1.5 ? 1 : f < 3.5 ? 2 : f < 7.5 ? 5 : 10;
  return nf * mag;
}

std::string fmt_tick(double v) {
  char buf[32];
  if (v != 0 && (std::abs(v) >= 1e4 || std::abs(v) < 1e-3))
    std::snprintf(buf, sizeof buf, "%.1e", v);
  else
    std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

/// Minimal line plot writer; log axes plot log10 of the data with
/// decade ticks.
void write_svg(const std::string& path, const std::string& title,
               const std::string& xlabel, const std::string& ylabel,
               std::vector<Series> series, bool logx, bool logy) {
  const double W = 640, H = 440, L = 78, R = 24, Tm = 40, B = 56;
  auto tf = [&](std::vector<double>& v, bool lg) {
    if (!lg) return;
    for (double& x : v) x = std::log10(std::max(x, 1e-300));
  };
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (Series& s : series) {
    tf(s.x, logx);
    tf(s.y, logy);
    for (double v : s.x) { xmin = std::min(xmin, v); xmax = std::max(xmax, v); }
    for (double v : s.y) { ymin = std::min(ymin, v); ymax = std::max(ymax, v); }
  }
  if (series.empty() || xmin > xmax) { xmin = 0; xmax = 1; ymin = 0; ymax = 1; }
  if (xmax - xmin < 1e-12) { xmin -= 0.5; xmax += 0.5; }
  if (ymax - ymin < 1e-12) { ymin -= 0.5; ymax += 0.5; }
  double ypad = 0.05 * (ymax - ymin);
  ymin -= ypad, ymax += ypad;
  auto X = [&](double v) { return L + (v - xmin) / (xmax - xmin) * (W - L - R); };
  auto Y = [&](double v) { return H - B - (v - ymin) / (ymax - ymin) * (H - Tm - B); };

  std::ofstream os(path);
  if (!os) throw MechError("cannot write " + path);
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='"
     << H << "' viewBox='0 0 " << W << " " << H << "'>\n"
     << "<rect width='100%' height='100%' fill='white'/>\n"
     << "<style>text{font-family:sans-serif;font-size:12px}</style>\n";
  os << "<text x='" << W / 2 << "' y='22' text-anchor='middle' font-size='15'>"
     << title << "</text>\n";
  // frame
  os << "<rect x='" << L << "' y='" << Tm << "' width='" << W - L - R
     << "' height='" << H - Tm - B << "' fill='none' stroke='black'/>\n";
  // ticks
  auto ticks = [&](double lo, double hi, bool lg) {
    std::vector<double> tk;
    if (lg) {
      for (double d = std::ceil(lo); d <= std::floor(hi) + 1e-9; d += 1.0)
        tk.push_back(d);
      if (tk.size() < 2)
        for (double d = std::ceil(lo * 2) / 2; d <= hi; d += 0.5) tk.push_back(d);
    } else {
      double st = nice_step(hi - lo);
      for (double v = std::ceil(lo / st) * st; v <= hi + 1e-9 * st; v += st)
        tk.push_back(v);
    }
    return tk;
  };
  for (double v : ticks(xmin, xmax, logx)) {
    double px = X(v);
    os << "<line x1='" << px << "' y1='" << H - B << "' x2='" << px << "' y2='"
       << H - B + 5 << "' stroke='black'/>\n";
    os << "<text x='" << px << "' y='" << H - B + 18 << "' text-anchor='middle'>"
       << (logx ? "1e" + fmt_tick(v) : fmt_tick(v)) << "</text>\n";
  }
  for (double v : ticks(ymin, ymax, logy)) {
    double py = Y(v);
    os << "<line x1='" << L - 5 << "' y1='" << py << "' x2='" << L << "' y2='"
       << py << "' stroke='black'/>\n";
    os << "<text x='" << L - 8 << "' y='" << py + 4 << "' text-anchor='end'>"
       << (logy ? "1e" + fmt_tick(v) : fmt_tick(v)) << "</text>\n";
  }
  os << "<text x='" << (L + W - R) / 2 << "' y='" << H - 14
     << "' text-anchor='middle'>" << xlabel << "</text>\n";
  os << "<text x='18' y='" << (Tm + H - B) / 2
     << "' text-anchor='middle' transform='rotate(-90 18 " << (Tm + H - B) / 2
     << ")'>" << ylabel << "</text>\n";
  // curves + legend
  int ci = 0;
  double ly = Tm + 14;
  for (const Series& s : series) {
    const char* col = kPalette[ci % 8];
    os << "<polyline fill='none' stroke='" << col << "' stroke-width='1.5'"
       << (s.dashed ? " stroke-dasharray='6 4'" : "") << " points='";
    for (size_t i = 0; i < s.x.size(); ++i)
      os << X(s.x[i]) << "," << Y(s.y[i]) << " ";
    os << "'/>\n";
    os << "<line x1='" << W - R - 150 << "' y1='" << ly << "' x2='" << W - R - 126
       << "' y2='" << ly << "' stroke='" << col << "' stroke-width='1.5'"
       << (s.dashed ? " stroke-dasharray='6 4'" : "") << "/>\n";
    os << "<text x='" << W - R - 120 << "' y='" << ly + 4 << "'>" << s.label
       << "</text>\n";
    ly += 16;
    ++ci;
  }
  os << "</svg>\n";
}

}  // namespace

void emit_figures(const std::string& out_dir,
                  const std::vector<std::pair<std::string, ValidationReport>>& reports,
                  const std::vector<LabeledTrajectory>& trajectories,
                  const std::vector<std::string>& species_panel) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);

  // (a) T(t) solid and HRR(t) dashed, HRR max-normalized onto the T axis
  std::vector<Series> panel_a;
  for (const LabeledTrajectory& lt : trajectories) {
    Series st{lt.label + " T", {}, {}, false};
    Series sh{lt.label + " HRR", {}, {}, true};
    double hmax = 1e-300, tmax = 1e-300;
    for (int i = 0; i < lt.traj.n_steps(); ++i) {
      hmax = std::max(hmax, lt.traj.hrr[i]);
      tmax = std::max(tmax, lt.traj.T[i]);
    }
    for (int i = 0; i < lt.traj.n_steps(); ++i) {
      st.x.push_back(lt.traj.t[i]);
      st.y.push_back(lt.traj.T[i]);
      sh.x.push_back(lt.traj.t[i]);
      sh.y.push_back(lt.traj.hrr[i] / hmax * tmax);
    }
    panel_a.push_back(std::move(st));
    panel_a.push_back(std::move(sh));
  }
  write_svg(out_dir + "/fig_temperature_hrr.svg",
            "Temperature and heat release rate", "t [s]",
            "T [K]  (HRR max-normalized)", panel_a, false, false);

  // (b) max-normalized mole fractions of the panel species
  std::vector<Series> panel_b;
  for (const LabeledTrajectory& lt : trajectories) {
    if (!lt.mech) continue;
    for (const std::string& sp : species_panel) {
      int k = lt.mech->species_index(sp);
      if (k < 0) continue;
      Series s{lt.label + " " + sp, {}, {}, trajectories.size() > 1 && &lt != &trajectories.front()};
      double wk = lt.mech->species[k].molecular_weight;
      std::vector<double> xk(lt.traj.n_steps());
      double mx = 1e-300;
      for (int i = 0; i < lt.traj.n_steps(); ++i) {
        double denom = 0;
        for (int j = 0; j < lt.mech->n_species(); ++j)
          denom += lt.traj.Y(i, j) / lt.mech->species[j].molecular_weight;
        xk[i] = lt.traj.Y(i, k) / wk / std::max(denom, 1e-300);
        mx = std::max(mx, xk[i]);
      }
      for (int i = 0; i < lt.traj.n_steps(); ++i) {
        s.x.push_back(lt.traj.t[i]);
        s.y.push_back(xk[i] / mx);
      }
      panel_b.push_back(std::move(s));
    }
  }
  write_svg(out_dir + "/fig_species.svg", "Scaled species mole fractions",
            "t [s]", "X / max(X)", panel_b, false, false);

  // (c) tau vs 1000/T, log-y, detailed curve once + one per reduced mech
  std::vector<Series> panel_c;
  if (!reports.empty()) {
    Series det{"detailed", {}, {}, false};
    for (const PointResult& p : reports.front().second.points)
      if (p.det_ignited) {
        det.x.push_back(1000.0 / p.at.T0);
        det.y.push_back(p.tau_det);
      }
    panel_c.push_back(std::move(det));
  }
  for (const auto& [name, r] : reports) {
    Series s{name, {}, {}, true};
    for (const PointResult& p : r.points)
      if (p.red_ignited) {
        s.x.push_back(1000.0 / p.at.T0);
        s.y.push_back(p.tau_red);
      }
    panel_c.push_back(std::move(s));
  }
  write_svg(out_dir + "/fig_idt.svg", "Ignition delay times", "1000/T [1/K]",
            "tau_ig [s]", panel_c, false, true);
}

}  // namespace chemred
