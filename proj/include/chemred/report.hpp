#pragma once

#include <cstdint>

#include "chemred/kinetics.hpp"
#include "chemred/reactor.hpp"

namespace chemred {

struct GridPoint {
  double T0 = 0, P0 = kPatm, phi = 1.0;
};

/// 11 points equispaced over [1000, 2000] K at 1 atm, phi = 1.
std::vector<GridPoint> default_grid();

struct PointResult {
  GridPoint at;
  double tau_det = 0, tau_red = 0;      // s; 0 if non-igniting
  bool det_ignited = false, red_ignited = false;
  double rel_err_pct = 0;               // |tau_red - tau_det| / tau_det * 100
  double peak_hrr_det = 0, peak_hrr_red = 0;  // W/m3
};

struct ValidationReport {
  std::vector<PointResult> points;
  double avg_idt_error = 0;  // % over points where both ignite
  bool geometric_mean = false;
  int n_species_det = 0, n_reactions_det = 0;
  int n_species_red = 0, n_reactions_red = 0;
  std::string mech_hash_det, mech_hash_red;
  std::string config_hash;
  std::uint64_t seed = 0;
  // conventions in force; every report carries them so alternative
  // definitions can be compared later
  std::vector<std::string> decisions = {
      "idt=max dT/dt (parabolic vertex refinement)",
      "reactor=constant-pressure adiabatic",
      "error mean=arithmetic over relative errors",
  };
};

struct ValidateOptions {
  std::string fuel = "CH4";
  bool geometric_mean = false;
  int n_workers = 1;
  ReactorOptions reactor;
};

/// Integrates both mechanisms at every grid point.  Throws MechError if the
/// detailed mechanism fails to ignite anywhere on the grid.
ValidationReport validate_sweep(const Mechanism& detailed,
                                const Mechanism& reduced,
                                const std::vector<GridPoint>& grid,
                                const ValidateOptions& opt = {});

void write_report_csv(const ValidationReport& r, const std::string& path);
ValidationReport read_report_csv(const std::string& path);

/// Plain-text table mirroring the usual size/error comparison layout.
std::string summary_table(const std::vector<std::pair<std::string, ValidationReport>>& rows);

/// One labeled trajectory for the figure overlays.
struct LabeledTrajectory {
  std::string label;
  const Mechanism* mech = nullptr;
  Trajectory traj;
};

/// Self-contained SVGs in out_dir: fig_temperature_hrr.svg (T and HRR vs t),
/// fig_species.svg (max-normalized mole fractions), fig_idt.svg (tau vs
/// 1000/T, log scale).  reports: one (label, report) pair per mechanism for
/// the IDT panel; the detailed curve is taken from the first entry.
void emit_figures(const std::string& out_dir,
                  const std::vector<std::pair<std::string, ValidationReport>>& reports,
                  const std::vector<LabeledTrajectory>& trajectories,
                  const std::vector<std::string>& species_panel = {"CH4", "CO2", "HO2"});

}  // namespace chemred
