// Python bindings for the reduction pipeline's main operations.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "chemred/chemkin.hpp"
#include "chemred/reduce_ae.hpp"
#include "chemred/reduce_sm.hpp"
#include "chemred/report.hpp"

namespace py = pybind11;
using namespace chemred;

PYBIND11_MODULE(_chemred, m) {
  m.doc() = "chemical mechanism reduction: kinetics, DRGEP, GNN reducers";

  py::register_exception<MechError>(m, "MechError");

  py::class_<Mechanism>(m, "Mechanism")
      .def_property_readonly("n_species", &Mechanism::n_species)
      .def_property_readonly("n_reactions", &Mechanism::n_reactions)
      .def("species_index", &Mechanism::species_index)
      .def_property_readonly("species_names",
                             [](const Mechanism& mech) {
                               std::vector<std::string> out;
                               for (const auto& s : mech.species)
                                 out.push_back(s.name);
                               return out;
                             })
      .def("__repr__", [](const Mechanism& mech) {
        return "<Mechanism " + std::to_string(mech.n_species()) + " species, " +
               std::to_string(mech.n_reactions()) + " reactions>";
      });

  m.def("load_mechanism", &load_mechanism, py::arg("mech_path"),
        py::arg("thermo_path") = "");
  m.def("parse_mechanism", &parse_mechanism, py::arg("mech_text"),
        py::arg("thermo_text") = "");
  m.def("write_mechanism", &write_mechanism,
        "returns (mechanism_text, thermo_text)");
  m.def("mechanism_hash", &mechanism_content_hash);
  m.def("extract_submechanism",
        py::overload_cast<const Mechanism&, const std::set<std::string>&>(
            &extract_submechanism));

  py::class_<Trajectory>(m, "Trajectory")
      .def_readonly("P", &Trajectory::P)
      .def_readonly("t", &Trajectory::t)
      .def_readonly("T", &Trajectory::T)
      .def_readonly("hrr", &Trajectory::hrr)
      .def_readonly("Y", &Trajectory::Y)
      .def_property_readonly("n_steps", &Trajectory::n_steps);

  m.def(
      "ignite",
      [](const Mechanism& mech, double T0, double P0, const std::string& fuel,
         double phi, double t_end, bool stop_after_ignition) {
        Kinetics kin(mech);
        Eigen::VectorXd Y0 = mixture_from_phi(mech, fuel, phi);
        ReactorOptions ro;
        ro.t_end = t_end;
        ro.stop_after_ignition = stop_after_ignition;
        return integrate_constant_pressure(kin, T0, P0, Y0, ro);
      },
      py::arg("mech"), py::arg("T0"), py::arg("P0") = kPatm,
      py::arg("fuel") = "CH4", py::arg("phi") = 1.0, py::arg("t_end") = 10.0,
      py::arg("stop_after_ignition") = true,
      "constant-pressure autoignition from a fuel/air mixture");
  m.def("ignition_delay", [](const Trajectory& tr) -> py::object {
    auto tau = ignition_delay(tr);
    if (!tau) return py::none();
    return py::float_(*tau);
  });
  m.def("peak_heat_release", &peak_heat_release);

  m.def(
      "drgep_importance",
      [](const Mechanism& mech, const std::string& fuel, double T0, double P0,
         double phi) {
        Kinetics kin(mech);
        DrgepOptions o;
        o.fuel = fuel;
        o.phi = phi;
        o.conditions = {{T0, P0}};
        return overall_importance(mech, kin, o);
      },
      py::arg("mech"), py::arg("fuel") = "CH4", py::arg("T0") = 1500.0,
      py::arg("P0") = kPatm, py::arg("phi") = 1.0,
      "species importance R_A from one autoignition condition");
  m.def(
      "reduce_drgep",
      [](const Mechanism& mech, double epsilon, const std::string& fuel,
         std::vector<std::pair<double, double>> conditions, double phi) {
        DrgepOptions o;
        o.fuel = fuel;
        o.phi = phi;
        o.conditions = std::move(conditions);
        if (o.conditions.empty()) o.conditions = {{1500.0, kPatm}};
        DrgepReduction r = reduce_drgep(mech, o, epsilon);
        return py::make_tuple(r.mech, r.importance);
      },
      py::arg("mech"), py::arg("epsilon"), py::arg("fuel") = "CH4",
      py::arg("conditions") = std::vector<std::pair<double, double>>{},
      py::arg("phi") = 1.0, "returns (reduced mechanism, importance vector)");

  py::class_<ValidationReport>(m, "ValidationReport")
      .def_readonly("avg_idt_error", &ValidationReport::avg_idt_error)
      .def_readonly("n_species_red", &ValidationReport::n_species_red)
      .def_readonly("n_reactions_red", &ValidationReport::n_reactions_red)
      .def_property_readonly("points", [](const ValidationReport& r) {
        py::list out;
        for (const PointResult& p : r.points)
          out.append(py::dict(
              py::arg("T0") = p.at.T0, py::arg("tau_det") = p.tau_det,
              py::arg("tau_red") = p.tau_red,
              py::arg("rel_err_pct") = p.rel_err_pct,
              py::arg("red_ignited") = p.red_ignited));
        return out;
      });
  m.def(
      "validate",
      [](const Mechanism& det, const Mechanism& red, const std::string& fuel,
         std::vector<double> grid_T) {
        std::vector<GridPoint> grid;
        if (grid_T.empty())
          grid = default_grid();
        else
          for (double T : grid_T) grid.push_back({T, kPatm, 1.0});
        ValidateOptions opt;
        opt.fuel = fuel;
        return validate_sweep(det, red, grid, opt);
      },
      py::arg("detailed"), py::arg("reduced"), py::arg("fuel") = "CH4",
      py::arg("grid_T") = std::vector<double>{});

  // GNN reducers use their config structs wholesale
  py::class_<AeConfig>(m, "AeConfig")
      .def(py::init<>())
      .def_readwrite("d", &AeConfig::d)
      .def_readwrite("n_epochs", &AeConfig::n_epochs)
      .def_readwrite("lr", &AeConfig::lr)
      .def_readwrite("lambda_rec", &AeConfig::lambda_rec)
      .def_readwrite("lambda_sp", &AeConfig::lambda_sp)
      .def_readwrite("theta", &AeConfig::theta)
      .def_readwrite("seed", &AeConfig::seed)
      .def_readwrite("target_T", &AeConfig::target_T)
      .def_readwrite("target_P", &AeConfig::target_P)
      .def_readwrite("phi", &AeConfig::phi)
      .def_readwrite("fuel", &AeConfig::fuel)
      .def_readwrite("n_states", &AeConfig::n_states)
      .def_readwrite("budget", &AeConfig::budget);
  m.def(
      "reduce_gnn_ae",
      [](const Mechanism& mech, const AeConfig& cfg) {
        AeReduction r = iterate_prune(mech, cfg);
        return py::make_tuple(r.mech, r.scores, r.idt_err_target);
      },
      py::arg("mech"), py::arg("config") = AeConfig{},
      "returns (reduced mechanism, species scores, target-condition IDT error)");

  py::class_<SmConfig>(m, "SmConfig")
      .def(py::init<>())
      .def_readwrite("d", &SmConfig::d)
      .def_readwrite("n_epochs", &SmConfig::n_epochs)
      .def_readwrite("lr", &SmConfig::lr)
      .def_readwrite("lambda_sp", &SmConfig::lambda_sp)
      .def_readwrite("ratio", &SmConfig::ratio)
      .def_readwrite("ratios", &SmConfig::ratios)
      .def_readwrite("max_passes", &SmConfig::max_passes)
      .def_readwrite("seed", &SmConfig::seed)
      .def_readwrite("phi", &SmConfig::phi)
      .def_readwrite("fuel", &SmConfig::fuel)
      .def_readwrite("train_T", &SmConfig::train_T)
      .def_readwrite("states_per_traj", &SmConfig::states_per_traj)
      .def_readwrite("budget", &SmConfig::budget);
  m.def(
      "reduce_gnn_sm",
      [](const Mechanism& mech, const SmConfig& cfg) {
        SurrogateConfig sc;
        sc.fuel = cfg.fuel;
        sc.phi = cfg.phi;
        SurrogateModel sur = train_surrogate(mech, sc);
        SmReducerState st = iterate_passes(mech, sur, cfg);
        return st.mech;
      },
      py::arg("mech"), py::arg("config") = SmConfig{});
}
